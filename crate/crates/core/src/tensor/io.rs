//! Operator file formats.
//!
//! JSON: `{"space":{"factors":[{"dim":d,"conjugate":false},...]},"data":[[re,im],...]}`
//! with the matrix in row-major order.
//!
//! Binary: magic `MUOP`, `u16` version, `u32` factor count, then per factor a
//! `u64` dimension and a `u8` conjugate flag, then the row-major entries as
//! interleaved little-endian `f64` real/imaginary pairs.
//!
//! Both formats round-trip bit-exactly.

use serde::{Deserialize, Serialize};

use super::linalg::{Mat, C64};
use super::operator::Operator;
use super::space::{Factor, Space};
use crate::error::{MuError, Result};

pub const MAGIC: &[u8; 4] = b"MUOP";
pub const VERSION: u16 = 1;

#[derive(Serialize, Deserialize)]
struct OperatorFile {
    space: Space,
    data: Vec<[f64; 2]>,
}

fn square(op: &Operator) -> Result<()> {
    if !op.is_square() {
        return Err(MuError::Shape("file formats store operators from a space to itself".into()));
    }
    if op.data().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(MuError::Parameter("operator has non-finite entries".into()));
    }
    Ok(())
}

fn row_major(op: &Operator) -> Vec<[f64; 2]> {
    let m = op.data();
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            out.push([z.re, z.im]);
        }
    }
    out
}

/// A bare complex matrix in row-major `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatRecord {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&Mat> for MatRecord {
    fn from(m: &Mat) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push([m[(i, j)].re, m[(i, j)].im]);
            }
        }
        MatRecord { rows: m.nrows(), cols: m.ncols(), data }
    }
}

impl TryFrom<&MatRecord> for Mat {
    type Error = MuError;

    fn try_from(r: &MatRecord) -> Result<Mat> {
        if r.data.len() != r.rows * r.cols {
            return Err(MuError::Parse(format!("{}×{} matrix with {} entries", r.rows, r.cols, r.data.len())));
        }
        Ok(Mat::from_fn(r.rows, r.cols, |i, j| {
            let [re, im] = r.data[i * r.cols + j];
            C64::new(re, im)
        }))
    }
}

pub fn to_json(op: &Operator) -> Result<String> {
    square(op)?;
    let file = OperatorFile { space: op.space().clone(), data: row_major(op) };
    serde_json::to_string(&file).map_err(|e| MuError::Parse(e.to_string()))
}

pub fn from_json(text: &str) -> Result<Operator> {
    let file: OperatorFile = serde_json::from_str(text).map_err(|e| MuError::Parse(e.to_string()))?;
    let n = file.space.dim();
    if file.data.len() != n * n {
        return Err(MuError::Parse(format!("expected {} entries, found {}", n * n, file.data.len())));
    }
    let data = Mat::from_fn(n, n, |i, j| {
        let [re, im] = file.data[i * n + j];
        C64::new(re, im)
    });
    Operator::on(file.space, data)
}

pub fn to_binary(op: &Operator) -> Result<Vec<u8>> {
    square(op)?;
    let space = op.space();
    let n = space.dim();
    let mut out = Vec::with_capacity(10 + 9 * space.len() + 16 * n * n);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(space.len() as u32).to_le_bytes());
    for f in space.factors() {
        out.extend_from_slice(&(f.dim as u64).to_le_bytes());
        out.push(u8::from(f.conjugate));
    }
    for [re, im] in row_major(op) {
        out.extend_from_slice(&re.to_le_bytes());
        out.extend_from_slice(&im.to_le_bytes());
    }
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or_else(|| MuError::Parse("truncated binary operator".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }
}

pub fn from_binary(bytes: &[u8]) -> Result<Operator> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(MuError::Parse("bad magic bytes".into()));
    }
    let version = u16::from_le_bytes(r.array()?);
    if version != VERSION {
        return Err(MuError::Parse(format!("unsupported version {version}")));
    }
    let count = u32::from_le_bytes(r.array()?) as usize;
    let mut factors = Vec::with_capacity(count.min(64));
    for _ in 0..count {
        let dim = u64::from_le_bytes(r.array()?);
        let conjugate = match r.array::<1>()?[0] {
            0 => false,
            1 => true,
            b => return Err(MuError::Parse(format!("bad conjugate flag {b}"))),
        };
        let dim = usize::try_from(dim).map_err(|_| MuError::Parse("dimension overflow".into()))?;
        factors.push(Factor { dim, conjugate });
    }
    let space = Space::new(factors).map_err(|e| MuError::Parse(e.to_string()))?;
    let n = space.dim();
    let expected = n.checked_mul(n).and_then(|m| m.checked_mul(16)).ok_or_else(|| MuError::Parse("dimension overflow".into()))?;
    if bytes.len() - r.pos != expected {
        return Err(MuError::Parse(format!("expected {expected} data bytes, found {}", bytes.len() - r.pos)));
    }
    let mut entries = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        let re = f64::from_le_bytes(r.array()?);
        let im = f64::from_le_bytes(r.array()?);
        entries.push(C64::new(re, im));
    }
    Operator::on(space, Mat::from_fn(n, n, |i, j| entries[i * n + j]))
}
