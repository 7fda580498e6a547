//! Leg placement: acting with a small operator on selected tensor factors.

use super::linalg::{Mat, C64, ZERO};
use crate::error::{MuError, Result};

/// Index bookkeeping for an operator sitting on `legs` of a product space
/// with factor dimensions `dims`.
#[derive(Clone, Debug)]
pub struct LegLayout {
    total: usize,
    sub_dim: usize,
    /// Flat offset of each sub-index (legs in the given order, first most significant).
    offsets: Vec<usize>,
    /// Flat indices whose coordinates on `legs` are all zero.
    bases: Vec<usize>,
}

impl LegLayout {
    pub fn new(dims: &[usize], legs: &[usize]) -> Result<Self> {
        for (i, &l) in legs.iter().enumerate() {
            if l >= dims.len() {
                return Err(MuError::Shape(format!("leg {l} out of range for {} factors", dims.len())));
            }
            if legs[..i].contains(&l) {
                return Err(MuError::Shape(format!("leg {l} listed twice")));
            }
        }
        let n = dims.len();
        let mut strides = vec![1usize; n];
        for k in (0..n.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let total: usize = dims.iter().product();
        let sub_dim: usize = legs.iter().map(|&l| dims[l]).product();

        let mut offsets = Vec::with_capacity(sub_dim);
        for k in 0..sub_dim {
            let mut rem = k;
            let mut off = 0;
            for &l in legs.iter().rev() {
                off += (rem % dims[l]) * strides[l];
                rem /= dims[l];
            }
            offsets.push(off);
        }

        let rest: Vec<usize> = (0..n).filter(|k| !legs.contains(k)).collect();
        let rest_total: usize = rest.iter().map(|&l| dims[l]).product();
        let mut bases = Vec::with_capacity(rest_total);
        for k in 0..rest_total {
            let mut rem = k;
            let mut off = 0;
            for &l in rest.iter().rev() {
                off += (rem % dims[l]) * strides[l];
                rem /= dims[l];
            }
            bases.push(off);
        }
        Ok(LegLayout { total, sub_dim, offsets, bases })
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn sub_dim(&self) -> usize {
        self.sub_dim
    }

    /// Applies `u` (a `sub_dim × sub_dim` matrix) on the legs of `v`.
    pub fn apply(&self, u: &Mat, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.total, "vector length does not match the layout");
        assert_eq!((u.nrows(), u.ncols()), (self.sub_dim, self.sub_dim), "operator does not match the legs");
        let m = self.sub_dim;
        let mut out = vec![ZERO; self.total];
        let mut x = vec![ZERO; m];
        for &base in &self.bases {
            for (k, off) in self.offsets.iter().enumerate() {
                x[k] = v[base + off];
            }
            for a in 0..m {
                let mut acc = ZERO;
                for b in 0..m {
                    acc += u[(a, b)] * x[b];
                }
                out[base + self.offsets[a]] = acc;
            }
        }
        out
    }

    /// Dense matrix of `u` placed on the legs, identity elsewhere.
    pub fn embed(&self, u: &Mat) -> Mat {
        assert_eq!((u.nrows(), u.ncols()), (self.sub_dim, self.sub_dim), "operator does not match the legs");
        let mut out = Mat::zeros(self.total, self.total);
        for &base in &self.bases {
            for (a, oa) in self.offsets.iter().enumerate() {
                for (b, ob) in self.offsets.iter().enumerate() {
                    out[(base + oa, base + ob)] = u[(a, b)];
                }
            }
        }
        out
    }
}

/// Applies `u` on `legs` of a vector over a product space with factor dims `dims`.
pub fn apply_on_legs(u: &Mat, legs: &[usize], dims: &[usize], v: &[C64]) -> Result<Vec<C64>> {
    let layout = LegLayout::new(dims, legs)?;
    if (u.nrows(), u.ncols()) != (layout.sub_dim, layout.sub_dim) {
        return Err(MuError::Shape(format!(
            "operator is {}x{}, legs {:?} need {}",
            u.nrows(),
            u.ncols(),
            legs,
            layout.sub_dim
        )));
    }
    if v.len() != layout.total {
        return Err(MuError::Shape(format!("vector length {} != {}", v.len(), layout.total)));
    }
    Ok(layout.apply(u, v))
}
