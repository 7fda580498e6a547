use std::ops::Mul;

use super::functional::Functional;
use super::legs::LegLayout;
use super::linalg::{self, Mat, C64};
use super::space::Space;
use crate::error::{MuError, Result};

/// A linear map between two spaces, stored densely in the product bases.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    domain: Space,
    codomain: Space,
    data: Mat,
}

impl Operator {
    pub fn new(domain: Space, codomain: Space, data: Mat) -> Result<Self> {
        if data.nrows() != codomain.dim() || data.ncols() != domain.dim() {
            return Err(MuError::Shape(format!(
                "matrix is {}x{}, spaces need {}x{}",
                data.nrows(),
                data.ncols(),
                codomain.dim(),
                domain.dim()
            )));
        }
        Ok(Operator { domain, codomain, data })
    }

    /// An operator from `space` to itself.
    pub fn on(space: Space, data: Mat) -> Result<Self> {
        Operator::new(space.clone(), space, data)
    }

    pub fn identity(space: &Space) -> Self {
        let n = space.dim();
        Operator { domain: space.clone(), codomain: space.clone(), data: Mat::identity(n, n) }
    }

    pub fn zeros(space: &Space) -> Self {
        let n = space.dim();
        Operator { domain: space.clone(), codomain: space.clone(), data: Mat::zeros(n, n) }
    }

    pub fn diag(space: &Space, values: &[f64]) -> Result<Self> {
        Operator::on(space.clone(), linalg::diag_real(values))
    }

    pub fn domain(&self) -> &Space {
        &self.domain
    }

    pub fn codomain(&self) -> &Space {
        &self.codomain
    }

    /// The space of a square operator (its domain).
    pub fn space(&self) -> &Space {
        &self.domain
    }

    pub fn is_square(&self) -> bool {
        self.domain == self.codomain
    }

    pub fn data(&self) -> &Mat {
        &self.data
    }

    pub fn into_data(self) -> Mat {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.data[(row, col)]
    }

    /// Reinterprets the matrix on other spaces of the same dimensions.
    pub fn relabel(&self, domain: Space, codomain: Space) -> Result<Self> {
        Operator::new(domain, codomain, self.data.clone())
    }

    pub fn adjoint(&self) -> Self {
        Operator { domain: self.codomain.clone(), codomain: self.domain.clone(), data: self.data.adjoint() }
    }

    /// Transpose `m^⊤` acting between the conjugate spaces:
    /// `⟨x̄, m^⊤ ȳ⟩ = ⟨y, m x⟩`. In the fixed bases this is the plain matrix
    /// transpose with every conjugate flag toggled.
    pub fn transpose(&self) -> Self {
        Operator { domain: self.codomain.conj(), codomain: self.domain.conj(), data: self.data.transpose() }
    }

    /// Entrywise complex conjugate in the fixed basis, on the conjugate spaces.
    pub fn conj(&self) -> Self {
        Operator { domain: self.domain.conj(), codomain: self.codomain.conj(), data: self.data.map(|z| z.conj()) }
    }

    /// Transpose of a single leg of a square operator on a product space.
    pub fn partial_transpose(&self, leg: usize) -> Result<Self> {
        if !self.is_square() {
            return Err(MuError::Shape("partial transpose needs a square operator".into()));
        }
        let dims = self.domain.dims();
        if leg >= dims.len() {
            return Err(MuError::Shape(format!("leg {leg} out of range")));
        }
        let n = self.dim();
        let stride: usize = dims[leg + 1..].iter().product();
        let d = dims[leg];
        let digit = |idx: usize| (idx / stride) % d;
        let mut out = Mat::zeros(n, n);
        for r in 0..n {
            for col in 0..n {
                let (a, b) = (digit(r), digit(col));
                let r2 = r - a * stride + b * stride;
                let c2 = col - b * stride + a * stride;
                out[(r2, c2)] = self.data[(r, col)];
            }
        }
        let space = self.domain.conj_leg(leg);
        Operator::on(space, out)
    }

    pub fn compose(&self, rhs: &Operator) -> Result<Self> {
        if self.domain != rhs.codomain {
            return Err(MuError::Shape(format!("cannot compose: {} vs {}", self.domain, rhs.codomain)));
        }
        Ok(Operator { domain: rhs.domain.clone(), codomain: self.codomain.clone(), data: &self.data * &rhs.data })
    }

    pub fn add(&self, rhs: &Operator) -> Result<Self> {
        self.same_shape(rhs)?;
        Ok(Operator { data: &self.data + &rhs.data, ..self.clone() })
    }

    pub fn sub(&self, rhs: &Operator) -> Result<Self> {
        self.same_shape(rhs)?;
        Ok(Operator { data: &self.data - &rhs.data, ..self.clone() })
    }

    pub fn scale(&self, factor: C64) -> Self {
        Operator { data: self.data.map(|z| z * factor), ..self.clone() }
    }

    fn same_shape(&self, rhs: &Operator) -> Result<()> {
        if self.domain != rhs.domain || self.codomain != rhs.codomain {
            return Err(MuError::Shape(format!(
                "operators act on different spaces: {} -> {} vs {} -> {}",
                self.domain, self.codomain, rhs.domain, rhs.codomain
            )));
        }
        Ok(())
    }

    /// Kronecker product; the factor lists are concatenated.
    pub fn tensor(&self, rhs: &Operator) -> Self {
        Operator {
            domain: self.domain.tensor(&rhs.domain),
            codomain: self.codomain.tensor(&rhs.codomain),
            data: linalg::kron(&self.data, &rhs.data),
        }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        linalg::matvec(&self.data, v)
    }

    /// Operator norm (largest singular value).
    pub fn norm(&self) -> f64 {
        linalg::op_norm(&self.data)
    }

    pub fn norm_inf(&self) -> f64 {
        linalg::inf_norm(&self.data)
    }

    pub fn norm_fro(&self) -> f64 {
        linalg::fro_norm(&self.data)
    }

    /// `‖m − other‖` in operator norm, ignoring space labels.
    pub fn distance(&self, other: &Operator) -> f64 {
        linalg::op_norm(&(&self.data - &other.data))
    }

    /// `‖U*U − I‖`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.data.ncols();
        linalg::op_norm(&(self.data.adjoint() * &self.data - Mat::identity(n, n)))
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::fro_norm(&(&self.data - self.data.adjoint()))
    }
}

impl Mul for &Operator {
    type Output = Operator;

    /// Composition; panics when the spaces do not line up. Use
    /// [`Operator::compose`] for a checked version.
    fn mul(self, rhs: &Operator) -> Operator {
        self.compose(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

/// Kronecker product of two operators.
pub fn tensor(a: &Operator, b: &Operator) -> Operator {
    a.tensor(b)
}

/// Places `u` on the given legs (0-based) of `ambient`, identity elsewhere.
/// Legs need not be adjacent or ascending.
pub fn leg_embed(u: &Operator, legs: &[usize], ambient: &Space) -> Result<Operator> {
    if !u.is_square() {
        return Err(MuError::Shape("leg_embed needs a square operator".into()));
    }
    let selected = ambient.select(legs)?;
    if &selected != u.space() {
        return Err(MuError::Shape(format!("operator acts on {}, legs {:?} of ambient are {}", u.space(), legs, selected)));
    }
    let layout = LegLayout::new(&ambient.dims(), legs)?;
    Operator::on(ambient.clone(), layout.embed(u.data()))
}

/// The flip `Σ(x⊗y) = y⊗x` on a two-factor space.
pub fn flip(space: &Space) -> Result<Operator> {
    if space.len() != 2 {
        return Err(MuError::Shape(format!("flip needs two factors, got {}", space.len())));
    }
    let (d1, d2) = (space.factors()[0].dim, space.factors()[1].dim);
    let n = d1 * d2;
    let mut m = Mat::zeros(n, n);
    for x in 0..d1 {
        for y in 0..d2 {
            m[(y * d1 + x, x * d2 + y)] = linalg::ONE;
        }
    }
    Operator::new(space.clone(), space.swapped(), m)
}

pub fn transpose(m: &Operator) -> Operator {
    m.transpose()
}

fn two_leg_dims(w: &Operator) -> Result<(usize, usize)> {
    if !w.is_square() || w.space().len() != 2 {
        return Err(MuError::Shape(format!("expected a square operator on two factors, got {}", w.space())));
    }
    let f = w.space().factors();
    Ok((f[0].dim, f[1].dim))
}

/// `(ω⊗id)w`, slicing the first leg.
pub fn slice_left(w: &Operator, omega: &Functional) -> Result<Operator> {
    let (d1, d2) = two_leg_dims(w)?;
    if omega.space() != &w.space().select(&[0])? {
        return Err(MuError::Shape(format!("functional lives on {}, first leg is {}", omega.space(), w.space().select(&[0])?)));
    }
    let f = omega.frame();
    let data = Mat::from_fn(d2, d2, |u, y| {
        let mut acc = linalg::ZERO;
        for i in 0..d1 {
            for j in 0..d1 {
                acc += f[(j, i)] * w.data[(i * d2 + u, j * d2 + y)];
            }
        }
        acc
    });
    Operator::on(w.space().select(&[1])?, data)
}

/// `(id⊗ω)w`, slicing the second leg.
pub fn slice_right(w: &Operator, omega: &Functional) -> Result<Operator> {
    let (d1, d2) = two_leg_dims(w)?;
    if omega.space() != &w.space().select(&[1])? {
        return Err(MuError::Shape(format!("functional lives on {}, second leg is {}", omega.space(), w.space().select(&[1])?)));
    }
    let f = omega.frame();
    let data = Mat::from_fn(d1, d1, |x, z| {
        let mut acc = linalg::ZERO;
        for i in 0..d2 {
            for j in 0..d2 {
                acc += f[(j, i)] * w.data[(x * d2 + i, z * d2 + j)];
            }
        }
        acc
    });
    Operator::on(w.space().select(&[0])?, data)
}

/// Realignment for left slices: row `(i,j)` is the row-major flattening of
/// the slice `B_ij` with `(B_ij)_{u,y} = w_{(i,u),(j,y)}`. The row space is
/// the span of all `(ω⊗id)w`.
pub fn realign_left(w: &Operator) -> Result<Mat> {
    let (d1, d2) = two_leg_dims(w)?;
    Ok(Mat::from_fn(d1 * d1, d2 * d2, |row, col| {
        let (i, j) = (row / d1, row % d1);
        let (u, y) = (col / d2, col % d2);
        w.data[(i * d2 + u, j * d2 + y)]
    }))
}

/// Realignment for right slices: row `(i,j)` is the flattening of
/// `(C_ij)_{x,z} = w_{(x,i),(z,j)}`, spanning all `(id⊗ω)w`.
pub fn realign_right(w: &Operator) -> Result<Mat> {
    let (d1, d2) = two_leg_dims(w)?;
    Ok(Mat::from_fn(d2 * d2, d1 * d1, |row, col| {
        let (i, j) = (row / d2, row % d2);
        let (x, z) = (col / d1, col % d1);
        w.data[(x * d2 + i, z * d2 + j)]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::linalg::{c, max_abs, real_matrix};

    fn cnot() -> Operator {
        Operator::on(
            Space::power(2, 2),
            real_matrix(&[&[1., 0., 0., 0.], &[0., 1., 0., 0.], &[0., 0., 0., 1.], &[0., 0., 1., 0.]]),
        )
        .unwrap()
    }

    fn xflip() -> Operator {
        Operator::on(Space::hilbert(2), real_matrix(&[&[0., 1.], &[1., 0.]])).unwrap()
    }

    fn basis(n: usize, k: usize) -> Vec<C64> {
        let mut v = vec![linalg::ZERO; n];
        v[k] = linalg::ONE;
        v
    }

    #[test]
    fn tensor_examples() {
        let i2 = Operator::identity(&Space::hilbert(2));
        assert_eq!(tensor(&i2, &i2).data(), &Mat::identity(4, 4));
        let d = Operator::diag(&Space::hilbert(2), &[1.0, 2.0]).unwrap();
        let t = tensor(&d, &i2);
        assert_eq!(t.data(), &linalg::diag_real(&[1.0, 1.0, 2.0, 2.0]));
        assert_eq!(t.space().dims(), vec![2, 2]);
        let xx = tensor(&xflip(), &xflip());
        assert_eq!(xx.apply(&basis(4, 0)), basis(4, 3));
    }

    #[test]
    fn leg_embed_examples() {
        let h3 = Space::power(2, 3);
        let id = leg_embed(&Operator::identity(&Space::power(2, 2)), &[0, 1], &h3).unwrap();
        assert_eq!(id.data(), &Mat::identity(8, 8));

        // brute-force Kronecker assembly
        let e12 = leg_embed(&cnot(), &[0, 1], &h3).unwrap();
        let brute = linalg::kron(cnot().data(), &Mat::identity(2, 2));
        assert_eq!(e12.data(), &brute);

        // CNOT on legs (1,3): e1⊗e0⊗e0 -> e1⊗e0⊗e1, checked over all basis vectors
        let e13 = leg_embed(&cnot(), &[0, 2], &h3).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                for cc in 0..2 {
                    let input = basis(8, a * 4 + b * 2 + cc);
                    let expect = basis(8, a * 4 + b * 2 + (cc ^ a));
                    assert_eq!(e13.apply(&input), expect);
                }
            }
        }
    }

    #[test]
    fn leg_embed_rejects_mismatch() {
        let amb = Space::from_dims(&[2, 3]);
        assert!(leg_embed(&cnot(), &[0, 1], &amb).is_err());
    }

    #[test]
    fn flip_examples() {
        let s = flip(&Space::power(2, 2)).unwrap();
        assert_eq!(s.apply(&basis(4, 1)), basis(4, 2));
        assert_eq!((&s * &s).data(), &Mat::identity(4, 4));
        let conj = &(&s * &cnot()) * &s;
        let expected = real_matrix(&[&[1., 0., 0., 0.], &[0., 0., 0., 1.], &[0., 0., 1., 0.], &[0., 1., 0., 0.]]);
        assert_eq!(conj.data(), &expected);
    }

    #[test]
    fn flip_swaps_codomain_order() {
        let s = flip(&Space::from_dims(&[2, 3])).unwrap();
        assert_eq!(s.codomain().dims(), vec![3, 2]);
        // x⊗y with x=e1 (dim 2), y=e2 (dim 3) -> y⊗x
        let out = s.apply(&basis(6, 3 + 2));
        assert_eq!(out, basis(6, 2 * 2 + 1));
    }

    #[test]
    fn transpose_examples() {
        let d = Operator::diag(&Space::hilbert(2), &[1.0, 2.0]).unwrap();
        let dt = d.transpose();
        assert_eq!(dt.data(), d.data());
        assert!(dt.space().factors()[0].conjugate);
        let n = Operator::on(Space::hilbert(2), real_matrix(&[&[0., 1.], &[0., 0.]])).unwrap();
        assert_eq!(n.transpose().data(), &real_matrix(&[&[0., 0.], &[1., 0.]]));
        let m = Operator::on(Space::hilbert(3), Mat::from_fn(3, 3, |i, j| c(i as f64 + 0.5, j as f64 - 1.0))).unwrap();
        assert_eq!(m.transpose().transpose(), m);
    }

    #[test]
    fn transpose_inner_product_rule() {
        // ⟨x̄, m^⊤ ȳ⟩ = ⟨y, m x⟩
        let m = Mat::from_fn(3, 3, |i, j| c((i * 3 + j) as f64, (i as f64) * 0.3 - j as f64));
        let op = Operator::on(Space::hilbert(3), m).unwrap();
        let x = vec![c(1.0, 2.0), c(-0.5, 0.1), c(0.0, 1.0)];
        let y = vec![c(0.3, -1.0), c(2.0, 0.0), c(1.0, 1.0)];
        let lhs = linalg::vdot(&linalg::vec_conj(&x), &op.transpose().apply(&linalg::vec_conj(&y)));
        let rhs = linalg::vdot(&y, &op.apply(&x));
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn partial_transpose_of_cnot_is_cnot() {
        let pt = cnot().partial_transpose(0).unwrap();
        assert_eq!(pt.data(), cnot().data());
        assert!(pt.space().factors()[0].conjugate);
        assert!(!pt.space().factors()[1].conjugate);
    }

    #[test]
    fn slice_examples() {
        let h = Space::hilbert(2);
        let s00 = slice_left(&cnot(), &Functional::matrix_unit(&h, 0, 0)).unwrap();
        assert_eq!(s00.data(), &Mat::identity(2, 2));
        let s11 = slice_left(&cnot(), &Functional::matrix_unit(&h, 1, 1)).unwrap();
        assert_eq!(s11.data(), xflip().data());

        let m = Operator::on(h.clone(), real_matrix(&[&[1., 2.], &[3., 4.]])).unwrap();
        let im = tensor(&Operator::identity(&h), &m);
        let omega = Functional::vector_state(&h, &[c(0.6, 0.0), c(0.0, 0.8)], &[c(0.6, 0.0), c(0.0, 0.8)]);
        let sl = slice_left(&im, &omega).unwrap();
        assert!(max_abs(&(sl.data() - m.data())) < 1e-14);
    }

    #[test]
    fn slice_right_of_product() {
        let h = Space::hilbert(2);
        let m = Operator::on(h.clone(), real_matrix(&[&[1., 2.], &[3., 4.]])).unwrap();
        let mi = tensor(&m, &Operator::identity(&h));
        let sl = slice_right(&mi, &Functional::matrix_unit(&h, 1, 1)).unwrap();
        assert_eq!(sl.data(), m.data());
    }

    #[test]
    fn realign_rows_reproduce_matrix_unit_slices() {
        let w = Operator::on(Space::power(2, 2), Mat::from_fn(4, 4, |i, j| c(i as f64 - j as f64, (i * j) as f64))).unwrap();
        let r = realign_left(&w).unwrap();
        let h = Space::hilbert(2);
        for i in 0..2 {
            for j in 0..2 {
                let s = slice_left(&w, &Functional::matrix_unit(&h, i, j)).unwrap();
                let row: Vec<C64> = r.row(i * 2 + j).iter().cloned().collect();
                assert_eq!(row, linalg::flatten(s.data()));
            }
        }
        let rr = realign_right(&w).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let s = slice_right(&w, &Functional::matrix_unit(&h, i, j)).unwrap();
                let row: Vec<C64> = rr.row(i * 2 + j).iter().cloned().collect();
                assert_eq!(row, linalg::flatten(s.data()));
            }
        }
    }

    #[test]
    fn realign_ranks() {
        assert_eq!(linalg::rank(&realign_left(&cnot()).unwrap(), 1e-10), 2);
        let id = Operator::identity(&Space::power(2, 2));
        assert_eq!(linalg::rank(&realign_left(&id).unwrap(), 1e-10), 1);
    }
}
