use crate::error::{MuError, Result};
use crate::munit::MultUnitary;
use crate::tensor::linalg::{self, Mat, C64};
use crate::tensor::{realign_left, realign_right, Space};

/// Relative singular-value cutoff for slice spans.
pub const RANK_TOL: f64 = 1e-10;

/// The linear span of a family of operators on `H`, with an orthonormal
/// Hilbert–Schmidt basis `a_μ`.
///
/// The basis comes from the SVD of a realignment (descending singular values,
/// phase-normalized), so it is reproducible.
#[derive(Clone, Debug)]
pub struct SliceAlgebra {
    space: Space,
    basis: Vec<Mat>,
    singular_values: Vec<f64>,
}

impl SliceAlgebra {
    /// The span of the rows of `realigned`, each read as a row-major `d×d` matrix.
    pub fn from_rows(space: Space, realigned: &Mat) -> Result<Self> {
        let d = space.dim();
        if realigned.ncols() != d * d {
            return Err(MuError::Shape(format!("rows of length {} are not {d}×{d} matrices", realigned.ncols())));
        }
        let (rows, singular_values) = linalg::row_space_basis(realigned, RANK_TOL);
        let basis = rows.iter().map(|r| linalg::unflatten(r, d, d)).collect();
        Ok(SliceAlgebra { space, basis, singular_values })
    }

    /// The span of explicit matrices.
    pub fn span_of(space: Space, mats: &[Mat]) -> Result<Self> {
        let d = space.dim();
        if let Some(m) = mats.iter().find(|m| m.nrows() != d || m.ncols() != d) {
            return Err(MuError::Shape(format!("{}×{} matrix in a span on {space}", m.nrows(), m.ncols())));
        }
        let stacked = Mat::from_fn(mats.len().max(1), d * d, |k, idx| mats.get(k).map_or(linalg::ZERO, |m| m[(idx / d, idx % d)]));
        Self::from_rows(space, &stacked)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn basis(&self) -> &[Mat] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// `c_μ = ⟨a_μ, m⟩_HS`.
    pub fn coeffs(&self, m: &Mat) -> Vec<C64> {
        self.basis.iter().map(|a| linalg::hs_inner(a, m)).collect()
    }

    pub fn from_coeffs(&self, c: &[C64]) -> Mat {
        let d = self.dim();
        let mut out = Mat::zeros(d, d);
        for (a, &z) in self.basis.iter().zip(c) {
            out += a.map(|x| x * z);
        }
        out
    }

    /// Orthogonal projection onto the span.
    pub fn project(&self, m: &Mat) -> Mat {
        self.from_coeffs(&self.coeffs(m))
    }

    /// `‖m − P m‖` in operator norm.
    pub fn distance(&self, m: &Mat) -> f64 {
        linalg::op_norm(&(m - self.project(m)))
    }

    /// `max |⟨a_μ, a_ν⟩ − δ_μν|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let target = if i == j { linalg::ONE } else { linalg::ZERO };
                worst = worst.max((linalg::hs_inner(a, b) - target).norm());
            }
        }
        worst
    }

    /// `max ‖(1−P)(a_μ a_ν)‖` over basis pairs.
    pub fn closure_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in &self.basis {
            for b in &self.basis {
                worst = worst.max(self.distance(&(a * b)));
            }
        }
        worst
    }

    /// `max ‖(1−P)(a_μ*)‖`.
    pub fn star_residual(&self) -> f64 {
        self.basis.iter().map(|a| self.distance(&a.adjoint())).fold(0.0, f64::max)
    }

    /// `‖(1−P)I‖`.
    pub fn unital_residual(&self) -> f64 {
        self.distance(&Mat::identity(self.dim(), self.dim()))
    }

    /// Largest distance of a basis element of `other` from this span, in
    /// either direction; zero iff the spans coincide.
    pub fn mutual_residual(&self, other: &SliceAlgebra) -> f64 {
        let here = other.basis.iter().map(|b| self.distance(b)).fold(0.0, f64::max);
        let there = self.basis.iter().map(|a| other.distance(a)).fold(0.0, f64::max);
        here.max(there)
    }

    /// Linear map on coefficients induced by `f` on basis elements: column
    /// `ν` holds the coefficients of `f(a_ν)`. Also returns
    /// `max_ν ‖(1−P) f(a_ν)‖`.
    pub fn matrix_of(&self, f: impl Fn(&Mat) -> Mat) -> (Mat, f64) {
        let r = self.rank();
        let mut out = Mat::zeros(r, r);
        let mut leak: f64 = 0.0;
        for (nu, a) in self.basis.iter().enumerate() {
            let image = f(a);
            let c = self.coeffs(&image);
            leak = leak.max(linalg::op_norm(&(&image - self.from_coeffs(&c))));
            for (mu, z) in c.into_iter().enumerate() {
                out[(mu, nu)] = z;
            }
        }
        (out, leak)
    }

    /// Applies a coefficient-space map to an element of the span.
    pub fn apply(&self, map: &Mat, m: &Mat) -> Mat {
        let c = nalgebra::DVector::from_vec(self.coeffs(m));
        let image = map * c;
        self.from_coeffs(image.as_slice())
    }
}

/// `A = span{(ω⊗id)W}`.
pub fn algebra_left(w: &MultUnitary) -> Result<SliceAlgebra> {
    SliceAlgebra::from_rows(w.h_space(), &realign_left(w.op())?)
}

/// `Â = span{(id⊗ω)W*}`.
pub fn algebra_right(w: &MultUnitary) -> Result<SliceAlgebra> {
    SliceAlgebra::from_rows(w.h_space(), &realign_right(&w.op().adjoint())?)
}

/// Coefficients of `m` on `H⊗H` in the product basis `x_μ⊗y_ν`, and the
/// operator-norm residual `‖m − Σ c_μν x_μ⊗y_ν‖`.
pub fn product_decomposition(x: &SliceAlgebra, y: &SliceAlgebra, m: &Mat) -> (Mat, f64) {
    let mut coeffs = Mat::zeros(x.rank(), y.rank());
    let mut recon = Mat::zeros(m.nrows(), m.ncols());
    for (i, a) in x.basis().iter().enumerate() {
        for (j, b) in y.basis().iter().enumerate() {
            let ab = linalg::kron(a, b);
            let z = linalg::hs_inner(&ab, m);
            coeffs[(i, j)] = z;
            recon += ab.map(|v| v * z);
        }
    }
    (coeffs, linalg::op_norm(&(m - recon)))
}

/// `W ∈ span(Â)⊗span(A)`: the projection residual of `W`.
pub fn check_multiplier(w: &MultUnitary, a_hat: &SliceAlgebra, a: &SliceAlgebra) -> Result<f64> {
    if a_hat.space() != &w.h_space() || a.space() != &w.h_space() {
        return Err(MuError::Shape("algebras must live on the leg space of W".into()));
    }
    Ok(product_decomposition(a_hat, a, w.data()).1)
}
