use nalgebra::SymmetricEigen;

use super::linalg::{self, Mat, C64};
use super::operator::Operator;
use super::space::Space;
use crate::error::{MuError, Result};

/// Relative tolerance for hermiticity on construction.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Relative tolerance for the spectral reconstruction check.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;

/// A positive operator with trivial kernel and its cached spectral
/// decomposition `P = U diag(λ) U*`, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct PositiveOperator {
    op: Operator,
    eigenvalues: Vec<f64>,
    eigenvectors: Mat,
}

impl PositiveOperator {
    pub fn new(op: Operator) -> Result<Self> {
        if !op.is_square() {
            return Err(MuError::Shape("a positive operator must be square".into()));
        }
        let scale = op.norm_fro().max(f64::MIN_POSITIVE);
        let herm = op.hermiticity_defect();
        if herm > HERMITIAN_TOL * scale {
            return Err(MuError::Positivity(format!("not Hermitian: ‖P − P*‖ = {herm:e}")));
        }
        let sym = (op.data() + op.data().adjoint()).map(|z| z * 0.5);
        let eig = SymmetricEigen::new(sym);
        let n = op.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let eigenvectors = Mat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Self::from_parts(op, eigenvalues, eigenvectors)
    }

    /// Builds `U diag(λ) U*` from a known spectral decomposition.
    pub fn from_spectral(space: &Space, eigenvalues: Vec<f64>, eigenvectors: Mat) -> Result<Self> {
        let n = space.dim();
        if eigenvalues.len() != n || eigenvectors.nrows() != n || eigenvectors.ncols() != n {
            return Err(MuError::Shape(format!("spectral data does not match dimension {n}")));
        }
        let u_defect = linalg::op_norm(&(eigenvectors.adjoint() * &eigenvectors - Mat::identity(n, n)));
        if u_defect > RECONSTRUCTION_TOL {
            return Err(MuError::Positivity(format!("eigenvector frame not unitary: defect {u_defect:e}")));
        }
        let data = &eigenvectors * linalg::diag_real(&eigenvalues) * eigenvectors.adjoint();
        Self::from_parts(Operator::on(space.clone(), data)?, eigenvalues, eigenvectors)
    }

    fn from_parts(op: Operator, eigenvalues: Vec<f64>, eigenvectors: Mat) -> Result<Self> {
        if let Some(bad) = eigenvalues.iter().find(|&&l| !(l > 0.0) || !l.is_finite()) {
            return Err(MuError::Positivity(format!("eigenvalue {bad:e} is not strictly positive")));
        }
        let p = PositiveOperator { op, eigenvalues, eigenvectors };
        let recon = p.reconstruction_residual();
        let scale = p.op.norm_fro().max(f64::MIN_POSITIVE);
        if recon > RECONSTRUCTION_TOL * scale {
            return Err(MuError::Positivity(format!("spectral reconstruction residual {recon:e}")));
        }
        Ok(p)
    }

    pub fn from_diag(space: &Space, values: &[f64]) -> Result<Self> {
        let n = space.dim();
        if values.len() != n {
            return Err(MuError::Shape(format!("{} diagonal entries for dimension {n}", values.len())));
        }
        Self::from_spectral(space, values.to_vec(), Mat::identity(n, n))
    }

    pub fn identity(space: &Space) -> Self {
        Self::from_diag(space, &vec![1.0; space.dim()]).expect("identity is positive")
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn space(&self) -> &Space {
        self.op.space()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &Mat {
        &self.eigenvectors
    }

    /// `‖U diag(λ) U* − P‖` in operator norm.
    pub fn reconstruction_residual(&self) -> f64 {
        let recon = &self.eigenvectors * linalg::diag_real(&self.eigenvalues) * self.eigenvectors.adjoint();
        linalg::op_norm(&(recon - self.op.data()))
    }

    /// Applies `f` to the spectrum: `U diag(f(λ)) U*`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> Operator {
        let n = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for j in 0..n {
            let fj = f(self.eigenvalues[j]);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        let data = scaled * self.eigenvectors.adjoint();
        Operator::on(self.space().clone(), data).expect("square by construction")
    }

    /// `P^z` through the principal logarithm of the eigenvalues.
    pub fn pow(&self, z: C64) -> Operator {
        self.map_spectrum(|l| (z * l.ln()).exp())
    }

    /// The unitary `P^{it}`.
    pub fn it(&self, t: f64) -> Operator {
        self.pow(C64::new(0.0, t))
    }

    pub fn log(&self) -> Operator {
        self.map_spectrum(|l| C64::new(l.ln(), 0.0))
    }

    pub fn inverse(&self) -> PositiveOperator {
        let eigenvalues: Vec<f64> = self.eigenvalues.iter().map(|l| 1.0 / l).collect();
        let op = self.map_spectrum(|l| C64::new(1.0 / l, 0.0));
        PositiveOperator { op, eigenvalues, eigenvectors: self.eigenvectors.clone() }
    }

    pub fn scaled(&self, lambda: f64) -> Result<PositiveOperator> {
        if !(lambda > 0.0) {
            return Err(MuError::Positivity(format!("scale {lambda} must be positive")));
        }
        let eigenvalues: Vec<f64> = self.eigenvalues.iter().map(|l| l * lambda).collect();
        Ok(PositiveOperator { op: self.op.scale(C64::new(lambda, 0.0)), eigenvalues, eigenvectors: self.eigenvectors.clone() })
    }

    /// `P^⊤` on the conjugate space; same spectrum, conjugated eigenvectors.
    pub fn transpose(&self) -> PositiveOperator {
        PositiveOperator {
            op: self.op.transpose(),
            eigenvalues: self.eigenvalues.clone(),
            eigenvectors: self.eigenvectors.map(|z| z.conj()),
        }
    }

    /// `P⊗P'` with the product spectral decomposition.
    pub fn tensor(&self, other: &PositiveOperator) -> PositiveOperator {
        let mut eigenvalues = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.eigenvalues {
            for b in &other.eigenvalues {
                eigenvalues.push(a * b);
            }
        }
        PositiveOperator {
            op: self.op.tensor(&other.op),
            eigenvalues,
            eigenvectors: linalg::kron(&self.eigenvectors, &other.eigenvectors),
        }
    }
}

/// `p^z` for a positive operator with trivial kernel.
pub fn mat_pow(p: &PositiveOperator, z: C64) -> Operator {
    p.pow(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::linalg::{c, max_abs, real_matrix};

    #[test]
    fn diagonal_root() {
        let p = PositiveOperator::from_diag(&Space::hilbert(2), &[1.0, 4.0]).unwrap();
        let r = mat_pow(&p, c(0.5, 0.0));
        assert!(max_abs(&(r.data() - linalg::diag_real(&[1.0, 2.0]))) < 1e-15);
    }

    #[test]
    fn identity_power_is_identity() {
        let p = PositiveOperator::identity(&Space::hilbert(3));
        for z in [c(0.0, 1.3), c(-2.0, 0.4), c(7.0, 0.0)] {
            assert!(max_abs(&(p.pow(z).data() - Mat::identity(3, 3))) < 1e-15);
        }
    }

    #[test]
    fn full_turn_imaginary_power() {
        // 4^{iπ/ln2} = e^{2πi} = 1
        let p = PositiveOperator::from_diag(&Space::hilbert(2), &[1.0, 4.0]).unwrap();
        let r = mat_pow(&p, c(0.0, std::f64::consts::PI / 2f64.ln()));
        assert!(max_abs(&(r.data() - Mat::identity(2, 2))) < 1e-14);
    }

    #[test]
    fn rejects_non_positive() {
        let s = Space::hilbert(2);
        assert!(matches!(PositiveOperator::from_diag(&s, &[1.0, 0.0]), Err(MuError::Positivity(_))));
        assert!(matches!(PositiveOperator::from_diag(&s, &[1.0, -2.0]), Err(MuError::Positivity(_))));
        let nh = Operator::on(s.clone(), real_matrix(&[&[1., 1.], &[0., 1.]])).unwrap();
        assert!(matches!(PositiveOperator::new(nh), Err(MuError::Positivity(_))));
        let indefinite = Operator::on(s, real_matrix(&[&[1., 2.], &[2., 1.]])).unwrap();
        assert!(PositiveOperator::new(indefinite).is_err());
    }

    #[test]
    fn general_positive_decomposes() {
        let s = Space::hilbert(2);
        let m = Mat::from_fn(2, 2, |i, j| if i == j { c(2.0 + i as f64, 0.0) } else if i < j { c(0.5, 0.3) } else { c(0.5, -0.3) });
        let p = PositiveOperator::new(Operator::on(s, m.clone()).unwrap()).unwrap();
        assert!(p.reconstruction_residual() < 1e-13);
        let inv = p.inverse();
        assert!(max_abs(&(inv.op().data() * &m - Mat::identity(2, 2))) < 1e-13);
        let half = p.pow(c(0.5, 0.0));
        assert!(max_abs(&(half.data() * half.data() - m)) < 1e-13);
    }
}
