//! Built-in example data.

use nalgebra::SymmetricEigen;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::groups::{gen_group_kt, GroupTable};
use crate::error::{MuError, Result};
use crate::munit::MultUnitary;
use crate::tensor::linalg::{Mat, C64};
use crate::tensor::PositiveOperator;

/// The Kac–Takesaki operator of `ℤ₂`.
pub fn cnot() -> MultUnitary {
    gen_group_kt(&GroupTable::cyclic(2)).expect("ℤ₂ table")
}

/// Candidate certificate `Q = I`, `Q̂ = diag(q_hat_diag)`.
pub fn gen_skewed_certificate(w: &MultUnitary, q_hat_diag: &[f64]) -> Result<(PositiveOperator, PositiveOperator)> {
    if q_hat_diag.len() != w.h_dim() {
        return Err(MuError::Shape(format!("{} diagonal entries for dim(H) = {}", q_hat_diag.len(), w.h_dim())));
    }
    let h = w.h_space();
    Ok((PositiveOperator::identity(&h), PositiveOperator::from_diag(&h, q_hat_diag)?))
}

/// A seeded Hermitian matrix with standard Gaussian entries (GUE-like).
pub fn random_hermitian(n: usize, seed: u64) -> Mat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Mat::from_fn(n, n, |_, _| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)));
    (&g + g.adjoint()).map(|z| z * 0.5)
}

/// `exp(i h)` for Hermitian `h`.
pub fn exp_i_hermitian(h: &Mat) -> Mat {
    let eig = SymmetricEigen::new(h.clone());
    let phases = nalgebra::DVector::from_iterator(h.nrows(), eig.eigenvalues.iter().map(|&l| C64::from_polar(1.0, l)));
    &eig.eigenvectors * Mat::from_diagonal(&phases) * eig.eigenvectors.adjoint()
}

/// `W·exp(iεh)` for a seeded random Hermitian `h`; a unitary negative control
/// that violates the pentagon equation for generic `h`.
pub fn perturbed(w: &MultUnitary, eps: f64, seed: u64) -> MultUnitary {
    let n = w.data().nrows();
    let h = random_hermitian(n, seed).map(|z| z * eps);
    MultUnitary::from_matrix(w.h_dim(), w.data() * exp_i_hermitian(&h)).expect("product of unitaries")
}
