//! The pair `(r, s)` on a periodic grid.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftPlanner};

use crate::error::{MuError, Result};
use crate::tensor::linalg::{self, Mat, C64};
use crate::tensor::{Operator, PositiveOperator, Space};

/// Position `s` and `r = exp(−D)` on `n` grid points of `[−L/2, L/2)`, with
/// `D` the discrete momentum.
///
/// `r^{it}` is translation by `t` (periodic), so `r^{it}sr^{−it} = s − t`
/// holds only away from the wrap point. The defect is measured by
/// [`WeylPair::translation_error`].
#[derive(Clone)]
pub struct WeylPair {
    k_space: Space,
    length: f64,
    positions: Vec<f64>,
    momenta: Vec<f64>,
    r: PositiveOperator,
    s: Operator,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for WeylPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WeylPair").field("n_points", &self.n_points()).field("length", &self.length).finish()
    }
}

/// Builds the grid pair; `n_points` must be a power of two and `length > 0`.
pub fn grid_weyl_pair(n_points: usize, length: f64) -> Result<WeylPair> {
    if n_points < 2 || !n_points.is_power_of_two() {
        return Err(MuError::Parameter(format!("n_points = {n_points} must be a power of two ≥ 2")));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(MuError::Parameter(format!("grid length {length} must be positive")));
    }
    let n = n_points;
    let h = length / n as f64;
    let positions: Vec<f64> = (0..n).map(|j| -length / 2.0 + j as f64 * h).collect();
    // symmetric ordering: m and m − n
    let momenta: Vec<f64> =
        (0..n).map(|m| 2.0 * PI * if m < n / 2 { m as f64 } else { m as f64 - n as f64 } / length).collect();
    let k_space = Space::hilbert(n);
    let norm = 1.0 / (n as f64).sqrt();
    let fourier = Mat::from_fn(n, n, |j, m| C64::from_polar(norm, 2.0 * PI * (m * j % n) as f64 / n as f64));
    let r = PositiveOperator::from_spectral(&k_space, momenta.iter().map(|k| (-k).exp()).collect(), fourier)?;
    let s = Operator::diag(&k_space, &positions)?;
    let mut planner = FftPlanner::new();
    Ok(WeylPair {
        k_space,
        length,
        positions,
        momenta,
        r,
        s,
        forward: planner.plan_fft_forward(n),
        inverse: planner.plan_fft_inverse(n),
    })
}

impl WeylPair {
    pub fn k_space(&self) -> &Space {
        &self.k_space
    }

    pub fn n_points(&self) -> usize {
        self.positions.len()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Eigenvalues of `s`, i.e. the grid points.
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// Eigenvalues of `D`, in FFT order.
    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    pub fn r(&self) -> &PositiveOperator {
        &self.r
    }

    pub fn s(&self) -> &Operator {
        &self.s
    }

    /// `r^z v = exp(−zD) v`, through the FFT.
    pub fn apply_r_pow(&self, z: C64, v: &[C64]) -> Vec<C64> {
        let n = self.n_points();
        assert_eq!(v.len(), n, "vector does not live on the grid");
        let mut buf = v.to_vec();
        self.forward.process(&mut buf);
        for (x, &k) in buf.iter_mut().zip(&self.momenta) {
            *x *= (-z * k).exp() / n as f64;
        }
        self.inverse.process(&mut buf);
        buf
    }

    /// `r^{z}` on the grid leg `leg` of a vector over a product with dims `dims`.
    pub fn apply_r_pow_on(&self, z: C64, v: &[C64], dims: &[usize], leg: usize) -> Vec<C64> {
        let n = self.n_points();
        assert_eq!(dims[leg], n, "leg {leg} is not the grid");
        let stride: usize = dims[leg + 1..].iter().product();
        let mut out = vec![linalg::ZERO; v.len()];
        let mut fibre = vec![linalg::ZERO; n];
        for start in 0..v.len() {
            if !(start / stride).is_multiple_of(n) {
                continue;
            }
            for (j, f) in fibre.iter_mut().enumerate() {
                *f = v[start + j * stride];
            }
            for (j, y) in self.apply_r_pow(z, &fibre).into_iter().enumerate() {
                out[start + j * stride] = y;
            }
        }
        out
    }

    /// `‖(r^{it}sr^{−it} − (s − t))v‖`.
    pub fn translation_error(&self, v: &[C64], t: f64) -> f64 {
        let shifted = self.apply_r_pow(C64::new(0.0, -t), v);
        let moved: Vec<C64> = shifted.iter().zip(&self.positions).map(|(y, x)| y * x).collect();
        let lhs = self.apply_r_pow(C64::new(0.0, t), &moved);
        let rhs: Vec<C64> = v.iter().zip(&self.positions).map(|(y, x)| y * (x - t)).collect();
        linalg::vec_norm(&linalg::vec_sub(&lhs, &rhs))
    }

    /// Normalized Gaussian of width `length/16` centred mid-interval.
    pub fn bulk_gaussian(&self) -> Vec<C64> {
        let sigma = self.length / 16.0;
        let mut g: Vec<C64> = self.positions.iter().map(|x| C64::new((-x * x / (2.0 * sigma * sigma)).exp(), 0.0)).collect();
        linalg::normalize(&mut g);
        g
    }
}

/// `count` bulk probes on `(K⊗H)^{⊗legs}`: the grid Gaussian on every `K`
/// leg tensored with seeded unit vectors on the `H` legs.
pub fn bulk_probes(wp: &WeylPair, h_dim: usize, legs: usize, count: usize, seed: u64) -> Vec<Vec<C64>> {
    let g = wp.bulk_gaussian();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut v = vec![linalg::ONE];
            for _ in 0..legs {
                let mut h: Vec<C64> =
                    (0..h_dim).map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))).collect();
                linalg::normalize(&mut h);
                v = linalg::vec_kron(&linalg::vec_kron(&v, &g), &h);
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_apply(m: &Operator, v: &[C64]) -> Vec<C64> {
        m.apply(v)
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(grid_weyl_pair(48, 16.0), Err(MuError::Parameter(_))));
        assert!(matches!(grid_weyl_pair(1, 16.0), Err(MuError::Parameter(_))));
        assert!(matches!(grid_weyl_pair(64, 0.0), Err(MuError::Parameter(_))));
        assert!(matches!(grid_weyl_pair(64, f64::NAN), Err(MuError::Parameter(_))));
    }

    #[test]
    fn fft_powers_match_dense_spectral_calculus() {
        let wp = grid_weyl_pair(16, 8.0).unwrap();
        let v = crate::munit::random_probes(16, 1, 3).remove(0);
        for z in [C64::new(0.0, 0.7), C64::new(0.3, 0.0), C64::new(-0.2, 1.1)] {
            let fast = wp.apply_r_pow(z, &v);
            let dense = dense_apply(&wp.r().pow(z), &v);
            assert!(linalg::vec_norm(&linalg::vec_sub(&fast, &dense)) < 1e-12);
        }
        let r_v = wp.apply_r_pow(linalg::ONE, &v);
        assert!(linalg::vec_norm(&linalg::vec_sub(&r_v, &dense_apply(wp.r().op(), &v))) < 1e-12);
    }

    #[test]
    fn s_is_hermitian_and_r_positive() {
        let wp = grid_weyl_pair(32, 16.0).unwrap();
        assert_eq!(wp.s().hermiticity_defect(), 0.0);
        assert!(wp.r().op().hermiticity_defect() < 1e-12 * wp.r().op().norm_fro());
        assert!(wp.r().eigenvalues().iter().all(|&l| l > 0.0));
        assert_eq!(wp.positions()[0], -8.0);
        assert_eq!(wp.momenta()[1], -wp.momenta()[31]);
    }

    #[test]
    fn integer_shift_is_a_grid_translation() {
        // with spacing 1 and t = 1 the shift is a cyclic permutation
        let wp = grid_weyl_pair(16, 16.0).unwrap();
        let mut e = vec![linalg::ZERO; 16];
        e[5] = linalg::ONE;
        let moved = wp.apply_r_pow(C64::new(0.0, 1.0), &e);
        for (j, y) in moved.iter().enumerate() {
            let target = if j == 6 { 1.0 } else { 0.0 };
            assert!((y - C64::new(target, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn zero_shift_has_no_error() {
        let wp = grid_weyl_pair(32, 16.0).unwrap();
        for v in crate::munit::random_probes(32, 4, 9) {
            assert!(wp.translation_error(&v, 0.0) < 1e-12);
        }
    }

    #[test]
    fn bulk_gaussian_translation_error() {
        let g64 = grid_weyl_pair(64, 16.0).unwrap();
        let e64 = g64.translation_error(&g64.bulk_gaussian(), 1.0);
        assert!(e64 < 1e-6, "{e64:e}");
        // the error sits at the rounding floor from 64 points on
        let g128 = grid_weyl_pair(128, 16.0).unwrap();
        let e128 = g128.translation_error(&g128.bulk_gaussian(), 1.0);
        assert!(e64 < 1e-10 && e128 < 1e-10, "{e64:e} {e128:e}");
    }

    #[test]
    fn wrap_boundary_breaks_the_relation() {
        let wp = grid_weyl_pair(64, 16.0).unwrap();
        // shifting x = −7.75 back by 1 wraps it to the far end
        let mut edge = vec![linalg::ZERO; 64];
        edge[1] = linalg::ONE;
        assert!(wp.translation_error(&edge, 1.0) > 1.0);
    }

    #[test]
    fn leg_application_matches_kron() {
        let wp = grid_weyl_pair(8, 4.0).unwrap();
        let dims = [2, 8, 3];
        let v = crate::munit::random_probes(48, 1, 5).remove(0);
        let z = C64::new(0.1, 0.4);
        let full = linalg::kron(&linalg::kron(&Mat::identity(2, 2), wp.r().pow(z).data()), &Mat::identity(3, 3));
        let expected = linalg::matvec(&full, &v);
        let got = wp.apply_r_pow_on(z, &v, &dims, 1);
        assert!(linalg::vec_norm(&linalg::vec_sub(&got, &expected)) < 1e-12);
    }

    #[test]
    fn bulk_probes_are_unit_and_seeded() {
        let wp = grid_weyl_pair(16, 16.0).unwrap();
        let p = bulk_probes(&wp, 2, 2, 3, 11);
        assert_eq!(p.len(), 3);
        assert_eq!(p[0].len(), (16 * 2) * (16 * 2));
        for v in &p {
            assert!((linalg::vec_norm(v) - 1.0).abs() < 1e-12);
        }
        assert_eq!(p, bulk_probes(&wp, 2, 2, 3, 11));
    }
}
