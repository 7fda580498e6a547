//! Multiplicative unitaries and modularity certificates.

mod certificate;
mod search;
mod simplex;

pub use certificate::{
    build_wtilde, check_manageable, check_modular, check_modular_with, dual_modular, relation_residual, CheckOptions, Grid,
    ModularStructure, RelationSides,
};
pub use search::{find_certificate, SearchOptions, SearchOutcome};
pub use simplex::{nelder_mead, SimplexOptions, SimplexResult};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{MuError, Result};
use crate::tensor::legs::LegLayout;
use crate::tensor::linalg::{self, Mat, C64};
use crate::tensor::{flip, leg_embed, Operator, Space, DENSE_BUDGET};

/// Default absolute exactness tolerance for unit-norm operators.
pub const EXACT_TOL: f64 = 1e-10;

/// A unitary `W` on `H⊗H` (two equal, non-conjugate factors).
#[derive(Clone, Debug, PartialEq)]
pub struct MultUnitary {
    w: Operator,
    h_dim: usize,
}

impl MultUnitary {
    /// Wraps `w` after checking the space layout and unitarity (`‖W*W − I‖ < 1e-10`).
    pub fn new(w: Operator) -> Result<Self> {
        let f = w.space().factors();
        if !w.is_square() || f.len() != 2 || f[0] != f[1] || f[0].conjugate {
            return Err(MuError::Shape(format!("a multiplicative unitary acts on H⊗H, got {}", w.space())));
        }
        let defect = w.unitarity_defect();
        if !(defect < EXACT_TOL) {
            return Err(MuError::Precondition(format!("not unitary: ‖W*W − I‖ = {defect:e}")));
        }
        let h_dim = f[0].dim;
        Ok(MultUnitary { w, h_dim })
    }

    pub fn from_matrix(h_dim: usize, data: Mat) -> Result<Self> {
        Self::new(Operator::on(Space::power(h_dim, 2), data)?)
    }

    pub fn op(&self) -> &Operator {
        &self.w
    }

    pub fn data(&self) -> &Mat {
        self.w.data()
    }

    pub fn h_dim(&self) -> usize {
        self.h_dim
    }

    pub fn h_space(&self) -> Space {
        Space::hilbert(self.h_dim)
    }

    pub fn adjoint(&self) -> MultUnitary {
        MultUnitary { w: self.w.adjoint(), h_dim: self.h_dim }
    }

    /// `W₁₂`, `W₁₃`, `W₂₃` on `H^{⊗3}`.
    pub fn legs3(&self) -> Result<(Operator, Operator, Operator)> {
        let h3 = Space::power(self.h_dim, 3);
        Ok((leg_embed(&self.w, &[0, 1], &h3)?, leg_embed(&self.w, &[0, 2], &h3)?, leg_embed(&self.w, &[1, 2], &h3)?))
    }
}

/// `‖W₂₃W₁₂ − W₁₂W₁₃W₂₃‖` in operator norm on `H^{⊗3}`.
///
/// Fails with [`MuError::Budget`] when `dim(H)³` exceeds the dense budget;
/// use [`pentagon_residual_probes`] there.
pub fn pentagon_residual(w: &MultUnitary) -> Result<f64> {
    let dim = w.h_dim.pow(3);
    if dim > DENSE_BUDGET {
        return Err(MuError::Budget { dim, budget: DENSE_BUDGET });
    }
    let (w12, w13, w23) = w.legs3()?;
    let lhs = &w23 * &w12;
    let rhs = &(&w12 * &w13) * &w23;
    Ok(lhs.distance(&rhs))
}

/// Probe version of the pentagon residual: the maximum over `probes` of
/// `‖(W₂₃W₁₂ − W₁₂W₁₃W₂₃)v‖ / ‖v‖`.
pub fn pentagon_residual_probes(w: &MultUnitary, probes: &[Vec<C64>]) -> Result<f64> {
    let dims = [w.h_dim; 3];
    let l12 = LegLayout::new(&dims, &[0, 1])?;
    let l13 = LegLayout::new(&dims, &[0, 2])?;
    let l23 = LegLayout::new(&dims, &[1, 2])?;
    let m = w.data();
    let mut worst: f64 = 0.0;
    for v in probes {
        if v.len() != l12.total() {
            return Err(MuError::Shape(format!("probe length {} != {}", v.len(), l12.total())));
        }
        let lhs = l23.apply(m, &l12.apply(m, v));
        let rhs = l12.apply(m, &l13.apply(m, &l23.apply(m, v)));
        worst = worst.max(linalg::vec_norm(&linalg::vec_sub(&lhs, &rhs)) / linalg::vec_norm(v));
    }
    Ok(worst)
}

/// Seeded normalized complex Gaussian vectors.
pub fn random_probes(dim: usize, count: usize, seed: u64) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut v: Vec<C64> = (0..dim)
                .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
                .collect();
            linalg::normalize(&mut v);
            v
        })
        .collect()
}

/// The dual multiplicative unitary `Ŵ = ΣW*Σ`.
pub fn dual(w: &MultUnitary) -> MultUnitary {
    let sigma = flip(w.op().space()).expect("two factors");
    let data = sigma.data() * w.data().adjoint() * sigma.data();
    MultUnitary { w: Operator::on(w.op().space().clone(), data).expect("same shape"), h_dim: w.h_dim }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::linalg::real_matrix;
    use crate::workbench::groups::{gen_group_kt, GroupTable};

    fn cnot() -> MultUnitary {
        crate::workbench::cnot()
    }

    fn perturbed_cnot(eps: f64) -> MultUnitary {
        crate::workbench::perturbed(&cnot(), eps, 7)
    }

    /// Brute force: both sides of the pentagon on every basis vector of `H^{⊗3}`,
    /// built from explicit index arithmetic rather than leg embedding.
    fn brute_pentagon(w: &Mat, d: usize) -> f64 {
        let idx = |a: usize, b: usize, cc: usize| a * d * d + b * d + cc;
        let n = d * d * d;
        let apply = |legs: (usize, usize), v: &Vec<C64>| -> Vec<C64> {
            let mut out = vec![linalg::ZERO; n];
            for a in 0..d {
                for b in 0..d {
                    for cc in 0..d {
                        let x = v[idx(a, b, cc)];
                        if x == linalg::ZERO {
                            continue;
                        }
                        let digits = [a, b, cc];
                        let (p, q) = (digits[legs.0], digits[legs.1]);
                        for p2 in 0..d {
                            for q2 in 0..d {
                                let coef = w[(p2 * d + q2, p * d + q)];
                                let mut nd = digits;
                                nd[legs.0] = p2;
                                nd[legs.1] = q2;
                                out[idx(nd[0], nd[1], nd[2])] += coef * x;
                            }
                        }
                    }
                }
            }
            out
        };
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let mut e = vec![linalg::ZERO; n];
            e[k] = linalg::ONE;
            let lhs = apply((1, 2), &apply((0, 1), &e));
            let rhs = apply((0, 1), &apply((0, 2), &apply((1, 2), &e)));
            worst = worst.max(linalg::vec_norm(&linalg::vec_sub(&lhs, &rhs)));
        }
        worst
    }

    #[test]
    fn cnot_is_multiplicative() {
        let r = pentagon_residual(&cnot()).unwrap();
        assert!(r < 1e-12);
        assert!(brute_pentagon(cnot().data(), 2) < 1e-12);
    }

    #[test]
    fn identity_is_multiplicative() {
        let w = MultUnitary::from_matrix(2, Mat::identity(4, 4)).unwrap();
        assert_eq!(pentagon_residual(&w).unwrap(), 0.0);
    }

    #[test]
    fn perturbed_cnot_violates_pentagon() {
        let w = perturbed_cnot(1e-2);
        let r = pentagon_residual(&w).unwrap();
        let brute = brute_pentagon(w.data(), 2);
        assert!(r > 1e-4, "residual {r}");
        // the operator norm dominates the residual on any single basis vector
        assert!(brute <= r + 1e-12);
    }

    #[test]
    fn probe_pentagon_matches_dense_bound() {
        let w = perturbed_cnot(1e-2);
        let probes = random_probes(8, 64, 7);
        let p = pentagon_residual_probes(&w, &probes).unwrap();
        let dense = pentagon_residual(&w).unwrap();
        assert!(p <= dense + 1e-12 && p > 0.1 * dense);
        assert!(pentagon_residual_probes(&cnot(), &probes).unwrap() < 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let t = GroupTable::cyclic(17);
        let w = gen_group_kt(&t).unwrap();
        assert!(matches!(pentagon_residual(&w), Err(MuError::Budget { .. })));
        let probes = random_probes(17usize.pow(3), 2, 1);
        assert!(pentagon_residual_probes(&w, &probes).unwrap() < 1e-12);
    }

    #[test]
    fn dual_examples() {
        let w = cnot();
        assert_eq!(dual(&dual(&w)), w);
        let expected = real_matrix(&[&[1., 0., 0., 0.], &[0., 0., 0., 1.], &[0., 0., 1., 0.], &[0., 1., 0., 0.]]);
        assert_eq!(dual(&w).data(), &expected);
        assert!(pentagon_residual(&dual(&w)).unwrap() < 1e-12);
        assert!(brute_pentagon(&expected, 2) < 1e-12);
    }

    #[test]
    fn rejects_non_unitary_and_wrong_space() {
        assert!(MultUnitary::from_matrix(2, Mat::identity(4, 4).scale(2.0)).is_err());
        let op = Operator::on(Space::from_dims(&[2, 3]), Mat::identity(6, 6)).unwrap();
        assert!(MultUnitary::new(op).is_err());
    }
}
