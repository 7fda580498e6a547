//! Transport of the structure of `W` to `W_M` through `α` and `β`.

use super::lifted::{q_m, LiftedUnitary};
use super::weyl::WeylPair;
use crate::error::{MuError, Result};
use crate::qgroup::antipode::tau;
use crate::qgroup::{algebra_left, algebra_right, check_transpose_antipode, SliceAlgebra};
use crate::report::CheckReport;
use crate::tensor::linalg::{self, Mat, C64};
use crate::tensor::{Operator, PositiveOperator, DENSE_BUDGET};

/// The data of `W` that gets transported.
#[derive(Clone, Copy, Debug)]
pub struct BaseStructure<'a> {
    pub a: &'a SliceAlgebra,
    pub a_hat: &'a SliceAlgebra,
    pub q: &'a PositiveOperator,
    /// `R` on the coefficients of `A`.
    pub r_map: &'a Mat,
    pub w_tilde: &'a Operator,
}

fn matrix_units(d: usize) -> Vec<Mat> {
    (0..d * d)
        .map(|k| {
            let mut e = Mat::zeros(d, d);
            e[(k / d, k % d)] = linalg::ONE;
            e
        })
        .collect()
}

/// Compares the slice algebras of the dense `W_M` with `β(A)` and `α(Â)`,
/// and checks the transported maps.
///
/// Residuals: `a_m` and `a_hat_m` (mutual projection distances), `rank`
/// (mismatch count, tolerance ½), `tau` (`Q_M^{2it}·Q_M^{−2it}` against
/// `β∘τ_t∘β⁻¹` on `β(A)`), `r_m_leak` (`β∘R∘β⁻¹` keeps `A_M`), `wform`
/// (`‖W_M^{⊤⊗R_M} − W̃_M*‖`), `alpha_transpose` (`⊤∘α = α^⊤∘⊤` on matrix
/// units) and `wtilde_m` (`W̃_M = (α^⊤⊗β)W̃`).
///
/// Fails with [`MuError::Budget`] when `W_M` was not materialized.
pub fn span_transport(
    lifted: &LiftedUnitary,
    wp: &WeylPair,
    base: &BaseStructure<'_>,
    t_samples: &[f64],
    tol: f64,
) -> Result<CheckReport> {
    let nd = lifted.lifted_dim();
    let Some(wm) = lifted.dense() else {
        return Err(MuError::Budget { dim: nd * nd, budget: DENSE_BUDGET });
    };
    let (n, d) = (lifted.n_points(), lifted.h_dim());
    let mut report = CheckReport::new("span transport", tol);

    let a_m = algebra_left(wm)?;
    let a_hat_m = algebra_right(wm)?;
    let beta_a = SliceAlgebra::span_of(a_m.space().clone(), &base.a.basis().iter().map(|m| lifted.beta(m)).collect::<Vec<_>>())?;
    let alpha_a_hat =
        SliceAlgebra::span_of(a_m.space().clone(), &base.a_hat.basis().iter().map(|m| lifted.alpha(m)).collect::<Vec<_>>())?;
    report.push("a_m", a_m.mutual_residual(&beta_a));
    report.push("a_hat_m", a_hat_m.mutual_residual(&alpha_a_hat));
    let mismatch = a_m.rank().abs_diff(beta_a.rank()) + a_hat_m.rank().abs_diff(alpha_a_hat.rank());
    report.push_with_tol("rank", mismatch as f64, 0.5);
    report.info("rank_a_m", a_m.rank() as f64);
    report.info("rank_beta_a", beta_a.rank() as f64);
    report.info("rank_a_hat_m", a_hat_m.rank() as f64);
    report.info("rank_alpha_a_hat", alpha_a_hat.rank() as f64);

    let qm = q_m(wp, base.q);
    let mut tau_gap: f64 = 0.0;
    for &t in t_samples {
        let (u, u_inv) = (qm.it(2.0 * t), qm.it(-2.0 * t));
        for a in base.a.basis() {
            let lifted_tau = u.data() * lifted.beta(a) * u_inv.data();
            let transported = lifted.beta(&tau(base.q, C64::new(t, 0.0), a));
            tau_gap = tau_gap.max(linalg::op_norm(&(lifted_tau - transported)));
        }
    }
    report.push("tau", tau_gap);

    // R_M = β∘R∘β⁻¹ on the coefficients of A_M
    let (r_m, leak) = a_m.matrix_of(|b| lifted.beta(&base.a.apply(base.r_map, &super::lifted::beta_inverse(n, b))));
    report.push("r_m_leak", leak);
    let wt_m = lifted.wtilde_dense(base.w_tilde)?;
    report.push("wform", check_transpose_antipode(wm, &a_hat_m, &a_m, &r_m, &wt_m, tol)?);

    let units = matrix_units(d);
    let altop = units
        .iter()
        .map(|e| linalg::op_norm(&(lifted.alpha(e).transpose() - lifted.x().alpha_transpose(&e.transpose()))))
        .fold(0.0, f64::max);
    report.push("alpha_transpose", altop);

    // (α^⊤⊗β)W̃ = Σ W̃_{(i,k),(j,l)} α^⊤(e_ij) ⊗ β(e_kl)
    let wt = base.w_tilde.data();
    let alpha_t: Vec<Mat> = units.iter().map(|e| lifted.x().alpha_transpose(e)).collect();
    let betas: Vec<Mat> = units.iter().map(|e| lifted.beta(e)).collect();
    let mut transported = Mat::zeros(nd * nd, nd * nd);
    for (ij, at) in alpha_t.iter().enumerate() {
        for (kl, b) in betas.iter().enumerate() {
            let (i, j, k, l) = (ij / d, ij % d, kl / d, kl % d);
            let z = wt[(i * d + k, j * d + l)];
            if z != linalg::ZERO {
                transported += linalg::kron(at, b).map(|v| v * z);
            }
        }
    }
    report.push("wtilde_m", linalg::op_norm(&(transported - wt_m.data())));
    Ok(report)
}
