use super::algebra::{product_decomposition, SliceAlgebra};
use super::antipode::tau;
use super::comult::{comult, from_product_coeffs, structure_constants, tensor_map};
use crate::error::{MuError, Result};
use crate::munit::MultUnitary;
use crate::report::CheckReport;
use crate::tensor::linalg::{self, Mat, C64};
use crate::tensor::{leg_embed, slice_right, Functional, Operator, PositiveOperator, Space};

/// `Δ∘τ_t = (τ_t⊗τ_t)∘Δ` over `t_samples` and `Δ∘R = σ(R⊗R)Δ`, on every
/// basis element of `A`.
pub fn check_comult_covariance(
    w: &MultUnitary,
    a: &SliceAlgebra,
    q: &PositiveOperator,
    r_map: &Mat,
    t_samples: &[f64],
    tol: f64,
) -> CheckReport {
    let mut report = CheckReport::new("comultiplication covariance", tol);
    let qq = q.tensor(q);
    let mut scaling: f64 = 0.0;
    for &t in t_samples {
        let t = C64::new(t, 0.0);
        for b in a.basis() {
            let lhs = comult(w, &tau(q, t, b));
            let rhs = tau(&qq, t, &comult(w, b));
            scaling = scaling.max(linalg::op_norm(&(lhs - rhs)));
        }
    }
    report.push("scaling", scaling);
    let (consts, _) = structure_constants(w, a);
    let mut antipode: f64 = 0.0;
    for (mu, b) in a.basis().iter().enumerate() {
        let lhs = comult(w, &a.apply(r_map, b));
        let flipped = tensor_map(&consts[mu], r_map, r_map).transpose();
        antipode = antipode.max(linalg::op_norm(&(lhs - from_product_coeffs(a, &flipped))));
    }
    report.push("antipode", antipode);
    report
}

/// The scaling group is implemented by `Q`: `Q^{2it}·Q^{-2it}` keeps `A`,
/// is multiplicative and `*`-preserving there, and commutes with `R`.
pub fn check_scaling_implementation(a: &SliceAlgebra, q: &PositiveOperator, r_map: &Mat, t_samples: &[f64], tol: f64) -> CheckReport {
    let mut report = CheckReport::new("scaling implementation", tol);
    let mut leak: f64 = 0.0;
    let mut commutes: f64 = 0.0;
    let mut star: f64 = 0.0;
    let mut group: f64 = 0.0;
    for &t in t_samples {
        let (tt, l) = a.matrix_of(|m| tau(q, C64::new(t, 0.0), m));
        leak = leak.max(l);
        commutes = commutes.max(linalg::op_norm(&(r_map * &tt - &tt * r_map)));
        for b in a.basis() {
            let img = tau(q, C64::new(t, 0.0), b);
            star = star.max(linalg::op_norm(&(tau(q, C64::new(t, 0.0), &b.adjoint()) - img.adjoint())));
            // τ_t τ_{-t} = id on A
            group = group.max(linalg::op_norm(&(tau(q, C64::new(-t, 0.0), &img) - b)));
        }
    }
    report.push("leak", leak);
    report.push("star", star);
    report.push("group", group);
    report.push("commutes_r", commutes);
    report
}

/// `‖W^{⊤⊗R} − W̃*‖`, from the decomposition of `W` in `span(Â)⊗span(A)`:
/// the transpose acts on the `Â` leg and `R` on the `A` leg.
pub fn check_transpose_antipode(
    w: &MultUnitary,
    a_hat: &SliceAlgebra,
    a: &SliceAlgebra,
    r_map: &Mat,
    w_tilde: &Operator,
    tol: f64,
) -> Result<f64> {
    let (coeffs, residual) = product_decomposition(a_hat, a, w.data());
    if !(residual < tol) {
        return Err(MuError::Precondition(format!("W does not decompose over Â⊗A: residual {residual:e}")));
    }
    let n = w.data().nrows();
    let mut lhs = Mat::zeros(n, n);
    for (mu, x) in a_hat.basis().iter().enumerate() {
        let xt = x.transpose();
        for (nu, y) in a.basis().iter().enumerate() {
            let z = coeffs[(mu, nu)];
            if z != linalg::ZERO {
                lhs += linalg::kron(&xt, &a.apply(r_map, y)).map(|v| v * z);
            }
        }
    }
    Ok(linalg::op_norm(&(lhs - w_tilde.data().adjoint())))
}

/// `𝒯(m) = (Q̂ m Q̂⁻¹)^⊤`, acting on the conjugate space.
pub fn script_t(q_hat: &PositiveOperator, m: &Operator) -> Result<Operator> {
    let moved = q_hat.op().compose(m)?.compose(q_hat.inverse().op())?;
    Ok(moved.transpose())
}

/// `max_ω ‖𝒯((id⊗ω)W) − (id⊗ω)W̃‖` over matrix units `ω` on `H`.
pub fn check_script_t(w: &MultUnitary, w_tilde: &Operator, q_hat: &PositiveOperator) -> Result<f64> {
    let h = w.h_space();
    let d = w.h_dim();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let omega = Functional::matrix_unit(&h, i, j);
            let lhs = script_t(q_hat, &slice_right(w.op(), &omega)?)?;
            let rhs = slice_right(w_tilde, &omega)?;
            worst = worst.max(lhs.distance(&rhs));
        }
    }
    Ok(worst)
}

/// `‖(1⊗W)W̃₁₂(1⊗W*) − W̃₁₃W̃₁₂‖` on `H̄⊗H⊗H`.
pub fn check_wtilde_comult(w: &MultUnitary, w_tilde: &Operator) -> Result<f64> {
    let h = w.h_space();
    let ambient = Space::new(vec![h.conj().factors()[0], h.factors()[0], h.factors()[0]])?;
    let w23 = leg_embed(w.op(), &[1, 2], &ambient)?;
    let t12 = leg_embed(w_tilde, &[0, 1], &ambient)?;
    let t13 = leg_embed(w_tilde, &[0, 2], &ambient)?;
    let lhs = &(&w23 * &t12) * &w23.adjoint();
    Ok(lhs.distance(&(&t13 * &t12)))
}
