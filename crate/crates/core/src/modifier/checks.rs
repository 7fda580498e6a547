//! Residuals of the lifted construction: the exact family (leg exchange,
//! pentagon, inner-product relation) and the grid-limited family
//! (intertwining of `r⊗Q` with `r⊗Q̂`, commutation with `Q_M⊗Q_M`).

use super::lifted::LiftedUnitary;
use super::weyl::{bulk_probes, WeylPair};
use crate::error::{MuError, Result};
use crate::munit::{random_probes, MultUnitary, EXACT_TOL};
use crate::report::CheckReport;
use crate::tensor::legs::LegLayout;
use crate::tensor::linalg::{self, Mat, C64};
use crate::tensor::{leg_embed, Operator, PositiveOperator};

fn on_leg(m: &Mat, v: &[C64], dims: &[usize], leg: usize) -> Vec<C64> {
    LegLayout::new(dims, &[leg]).expect("leg in range").apply(m, v)
}

fn relative_gap(lhs: &[C64], rhs: &[C64], v: &[C64]) -> f64 {
    linalg::vec_norm(&linalg::vec_sub(lhs, rhs)) / linalg::vec_norm(v)
}

/// `max_t ‖Q₂^{it}WQ₂^{−it} − Q̂₁^{−it}WQ̂₁^{it}‖`.
pub fn check_trick(w: &MultUnitary, q: &PositiveOperator, q_hat: &PositiveOperator, t_samples: &[f64]) -> Result<f64> {
    let h2 = w.op().space().clone();
    let mut worst: f64 = 0.0;
    for &t in t_samples {
        let q2 = leg_embed(&q.it(t), &[1], &h2)?;
        let q2_inv = leg_embed(&q.it(-t), &[1], &h2)?;
        let qh1 = leg_embed(&q_hat.it(-t), &[0], &h2)?;
        let qh1_inv = leg_embed(&q_hat.it(t), &[0], &h2)?;
        let lhs = q2.data() * w.data() * q2_inv.data();
        let rhs = qh1.data() * w.data() * qh1_inv.data();
        worst = worst.max(linalg::op_norm(&(lhs - rhs)));
    }
    Ok(worst)
}

fn check_probe_len(probes: &[Vec<C64>], len: usize) -> Result<()> {
    match probes.iter().find(|p| p.len() != len) {
        Some(p) => Err(MuError::Shape(format!("probe length {} != {len}", p.len()))),
        None => Ok(()),
    }
}

/// `max_v ‖(X*(r⊗Q)X − r⊗Q̂)v‖/‖v‖` over probes on `K⊗H`.
pub fn check_tozs(
    wp: &WeylPair,
    lifted: &LiftedUnitary,
    q: &PositiveOperator,
    q_hat: &PositiveOperator,
    probes: &[Vec<C64>],
) -> Result<f64> {
    let x = lifted.x();
    let dims = [x.n_points(), x.h_dim()];
    check_probe_len(probes, dims[0] * dims[1])?;
    let one = linalg::ONE;
    let mut worst: f64 = 0.0;
    for v in probes {
        let y = x.apply_on(v, &dims, 0, 1);
        let y = on_leg(q.op().data(), &wp.apply_r_pow_on(one, &y, &dims, 0), &dims, 1);
        let lhs = x.adjoint().apply_on(&y, &dims, 0, 1);
        let rhs = on_leg(q_hat.op().data(), &wp.apply_r_pow_on(one, v, &dims, 0), &dims, 1);
        worst = worst.max(relative_gap(&lhs, &rhs, v));
    }
    Ok(worst)
}

/// Factor dims of `(K⊗H)^{⊗3}`.
fn dims6(lifted: &LiftedUnitary) -> [usize; 6] {
    let (n, d) = (lifted.n_points(), lifted.h_dim());
    [n, d, n, d, n, d]
}

/// `max_v ‖((W_M)₂₃(W_M)₁₂ − (W_M)₁₂(W_M)₁₃(W_M)₂₃)v‖/‖v‖` on `(K⊗H)^{⊗3}`.
pub fn pentagon_residual_wm(lifted: &LiftedUnitary, probes: &[Vec<C64>]) -> Result<f64> {
    let dims = dims6(lifted);
    check_probe_len(probes, dims.iter().product())?;
    let (p1, p2, p3) = ((0, 1), (2, 3), (4, 5));
    let mut worst: f64 = 0.0;
    for v in probes {
        let lhs = lifted.apply_on(&lifted.apply_on(v, &dims, p1, p2), &dims, p2, p3);
        let rhs = lifted.apply_on(v, &dims, p2, p3);
        let rhs = lifted.apply_on(&rhs, &dims, p1, p3);
        let rhs = lifted.apply_on(&rhs, &dims, p1, p2);
        worst = worst.max(relative_gap(&lhs, &rhs, v));
    }
    Ok(worst)
}

/// `max_v ‖(X₃₄W₄₆X₃₄*W₂₄ − W₂₄W₂₆X₃₄W₄₆X₃₄*)v‖/‖v‖`, legs counted from 1 on
/// `K⊗H⊗K⊗H⊗K⊗H`.
pub fn check_redu(lifted: &LiftedUnitary, probes: &[Vec<C64>]) -> Result<f64> {
    let dims = dims6(lifted);
    check_probe_len(probes, dims.iter().product())?;
    let w = lifted.w().data();
    let x = lifted.x();
    let x_adj = x.adjoint();
    let w24 = LegLayout::new(&dims, &[1, 3])?;
    let w26 = LegLayout::new(&dims, &[1, 5])?;
    let w46 = LegLayout::new(&dims, &[3, 5])?;
    let twisted = |v: &[C64]| x.apply_on(&w46.apply(w, &x_adj.apply_on(v, &dims, 2, 3)), &dims, 2, 3);
    let mut worst: f64 = 0.0;
    for v in probes {
        let lhs = twisted(&w24.apply(w, v));
        let rhs = w24.apply(w, &w26.apply(w, &twisted(v)));
        worst = worst.max(relative_gap(&lhs, &rhs, v));
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeOptions {
    pub tol: f64,
    /// Probe vectors (or quadruples) per family.
    pub count: usize,
    pub seed: u64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions { tol: EXACT_TOL, count: 64, seed: 0 }
    }
}

/// `(Q_M⊗Q_M)^{±1}` on `K⊗H⊗K⊗H`.
fn qm_qm(wp: &WeylPair, q: &PositiveOperator, v: &[C64], dims: &[usize]) -> Vec<C64> {
    let one = linalg::ONE;
    let y = wp.apply_r_pow_on(one, v, dims, 0);
    let y = wp.apply_r_pow_on(one, &y, dims, 2);
    on_leg(q.op().data(), &on_leg(q.op().data(), &y, dims, 1), dims, 3)
}

/// `Q_M^z` on `K⊗H`.
fn qm_pow(wp: &WeylPair, q: &PositiveOperator, z: f64, v: &[C64]) -> Vec<C64> {
    let dims = [wp.n_points(), q.dim()];
    let y = wp.apply_r_pow_on(C64::new(z, 0.0), v, &dims, 0);
    on_leg(q.pow(C64::new(z, 0.0)).data(), &y, &dims, 1)
}

/// `‖[W_M, Q_M⊗Q_M]v‖/‖v‖` over `probes` on `(K⊗H)^{⊗2}`.
pub fn commutator_residual(lifted: &LiftedUnitary, wp: &WeylPair, q: &PositiveOperator, probes: &[Vec<C64>]) -> Result<f64> {
    let (n, d) = (lifted.n_points(), lifted.h_dim());
    let dims = [n, d, n, d];
    check_probe_len(probes, n * d * n * d)?;
    let mut worst: f64 = 0.0;
    for v in probes {
        let lhs = lifted.apply(&qm_qm(wp, q, v, &dims));
        let rhs = qm_qm(wp, q, &lifted.apply(v), &dims);
        worst = worst.max(relative_gap(&lhs, &rhs, v));
    }
    Ok(worst)
}

/// Manageability of `W_M` with `Q_M = r⊗Q` and `W̃_M = (X^⊤₁₂)*W̃₂₄X^⊤₁₂`.
///
/// Residual `inner_product`: over seeded quadruples `ξ, ξ′, η, η′` on `K⊗H`,
/// `|⟨ξ⊗η, W_M(ξ′⊗η′)⟩ − ⟨ξ̄′⊗Q_Mη, W̃_M(ξ̄⊗Q_M⁻¹η′)⟩|` divided by
/// `max(1, ‖Q_Mη‖‖Q_M⁻¹η′‖)` (unit probes). Exact at any grid size.
///
/// Info `commutator`: `‖[W_M, Q_M⊗Q_M]v‖` on bulk probes. It only converges
/// under grid refinement and does not enter the verdict.
pub fn check_manageability_wm(
    lifted: &LiftedUnitary,
    wp: &WeylPair,
    q: &PositiveOperator,
    w_tilde: &Operator,
    opts: &ProbeOptions,
) -> Result<CheckReport> {
    let (n, d) = (lifted.n_points(), lifted.h_dim());
    if wp.n_points() != n || q.dim() != d {
        return Err(MuError::Shape(format!("grid {} / dim Q {} do not match K⊗H = {n}⊗{d}", wp.n_points(), q.dim())));
    }
    if w_tilde.dim() != d * d {
        return Err(MuError::Shape(format!("W̃ has dimension {}, expected {}", w_tilde.dim(), d * d)));
    }
    let mut report = CheckReport::new("manageable (lifted)", opts.tol);
    let vecs = random_probes(n * d, 4 * opts.count, opts.seed);
    let mut worst: f64 = 0.0;
    for quad in vecs.chunks(4) {
        let (xi, xi2, eta, eta2) = (&quad[0], &quad[1], &quad[2], &quad[3]);
        let lhs = linalg::vdot(&linalg::vec_kron(xi, eta), &lifted.apply(&linalg::vec_kron(xi2, eta2)));
        let q_eta = qm_pow(wp, q, 1.0, eta);
        let qinv_eta2 = qm_pow(wp, q, -1.0, eta2);
        let left = linalg::vec_kron(&linalg::vec_conj(xi2), &q_eta);
        let right = lifted.apply_wtilde(w_tilde, &linalg::vec_kron(&linalg::vec_conj(xi), &qinv_eta2));
        let rhs = linalg::vdot(&left, &right);
        let scale = (linalg::vec_norm(&q_eta) * linalg::vec_norm(&qinv_eta2)).max(1.0);
        worst = worst.max((lhs - rhs).norm() / scale);
    }
    report.push("inner_product", worst);
    let bulk = bulk_probes(wp, d, 2, opts.count, opts.seed);
    report.info("commutator", commutator_residual(lifted, wp, q, &bulk)?);
    report.info("probes", opts.count as f64);
    report.info("seed", opts.seed as f64);
    report.info("n_points", n as f64);
    report.info("length", wp.length());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modifier::lifted::{build_wm, build_x, q_m};
    use crate::modifier::weyl::grid_weyl_pair;
    use crate::munit::build_wtilde;
    use crate::tensor::Space;
    use crate::workbench::{cnot, gen_skewed_certificate, perturbed};

    struct Setup {
        wp: WeylPair,
        q: PositiveOperator,
        q_hat: PositiveOperator,
        lifted: LiftedUnitary,
    }

    fn setup(w: &MultUnitary, q_hat_diag: &[f64], n: usize) -> Setup {
        let (q, q_hat) = gen_skewed_certificate(w, q_hat_diag).unwrap();
        let wp = grid_weyl_pair(n, 16.0).unwrap();
        let x = build_x(&wp, &q, &q_hat).unwrap();
        let lifted = build_wm(w, &x).unwrap();
        Setup { wp, q, q_hat, lifted }
    }

    #[test]
    fn trick_holds_for_cnot() {
        let w = cnot();
        let (q, qh) = gen_skewed_certificate(&w, &[1.0, 2.0]).unwrap();
        let ts = [0.5, -1.3, 2.0 * std::f64::consts::PI];
        assert!(check_trick(&w, &q, &qh, &ts).unwrap() < 1e-12);
        assert_eq!(check_trick(&w, &q, &qh, &[0.0]).unwrap(), 0.0);
        let h = Space::hilbert(2);
        let skew = PositiveOperator::new(Operator::on(h, linalg::real_matrix(&[&[2., 1.], &[1., 2.]])).unwrap()).unwrap();
        assert!(check_trick(&w, &q, &skew, &ts).unwrap() > 1e-3);
    }

    #[test]
    fn tozs_vanishes_for_equal_operators() {
        let w = cnot();
        let s = setup(&w, &[1.0, 1.0], 64);
        let probes = bulk_probes(&s.wp, 2, 1, 8, 0);
        assert!(check_tozs(&s.wp, &s.lifted, &s.q, &s.q_hat, &probes).unwrap() < 1e-12);
    }

    #[test]
    fn tozs_on_cnot_data_at_64_points() {
        let s = setup(&cnot(), &[1.0, 2.0], 64);
        let probes = bulk_probes(&s.wp, 2, 1, 64, 0);
        let r = check_tozs(&s.wp, &s.lifted, &s.q, &s.q_hat, &probes).unwrap();
        assert!(r < 1e-5, "{r:e}");
    }

    #[test]
    fn tozs_fails_on_the_wrap_point() {
        let s = setup(&cnot(), &[1.0, 2.0], 64);
        let mut e = vec![linalg::ZERO; 128];
        e[127] = linalg::ONE;
        assert!(check_tozs(&s.wp, &s.lifted, &s.q, &s.q_hat, &[e]).unwrap() > 1e-2);
    }

    #[test]
    fn lifted_pentagon_is_exact() {
        let s = setup(&cnot(), &[1.0, 2.0], 8);
        let probes = random_probes(16usize.pow(3), 64, 0);
        assert!(pentagon_residual_wm(&s.lifted, &probes).unwrap() < 1e-10);
        assert!(check_redu(&s.lifted, &probes).unwrap() < 1e-10);
    }

    #[test]
    fn probe_pentagon_agrees_with_dense_pentagon() {
        let s = setup(&cnot(), &[1.0, 2.0], 4);
        let dense = crate::munit::pentagon_residual(s.lifted.dense().unwrap()).unwrap();
        assert!(dense < 1e-12);
        let bad = setup(&perturbed(&cnot(), 1e-2, 7), &[1.0, 2.0], 4);
        let probes = random_probes(8usize.pow(3), 16, 4);
        let p = pentagon_residual_wm(&bad.lifted, &probes).unwrap();
        let dense = crate::munit::pentagon_residual(bad.lifted.dense().unwrap()).unwrap();
        assert!(p <= dense + 1e-12 && p > 1e-4, "{p:e} vs {dense:e}");
    }

    #[test]
    fn trivial_intertwiner_reduces_to_embedded_pentagon() {
        let s = setup(&cnot(), &[1.0, 1.0], 8);
        let probes = random_probes(16usize.pow(3), 8, 1);
        assert!(pentagon_residual_wm(&s.lifted, &probes).unwrap() < 1e-12);
    }

    #[test]
    fn manageability_exact_family() {
        let w = cnot();
        let s = setup(&w, &[1.0, 2.0], 8);
        let wt = build_wtilde(&w, &s.q).unwrap();
        let r = check_manageability_wm(&s.lifted, &s.wp, &s.q, &wt, &ProbeOptions::default()).unwrap();
        assert!(r.is_pass(), "{r:?}");
        assert!(r.residual("inner_product").unwrap() < 1e-10);
        assert!(r.info["commutator"].is_finite());
    }

    #[test]
    fn manageability_with_trivial_intertwiner() {
        let w = cnot();
        let s = setup(&w, &[1.0, 1.0], 8);
        let wt = build_wtilde(&w, &s.q).unwrap();
        let r = check_manageability_wm(&s.lifted, &s.wp, &s.q, &wt, &ProbeOptions::default()).unwrap();
        assert!(r.residual("inner_product").unwrap() < 1e-12);
        assert!(r.info["commutator"] < 1e-12);
    }

    #[test]
    fn manageability_detects_a_wrong_wtilde() {
        let w = cnot();
        let s = setup(&w, &[1.0, 2.0], 8);
        let q_bad = PositiveOperator::from_diag(&w.h_space(), &[1.0, 2.0]).unwrap();
        let wt = build_wtilde(&w, &q_bad).unwrap();
        let r = check_manageability_wm(&s.lifted, &s.wp, &s.q, &wt, &ProbeOptions::default()).unwrap();
        assert!(!r.is_pass());
    }

    /// Direct evaluation of the lifted relation with dense matrices.
    #[test]
    fn inner_product_relation_against_dense_oracle() {
        let w = cnot();
        let s = setup(&w, &[1.0, 2.0], 4);
        let wt = build_wtilde(&w, &s.q).unwrap();
        let wm = s.lifted.dense().unwrap().data().clone();
        let wtm = s.lifted.wtilde_dense(&wt).unwrap().into_data();
        let qm = q_m(&s.wp, &s.q);
        let (qm_d, qm_inv) = (qm.op().data().clone(), qm.inverse().op().data().clone());
        let v = random_probes(8, 4, 77);
        let lhs = linalg::vdot(&linalg::vec_kron(&v[0], &v[2]), &linalg::matvec(&wm, &linalg::vec_kron(&v[1], &v[3])));
        let left = linalg::vec_kron(&linalg::vec_conj(&v[1]), &linalg::matvec(&qm_d, &v[2]));
        let right = linalg::matvec(&wtm, &linalg::vec_kron(&linalg::vec_conj(&v[0]), &linalg::matvec(&qm_inv, &v[3])));
        assert!((lhs - linalg::vdot(&left, &right)).norm() < 1e-12);
    }
}
