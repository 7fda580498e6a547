//! The full extraction pipeline and its serialized form.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::algebra::{algebra_left, algebra_right, check_multiplier, SliceAlgebra};
use super::antipode::{check_kappa, kappa_fit, unitary_antipode};
use super::comult::{check_comult, structure_constants};
use super::identities::{check_comult_covariance, check_scaling_implementation, check_script_t, check_transpose_antipode, check_wtilde_comult};
use crate::error::Result;
use crate::munit::{build_wtilde, check_modular_with, pentagon_residual, CheckOptions, MultUnitary, EXACT_TOL};
use crate::report::CheckReport;
use crate::tensor::io::MatRecord;
use crate::tensor::{Mat, PositiveOperator, DENSE_BUDGET};

#[derive(Clone, Debug, PartialEq)]
pub struct ExtractOptions {
    pub tol: f64,
    pub t_samples: Vec<f64>,
    pub seed: u64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions { tol: EXACT_TOL, t_samples: vec![0.3, 1.7, -2.5], seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraRecord {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub basis: Vec<MatRecord>,
}

impl From<&SliceAlgebra> for AlgebraRecord {
    fn from(a: &SliceAlgebra) -> Self {
        AlgebraRecord { rank: a.rank(), singular_values: a.singular_values().to_vec(), basis: a.basis().iter().map(MatRecord::from).collect() }
    }
}

/// Everything extracted from `(W, Q, Q̂)`: the algebras, `Δ` as structure
/// constants on the basis of `A`, `κ` and `R` as coefficient matrices, the
/// generator `2 log Q` of the scaling group, and all residuals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QGData {
    pub algebra: AlgebraRecord,
    pub algebra_hat: AlgebraRecord,
    /// `comult[μ][(ν,ρ)]`: coefficient of `a_ν⊗a_ρ` in `Δ(a_μ)`.
    pub comult: Vec<MatRecord>,
    pub kappa: Option<MatRecord>,
    pub r_map: Option<MatRecord>,
    pub tau_log: MatRecord,
    pub report: CheckReport,
}

fn algebra_checks(report: &mut CheckReport, name: &str, a: &SliceAlgebra) {
    report.info(format!("{name}.rank"), a.rank() as f64);
    report.push(format!("{name}.orthonormal"), a.orthonormality_residual());
    report.push(format!("{name}.closure"), a.closure_residual());
    report.push(format!("{name}.star"), a.star_residual());
    report.push(format!("{name}.unital"), a.unital_residual());
    if !(a.closure_residual() < report.tolerance) {
        report.note(format!("{name}: slice span is not an algebra (W is likely not multiplicative)"));
    }
}

/// Runs every structural check on `(W, Q, Q̂)` and collects the data.
///
/// Stages that need a well-defined coinverse are skipped, with a note, when
/// the least-squares fit of `κ` is inconsistent.
pub fn extract(w: &MultUnitary, q: &PositiveOperator, q_hat: &PositiveOperator, opts: &ExtractOptions) -> Result<QGData> {
    let tol = opts.tol;
    let mut report = CheckReport::new("extraction", tol);
    if w.h_dim().pow(3) <= DENSE_BUDGET {
        report.push("pentagon", pentagon_residual(w)?);
    }
    let w_tilde = build_wtilde(w, q)?;
    let cert = check_modular_with(w, q, q_hat, &w_tilde, &CheckOptions { tol, seed: opts.seed })?;
    report.absorb("certificate", &cert);

    let a = algebra_left(w)?;
    let a_hat = algebra_right(w)?;
    algebra_checks(&mut report, "a", &a);
    algebra_checks(&mut report, "a_hat", &a_hat);
    let multiplier = check_multiplier(w, &a_hat, &a)?;
    report.push("multiplier", multiplier);
    report.absorb("comult", &check_comult(w, &a, tol)?);

    let k = kappa_fit(w, &a)?;
    report.absorb("kappa", &check_kappa(&a, &k, tol));
    let (kappa, r_map) = if k.consistency < tol && k.range_leak < tol {
        let (r, rep) = unitary_antipode(&a, &k, q, &opts.t_samples, tol);
        report.absorb("antipode", &rep);
        report.absorb("covariance", &check_comult_covariance(w, &a, q, &r, &opts.t_samples, tol));
        report.absorb("scaling", &check_scaling_implementation(&a, q, &r, &opts.t_samples, tol));
        if multiplier < tol {
            report.push("transpose_antipode", check_transpose_antipode(w, &a_hat, &a, &r, &w_tilde, tol)?);
        } else {
            report.note("transpose/antipode identity skipped: W does not decompose over Â⊗A");
        }
        (Some(MatRecord::from(&k.matrix)), Some(MatRecord::from(&r)))
    } else {
        report.note("coinverse is not well defined on the slice span; antipode stages skipped");
        (None, None)
    };
    report.push("script_t", check_script_t(w, &w_tilde, q_hat)?);
    if w.h_dim().pow(3) <= DENSE_BUDGET {
        report.push("wtilde_comult", check_wtilde_comult(w, &w_tilde)?);
    }
    report.note("finite dimension: κ is everywhere defined on A and closures are trivial");

    let (consts, _) = structure_constants(w, &a);
    let tau_log = q.log().data().map(|z| z * 2.0);
    Ok(QGData {
        algebra: AlgebraRecord::from(&a),
        algebra_hat: AlgebraRecord::from(&a_hat),
        comult: consts.iter().map(MatRecord::from).collect(),
        kappa,
        r_map,
        tau_log: MatRecord::from(&tau_log as &Mat),
        report,
    })
}

impl QGData {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("extraction data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| crate::MuError::Parse(e.to_string()))
    }

    /// Human-readable summary: ranks, every residual with its tolerance, notes.
    pub fn to_markdown(&self) -> String {
        let r = &self.report;
        let mut out = String::new();
        let verdict = if r.is_pass() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "# Extraction report\n");
        let _ = writeln!(out, "Verdict: **{verdict}**\n");
        let _ = writeln!(out, "| algebra | rank |\n|---|---|");
        let _ = writeln!(out, "| A | {} |\n| Â | {} |\n", self.algebra.rank, self.algebra_hat.rank);
        out.push_str(&residual_table(r));
        if !r.notes.is_empty() {
            let _ = writeln!(out, "\n## Notes\n");
            for n in &r.notes {
                let _ = writeln!(out, "- {n}");
            }
        }
        out
    }
}

/// Markdown table of residuals, tolerances and per-residual verdicts.
pub fn residual_table(r: &CheckReport) -> String {
    let mut out = String::from("| residual | value | tolerance | pass |\n|---|---|---|---|\n");
    for (name, value) in &r.residuals {
        let ok = r.passed.get(name).copied().unwrap_or(false);
        let _ = writeln!(out, "| {name} | {value:.3e} | {:.1e} | {} |", r.tolerance_of(name), if ok { "yes" } else { "no" });
    }
    out
}
