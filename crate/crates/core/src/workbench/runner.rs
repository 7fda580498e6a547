//! The commands behind `mu`, as library functions.

use std::fs;
use std::path::Path;

use super::config::{RunConfig, TOL_EXACT, TOL_TRANSPORT};
use super::generators::{gen_skewed_certificate, perturbed};
use super::groups::{gen_group_kt, GroupTable};
use super::reports::{Expect, ReportFile};
use crate::error::{MuError, Result};
use crate::modifier::{
    build_wm, build_x, bulk_probes, check_manageability_wm, check_redu, check_tozs, check_trick, convergence_study,
    grid_weyl_pair, pentagon_residual_wm, span_transport, BaseStructure, ConvergenceRow, ProbeOptions,
};
use crate::munit::{
    check_manageable, check_modular, dual, dual_modular, find_certificate, pentagon_residual,
    pentagon_residual_probes, random_probes, CheckOptions, ModularStructure, MultUnitary, SearchOptions, SearchOutcome,
};
use crate::qgroup::{algebra_left, algebra_right, extract, kappa, unitary_antipode, ExtractOptions, QGData};
use crate::report::CheckReport;
use crate::tensor::io;
use crate::tensor::linalg;
use crate::tensor::{Operator, PositiveOperator, Space};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Bin,
}

/// Reads an operator file, binary when it starts with the magic bytes.
pub fn read_operator(path: &Path) -> Result<Operator> {
    let bytes = fs::read(path).map_err(|e| MuError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    if bytes.starts_with(io::MAGIC) {
        io::from_binary(&bytes)
    } else {
        let text = String::from_utf8(bytes).map_err(|_| MuError::Parse(format!("{}: not UTF-8 JSON", path.display())))?;
        io::from_json(&text)
    }
}

pub fn write_operator(op: &Operator, path: &Path, format: Format) -> Result<()> {
    match format {
        Format::Json => fs::write(path, io::to_json(op)?)?,
        Format::Bin => fs::write(path, io::to_binary(op)?)?,
    }
    Ok(())
}

pub fn load_unitary(path: &Path) -> Result<MultUnitary> {
    MultUnitary::new(read_operator(path)?)
}

pub fn load_positive(path: &Path) -> Result<PositiveOperator> {
    PositiveOperator::new(read_operator(path)?)
}

/// What `mu gen` produces.
#[derive(Clone, Debug, PartialEq)]
pub enum Source {
    Cyclic(usize),
    Klein,
    Symmetric(usize),
    /// `ℤ_a × ℤ_b`.
    Product(usize, usize),
    /// Group table CSV text.
    Table(String),
    /// A positive diagonal operator.
    Diag(Vec<f64>),
}

/// Builds the requested operator; `perturb` multiplies a unitary by
/// `exp(iεh)` for a seeded Hermitian `h`.
pub fn generate(source: &Source, perturb: Option<f64>, seed: u64) -> Result<Operator> {
    let table = match source {
        Source::Cyclic(n) if *n >= 1 => GroupTable::cyclic(*n),
        Source::Cyclic(_) => return Err(MuError::Parameter("group order must be at least 1".into())),
        Source::Klein => GroupTable::klein(),
        Source::Symmetric(k) if (1..=5).contains(k) => GroupTable::symmetric(*k),
        Source::Symmetric(k) => return Err(MuError::Parameter(format!("S_{k}: degree must lie in 1..=5"))),
        Source::Product(a, b) if *a >= 1 && *b >= 1 => GroupTable::cyclic(*a).direct_product(&GroupTable::cyclic(*b)),
        Source::Product(..) => return Err(MuError::Parameter("factor orders must be at least 1".into())),
        Source::Table(text) => GroupTable::from_csv(text)?,
        Source::Diag(values) => {
            if perturb.is_some() {
                return Err(MuError::Parameter("--perturb applies to unitaries only".into()));
            }
            return Ok(PositiveOperator::from_diag(&Space::hilbert(values.len()), values)?.op().clone());
        }
    };
    let w = gen_group_kt(&table)?;
    Ok(match perturb {
        Some(eps) if eps.is_finite() => perturbed(&w, eps, seed).op().clone(),
        Some(eps) => return Err(MuError::Parameter(format!("perturbation {eps} is not finite"))),
        None => w.op().clone(),
    })
}

fn pentagon_report(w: &MultUnitary, cfg: &RunConfig) -> Result<CheckReport> {
    let mut r = CheckReport::new("pentagon", cfg.tol(TOL_EXACT));
    let dim = w.h_dim().pow(3);
    if dim <= cfg.dense_budget {
        r.push("pentagon", pentagon_residual(w)?);
    } else {
        r.push("pentagon", pentagon_residual_probes(w, &random_probes(dim, cfg.probes, cfg.seed))?);
        r.info("probes", cfg.probes as f64);
        r.info("seed", cfg.seed as f64);
        r.note(format!("dim(H)³ = {dim} exceeds the dense budget; maximum over probe vectors"));
    }
    Ok(r)
}

pub fn check_pentagon_cmd(w: &MultUnitary, cfg: &RunConfig) -> Result<ReportFile> {
    let mut f = ReportFile::new("pentagon check", cfg);
    f.add("pentagon", Expect::Pass, pentagon_report(w, cfg)?);
    Ok(f)
}

fn check_opts(cfg: &RunConfig) -> CheckOptions {
    CheckOptions { tol: cfg.tol(TOL_EXACT), seed: cfg.seed }
}

pub fn check_modular_cmd(w: &MultUnitary, q: &PositiveOperator, q_hat: &PositiveOperator, cfg: &RunConfig) -> Result<ReportFile> {
    let mut f = ReportFile::new("modularity check", cfg);
    f.add("modular", Expect::Pass, check_modular(w, q, q_hat, &check_opts(cfg))?);
    Ok(f)
}

pub fn check_manageable_cmd(w: &MultUnitary, q: &PositiveOperator, cfg: &RunConfig) -> Result<ReportFile> {
    let mut f = ReportFile::new("manageability check", cfg);
    f.add("manageable", Expect::Pass, check_manageable(w, q, &check_opts(cfg))?);
    Ok(f)
}

pub fn extract_cmd(w: &MultUnitary, q: &PositiveOperator, q_hat: &PositiveOperator, cfg: &RunConfig) -> Result<QGData> {
    let opts = ExtractOptions { tol: cfg.tol(TOL_EXACT), seed: cfg.seed, ..Default::default() };
    extract(w, q, q_hat, &opts)
}

/// Certificate search; the report carries the modular check of the winner,
/// or the best objective when no restart validated.
pub fn certificate_cmd(w: &MultUnitary, cfg: &RunConfig) -> Result<(SearchOutcome, ReportFile)> {
    let opts = SearchOptions { tol: cfg.tol(TOL_EXACT), seed: cfg.seed, ..Default::default() };
    let outcome = find_certificate(w, &opts)?;
    let mut report = match &outcome.certificate {
        Some(cert) => cert.report.clone(),
        None => {
            let mut r = CheckReport::new("certificate search", opts.tol);
            r.push("best_objective", outcome.best_objective);
            r
        }
    };
    report.note(outcome.diagnostic.clone());
    report.info("restarts", outcome.restarts_run as f64);
    if let Some(k) = outcome.fixed_space_dim {
        report.info("fixed_space_dim", k as f64);
    }
    let mut f = ReportFile::new("certificate search", cfg);
    f.add("certificate", Expect::Pass, report);
    Ok((outcome, f))
}

const TRICK_TIMES: [f64; 3] = [0.5, -1.3, 2.0 * std::f64::consts::PI];
const T_SAMPLES: [f64; 3] = [0.3, 1.7, -2.5];

/// The lifted-construction suite on `(W, Q, Q̂)` and the convergence rows.
pub fn modify_cmd(
    w: &MultUnitary,
    q: &PositiveOperator,
    q_hat: &PositiveOperator,
    cfg: &RunConfig,
) -> Result<(ReportFile, Vec<ConvergenceRow>)> {
    let tol = cfg.tol(TOL_EXACT);
    let mut f = ReportFile::new("lifted construction", cfg);
    let cert = ModularStructure::certify(w, q.clone(), q_hat.clone(), &check_opts(cfg))?;
    f.add("certificate", Expect::Pass, cert.report.clone());

    let mut trick = CheckReport::new("leg exchange", tol);
    trick.push("trick", check_trick(w, q, q_hat, &TRICK_TIMES)?);
    f.add("leg exchange", Expect::Pass, trick);

    let (n, d) = (cfg.grid_n, w.h_dim());
    let wp = grid_weyl_pair(n, cfg.grid_len)?;
    let lifted = build_wm(w, &build_x(&wp, q, q_hat)?)?;
    let mut pent = CheckReport::new("lifted pentagon", tol);
    let probes = random_probes((n * d).pow(3), cfg.probes, cfg.seed);
    pent.push("pentagon", pentagon_residual_wm(&lifted, &probes)?);
    pent.push("reduced", check_redu(&lifted, &probes)?);
    pent.info("probes", cfg.probes as f64);
    pent.info("seed", cfg.seed as f64);
    f.add(format!("lifted pentagon (K dim {n})"), Expect::Pass, pent);

    let probe_opts = ProbeOptions { tol, count: cfg.probes, seed: cfg.seed };
    let mut manage = check_manageability_wm(&lifted, &wp, q, &cert.w_tilde, &probe_opts)?;
    let bulk = bulk_probes(&wp, d, 1, cfg.probes, cfg.seed);
    manage.info("tozs", check_tozs(&wp, &lifted, q, q_hat, &bulk)?);
    manage.note("commutator and tozs depend on the grid and do not enter the verdict");
    f.add(format!("lifted manageability (K dim {n})"), Expect::Pass, manage);

    let nt = cfg.transport_n;
    if (nt * d).pow(2) <= cfg.dense_budget {
        f.add(format!("transport (K dim {nt})"), Expect::Pass, transport_report(w, q, q_hat, &cert.w_tilde, cfg)?);
    } else {
        let mut skipped = CheckReport::new("transport", cfg.tol(TOL_TRANSPORT));
        skipped.note(format!("skipped: (K⊗H)⊗(K⊗H) has dimension {} > dense budget {}", (nt * d).pow(2), cfg.dense_budget));
        f.add(format!("transport (K dim {nt})"), Expect::Pass, skipped);
    }
    let rows = convergence_study(w, q, q_hat, &cfg.grids(), cfg.grid_len, cfg.probes, cfg.seed)?;
    Ok((f, rows))
}

fn transport_report(
    w: &MultUnitary,
    q: &PositiveOperator,
    q_hat: &PositiveOperator,
    w_tilde: &Operator,
    cfg: &RunConfig,
) -> Result<CheckReport> {
    let tol = cfg.tol(TOL_TRANSPORT);
    let a = algebra_left(w)?;
    let a_hat = algebra_right(w)?;
    let k = match kappa(w, &a, cfg.tol(TOL_EXACT)) {
        Ok(k) => k,
        Err(MuError::Precondition(msg)) => {
            let mut r = CheckReport::new("span transport", tol);
            r.push("kappa", f64::INFINITY);
            r.note(msg);
            return Ok(r);
        }
        Err(e) => return Err(e),
    };
    let (r_map, _) = unitary_antipode(&a, &k, q, &T_SAMPLES, tol);
    let wp = grid_weyl_pair(cfg.transport_n, cfg.grid_len)?;
    let lifted = build_wm(w, &build_x(&wp, q, q_hat)?)?;
    let base = BaseStructure { a: &a, a_hat: &a_hat, q, r_map: &r_map, w_tilde };
    span_transport(&lifted, &wp, &base, &T_SAMPLES, tol)
}

fn skewed_diag(n: usize) -> Vec<f64> {
    (1..=n).map(|k| k as f64).collect()
}

/// The built-in example matrix: every group with pentagon, manageable and
/// skewed certificates and duality; extraction on `ℤ₃`; the lifted suite on
/// `ℤ₂`; two negative controls.
pub fn example_matrix(cfg: &RunConfig) -> Result<ReportFile> {
    let mut f = ReportFile::new("example matrix", cfg);
    let opts = check_opts(cfg);
    let groups = [
        ("Z2", GroupTable::cyclic(2)),
        ("Z3", GroupTable::cyclic(3)),
        ("Z4", GroupTable::cyclic(4)),
        ("Z2xZ2", GroupTable::klein()),
        ("S3", GroupTable::symmetric(3)),
    ];
    for (name, table) in &groups {
        let w = gen_group_kt(table)?;
        f.add(format!("{name} pentagon"), Expect::Pass, pentagon_report(&w, cfg)?);
        let id = PositiveOperator::identity(&w.h_space());
        f.add(format!("{name} manageable"), Expect::Pass, check_manageable(&w, &id, &opts)?);
        let (q, q_hat) = gen_skewed_certificate(&w, &skewed_diag(w.h_dim()))?;
        let cert = ModularStructure::certify(&w, q, q_hat, &opts)?;
        f.add(format!("{name} skewed certificate"), Expect::Pass, cert.report.clone());
        let mut dual_report = dual_modular(&w, &cert, &opts)?.report;
        let twice = dual(&dual(&w));
        dual_report.push("involution", linalg::max_abs(&(twice.data() - w.data())));
        f.add(format!("{name} dual"), Expect::Pass, dual_report);
    }
    let z3 = gen_group_kt(&GroupTable::cyclic(3))?;
    let (q, q_hat) = gen_skewed_certificate(&z3, &[1.0, 2.0, 4.0])?;
    f.add("Z3 extraction", Expect::Pass, extract_cmd(&z3, &q, &q_hat, cfg)?.report);

    let cnot = gen_group_kt(&GroupTable::cyclic(2))?;
    let (q, q_hat) = gen_skewed_certificate(&cnot, &[1.0, 2.0])?;
    let (lifted, _) = modify_cmd(&cnot, &q, &q_hat, &RunConfig { refinements: 0, ..cfg.clone() })?;
    for s in lifted.sections.into_iter().skip(1) {
        f.add(format!("Z2 {}", s.title), s.expect, s.report);
    }

    f.add("perturbed Z2 pentagon", Expect::Fail, pentagon_report(&perturbed(&cnot, 1e-2, 7), cfg)?);
    let h = cnot.h_space();
    let swapped = check_modular(&cnot, &PositiveOperator::from_diag(&h, &[1.0, 2.0])?, &PositiveOperator::identity(&h), &opts)?;
    f.add("Z2 with Q and Q̂ exchanged", Expect::Fail, swapped);
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_cnot() {
        let op = generate(&Source::Cyclic(2), None, 0).unwrap();
        let expected = linalg::real_matrix(&[&[1., 0., 0., 0.], &[0., 1., 0., 0.], &[0., 0., 0., 1.], &[0., 0., 1., 0.]]);
        assert_eq!(op.data(), &expected);
        let trivial = generate(&Source::Cyclic(1), None, 0).unwrap();
        assert_eq!(trivial.data(), &linalg::real_matrix(&[&[1.0]]));
        let diag = generate(&Source::Diag(vec![1.0, 2.0]), None, 0).unwrap();
        assert_eq!(diag.data(), &linalg::diag_real(&[1.0, 2.0]));
        assert!(generate(&Source::Diag(vec![1.0, -2.0]), None, 0).is_err());
        assert!(generate(&Source::Diag(vec![1.0]), Some(0.1), 0).is_err());
        assert!(generate(&Source::Symmetric(9), None, 0).is_err());
        let p = generate(&Source::Cyclic(2), Some(1e-2), 7).unwrap();
        assert_eq!(&p, perturbed(&MultUnitary::new(op).unwrap(), 1e-2, 7).op());
    }

    #[test]
    fn operator_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let op = generate(&Source::Symmetric(3), Some(1e-3), 1).unwrap();
        for (name, fmt) in [("w.json", Format::Json), ("w.bin", Format::Bin)] {
            let path = dir.path().join(name);
            write_operator(&op, &path, fmt).unwrap();
            assert_eq!(read_operator(&path).unwrap(), op);
        }
    }

    #[test]
    fn modify_on_cnot() {
        let w = crate::workbench::cnot();
        let (q, q_hat) = gen_skewed_certificate(&w, &[1.0, 2.0]).unwrap();
        let cfg = RunConfig { probes: 8, ..Default::default() };
        let (report, rows) = modify_cmd(&w, &q, &q_hat, &cfg).unwrap();
        assert!(report.is_pass(), "{}", report.to_markdown());
        assert_eq!(report.sections.len(), 5);
        assert_eq!(rows.len(), 2 * (1 + 8 + 8));
    }

    #[test]
    fn example_matrix_meets_expectations() {
        let cfg = RunConfig { probes: 8, ..Default::default() };
        let f = example_matrix(&cfg).unwrap();
        assert!(f.is_pass(), "{}", f.to_markdown());
        assert_eq!(f, example_matrix(&cfg).unwrap());
    }
}
