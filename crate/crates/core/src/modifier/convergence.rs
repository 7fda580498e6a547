//! Grid-refinement study of the grid-limited residuals.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::checks::{check_tozs, commutator_residual};
use super::lifted::{build_wm, build_x};
use super::weyl::{bulk_probes, grid_weyl_pair};
use crate::error::{MuError, Result};
use crate::munit::MultUnitary;
use crate::tensor::PositiveOperator;

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n_points: usize,
    pub length: f64,
    pub check_name: String,
    pub probe_id: usize,
    pub residual: f64,
}

/// Per-probe residuals of `translation` (shift by 1 of the bulk Gaussian),
/// `tozs` (`X*(r⊗Q)X = r⊗Q̂`) and `commutator` (`[W_M, Q_M⊗Q_M]`) for each
/// grid size, on bulk probes with the same seed at every size.
pub fn convergence_study(
    w: &MultUnitary,
    q: &PositiveOperator,
    q_hat: &PositiveOperator,
    grids: &[usize],
    length: f64,
    probes: usize,
    seed: u64,
) -> Result<Vec<ConvergenceRow>> {
    let d = w.h_dim();
    let mut rows = Vec::new();
    for &n in grids {
        let wp = grid_weyl_pair(n, length)?;
        let lifted = build_wm(w, &build_x(&wp, q, q_hat)?)?;
        let row = |name: &str, probe_id: usize, residual: f64| ConvergenceRow {
            n_points: n,
            length,
            check_name: name.into(),
            probe_id,
            residual,
        };
        rows.push(row("translation", 0, wp.translation_error(&wp.bulk_gaussian(), 1.0)));
        for (k, v) in bulk_probes(&wp, d, 1, probes, seed).iter().enumerate() {
            rows.push(row("tozs", k, check_tozs(&wp, &lifted, q, q_hat, std::slice::from_ref(v))?));
        }
        for (k, v) in bulk_probes(&wp, d, 2, probes, seed).iter().enumerate() {
            rows.push(row("commutator", k, commutator_residual(&lifted, &wp, q, std::slice::from_ref(v))?));
        }
    }
    Ok(rows)
}

/// Maximum residual of `check_name` at `n_points`.
pub fn max_residual(rows: &[ConvergenceRow], check_name: &str, n_points: usize) -> Option<f64> {
    rows.iter()
        .filter(|r| r.check_name == check_name && r.n_points == n_points)
        .map(|r| r.residual)
        .reduce(f64::max)
}

pub fn write_csv<W: Write>(rows: &[ConvergenceRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for r in rows {
        writer.serialize(r).map_err(|e| MuError::Parse(e.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workbench::{cnot, gen_skewed_certificate};

    #[test]
    fn csv_layout_and_determinism() {
        let w = cnot();
        let (q, qh) = gen_skewed_certificate(&w, &[1.0, 2.0]).unwrap();
        let rows = convergence_study(&w, &q, &qh, &[16, 32], 16.0, 3, 5).unwrap();
        assert_eq!(rows.len(), 2 * (1 + 3 + 3));
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n_points,length,check_name,probe_id,residual\n"));
        let again = convergence_study(&w, &q, &qh, &[16, 32], 16.0, 3, 5).unwrap();
        assert_eq!(rows, again);
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let parsed: Vec<ConvergenceRow> = reader.deserialize().map(|r| r.unwrap()).collect();
        assert_eq!(parsed, rows);
        assert!(max_residual(&rows, "tozs", 32).is_some());
        assert!(max_residual(&rows, "tozs", 64).is_none());
    }
}
