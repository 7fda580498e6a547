//! Run configuration shared by the command-line driver and reports.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{MuError, Result};
use crate::munit::EXACT_TOL;
use crate::tensor::DENSE_BUDGET;

/// Tolerance for identities that hold up to rounding.
pub const TOL_EXACT: &str = "exact";
/// Tolerance for slice-span comparisons of the lifted unitary.
pub const TOL_TRANSPORT: &str = "transport";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    pub probes: usize,
    /// Grid size for the lifted construction.
    pub grid_n: usize,
    pub grid_len: f64,
    /// Grid size for the dense transport checks.
    pub transport_n: usize,
    /// Number of grid doublings in the convergence study.
    pub refinements: usize,
    /// Largest total dimension materialized densely.
    pub dense_budget: usize,
    /// Output file or directory; not part of the hash.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tolerances: BTreeMap::from([(TOL_EXACT.to_string(), EXACT_TOL), (TOL_TRANSPORT.to_string(), 1e-8)]),
            seed: 0,
            probes: 64,
            grid_n: 8,
            grid_len: 16.0,
            transport_n: 4,
            refinements: 1,
            dense_budget: DENSE_BUDGET,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| MuError::Parse(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((k, v)) = self.tolerances.iter().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return Err(MuError::Parameter(format!("tolerance {k} = {v} must be positive")));
        }
        if self.probes == 0 {
            return Err(MuError::Parameter("probe count must be at least 1".into()));
        }
        for (name, n) in [("grid_n", self.grid_n), ("transport_n", self.transport_n)] {
            if n < 2 || !n.is_power_of_two() {
                return Err(MuError::Parameter(format!("{name} = {n} must be a power of two ≥ 2")));
            }
        }
        if !(self.grid_len > 0.0 && self.grid_len.is_finite()) {
            return Err(MuError::Parameter(format!("grid_len = {} must be positive", self.grid_len)));
        }
        if self.refinements > 8 {
            return Err(MuError::Parameter(format!("refinements = {} exceeds 8", self.refinements)));
        }
        if self.dense_budget == 0 || self.dense_budget > DENSE_BUDGET {
            return Err(MuError::Parameter(format!("dense_budget must lie in 1..={DENSE_BUDGET}")));
        }
        Ok(())
    }

    /// Tolerance `name`, falling back to the exact tolerance.
    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances.get(name).or_else(|| self.tolerances.get(TOL_EXACT)).copied().unwrap_or(EXACT_TOL)
    }

    /// `sha256:` of the canonical JSON without the output path.
    pub fn hash(&self) -> String {
        let canonical = RunConfig { out: None, ..self.clone() };
        let json = serde_json::to_string(&canonical).expect("config serializes");
        format!("sha256:{}", hex::encode(Sha256::digest(json.as_bytes())))
    }

    /// Grid sizes of the convergence study.
    pub fn grids(&self) -> Vec<usize> {
        (0..=self.refinements).map(|k| self.grid_n << k).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.tol(TOL_EXACT), 1e-10);
        assert_eq!(cfg.tol("unknown"), 1e-10);
        assert_eq!(cfg.grids(), vec![8, 16]);
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            RunConfig { probes: 0, ..Default::default() },
            RunConfig { grid_n: 12, ..Default::default() },
            RunConfig { grid_len: -1.0, ..Default::default() },
            RunConfig { dense_budget: 10_000, ..Default::default() },
            RunConfig { tolerances: BTreeMap::from([("exact".into(), 0.0)]), ..Default::default() },
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(MuError::Parameter(_))), "{cfg:?}");
        }
        assert!(matches!(RunConfig::from_json("{\"probes\": 1, \"bogus\": 2}"), Err(MuError::Parse(_))));
        assert!(matches!(RunConfig::from_json("{\"probes\": 0}"), Err(MuError::Parameter(_))));
    }

    #[test]
    fn hash_ignores_output_path_and_tracks_content() {
        let a = RunConfig::default();
        let b = RunConfig { out: Some("elsewhere".into()), ..Default::default() };
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), RunConfig { seed: 1, ..Default::default() }.hash());
        assert!(a.hash().starts_with("sha256:") && a.hash().len() == 7 + 64);
        let partial = RunConfig::from_json("{\"seed\": 3}").unwrap();
        assert_eq!(partial, RunConfig { seed: 3, ..Default::default() });
    }
}
