//! Report files: JSON for machines, markdown for people.
//!
//! Both embed the tool version and the configuration hash and nothing
//! time-dependent, so equal inputs give byte-identical files.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::qgroup::extract::residual_table;
use crate::report::{CheckReport, Verdict};

pub const TOOL: &str = concat!("modmu ", env!("CARGO_PKG_VERSION"));

/// Whether a section is a positive case or a negative control.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub title: String,
    pub expect: Expect,
    /// The observed verdict matches `expect`.
    pub ok: bool,
    pub report: CheckReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub title: String,
    pub tool: String,
    pub config_hash: String,
    pub config: RunConfig,
    pub verdict: Verdict,
    pub sections: Vec<Section>,
}

impl ReportFile {
    pub fn new(title: impl Into<String>, config: &RunConfig) -> Self {
        ReportFile {
            title: title.into(),
            tool: TOOL.to_string(),
            config_hash: config.hash(),
            config: RunConfig { out: None, ..config.clone() },
            verdict: Verdict::Pass,
            sections: Vec::new(),
        }
    }

    pub fn add(&mut self, title: impl Into<String>, expect: Expect, report: CheckReport) {
        let ok = report.is_pass() == (expect == Expect::Pass);
        if !ok {
            self.verdict = Verdict::Fail;
        }
        self.sections.push(Section { title: title.into(), expect, ok, report });
    }

    pub fn is_pass(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_markdown(&self) -> String {
        let word = |pass: bool| if pass { "pass" } else { "fail" };
        let mut out = String::new();
        let _ = writeln!(out, "# {}\n", self.title);
        let _ = writeln!(out, "- tool: {}", self.tool);
        let _ = writeln!(out, "- config: {}", self.config_hash);
        let _ = writeln!(out, "- verdict: {}", if self.is_pass() { "PASS" } else { "FAIL" });
        for s in &self.sections {
            let _ = writeln!(out, "\n## {}\n", s.title);
            let _ = writeln!(
                out,
                "expected: {}, observed: {}, {}\n",
                word(s.expect == Expect::Pass),
                word(s.report.is_pass()),
                if s.ok { "as expected" } else { "UNEXPECTED" }
            );
            out.push_str(&residual_table(&s.report));
            if !s.report.info.is_empty() {
                out.push_str("\n| info | value |\n|---|---|\n");
                for (k, v) in &s.report.info {
                    let _ = writeln!(out, "| {k} | {v:.6e} |");
                }
            }
            for n in &s.report.notes {
                let _ = writeln!(out, "\n> {n}");
            }
        }
        out
    }
}
