//! Deterministic campaign reports. Rows carry their sub-seeds, failures come first, and wall
//! time is kept out of the bytes.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::CliResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Everything that determines a campaign's random draws and limits.
#[derive(Clone, Debug, Serialize)]
pub struct CampaignConfig {
    pub command: String,
    pub p: u32,
    pub prec: u32,
    pub seed: u64,
    pub budget: usize,
    pub format: Format,
    pub params: BTreeMap<String, String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub case: usize,
    pub sub_seed: u64,
    pub status: Status,
    pub input: String,
    pub lhs: String,
    pub rhs: String,
    /// Exactly `0` on pass.
    pub residual: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub config: CampaignConfig,
    pub summary: Summary,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn new(config: CampaignConfig, mut rows: Vec<Row>) -> Report {
        rows.sort_by_key(|r| (r.status == Status::Pass, r.case));
        let passed = rows.iter().filter(|r| r.status == Status::Pass).count();
        let summary = Summary { cases: rows.len(), passed, failed: rows.len() - passed };
        Report { config, summary, rows }
    }

    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_bytes(&self) -> CliResult<Vec<u8>> {
        match self.config.format {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(self)?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => {
                let mut out = Vec::new();
                let c = &self.config;
                writeln!(out, "# command={}", c.command)?;
                writeln!(out, "# p={} prec={} seed={} budget={}", c.p, c.prec, c.seed, c.budget)?;
                for (k, v) in &c.params {
                    writeln!(out, "# {k}={v}")?;
                }
                let s = &self.summary;
                writeln!(out, "# cases={} passed={} failed={}", s.cases, s.passed, s.failed)?;
                let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
                w.write_record(["case", "sub_seed", "status", "input", "lhs", "rhs", "residual", "detail"])?;
                for r in &self.rows {
                    w.serialize(r)?;
                }
                w.into_inner().map_err(|e| std::io::Error::other(e.to_string()).into())
            }
        }
    }

    /// Write to `path`, or to standard output.
    pub fn emit(&self, path: Option<&Path>) -> CliResult<()> {
        let bytes = self.to_bytes()?;
        match path {
            Some(p) => std::fs::write(p, bytes)?,
            None => std::io::stdout().write_all(&bytes)?,
        }
        Ok(())
    }
}
