//! Batch front end: config files, repeated sessions, detection sweeps and the
//! built-in replay of the worked examples.

mod paper_check;
mod render;
mod run;
mod sweep;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocol::SessionConfig;

pub use paper_check::{paper_check, CheckResult};
pub use render::{render_pairs_csv, render_tests_csv, render_text};
pub use run::{cmd_run, load_run_config, RunOverrides, RunSummary};
pub use sweep::{cmd_sweep, sweep_csv, SweepRow, SWEEP_CSV_HEADER};

/// JSON schema for per-session reports.
pub const REPORT_SCHEMA: &str = include_str!("../../schema/session_report.v1.json");

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 1,
            HarnessError::Io { .. } => 2,
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        HarnessError::Io { context: context.into(), source }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
    Text,
}

fn default_reps() -> usize {
    1
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("qscdc-out")
}

/// Contents of a `run` config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub session: SessionConfig,
    #[serde(default)]
    pub format: ReportFormat,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default = "default_reps")]
    pub reps: usize,
}
