use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::render::{render_pairs_csv, render_tests_csv, render_text};
use super::{HarnessError, ReportFormat, RunConfig};
use crate::protocol::{run_session, validate_config, SessionReport, REPORT_SCHEMA_VERSION};

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct RunOverrides {
    pub seed: Option<u64>,
    pub reps: Option<usize>,
    pub format: Option<ReportFormat>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub sessions: usize,
    pub base_seed: u64,
    /// Mean per-session recovery accuracy.
    pub recovery_rate: f64,
    /// Fraction of sessions aborted by the security test.
    pub detection_rate: f64,
    pub mean_mismatches: f64,
    pub eve_mean_accuracy: Option<f64>,
    pub report_files: Vec<String>,
}

pub fn load_run_config(path: &Path) -> Result<RunConfig, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(format!("reading {}", path.display()), e))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
}

pub fn cmd_run(config_path: &Path, overrides: &RunOverrides) -> Result<RunSummary, HarnessError> {
    let mut cfg = load_run_config(config_path)?;
    if let Some(seed) = overrides.seed {
        cfg.session.seed = seed;
    }
    if let Some(reps) = overrides.reps {
        cfg.reps = reps;
    }
    if let Some(format) = overrides.format {
        cfg.format = format;
    }
    if let Some(dir) = &overrides.out_dir {
        cfg.out_dir = dir.clone();
    }
    run_config(&cfg)
}

pub(crate) fn run_config(cfg: &RunConfig) -> Result<RunSummary, HarnessError> {
    if cfg.reps == 0 {
        return Err(HarnessError::Config("reps must be at least 1".into()));
    }
    let violations = validate_config(&cfg.session);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(HarnessError::Config(list.join("; ")));
    }
    fs::create_dir_all(&cfg.out_dir).map_err(|e| HarnessError::io(format!("creating {}", cfg.out_dir.display()), e))?;

    let mut reports = Vec::with_capacity(cfg.reps);
    let mut files = Vec::new();
    for rep in 0..cfg.reps {
        let mut session = cfg.session.clone();
        session.seed = cfg.session.seed.wrapping_add(rep as u64);
        let report = run_session(&session).map_err(|e| HarnessError::Config(e.to_string()))?;
        for (name, body) in session_files(rep, &report, cfg.format) {
            write_file(&cfg.out_dir.join(&name), &body)?;
            files.push(name);
        }
        reports.push(report);
    }

    let summary = summarize(cfg.session.seed, &reports, files);
    let body = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write_file(&cfg.out_dir.join("summary.json"), &body)?;
    Ok(summary)
}

fn session_files(rep: usize, report: &SessionReport, format: ReportFormat) -> Vec<(String, String)> {
    match format {
        ReportFormat::Json => vec![(format!("session_{rep:04}.json"), report.to_json())],
        ReportFormat::Csv => vec![
            (format!("session_{rep:04}_tests.csv"), render_tests_csv(report)),
            (format!("session_{rep:04}_pairs.csv"), render_pairs_csv(report)),
        ],
        ReportFormat::Text => vec![(format!("session_{rep:04}.txt"), render_text(report))],
    }
}

fn write_file(path: &Path, body: &str) -> Result<(), HarnessError> {
    fs::write(path, body).map_err(|e| HarnessError::io(format!("writing {}", path.display()), e))
}

fn summarize(base_seed: u64, reports: &[SessionReport], report_files: Vec<String>) -> RunSummary {
    let n = reports.len() as f64;
    let eve: Vec<f64> = reports.iter().filter_map(|r| r.eve.as_ref().map(|e| e.accuracy)).collect();
    RunSummary {
        schema_version: REPORT_SCHEMA_VERSION,
        sessions: reports.len(),
        base_seed,
        recovery_rate: reports.iter().map(|r| r.recovery_accuracy).sum::<f64>() / n,
        detection_rate: reports.iter().filter(|r| r.detection_flag).count() as f64 / n,
        mean_mismatches: reports.iter().map(|r| r.verdict.mismatches as f64).sum::<f64>() / n,
        eve_mean_accuracy: (!eve.is_empty()).then(|| eve.iter().sum::<f64>() / eve.len() as f64),
        report_files,
    }
}
