use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qscdc::adversary::AttackModel;
use qscdc::harness::{cmd_run, cmd_sweep, paper_check, sweep_csv, HarnessError, ReportFormat, RunOverrides};

#[derive(Parser)]
#[command(name = "qscdc", version, about = "Controlled direct communication over Bell pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run sessions from a JSON config and write per-session reports plus a summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long, value_enum)]
        format: Option<ReportFormat>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate exact and simulated detection rates as CSV.
    Sweep {
        /// Comma-separated attack tags, e.g. none,intercept-resend:Z,ghz-coupling.
        #[arg(long, value_delimiter = ',', default_value = "none,intercept-resend,ghz-coupling,ancilla-entangle")]
        attacks: Vec<String>,
        #[arg(long = "test-pairs", value_delimiter = ',', default_value = "1,4,16,64")]
        test_pairs: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay the two worked examples with forced outcomes.
    PaperCheck,
}

fn fail(err: &HarnessError) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, seed, reps, format, out } => {
            let overrides = RunOverrides { seed, reps, format, out_dir: out };
            match cmd_run(&config, &overrides) {
                Ok(summary) => {
                    println!(
                        "sessions {} recovery_rate {} detection_rate {} mean_mismatches {}",
                        summary.sessions, summary.recovery_rate, summary.detection_rate, summary.mean_mismatches
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Sweep { attacks, test_pairs, reps, seed, out } => {
            let models = match attacks.iter().map(|t| AttackModel::from_tag(t)).collect::<Result<Vec<_>, _>>() {
                Ok(m) => m,
                Err(e) => return fail(&HarnessError::Config(e.to_string())),
            };
            let rows = match cmd_sweep(&models, &test_pairs, reps, seed) {
                Ok(r) => r,
                Err(e) => return fail(&e),
            };
            let csv = sweep_csv(&rows);
            match out {
                Some(path) => {
                    if let Err(e) = fs::write(&path, csv) {
                        return fail(&HarnessError::Io { context: format!("writing {}", path.display()), source: e });
                    }
                }
                None => print!("{csv}"),
            }
            ExitCode::SUCCESS
        }
        Command::PaperCheck => {
            let checks = paper_check();
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if checks.iter().all(|c| c.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
