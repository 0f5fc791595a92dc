use std::fmt::Write;

use crate::channel_security::TestRecord;
use crate::protocol::SessionReport;

fn opt_bit(b: Option<u8>) -> String {
    b.map_or_else(|| "-".to_string(), |b| b.to_string())
}

pub fn render_tests_csv(report: &SessionReport) -> String {
    let mut out = String::from(TestRecord::CSV_HEADER);
    out.push('\n');
    for rec in &report.tests {
        out.push_str(&rec.csv_line());
        out.push('\n');
    }
    out
}

pub fn render_pairs_csv(report: &SessionReport) -> String {
    let mut out = String::from("pair_id,label,role,alice_outcome,bob_outcome,decoded_bit\n");
    for p in &report.pairs {
        let role = serde_json::to_value(p.role).expect("role serializes");
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            p.pair_id,
            p.initial_label,
            role.as_str().unwrap_or_default(),
            opt_bit(p.alice_outcome),
            opt_bit(p.bob_outcome),
            opt_bit(p.decoded_bit)
        );
    }
    out
}

pub fn render_text(report: &SessionReport) -> String {
    let c = &report.config;
    let mut out = String::new();
    let _ = writeln!(out, "scheme {} seed {} pairs {} attack {}", c.scheme, c.seed, c.n_pairs, c.attack);
    let _ = writeln!(
        out,
        "test: {} tested, {} mismatches -> {:?}",
        report.verdict.tested, report.verdict.mismatches, report.verdict.outcome
    );
    let _ = writeln!(out, "secret:    {}", c.secret_message);
    let _ = writeln!(out, "recovered: {}", report.recovered_message.as_deref().unwrap_or("(undetermined)"));
    let _ = writeln!(out, "accuracy:  {}", report.recovery_accuracy);
    if let Some(eve) = &report.eve {
        let _ = writeln!(out, "eve guess: {} (accuracy {})", eve.guessed_message, eve.accuracy);
    }
    out.push_str("transcript:\n");
    for m in &report.transcript {
        let _ = writeln!(out, "  {m}");
    }
    out
}
