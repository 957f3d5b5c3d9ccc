use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Check, ExperimentReport, Status};

/// Bumped whenever the JSON layout of [`SuiteDocument`] changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Text,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "text" => Ok(OutputFormat::Text),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format `{other}` (expected json, text or csv)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteDocument {
    pub schema_version: u32,
    pub reports: Vec<ExperimentReport>,
}

fn status_label(s: &Status) -> &'static str {
    match s {
        Status::Passed => "passed",
        Status::Failed => "FAILED",
        Status::Refused { .. } => "refused",
    }
}

fn num(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "-".into())
}

/// Render reports. With `stable`, wall-clock fields are left out so that
/// identical runs produce identical bytes.
pub fn render(reports: &[ExperimentReport], format: OutputFormat, stable: bool) -> String {
    let reports: Vec<ExperimentReport> = reports
        .iter()
        .cloned()
        .map(|r| if stable { r.without_wall_clock() } else { r })
        .collect();
    match format {
        OutputFormat::Json => {
            let doc = SuiteDocument { schema_version: SCHEMA_VERSION, reports };
            let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize");
            s.push('\n');
            s
        }
        OutputFormat::Text => render_text(&reports),
        OutputFormat::Csv => render_csv(&reports),
    }
}

fn render_text(reports: &[ExperimentReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = write!(
            out,
            "{:<22} {:>5}  seed {:<20} trials {:>5}  {}",
            r.experiment.name(),
            r.dims.to_string(),
            r.seed,
            r.trials,
            status_label(&r.status)
        );
        if let Some(ms) = r.wall_clock_ms {
            let _ = write!(out, "  ({ms:.1} ms)");
        }
        out.push('\n');
        if let Status::Refused { reason } = &r.status {
            let _ = writeln!(out, "    {reason}");
        }
        let width = r.checks.iter().chain(&r.controls).map(|c| c.name.len()).max().unwrap_or(0);
        for (kind, list) in [("check", &r.checks), ("control", &r.controls)] {
            for c in list {
                let _ = writeln!(
                    out,
                    "    {kind:<7} {:<width$}  {:<4}  {:>5}/{:<5}  worst {:>10}  tol {:>10}",
                    c.name,
                    if c.passed { "ok" } else { "FAIL" },
                    c.failures,
                    c.samples,
                    num(c.worst),
                    num(c.tolerance),
                );
            }
        }
        for n in &r.notes {
            let _ = writeln!(out, "    note: {n}");
        }
    }
    out
}

fn csv_row(out: &mut String, r: &ExperimentReport, kind: &str, c: Option<&Check>) {
    let wall = r.wall_clock_ms.map(|m| format!("{m:.3}")).unwrap_or_default();
    let (name, passed, samples, failures, worst, tol) = match c {
        Some(c) => (
            c.name.as_str(),
            c.passed.to_string(),
            c.samples.to_string(),
            c.failures.to_string(),
            c.worst.map(|v| format!("{v:e}")).unwrap_or_default(),
            c.tolerance.map(|v| format!("{v:e}")).unwrap_or_default(),
        ),
        None => ("", String::new(), String::new(), String::new(), String::new(), String::new()),
    };
    let _ = writeln!(
        out,
        "{},{},{},{},{},{kind},{name},{passed},{samples},{failures},{worst},{tol},{wall}",
        r.experiment.name(),
        r.dims,
        r.seed,
        r.trials,
        status_label(&r.status).to_lowercase(),
    );
}

fn render_csv(reports: &[ExperimentReport]) -> String {
    let mut out =
        String::from("experiment,dims,seed,trials,status,kind,name,passed,samples,failures,worst,tolerance,wall_clock_ms\n");
    for r in reports {
        if r.checks.is_empty() && r.controls.is_empty() {
            csv_row(&mut out, r, "none", None);
        }
        for c in &r.checks {
            csv_row(&mut out, r, "check", Some(c));
        }
        for c in &r.controls {
            csv_row(&mut out, r, "control", Some(c));
        }
    }
    out
}
