//! Seeded, reproducible experiments with structured reports.
//!
//! Trial `k` of every experiment draws from [`stream_rng`]`(seed, k)`, so a
//! report depends only on the seed and the configuration, never on thread
//! scheduling.

mod experiments;
mod intertwiner;
mod report;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use experiments::{
    run_abelian_classical, run_component_density, run_cyclic_approximation,
    run_generic_entanglement, run_invertible_cyclicity, run_no_creation,
    run_preparation_contrast, INFINITE_FACTOR_NOTE,
};
pub use intertwiner::{floor_singular_values, solve_intertwiner_on, solve_local_intertwiner, Intertwiner};
pub use report::{render, OutputFormat, SuiteDocument, SCHEMA_VERSION};

use crate::numerics::Dims;
use crate::random::{stream_rng, LabRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    CyclicApproximation,
    ComponentDensity,
    InvertibleCyclicity,
    NoCreation,
    GenericEntanglement,
    AbelianClassical,
    PreparationContrast,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::CyclicApproximation,
        Experiment::ComponentDensity,
        Experiment::InvertibleCyclicity,
        Experiment::NoCreation,
        Experiment::GenericEntanglement,
        Experiment::AbelianClassical,
        Experiment::PreparationContrast,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::CyclicApproximation => "cyclic_approximation",
            Experiment::ComponentDensity => "component_density",
            Experiment::InvertibleCyclicity => "invertible_cyclicity",
            Experiment::NoCreation => "no_creation",
            Experiment::GenericEntanglement => "generic_entanglement",
            Experiment::AbelianClassical => "abelian_classical",
            Experiment::PreparationContrast => "preparation_contrast",
        }
    }

    pub fn default_trials(self) -> usize {
        match self {
            Experiment::CyclicApproximation => 100,
            Experiment::ComponentDensity => 200,
            Experiment::InvertibleCyclicity => 100,
            Experiment::NoCreation => 500,
            Experiment::GenericEntanglement => 1000,
            Experiment::AbelianClassical => 50,
            Experiment::PreparationContrast => 200,
        }
    }

    pub fn run(self, seed: u64, dims: Dims, trials: Option<usize>) -> ExperimentReport {
        let trials = trials.unwrap_or_else(|| self.default_trials());
        let start = Instant::now();
        let mut report = match self {
            Experiment::CyclicApproximation => run_cyclic_approximation(seed, dims, trials),
            Experiment::ComponentDensity => run_component_density(seed, dims, trials),
            Experiment::InvertibleCyclicity => run_invertible_cyclicity(seed, dims, trials),
            Experiment::NoCreation => run_no_creation(seed, dims, trials),
            Experiment::GenericEntanglement => run_generic_entanglement(seed, dims, trials),
            Experiment::AbelianClassical => run_abelian_classical(seed, dims, trials),
            Experiment::PreparationContrast => run_preparation_contrast(seed, dims, trials),
        };
        report.wall_clock_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        report
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownExperiment(pub String);

impl fmt::Display for UnknownExperiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
        write!(f, "unknown experiment `{}` (expected `all` or one of: {})", self.0, names.join(", "))
    }
}

impl std::error::Error for UnknownExperiment {}

impl FromStr for Experiment {
    type Err = UnknownExperiment;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().replace('-', "_");
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == key)
            .ok_or_else(|| UnknownExperiment(s.to_owned()))
    }
}

/// Parse a suite selection: `all`, or experiment names separated by commas.
pub fn parse_suite(list: &str) -> Result<Vec<Experiment>, UnknownExperiment> {
    let mut out = Vec::new();
    for part in list.split(',').filter(|p| !p.trim().is_empty()) {
        if part.trim() == "all" {
            out.extend(Experiment::ALL);
        } else {
            out.push(part.parse()?);
        }
    }
    out.dedup();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum Status {
    Passed,
    Failed,
    /// The experiment's precondition does not hold for the requested
    /// dimensions; nothing was run.
    Refused { reason: String },
}

/// One checked invariant: how many trials violated it and the worst value
/// seen against its tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub samples: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// The check is a lower bound, so the smallest value is the worst.
    #[serde(skip)]
    pub lower_is_worse: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: Experiment,
    pub seed: u64,
    pub dims: Dims,
    pub trials: usize,
    pub status: Status,
    pub checks: Vec<Check>,
    /// Cases built to fail if the checks were vacuous; `passed` means the
    /// control behaved as expected.
    pub controls: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_clock_ms: Option<f64>,
}

impl ExperimentReport {
    pub fn refused(experiment: Experiment, seed: u64, dims: Dims, reason: impl Into<String>) -> Self {
        ExperimentReport {
            experiment,
            seed,
            dims,
            trials: 0,
            status: Status::Refused { reason: reason.into() },
            checks: vec![],
            controls: vec![],
            notes: vec![],
            wall_clock_ms: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Passed
    }

    pub fn is_refused(&self) -> bool {
        matches!(self.status, Status::Refused { .. })
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Failed
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().chain(&self.controls).find(|c| c.name == name)
    }

    pub fn without_wall_clock(mut self) -> Self {
        self.wall_clock_ms = None;
        self
    }
}

/// Accumulates check outcomes in first-seen order.
#[derive(Clone, Debug, Default)]
pub(crate) struct Tally {
    checks: Vec<Check>,
}

impl Tally {
    fn entry(&mut self, name: &str, tolerance: Option<f64>) -> &mut Check {
        let idx = match self.checks.iter().position(|c| c.name == name) {
            Some(i) => i,
            None => {
                self.checks.push(Check {
                    name: name.to_owned(),
                    passed: true,
                    samples: 0,
                    failures: 0,
                    worst: None,
                    tolerance,
                    lower_is_worse: false,
                });
                self.checks.len() - 1
            }
        };
        &mut self.checks[idx]
    }

    /// Record a boolean outcome.
    pub(crate) fn flag(&mut self, name: &str, ok: bool) {
        let c = self.entry(name, None);
        c.samples += 1;
        if !ok {
            c.failures += 1;
            c.passed = false;
        }
    }

    /// Record `value <= tolerance`, keeping the largest value.
    pub(crate) fn at_most(&mut self, name: &str, value: f64, tolerance: f64) {
        self.bound(name, value, tolerance, value <= tolerance, false);
    }

    /// Record `value >= tolerance`, keeping the smallest value.
    pub(crate) fn at_least(&mut self, name: &str, value: f64, tolerance: f64) {
        self.bound(name, value, tolerance, value >= tolerance, true);
    }

    fn bound(&mut self, name: &str, value: f64, tolerance: f64, ok: bool, lower_is_worse: bool) {
        let c = self.entry(name, Some(tolerance));
        c.lower_is_worse = lower_is_worse;
        c.samples += 1;
        c.worst = Some(match c.worst {
            Some(w) if lower_is_worse => w.min(value),
            Some(w) => w.max(value),
            None => value,
        });
        if !ok {
            c.failures += 1;
            c.passed = false;
        }
    }

    pub(crate) fn merge(&mut self, other: Tally) {
        for o in other.checks {
            let c = self.entry(&o.name, o.tolerance);
            c.lower_is_worse = o.lower_is_worse;
            c.samples += o.samples;
            c.failures += o.failures;
            c.passed &= o.passed;
            c.worst = match (c.worst, o.worst) {
                (Some(a), Some(b)) if o.lower_is_worse => Some(a.min(b)),
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            };
        }
    }

    pub(crate) fn into_checks(self) -> Vec<Check> {
        self.checks
    }
}

/// Run `trials` independent trials in parallel and merge their tallies in
/// trial order.
pub(crate) fn run_trials<F>(seed: u64, trials: usize, trial: F) -> Tally
where
    F: Fn(usize, &mut LabRng, &mut Tally) + Sync,
{
    let tallies: Vec<Tally> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k as u64);
            let mut t = Tally::default();
            trial(k, &mut rng, &mut t);
            t
        })
        .collect();
    let mut out = Tally::default();
    for t in tallies {
        out.merge(t);
    }
    out
}

pub(crate) fn finish(
    experiment: Experiment,
    seed: u64,
    dims: Dims,
    trials: usize,
    checks: Tally,
    controls: Tally,
    notes: Vec<String>,
) -> ExperimentReport {
    let checks = checks.into_checks();
    let controls = controls.into_checks();
    let ok = checks.iter().chain(&controls).all(|c| c.passed);
    ExperimentReport {
        experiment,
        seed,
        dims,
        trials,
        status: if ok { Status::Passed } else { Status::Failed },
        checks,
        controls,
        notes,
        wall_clock_ms: None,
    }
}

/// Settings for a batch of experiments.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub experiments: Vec<Experiment>,
    pub dims: Vec<Dims>,
    pub seed: u64,
    pub trials: Option<usize>,
    /// Worker threads; `None` uses the hardware default.
    pub threads: Option<usize>,
}

/// Run every experiment for every dimension pair, in that order.
pub fn run_suite(cfg: &SuiteConfig) -> crate::error::Result<Vec<ExperimentReport>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| crate::error::Error::Precondition(format!("thread pool: {e}")))?;
    Ok(pool.install(|| {
        let mut out = Vec::new();
        for &dims in &cfg.dims {
            for &e in &cfg.experiments {
                out.push(e.run(cfg.seed, dims, cfg.trials));
            }
        }
        out
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_parsing() {
        assert_eq!(parse_suite("all").unwrap().len(), 7);
        assert_eq!(
            parse_suite("no_creation,generic-entanglement").unwrap(),
            vec![Experiment::NoCreation, Experiment::GenericEntanglement]
        );
        assert!(parse_suite("no_creation,bogus").is_err());
    }

    #[test]
    fn tally_merge_keeps_extremes() {
        let mut a = Tally::default();
        a.at_most("err", 1e-12, 1e-9);
        a.at_least("min_eig", 0.2, -1e-9);
        let mut b = Tally::default();
        b.at_most("err", 3e-12, 1e-9);
        b.at_least("min_eig", 0.1, -1e-9);
        b.flag("ok", false);
        a.merge(b);
        let checks = a.into_checks();
        assert_eq!(checks[0].worst, Some(3e-12));
        assert_eq!(checks[1].worst, Some(0.1));
        assert_eq!(checks[2].failures, 1);
        assert!(!checks[2].passed);
    }
}
