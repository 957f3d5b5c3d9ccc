//! Command-line front end: `run` experiment suites and `inspect` JSON files.
//!
//! Exit codes: 0 success, 1 an invariant or validation failed, 2 usage,
//! configuration or parse error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::algebra::{center_and_factor, commutant};
use crate::entanglement::{entanglement_entropy, min_pt_eigen, von_neumann_entropy, SeparabilityVerdict, SEPARABLE_TOL, WITNESS_TOL};
use crate::formats::{read_document, Document, VerdictDocument};
use crate::lab::{parse_suite, render, run_suite, Experiment, OutputFormat, SuiteConfig};
use crate::numerics::{hermitian_eig, hermiticity_residual, norms, schmidt_decompose, ComplexMatrix, Dims};
use crate::states::{validate_density, StateFunctional};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "OPERON_THREADS";

#[derive(Parser, Debug)]
#[command(name = "operon", version, about = "Entanglement experiments on finite-dimensional operator algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run experiments and write a report.
    Run {
        /// `all` or comma-separated experiment names.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Bipartite dimensions as `dAxdB`; repeat for several. Defaults to 2x2 and 2x3.
        #[arg(long)]
        dims: Vec<Dims>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Override every experiment's trial count.
        #[arg(long)]
        trials: Option<usize>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json", value_parser = parse_format)]
        format: OutputFormat,
        /// Leave out wall-clock timings so reruns are byte-identical.
        #[arg(long)]
        stable_output: bool,
    },
    /// Validate and summarize a matrix, state, algebra, operation or verdict file.
    Inspect { path: PathBuf },
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse()
}

/// Validated `run` settings.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub experiments: Vec<Experiment>,
    pub dims: Vec<Dims>,
    pub seed: u64,
    pub trials: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub stable_output: bool,
    pub threads: Option<usize>,
}

impl RunConfig {
    /// Defaults: every experiment, 2x2 and 2x3, seed 42, JSON to stdout.
    pub fn new() -> Self {
        RunConfig {
            experiments: Experiment::ALL.to_vec(),
            dims: vec![Dims::new(2, 2), Dims::new(2, 3)],
            seed: 42,
            trials: None,
            out: None,
            format: OutputFormat::Json,
            stable_output: false,
            threads: None,
        }
    }

    pub fn with_suite(mut self, suite: &str) -> Result<Self, String> {
        self.experiments = parse_suite(suite).map_err(|e| e.to_string())?;
        if self.experiments.is_empty() {
            return Err("empty suite selection".into());
        }
        Ok(self)
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::new()
    }
}

fn threads_from_env() -> Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("{THREADS_ENV} must be a positive integer, got `{v}`")),
        },
        Err(_) => Ok(None),
    }
}

/// Run the configured experiments. Output is produced only after every
/// experiment has finished.
pub fn cmd_run(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let suite = SuiteConfig {
        experiments: cfg.experiments.clone(),
        dims: cfg.dims.clone(),
        seed: cfg.seed,
        trials: cfg.trials,
        threads: cfg.threads,
    };
    let reports = match run_suite(&suite) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let body = render(&reports, cfg.format, cfg.stable_output);
    match &cfg.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &body) {
                let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
            for r in &reports {
                let _ = writeln!(stdout, "{:<22} {:>5}  {}", r.experiment.name(), r.dims.to_string(), status_word(r));
            }
        }
        None => {
            let _ = stdout.write_all(body.as_bytes());
        }
    }
    if reports.iter().any(|r| r.failed()) {
        EXIT_FAILURE
    } else {
        EXIT_OK
    }
}

fn status_word(r: &crate::lab::ExperimentReport) -> &'static str {
    if r.passed() {
        "passed"
    } else if r.is_refused() {
        "refused"
    } else {
        "FAILED"
    }
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

struct Findings<'a> {
    out: &'a mut dyn Write,
    ok: bool,
}

impl Findings<'_> {
    fn line(&mut self, text: impl AsRef<str>) {
        let _ = writeln!(self.out, "{}", text.as_ref());
    }

    fn check(&mut self, label: &str, ok: bool, detail: impl AsRef<str>) {
        self.ok &= ok;
        let mark = if ok { "ok  " } else { "FAIL" };
        let _ = writeln!(self.out, "  [{mark}] {label}: {}", detail.as_ref());
    }
}

fn inspect_matrix(f: &mut Findings, m: &ComplexMatrix) {
    f.line(format!("shape: {}x{}", m.nrows(), m.ncols()));
    let n = norms(m);
    f.line(format!(
        "norms: operator {:.6e}, trace {:.6e}, frobenius {:.6e}",
        n.operator, n.trace, n.frobenius
    ));
    if m.is_square() {
        let herm = hermiticity_residual(m);
        f.line(format!("hermiticity residual: {herm:.3e}"));
        f.line(format!("trace: {:.6}", m.trace()));
        if herm <= 1e-10 {
            if let Ok(e) = hermitian_eig(m) {
                f.line(format!("eigenvalues: {}", fmt_list(&e.eigenvalues)));
            }
        }
    }
}

fn inspect_state(f: &mut Findings, density: &ComplexMatrix, dims: Option<Dims>) {
    f.line(format!("dimension: {}", density.nrows()));
    let herm = hermiticity_residual(density);
    f.check("hermitian", herm <= 1e-10, format!("residual {herm:.3e}"));
    let tr = density.trace();
    f.check("unit trace", (tr.re - 1.0).abs() <= 1e-10 && tr.im.abs() <= 1e-10, format!("{tr:.12}"));
    let Ok(e) = hermitian_eig(&((density + density.adjoint()) * crate::numerics::c64(0.5, 0.0))) else {
        return;
    };
    f.check("positive", e.min() >= -1e-10, format!("min eigenvalue {:.3e}", e.min()));
    f.line(format!("eigenvalues: {}", fmt_list(&e.eigenvalues)));
    if validate_density(density).is_err() {
        return;
    }
    let purity = (density * density).trace().re;
    f.line(format!("purity: {purity:.6}"));
    if let Ok(s) = von_neumann_entropy(density) {
        f.line(format!("von Neumann entropy (nats): {s:.12}"));
    }
    let Some(dims) = dims else { return };
    f.line(format!("bipartite dims: {dims}"));
    if (purity - 1.0).abs() <= 1e-9 {
        let x = e.vector(e.eigenvalues.len() - 1);
        if let Ok(s) = schmidt_decompose(&x, dims) {
            f.line(format!("schmidt coefficients: {}", fmt_list(&s.coefficients)));
            f.line(format!("schmidt rank: {}", s.rank));
        }
        if let Ok(ent) = entanglement_entropy(&x, dims) {
            f.line(format!("entanglement entropy (nats): {ent:.12}"));
        }
    }
    if let Ok(state) = StateFunctional::new(density.clone()).and_then(|s| s.with_dims(dims)) {
        if let Ok((m, _)) = min_pt_eigen(&state, dims) {
            f.line(format!("min partial-transpose eigenvalue: {m:.12}"));
        }
    }
}

fn inspect_verdict(f: &mut Findings, doc: &VerdictDocument) {
    f.line(format!("verdict: {}", doc.verdict.name()));
    let state = StateFunctional::new(doc.density.clone()).and_then(|s| s.with_dims(doc.dims));
    let state = match state {
        Ok(s) => s,
        Err(e) => {
            f.check("density valid", false, e.to_string());
            return;
        }
    };
    match &doc.verdict {
        SeparabilityVerdict::Separable { certificate } => {
            f.check(
                "certificate terms valid",
                certificate.validate().is_ok(),
                format!("{} terms", certificate.len()),
            );
            let r = certificate.residual(state.density());
            f.check("certificate reconstructs density", r <= SEPARABLE_TOL, format!("residual {r:.3e}"));
        }
        SeparabilityVerdict::Entangled { witness } => {
            let value = witness
                .observable(doc.dims)
                .and_then(|w| state.expectation(&w))
                .map(|z| z.re / witness.eigenvector.norm_squared());
            match value {
                Ok(v) => f.check(
                    "witness negative",
                    v < -WITNESS_TOL && (v - witness.min_eigenvalue).abs() <= 1e-8,
                    format!("expectation {v:.6e}, claimed {:.6e}", witness.min_eigenvalue),
                ),
                Err(e) => f.check("witness negative", false, e.to_string()),
            }
        }
        SeparabilityVerdict::Inconclusive { distance } => {
            f.line(format!("best separable distance: {distance:.6e}"));
        }
    }
}

/// Parse and validate a file. Returns the exit code.
pub fn cmd_inspect(path: &Path, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let doc = match read_document(path) {
        Ok(d) => d,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut f = Findings { out: stdout, ok: true };
    f.line(format!("{}: {}", path.display(), doc.kind()));
    match doc {
        Document::Matrix(m) => inspect_matrix(&mut f, &m),
        Document::State(s) => {
            if let Some(l) = &s.label {
                f.line(format!("label: {l}"));
            }
            if let Some(d) = s.dims {
                if d.total() != s.density.nrows() {
                    f.check("dims match density", false, format!("{d} vs {}", s.density.nrows()));
                    return EXIT_FAILURE;
                }
            }
            inspect_state(&mut f, &s.density, s.dims);
        }
        Document::Algebra(a) => match a.into_algebra() {
            Ok(alg) => {
                f.line(format!("ambient dimension: {}", alg.ambient_dim()));
                f.line(format!("algebra dimension: {}", alg.dimension()));
                f.line(format!("abelian: {}", alg.is_abelian()));
                let (center, factor) = center_and_factor(&alg);
                f.line(format!("center dimension: {} (factor: {factor})", center.dimension()));
                f.line(format!("commutant dimension: {}", commutant(&alg).dimension()));
                let c = alg.closure_residuals();
                f.check(
                    "closed under adjoint and product",
                    c.adjoint <= 1e-9 && c.product <= 1e-9 && c.identity <= 1e-9,
                    format!("adjoint {:.1e}, product {:.1e}, identity {:.1e}", c.adjoint, c.product, c.identity),
                );
            }
            Err(e) => f.check("generators valid", false, e.to_string()),
        },
        Document::Operation(o) => {
            f.line(format!("ambient dimension: {}", o.ambient_dim));
            f.line(format!("kraus operators: {}", o.kraus.len()));
            match o.into_operation() {
                Ok(t) => {
                    let e = hermitian_eig(&t.effect()).map(|e| (e.min(), e.max())).unwrap_or((f64::NAN, f64::NAN));
                    f.check("0 <= sum K*K <= I", true, format!("spectrum [{:.6e}, {:.6e}]", e.0, e.1));
                    f.line(format!("selective: {}", t.is_selective()));
                    if let Some(l) = t.label() {
                        f.line(format!("label: {l}"));
                    }
                }
                Err(e) => f.check("0 <= sum K*K <= I", false, e.to_string()),
            }
        }
        Document::Verdict(v) => inspect_verdict(&mut f, &v),
    }
    if f.ok {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

/// Parse arguments and dispatch. Returns the process exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match cli.command {
        Command::Run { suite, dims, seed, trials, out, format, stable_output } => {
            let cfg = RunConfig::new().with_suite(&suite);
            let mut cfg = match cfg {
                Ok(c) => c,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    return EXIT_USAGE;
                }
            };
            if !dims.is_empty() {
                cfg.dims = dims;
            }
            if trials == Some(0) {
                let _ = writeln!(stderr, "error: --trials must be positive");
                return EXIT_USAGE;
            }
            cfg.seed = seed;
            cfg.trials = trials;
            cfg.out = out;
            cfg.format = format;
            cfg.stable_output = stable_output;
            cfg.threads = match threads_from_env() {
                Ok(t) => t,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    return EXIT_USAGE;
                }
            };
            cmd_run(&cfg, stdout, stderr)
        }
        Command::Inspect { path } => cmd_inspect(&path, stdout, stderr),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_cli(args.iter().copied(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn unknown_suite_is_usage_error_without_output() {
        let (code, out, err) = run(&["operon", "run", "--suite", "bogus"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(out.is_empty());
        assert!(err.contains("bogus"));
    }

    #[test]
    fn bad_dims_and_format_are_usage_errors() {
        assert_eq!(run(&["operon", "run", "--dims", "2by2"]).0, EXIT_USAGE);
        assert_eq!(run(&["operon", "run", "--format", "xml"]).0, EXIT_USAGE);
        assert_eq!(run(&["operon", "run", "--trials", "0"]).0, EXIT_USAGE);
    }

    #[test]
    fn small_run_passes() {
        let (code, out, _) = run(&[
            "operon", "run", "--suite", "no_creation", "--dims", "2x2", "--trials", "5", "--stable-output",
        ]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("\"schema_version\": 1"));
        assert!(!out.contains("wall_clock"));
    }
}
