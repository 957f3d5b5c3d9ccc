//! Run part of the experiment suite from code and print the text report.

use operon::lab::{render, run_suite, Experiment, OutputFormat, SuiteConfig};
use operon::Dims;

fn main() -> operon::Result<()> {
    let cfg = SuiteConfig {
        experiments: vec![Experiment::NoCreation, Experiment::GenericEntanglement, Experiment::AbelianClassical],
        dims: vec![Dims::new(2, 2), Dims::new(2, 3)],
        seed: 2024,
        trials: Some(50),
        threads: None,
    };
    let reports = run_suite(&cfg)?;
    print!("{}", render(&reports, OutputFormat::Text, true));
    let failed = reports.iter().filter(|r| r.failed()).count();
    println!("{} reports, {failed} failed", reports.len());
    Ok(())
}
