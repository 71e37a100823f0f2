//! Verification suites for the truncated discrete Q-deformed Fock space,
//! with JSON config parsing and JSON/CSV reports.

pub mod config;
pub mod report;
pub mod suites;

use std::io::Write;
use std::path::Path;

pub use config::{ConfigError, FunctionSpec, KernelConfig, RunConfig, Tolerances};
pub use report::{CheckRecord, Relation, SuiteResult};
pub use suites::{run_converge, run_moments, run_spectrum, run_verify, RunError, Suite};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl SuiteResult {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

/// Where a run configuration comes from.
#[derive(Clone, Debug)]
pub enum Source<'a> {
    File(&'a Path),
    Preset(&'a str),
}

pub fn load_config(source: Source<'_>, seed: Option<u64>) -> Result<RunConfig, RunError> {
    let mut cfg = match source {
        Source::File(p) => RunConfig::from_file(p)?,
        Source::Preset(name) => RunConfig::preset(name)?,
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

/// Sizes the global rayon pool from `QFOCK_THREADS`; unset or `0` means
/// one thread per core.
pub fn configure_threads() -> Result<(), RunError> {
    let threads = match std::env::var("QFOCK_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| RunError::Config(format!("QFOCK_THREADS must be a nonnegative integer, got '{v}'")))?,
        Err(_) => 0,
    };
    // a second initialization in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

/// Runs `suite`, writes the report, and returns the process exit code.
pub fn execute(suite: Suite, cfg: &RunConfig, format: Format, out: Option<&Path>) -> Result<i32, RunError> {
    let result = suite.run(cfg)?;
    let text = result.render(format);
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| RunError::Config(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| RunError::Runtime(format!("cannot write report: {e}")))?;
        }
    }
    for r in result.failures() {
        eprintln!(
            "FAIL {}: measured {} {} {} (tolerance {})",
            r.name,
            r.measured,
            r.relation.as_str(),
            r.expected,
            r.tolerance
        );
    }
    Ok(if result.pass { 0 } else { 1 })
}
