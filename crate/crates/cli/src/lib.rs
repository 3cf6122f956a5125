//! Scenario runner, Caputo table and acceptance suite behind the `fracflow` binary.

pub mod acceptance;
pub mod caputo;
pub mod config;
pub mod output;

use std::io::Write;
use std::path::Path;

use fracflow_core::flow::{evolve, FlowRun};

use crate::config::Scenario;
use crate::output::RecordWriter;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_SINGULARITY: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_CONFIG
    }
}

/// Environment variable capping worker threads, 0 or unset meaning one per core.
pub const THREADS_VAR: &str = "FRACFLOW_THREADS";

/// Sets up the global rayon pool from [`THREADS_VAR`].
pub fn init_threads() -> Result<(), CliError> {
    let threads = match std::env::var(THREADS_VAR) {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| CliError::Config(format!("{THREADS_VAR}: expected a thread count, got `{v}`")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("{THREADS_VAR}: {e}")))
}

/// Runs a scenario and streams its records. Returns the run; `run.stopped` is set when a
/// singularity cut it short.
pub fn run_scenario(scenario: &Scenario, out: impl Write) -> Result<FlowRun, CliError> {
    let run = evolve(&scenario.flow, &scenario.initial).map_err(|e| CliError::Config(format!("{}: {e}", scenario.name)))?;
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    let mut w = RecordWriter::new(out, scenario.output.format).map_err(io)?;
    for r in &run.records {
        w.write(r).map_err(io)?;
    }
    w.finish().map_err(io)?;
    Ok(run)
}

/// `run` subcommand: loads `config`, writes to `out` (or the configured path, or stdout).
pub fn run_command(config: &Path, out: Option<&Path>) -> Result<i32, CliError> {
    let scenario = config::load(config)?;
    let target = out.map(Path::to_path_buf).or_else(|| scenario.output.path.clone());
    let run = match &target {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            run_scenario(&scenario, std::io::BufWriter::new(file))?
        }
        None => run_scenario(&scenario, std::io::stdout().lock())?,
    };
    match run.stopped {
        Some(e) => {
            eprintln!("{}: stopped after {} of {} steps: {e}", scenario.name, run.records.len(), scenario.flow.steps);
            Ok(EXIT_SINGULARITY)
        }
        None => Ok(EXIT_OK),
    }
}
