//! Command-line front end: sample ensembles, run the verification
//! battery, summarize sample files.

pub mod config;
pub mod report;
pub mod sample;
pub mod table;
pub mod verify;

use clap::{Parser, Subcommand};
use config::{RunConfig, RunFlags};
use std::io::Write;
use std::path::PathBuf;
use table::Table;

/// Package version and `git describe` of the build tree.
pub const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "+", env!("COULOMB_GIT_DESCRIBE"));

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("numeric failure: {0}")]
    Numeric(coulomb_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{failed} check(s) failed")]
    ChecksFailed { failed: usize },
}

impl From<coulomb_core::Error> for CliError {
    fn from(e: coulomb_core::Error) -> Self {
        match e {
            coulomb_core::Error::InvalidParameter { .. } => CliError::Usage(e.to_string()),
            other => CliError::Numeric(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ChecksFailed { .. } => 1,
            CliError::Usage(_) | CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "coulomb", version = VERSION, about = "Sample and verify Coulomb gases and random matrix spectra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write sampled configurations or spectra
    Sample(RunFlags),
    /// Run the verification battery; exit 1 if any check fails
    Verify(RunFlags),
    /// Summarize sample files: distances to the limit and trends in n
    Report {
        #[command(flatten)]
        flags: RunFlags,
        /// sample files written by `sample`
        inputs: Vec<PathBuf>,
    },
}

fn emit(table: &Table, cfg: &RunConfig) -> Result<(), CliError> {
    let text = table.render(cfg.format);
    match &cfg.output_path {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start {k} threads: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sample(flags) => {
            let cfg = RunConfig::resolve(&flags)?;
            let table = in_pool(cfg.threads, || sample::sample_table(&cfg))??;
            emit(&table, &cfg)
        }
        Command::Verify(flags) => {
            let cfg = RunConfig::resolve(&flags)?;
            let rows = in_pool(cfg.threads, || verify::run_suite(cfg.suite, cfg.seed))??;
            emit(&verify::report_table(&cfg, &rows), &cfg)?;
            let failed: Vec<_> = rows.iter().filter(|r| !r.pass).collect();
            if failed.is_empty() {
                return Ok(());
            }
            for r in &failed {
                eprintln!(
                    "FAIL {}: statistic {:.6e}, value {:.6e}, threshold {:.6e}",
                    r.check_id, r.statistic, r.value, r.threshold
                );
            }
            Err(CliError::ChecksFailed { failed: failed.len() })
        }
        Command::Report { flags, inputs } => {
            let cfg = RunConfig::resolve(&flags)?;
            let table = in_pool(cfg.threads, || report::report_table(&inputs))??;
            emit(&table, &cfg)
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
