//! Experiment runner behind the `qverify` binary.
//!
//! `run` executes one TOML config and writes `report.json`, `rounds.csv` and
//! any measurement records into an output directory. `curve` turns a report
//! into cumulative `(copies, C_min)` rows for plotting.

pub mod config;
pub mod report;
pub mod run;
pub mod states;
pub mod witness_file;

pub use config::ExperimentConfig;
pub use report::{emit_confidence_curve, load_report, run_experiment, Report, RunOptions};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// Process exit code: 2 for config problems, 3 for capacity, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Capacity(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<qverify::Error> for CliError {
    fn from(e: qverify::Error) -> Self {
        match e {
            qverify::Error::CapacityExceeded { .. } => CliError::Capacity(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
