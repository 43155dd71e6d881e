//! Report files and confidence curves.
//!
//! `report.json` layout (schema 1): `schema_version`, `library_version`,
//! `protocol`, `seed`, `config` (echo), `rounds_csv`, `files`,
//! `reference_bound`, `checks_per_round`, `summary`, `wall_clock_seconds`.
//! `rounds.csv` columns: `round,setting,outcome,running_s`. For detection
//! protocols `outcome` counts the passed local checks of that round.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use qverify::stats::ConfidenceBound;

use crate::config::ExperimentConfig;
use crate::run::{execute, RoundRow};
use crate::CliError;

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const REPORT_FILE: &str = "report.json";
pub const ROUNDS_FILE: &str = "rounds.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema_version: u32,
    pub library_version: String,
    pub protocol: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub rounds_csv: String,
    pub files: Vec<String>,
    pub reference_bound: Option<f64>,
    pub checks_per_round: u64,
    pub summary: serde_json::Value,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub threads: Option<usize>,
}

/// Run one config file and write its artifacts. Returns the report and the
/// path it was written to.
pub fn run_experiment(config_path: &Path, opts: &RunOptions) -> Result<(Report, PathBuf), CliError> {
    let mut cfg = ExperimentConfig::load(config_path)?;
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    if let Some(t) = opts.threads {
        cfg.threads = Some(t);
    }
    let base = config_path.parent().unwrap_or(Path::new("."));
    let start = Instant::now();
    let output = match cfg.threads {
        Some(0) => return Err(CliError::Config("threads must be at least 1".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Io(e.to_string()))?
            .install(|| execute(&cfg, base))?,
        None => execute(&cfg, base)?,
    };
    let elapsed = start.elapsed().as_secs_f64();

    let out = opts.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out)?;
    let mut w = csv::Writer::from_path(out.join(ROUNDS_FILE)).map_err(|e| CliError::Io(e.to_string()))?;
    for row in &output.rows {
        w.serialize(row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush()?;
    for (name, contents) in &output.files {
        std::fs::write(out.join(name), contents)?;
    }
    let report = Report {
        schema_version: REPORT_SCHEMA_VERSION,
        library_version: qverify::VERSION.to_string(),
        protocol: cfg.experiment.name().to_string(),
        seed: cfg.seed,
        config: cfg,
        rounds_csv: ROUNDS_FILE.to_string(),
        files: output.files.iter().map(|(n, _)| n.clone()).collect(),
        reference_bound: output.reference_bound,
        checks_per_round: output.checks_per_round,
        summary: output.summary,
        wall_clock_seconds: elapsed,
    };
    let path = out.join(REPORT_FILE);
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(&path, text + "\n")?;
    Ok((report, path))
}

pub fn load_report(path: &Path) -> Result<Report, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let report: Report =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if report.schema_version != REPORT_SCHEMA_VERSION {
        return Err(CliError::Config(format!("unsupported report schema {}", report.schema_version)));
    }
    Ok(report)
}

/// Cumulative `C_min` after each round of a report's round log, written as
/// `copies,c_min` rows. Returns the curve.
pub fn emit_confidence_curve(report_path: &Path, out: &Path) -> Result<Vec<(u64, f64)>, CliError> {
    let report = load_report(report_path)?;
    let p_s = report
        .reference_bound
        .ok_or_else(|| CliError::Config(format!("protocol `{}` has no separable reference bound", report.protocol)))?;
    let csv_path = report_path.parent().unwrap_or(Path::new(".")).join(&report.rounds_csv);
    let mut rdr = csv::Reader::from_path(&csv_path).map_err(|e| CliError::Config(format!("{}: {e}", csv_path.display())))?;
    let mut successes = 0u64;
    let mut curve = Vec::new();
    for (i, row) in rdr.deserialize::<RoundRow>().enumerate() {
        let row = row.map_err(|e| CliError::Config(format!("{}: {e}", csv_path.display())))?;
        successes += row
            .outcome
            .parse::<u64>()
            .map_err(|_| CliError::Config(format!("round {}: non-numeric outcome `{}`", row.round, row.outcome)))?;
        let trials = (i as u64 + 1) * report.checks_per_round;
        curve.push((i as u64 + 1, ConfidenceBound::from_counts(successes, trials, p_s)?.c_min));
    }
    if curve.is_empty() {
        return Err(CliError::Config("round log is empty".into()));
    }
    let mut w = csv::Writer::from_path(out).map_err(|e| CliError::Io(e.to_string()))?;
    w.write_record(["copies", "c_min"]).map_err(|e| CliError::Io(e.to_string()))?;
    for (copies, c) in &curve {
        w.write_record([copies.to_string(), c.to_string()]).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(curve)
}
