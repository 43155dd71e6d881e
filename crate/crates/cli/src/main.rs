use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qverify_cli::{emit_confidence_curve, run_experiment, RunOptions};

#[derive(Parser)]
#[command(name = "qverify", version, about = "Seeded few-copy verification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write report.json and rounds.csv.
    Run {
        config: PathBuf,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: current directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for round-parallel protocols.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Write the cumulative confidence curve of a report as CSV.
    Curve {
        report: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run { config, seed, out, threads } => {
            run_experiment(&config, &RunOptions { seed, out_dir: out, threads }).map(|(report, path)| {
                println!("{} finished; report written to {}", report.protocol, path.display());
                println!("{}", serde_json::to_string_pretty(&report.summary).unwrap_or_default());
            })
        }
        Command::Curve { report, out } => emit_confidence_curve(&report, &out).map(|curve| {
            let (copies, c) = curve.last().copied().unwrap_or_default();
            println!("{} rows written to {}; C_min after {copies} copies = {c:.6}", curve.len(), out.display());
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
