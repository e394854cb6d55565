use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use objectivity_core::registry::{FIELD_KINDS, SCALAR_KINDS};
use objectivity_verify::checks::CheckType;
use objectivity_verify::scenario::MOTION_KINDS;
use objectivity_verify::{run_scenario, RunOptions, EXIT_CONFIG};

#[derive(Parser)]
#[command(name = "objectivity", version, about = "Checks frame-change identities over sampled spacetime points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check in a scenario file
    Verify {
        scenario: PathBuf,
        /// Write the JSON report here (overrides the scenario)
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write per-sample rows here (overrides the scenario)
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Override the sampling seed
        #[arg(long)]
        seed: Option<u64>,
        /// Multiply every tolerance by this factor
        #[arg(long, default_value_t = 1.0)]
        tolerance_scale: f64,
    },
    /// List observer motion kinds
    ListMotions,
    /// List field kinds
    ListFields,
    /// List check types and their default tolerances
    ListChecks,
}

fn print_table(rows: impl IntoIterator<Item = (String, String)>) {
    let rows: Vec<_> = rows.into_iter().collect();
    let width = rows.iter().map(|(a, _)| a.len()).max().unwrap_or(0);
    for (a, b) in rows {
        println!("{a:<width$}  {b}");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    match cli.command {
        Command::Verify { scenario, report, csv, seed, tolerance_scale } => {
            let opts = RunOptions { seed, tolerance_scale, report, csv };
            ExitCode::from(run_scenario(&scenario, &opts) as u8)
        }
        Command::ListMotions => {
            print_table(MOTION_KINDS.iter().map(|(n, d)| (n.to_string(), d.to_string())));
            ExitCode::SUCCESS
        }
        Command::ListFields => {
            println!("vector fields:");
            print_table(FIELD_KINDS.iter().map(|(n, d)| (format!("  {n}"), d.to_string())));
            println!("scalar fields:");
            print_table(SCALAR_KINDS.iter().map(|(n, d)| (format!("  {n}"), d.to_string())));
            ExitCode::SUCCESS
        }
        Command::ListChecks => {
            print_table(
                CheckType::ALL
                    .iter()
                    .map(|c| (c.name().to_string(), format!("[tol {:e}] {}", c.default_tolerance(), c.describe()))),
            );
            ExitCode::SUCCESS
        }
    }
}
