use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use semitent::config::{Format, Scenario};
use semitent::output;
use semitent::registry::REGISTRY;
use semitent::runner::{exit_code, run_scenario, RunSummary};
use semitent_core::fixtures;

#[derive(Parser)]
#[command(name = "semitent", version, about = "Numerical checks for semigroup tent spaces and Hardy-BMO duality")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a scenario and resolve every check id and fixture without running anything.
    Validate { config: PathBuf },
    /// Run a scenario and write the reports.
    Run {
        config: PathBuf,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; reports go to stdout when neither this nor the scenario sets one.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<Format>,
        /// Exit with status 3 when any report errored.
        #[arg(long)]
        strict: bool,
    },
    /// List the registered checks.
    ListChecks,
    /// List the fixture catalog.
    ListFixtures,
}

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("config error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config } => match Scenario::from_path(&config) {
            Ok(s) => {
                println!("ok: {} selections over {} fixtures", s.selections.len(), s.fixtures.len());
                ExitCode::SUCCESS
            }
            Err(e) => config_error(e),
        },
        Command::ListChecks => {
            for s in REGISTRY {
                println!("{:<34} {:<18} {:<8} {}", s.id, s.module, format!("{:?}", s.scope).to_lowercase(), s.policy.describe());
                println!("    {}", s.statement);
            }
            ExitCode::SUCCESS
        }
        Command::ListFixtures => {
            for f in fixtures::catalog() {
                println!("{f}");
            }
            println!("line: torus or open grid of n cells with heat or Poisson kernels (see [line])");
            ExitCode::SUCCESS
        }
        Command::Run { config, seed, out, format, strict } => {
            let mut scenario = match Scenario::from_path(&config) {
                Ok(s) => s,
                Err(e) => return config_error(e),
            };
            if let Some(seed) = seed {
                scenario.seed = seed;
            }
            if let Some(f) = format {
                scenario.format = f;
            }
            let reports = match run_scenario(&scenario, None) {
                Ok(r) => r,
                Err(e) => return config_error(e),
            };
            let dir = out.or_else(|| scenario.out_dir.as_ref().map(PathBuf::from));
            let written = match &dir {
                Some(dir) => fs::create_dir_all(dir)
                    .and_then(|_| fs::File::create(dir.join(output::file_name(scenario.format))))
                    .and_then(|f| output::write(&reports, scenario.format, io::BufWriter::new(f))),
                None => output::write(&reports, scenario.format, io::stdout().lock()),
            };
            if let Err(e) = written {
                eprintln!("write error: {e}");
                return ExitCode::from(2);
            }
            let summary = RunSummary::of(&reports);
            let _ = writeln!(
                io::stderr(),
                "{} reports: {} passed, {} hard failures, {} soft failures, {} errored",
                summary.total,
                summary.passed,
                summary.hard_failures,
                summary.soft_failures,
                summary.errored
            );
            ExitCode::from(exit_code(&summary, strict) as u8)
        }
    }
}
