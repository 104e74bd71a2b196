use clap::{Parser, Subcommand};
use koopman_approx::output::read_report;
use koopman_approx::{catalogue, run, write_report, ExperimentConfig, HarnessError};
use koopman_core::report::ConvergenceReport;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "koopman-approx", version, about = "Convergence experiments for transfer and Koopman operator approximations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config and write CSV + JSON reports.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Output directory (defaults to the config's `out`, then the current directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the available experiments.
    List,
    /// Re-evaluate the acceptance checks stored in a JSON report.
    Check { report: PathBuf },
}

fn print_checks(report: &ConvergenceReport) {
    for c in &report.acceptance {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.rule, c.detail);
    }
}

fn execute(command: Command) -> Result<bool, HarnessError> {
    match command {
        Command::List => {
            for e in catalogue() {
                println!("{:<26} {}", e.name, e.summary);
            }
            Ok(true)
        }
        Command::Run { config, seed, trials, out } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if trials.is_some() {
                cfg.trials = trials;
            }
            if out.is_some() {
                cfg.out = out;
            }
            let report = run(&cfg)?;
            let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let (csv, json) = write_report(&report, &dir)?;
            print_checks(&report);
            if let Some(fit) = report.fit {
                println!("slope {:.6} +- {:.3e} over {} rows", fit.slope, fit.half_width, fit.points);
            }
            println!("wrote {} and {}", csv.display(), json.display());
            Ok(report.passed())
        }
        Command::Check { report } => {
            let report = read_report(&report)?;
            print_checks(&report);
            let finite = report.all_finite();
            if !finite {
                println!("FAIL every row is finite: stored rows contain NaN or infinity");
            }
            Ok(finite && !report.acceptance.is_empty() && report.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
