use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use vpflow_cli::{run, ExperimentConfig, RunError, Scenario};

/// Runs a numerical experiment described by a config file.
#[derive(Debug, Parser)]
#[command(name = "vpflow", version)]
struct Args {
    /// flow, revhc, nelson, laplace, blconst, lrvol, tropical,
    /// legendre-check or validate
    scenario: Scenario,
    /// Config file (key = value lines with [section] headers)
    #[arg(long)]
    config: PathBuf,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Multiplies every tolerance-type assertion
    #[arg(long, default_value_t = 1.0)]
    tol_scale: f64,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(k) = args.threads {
        if k == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let config = match ExperimentConfig::load(&args.config, args.scenario, args.tol_scale) {
        Ok(c) => c,
        Err(source) => {
            eprintln!(
                "error: {}",
                RunError::Config {
                    path: args.config.display().to_string(),
                    source
                }
            );
            return ExitCode::from(2);
        }
    };
    let outcome = match run(&config, &args.out) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    println!("wrote {}", outcome.csv.display());
    if let Some(svg) = &outcome.svg {
        println!("wrote {}", svg.display());
    }
    let width = outcome.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &outcome.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {:width$}  {}", c.name, c.detail);
    }
    if outcome.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
