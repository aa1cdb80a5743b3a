//! Config-driven experiment runner: one CSV per run, an optional SVG plot,
//! and a pass/fail verdict for every assertion in the config.

pub mod config;
pub mod csv;
pub mod scenarios;
pub mod svg;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use config::{ConfigError, ExperimentConfig, Scenario};
pub use scenarios::{run_scenario, Check, Report};
pub use svg::{emit_plot, PlotError, PlotOptions, Series};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{path}: {source}")]
    Config { path: String, source: ConfigError },
    #[error("computation failed: {0}")]
    Compute(#[from] vpflow_core::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Plot(#[from] PlotError),
}

/// Files written by a run and the assertion outcomes.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub csv: PathBuf,
    pub svg: Option<PathBuf>,
    pub checks: Vec<Check>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs a validated config and writes its artifacts under `out_dir`.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome, RunError> {
    let report = run_scenario(config)?;
    std::fs::create_dir_all(out_dir).map_err(|source| RunError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let csv = out_dir.join(&config.csv);
    report.table.write(&csv, &config.resolved()).map_err(|source| RunError::Io {
        path: csv.display().to_string(),
        source,
    })?;
    let svg = match &config.svg {
        Some(name) => {
            let path = out_dir.join(name);
            emit_plot(&report.series, &path, &report.plot)?;
            Some(path)
        }
        None => None,
    };
    Ok(RunOutcome {
        csv,
        svg,
        checks: report.checks,
    })
}
