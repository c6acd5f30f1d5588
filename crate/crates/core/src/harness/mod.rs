//! Configuration, execution and reporting for the experiment suite.
//!
//! [`run`] takes one [`RunConfig`], validates it, dispatches on the
//! experiment kind and writes the resulting table as a CSV/JSON pair named
//! `<experiment>-<config hash>` under the configured output directory. The
//! CSV is deterministic for a fixed config (byte-identical across reruns);
//! the JSON adds the acceptance bands and wall time. [`report`] folds any
//! collection of such tables into the ten-criterion verdict.

pub mod config;
mod experiments;
pub mod report;
pub mod table;

pub use config::{ExperimentKind, RunConfig};
pub use report::{report, CheckRecord, CriterionSummary, Report};
pub use table::{
    band, stage_output, write_atomic, BandCheck, Column, ResultTable, StagedOutput, TableMetadata,
};

use std::path::PathBuf;
use std::time::Instant;

use crate::error::Result;

fn assemble(config: &RunConfig) -> Result<ResultTable> {
    config.validate()?;
    let start = Instant::now();
    let (columns, rows, mut bands) = match config.experiment {
        ExperimentKind::SymbolBounds => experiments::symbol_bounds(config)?,
        ExperimentKind::Decay => experiments::decay(config)?,
        ExperimentKind::Strichartz => experiments::strichartz(config)?,
        ExperimentKind::Evolve => experiments::evolve_experiment(config)?,
        ExperimentKind::Picard => experiments::picard(config)?,
        ExperimentKind::GlobalSmalldata => experiments::global_smalldata(config)?,
        ExperimentKind::Convergence => experiments::convergence(config)?,
    };
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    if config.experiment == ExperimentKind::SymbolBounds {
        // The scan is closed-form pointwise work; taking longer than a
        // second would mean the evaluation went quadratic somewhere.
        bands.push(band("wall clock", wall_ms / 1e3, 0.0, 1.0));
    }

    let metadata = TableMetadata {
        config_hash: config.config_hash(),
        dimension: config.dimension,
        wall_ms,
        bands,
    };
    let mut table = ResultTable::new(config.experiment, columns, metadata);
    for row in rows {
        table.push_row(row)?;
    }
    Ok(table)
}

/// Run one experiment and write its table under `config.out_dir`.
///
/// Returns the table (paths follow from [`ResultTable::file_stem`]). The
/// write is atomic: concurrent readers of the output directory never see a
/// half-written file.
pub fn run(config: &RunConfig) -> Result<ResultTable> {
    let table = assemble(config)?;
    table.write(&PathBuf::from(&config.out_dir))?;
    Ok(table)
}

/// Convergence ladder for an arbitrary base configuration, without writing
/// anything. Clones `base`, switches the experiment to the refinement
/// study with the given number of levels and returns the in-memory table.
pub fn convergence_study(base: &RunConfig, levels: usize) -> Result<ResultTable> {
    let mut config = base.clone();
    config.experiment = ExperimentKind::Convergence;
    config.levels = levels;
    assemble(&config)
}
