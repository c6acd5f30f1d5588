//! `whitham-lab`: run one experiment per invocation, or fold finished runs
//! into the acceptance report.
//!
//! Each experiment subcommand resolves a [`RunConfig`] (from `--config`
//! JSON if given, otherwise the experiment's defaults), runs it and writes
//! `<out>/<experiment>-<hash>.csv` plus a JSON twin carrying the band
//! checks. `report` re-reads every table in the output directory and
//! writes `<out>/report.json` with the per-criterion verdicts.
//!
//! Exit codes: 0 when every band (or every covered criterion) passes, 1 on
//! a failed check, 2 on configuration or I/O errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use whitham_core::harness::{self, ExperimentKind, ResultTable, RunConfig};

#[derive(Parser)]
#[command(name = "whitham-lab", version, about = "Water-wave model experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration; absent fields take the base defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides the config's `out_dir`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Seed for the run's random data (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Spatial dimension (overrides the config).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..=2))]
    dim: Option<u64>,

    /// Print nothing; the exit code still carries the verdict.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Dispersion-symbol derivative envelopes on a log grid.
    Symbols,
    /// Free-wave sup-norm decay sweep and exponent fit.
    Decay,
    /// Band-limited space-time norms across scales.
    Strichartz,
    /// Nonlinear evolution with invariant and toolbox checks.
    Evolve,
    /// Integral-form fixed point and diagonalization identities.
    Picard,
    /// Small-data energy trap over a long horizon.
    Global,
    /// Step-refinement ladder and observed order.
    Converge,
    /// Fold the tables under the output directory into report.json.
    Report,
}

impl Command {
    fn experiment(&self) -> Option<ExperimentKind> {
        match self {
            Command::Symbols => Some(ExperimentKind::SymbolBounds),
            Command::Decay => Some(ExperimentKind::Decay),
            Command::Strichartz => Some(ExperimentKind::Strichartz),
            Command::Evolve => Some(ExperimentKind::Evolve),
            Command::Picard => Some(ExperimentKind::Picard),
            Command::Global => Some(ExperimentKind::GlobalSmalldata),
            Command::Converge => Some(ExperimentKind::Convergence),
            Command::Report => None,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: &Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.command.experiment() {
        Some(kind) => run_experiment(cli, kind),
        None => run_report(cli),
    }
}

/// Resolve the configuration: file if given (subcommand still picks the
/// experiment), defaults otherwise; then the point overrides.
fn resolve_config(cli: &Cli, kind: ExperimentKind) -> Result<RunConfig, Box<dyn std::error::Error>> {
    let mut config = match &cli.config {
        Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
        None => RunConfig::for_experiment(kind, cli.dim.unwrap_or(1) as usize),
    };
    config.experiment = kind;
    if let Some(dim) = cli.dim {
        config.dimension = dim as usize;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out_dir = out.display().to_string();
    }
    Ok(config)
}

fn run_experiment(cli: &Cli, kind: ExperimentKind) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let config = resolve_config(cli, kind)?;
    let table = harness::run(&config)?;
    if !cli.quiet {
        println!(
            "{}/{} ({} rows, {:.0} ms)",
            config.out_dir,
            table.file_stem(),
            table.rows.len(),
            table.metadata.wall_ms
        );
        for b in &table.metadata.bands {
            println!(
                "  {:34} {:>13.4e} in [{:.4e}, {:.4e}]  {}",
                b.name,
                b.value,
                b.lo,
                b.hi,
                if b.pass { "pass" } else { "FAIL" }
            );
        }
    }
    Ok(if table.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// Parse every table JSON under the directory (in name order, so the
/// report is stable), skipping the report itself and anything that is not
/// a result table.
fn collect_tables(dir: &Path, quiet: bool) -> Result<Vec<ResultTable>, Box<dyn std::error::Error>> {
    let mut paths: Vec<PathBuf> = match fs::read_dir(dir) {
        Ok(entries) => entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
            .filter(|p| p.file_name().is_some_and(|n| n != "report.json"))
            .collect(),
        Err(_) => Vec::new(),
    };
    paths.sort();
    let mut tables = Vec::with_capacity(paths.len());
    for path in paths {
        match serde_json::from_str::<ResultTable>(&fs::read_to_string(&path)?) {
            Ok(table) => tables.push(table),
            Err(e) => {
                if !quiet {
                    eprintln!("skipping {}: {e}", path.display());
                }
            }
        }
    }
    Ok(tables)
}

fn run_report(cli: &Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let dir = match (&cli.out, &cli.config) {
        (Some(out), _) => out.clone(),
        (None, Some(path)) => {
            let config: RunConfig = serde_json::from_str(&fs::read_to_string(path)?)?;
            PathBuf::from(config.out_dir)
        }
        (None, None) => PathBuf::from("out"),
    };
    let tables = collect_tables(&dir, cli.quiet)?;
    let report = harness::report(&tables);
    report.write(&dir.join("report.json"))?;
    if !cli.quiet {
        for line in report.lines() {
            println!("{line}");
        }
    }
    Ok(if report.all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
