//! Roll-up of experiment tables into the ten acceptance criteria.
//!
//! Each criterion draws its verdict from named bands of specific
//! experiments (for instance, the conservation criterion reads only the
//! drift bands of the evolution run, not its property-suite bands). A
//! criterion with no matching table reports `covered: false` and does not
//! force a verdict either way; `all_pass` means every *covered* criterion
//! passed, so an empty report is vacuously green and the caller decides
//! whether partial coverage is acceptable.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentKind;
use super::experiments::bands;
use super::table::{write_atomic, BandCheck, ResultTable};
use crate::error::Result;

/// One band check, tagged with the experiment and dimension it came from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub experiment: String,
    pub dimension: usize,
    #[serde(flatten)]
    pub band: BandCheck,
}

/// Verdict for a single acceptance criterion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionSummary {
    pub id: usize,
    pub title: String,
    /// Whether any table in the input fed this criterion.
    pub covered: bool,
    /// True when covered and every contributing check passed.
    pub pass: bool,
    pub checks: Vec<CheckRecord>,
}

/// The full acceptance report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub criteria: Vec<CriterionSummary>,
    pub all_pass: bool,
}

impl Report {
    /// One human-readable line per criterion.
    pub fn lines(&self) -> Vec<String> {
        self.criteria
            .iter()
            .map(|c| {
                let verdict = if !c.covered {
                    "not run"
                } else if c.pass {
                    "pass"
                } else {
                    "FAIL"
                };
                let detail = if c.covered {
                    let failed: Vec<&str> = c
                        .checks
                        .iter()
                        .filter(|r| !r.band.pass)
                        .map(|r| r.band.name.as_str())
                        .collect();
                    if failed.is_empty() {
                        format!("{} checks", c.checks.len())
                    } else {
                        format!("failed: {}", failed.join(", "))
                    }
                } else {
                    String::new()
                };
                format!("criterion {:2}: {:7} {} ({})", c.id, verdict, c.title, detail)
            })
            .collect()
    }

    /// Serialize to pretty JSON and write atomically.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        write_atomic(path, &bytes)
    }
}

/// Which bands of which experiment feed a criterion. `dimension: 0` means
/// any dimension; an empty band list means every band of the experiment.
struct Source {
    kind: ExperimentKind,
    dimension: usize,
    band_names: &'static [&'static str],
}

fn criterion_sources(id: usize) -> (&'static str, Vec<Source>) {
    let any = |kind| Source { kind, dimension: 0, band_names: &[] };
    match id {
        1 => ("symbol derivative envelopes", vec![any(ExperimentKind::SymbolBounds)]),
        2 => (
            "free-wave decay exponents, one dimension",
            vec![Source { kind: ExperimentKind::Decay, dimension: 1, band_names: &[] }],
        ),
        3 => (
            "free-wave decay exponents, two dimensions",
            vec![Source { kind: ExperimentKind::Decay, dimension: 2, band_names: &[] }],
        ),
        4 => ("space-time norm scaling", vec![any(ExperimentKind::Strichartz)]),
        5 => (
            "invariants along the nonlinear flow",
            vec![Source {
                kind: ExperimentKind::Evolve,
                dimension: 0,
                band_names: &[
                    bands::HAMILTONIAN_DRIFT,
                    bands::MOMENTUM_DRIFT,
                    bands::LINEAR_ENERGY_DRIFT,
                ],
            }],
        ),
        6 => ("stepper self-convergence", vec![any(ExperimentKind::Convergence)]),
        7 => ("small-data energy trap", vec![any(ExperimentKind::GlobalSmalldata)]),
        8 => (
            "diagonalization identities",
            vec![Source {
                kind: ExperimentKind::Picard,
                dimension: 0,
                band_names: &[bands::ROUND_TRIP, bands::TRANSFORM],
            }],
        ),
        9 => (
            "contraction of the integral-form iteration",
            vec![Source {
                kind: ExperimentKind::Picard,
                dimension: 0,
                band_names: &[bands::CONTRACTION, bands::FIXED_POINT],
            }],
        ),
        10 => (
            "spectral toolbox properties",
            vec![Source {
                kind: ExperimentKind::Evolve,
                dimension: 0,
                band_names: &[
                    bands::PARTITION_RESIDUAL,
                    bands::PARSEVAL_RESIDUAL,
                    bands::BERNSTEIN_RATIO,
                    bands::REALNESS_RESIDUE,
                    bands::LOG_INTERPOLATION,
                    bands::DETERMINISM,
                    bands::CURL_RESIDUAL,
                ],
            }],
        ),
        _ => unreachable!("criteria run 1..=10"),
    }
}

/// Assemble the acceptance report from whatever tables are at hand.
pub fn report(tables: &[ResultTable]) -> Report {
    let mut criteria = Vec::with_capacity(10);
    for id in 1..=10 {
        let (title, sources) = criterion_sources(id);
        let mut checks = Vec::new();
        for source in &sources {
            for table in tables {
                if table.kind != source.kind {
                    continue;
                }
                if source.dimension != 0 && table.metadata.dimension != source.dimension {
                    continue;
                }
                for b in &table.metadata.bands {
                    if source.band_names.is_empty()
                        || source.band_names.contains(&b.name.as_str())
                    {
                        checks.push(CheckRecord {
                            experiment: table.kind.to_string(),
                            dimension: table.metadata.dimension,
                            band: b.clone(),
                        });
                    }
                }
            }
        }
        let covered = !checks.is_empty();
        let pass = covered && checks.iter().all(|r| r.band.pass);
        criteria.push(CriterionSummary { id, title: title.to_string(), covered, pass, checks });
    }
    let all_pass = criteria.iter().filter(|c| c.covered).all(|c| c.pass);
    Report { criteria, all_pass }
}
