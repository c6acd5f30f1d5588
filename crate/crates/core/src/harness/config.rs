//! Experiment configuration: one flat, diff-able, hashable record.
//!
//! A [`RunConfig`] is deliberately a single level of plain key-value pairs
//! so that configs diff cleanly, hash canonically and round-trip through
//! JSON without surprises. Not every experiment reads every field; unused
//! fields still validate, so a config tweaked for one experiment can be
//! re-pointed at another by changing `experiment` alone.
//!
//! Validation reports *all* violated fields in one [`Error::Config`] rather
//! than stopping at the first, so a broken config file is fixed in one
//! round trip.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::bump::is_dyadic;

/// The experiments the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Derivative envelopes of the dispersion relation on a log grid.
    SymbolBounds,
    /// Sup-norm decay of the band-limited free-wave kernels.
    Decay,
    /// Space-time norms of band-limited free waves across scales.
    Strichartz,
    /// Nonlinear evolution: conservation plus the spectral property checks.
    Evolve,
    /// Duhamel fixed-point iteration against the time stepper.
    Picard,
    /// Long-horizon energy trap for small data.
    GlobalSmalldata,
    /// Self-convergence order of the time stepper under step halving.
    Convergence,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::SymbolBounds,
        ExperimentKind::Decay,
        ExperimentKind::Strichartz,
        ExperimentKind::Evolve,
        ExperimentKind::Picard,
        ExperimentKind::GlobalSmalldata,
        ExperimentKind::Convergence,
    ];

    /// Kebab-case name; also the stem of the output files.
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SymbolBounds => "symbol-bounds",
            ExperimentKind::Decay => "decay",
            ExperimentKind::Strichartz => "strichartz",
            ExperimentKind::Evolve => "evolve",
            ExperimentKind::Picard => "picard",
            ExperimentKind::GlobalSmalldata => "global-smalldata",
            ExperimentKind::Convergence => "convergence",
        }
    }
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything one run needs. Fields omitted from a config file take the
/// values of [`RunConfig::default`]; [`RunConfig::for_experiment`] gives
/// per-experiment, per-dimension tuned defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    /// Spatial dimension, 1 or 2.
    pub dimension: usize,
    /// Torus half-length `L`; the domain is `[-L, L)^d`.
    pub half_length: f64,
    /// Grid points per axis; a power of two.
    pub points_per_axis: usize,
    /// Band limit of random initial data, at most `points_per_axis / 3`.
    pub max_mode: usize,
    /// Peak amplitude of random initial data; the small-data experiment
    /// reads it as the exact initial energy norm instead.
    pub amplitude: f64,
    /// Time step; 0 picks the stability-limit step automatically.
    pub dt: f64,
    /// Final time of evolution experiments.
    pub t_final: f64,
    /// Trajectory samples recorded between 0 and `t_final`.
    pub samples: usize,
    /// Sobolev index `s` of the energy norm `X^s` that trajectories record.
    pub energy_index: f64,
    /// Dyadic frequency scales swept by the decay and space-time
    /// experiments.
    pub lambdas: Vec<f64>,
    /// Decay sweep times in similarity form `t sqrt(lambda)`; at least 10,
    /// where the kernel scans accept the time as asymptotic.
    pub scaled_times: Vec<f64>,
    /// Time horizon of the space-time norm experiment.
    pub horizon: f64,
    /// Step-halving levels of the convergence study, at least 3.
    pub levels: usize,
    /// Integrate the free flow only (convergence and evolution).
    pub linear_only: bool,
    /// Agreement tolerance for cross-checks whose scale the integrator
    /// sets, e.g. fixed point versus time stepper.
    pub tolerance: f64,
    /// Seed for all random data in the run.
    pub seed: u64,
    /// Output directory for the CSV/JSON pair.
    pub out_dir: String,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig::for_experiment(ExperimentKind::SymbolBounds, 1)
    }
}

impl RunConfig {
    /// Tuned defaults for one experiment in one dimension. These are the
    /// designs the acceptance bands were frozen against.
    pub fn for_experiment(kind: ExperimentKind, dimension: usize) -> RunConfig {
        let two_d = dimension == 2;
        let mut config = RunConfig {
            experiment: kind,
            dimension,
            half_length: std::f64::consts::PI,
            points_per_axis: if two_d { 32 } else { 128 },
            max_mode: if two_d { 6 } else { 12 },
            amplitude: 0.01,
            dt: 0.0,
            t_final: 10.0,
            samples: 11,
            energy_index: 1.0,
            lambdas: if two_d {
                vec![4.0, 8.0, 16.0, 32.0]
            } else {
                vec![8.0, 16.0, 32.0, 64.0, 128.0]
            },
            scaled_times: vec![80.0, 160.0, 320.0, 640.0],
            horizon: if two_d { 8.0 } else { 16.0 },
            levels: 4,
            linear_only: false,
            tolerance: 1e-9,
            seed: 31,
            out_dir: "out".into(),
        };
        match kind {
            ExperimentKind::Strichartz => {
                if !two_d {
                    // Three octave-spaced scales keep the sweep affordable
                    // while spanning a factor 16 in frequency.
                    config.lambdas = vec![8.0, 32.0, 128.0];
                }
            }
            ExperimentKind::GlobalSmalldata => {
                config.t_final = 100.0;
                config.samples = 21;
                config.energy_index = 0.0;
            }
            ExperimentKind::Convergence => {
                // Larger amplitude lifts the O(dt^4) defect well above
                // roundoff so the measured orders are clean.
                config.amplitude = 0.2;
                config.t_final = 1.0;
                config.points_per_axis = if two_d { 32 } else { 64 };
                config.samples = 2;
            }
            _ => {}
        }
        config
    }

    /// Check every invariant, reporting all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut bad: Vec<String> = Vec::new();
        let mut fail = |msg: String| bad.push(msg);

        if !(self.dimension == 1 || self.dimension == 2) {
            fail(format!("dimension: must be 1 or 2, got {}", self.dimension));
        }
        if !(self.half_length.is_finite() && self.half_length > 0.0) {
            fail(format!("half_length: must be positive, got {}", self.half_length));
        }
        if self.points_per_axis < 4 || !self.points_per_axis.is_power_of_two() {
            fail(format!(
                "points_per_axis: must be a power of two >= 4, got {}",
                self.points_per_axis
            ));
        } else if self.max_mode == 0 || self.max_mode > self.points_per_axis / 3 {
            fail(format!(
                "max_mode: must be in 1..={} for {} points per axis, got {}",
                self.points_per_axis / 3,
                self.points_per_axis,
                self.max_mode
            ));
        }
        if !(self.amplitude.is_finite() && self.amplitude > 0.0) {
            fail(format!("amplitude: must be positive, got {}", self.amplitude));
        }
        if !(self.dt.is_finite() && self.dt >= 0.0) {
            fail(format!("dt: must be 0 (automatic) or positive, got {}", self.dt));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            fail(format!("t_final: must be positive, got {}", self.t_final));
        }
        if self.samples < 2 {
            fail(format!("samples: need at least 2 (initial and final), got {}", self.samples));
        }
        if !self.energy_index.is_finite() {
            fail(format!("energy_index: must be finite, got {}", self.energy_index));
        }
        if self.lambdas.is_empty() {
            fail("lambdas: sweep list must not be empty".into());
        }
        for l in &self.lambdas {
            if !(is_dyadic(*l) && *l >= 2.0) {
                fail(format!("lambdas: scales must be dyadic and >= 2, got {l}"));
            }
        }
        if self.scaled_times.is_empty() {
            fail("scaled_times: sweep list must not be empty".into());
        }
        for t in &self.scaled_times {
            if !(t.is_finite() && *t >= 10.0) {
                fail(format!(
                    "scaled_times: t sqrt(lambda) must be >= 10 (the asymptotic regime), got {t}"
                ));
            }
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            fail(format!("horizon: must be positive, got {}", self.horizon));
        }
        if self.levels < 3 {
            fail(format!("levels: a convergence study needs at least 3, got {}", self.levels));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            fail(format!("tolerance: must be positive, got {}", self.tolerance));
        }
        if self.out_dir.is_empty() {
            fail("out_dir: must not be empty".into());
        }

        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(bad))
        }
    }

    /// FNV-1a hash of the canonical JSON serialization, as 16 hex digits.
    /// Field order is fixed by the struct, so equal configs hash equally
    /// across runs and platforms.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("plain data serializes");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in canonical.as_bytes() {
            h ^= u64::from(*byte);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuned_defaults_all_validate() {
        for kind in ExperimentKind::ALL {
            for dim in [1, 2] {
                let config = RunConfig::for_experiment(kind, dim);
                assert!(config.validate().is_ok(), "{kind} {dim}d defaults rejected");
                assert_eq!(config.dimension, dim);
            }
        }
    }

    #[test]
    fn validation_enumerates_every_violation() {
        let config = RunConfig {
            dt: -0.5,
            dimension: 3,
            lambdas: vec![3.0],
            tolerance: 0.0,
            out_dir: String::new(),
            ..RunConfig::default()
        };
        let err = config.validate().unwrap_err();
        match err {
            Error::Config(fields) => {
                assert_eq!(fields.len(), 5, "{fields:?}");
                let joined = fields.join("; ");
                for name in ["dt", "dimension", "lambdas", "tolerance", "out_dir"] {
                    assert!(joined.contains(name), "missing {name} in {joined}");
                }
            }
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn empty_sweeps_are_rejected() {
        let mut config = RunConfig::default();
        config.lambdas.clear();
        config.scaled_times.clear();
        match config.validate().unwrap_err() {
            Error::Config(fields) => assert_eq!(fields.len(), 2),
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn hash_is_deterministic_and_seed_sensitive() {
        let a = RunConfig::default();
        let mut b = RunConfig::default();
        assert_eq!(a.config_hash(), b.config_hash());
        assert_eq!(a.config_hash().len(), 16);
        b.seed += 1;
        assert_ne!(a.config_hash(), b.config_hash());
    }

    #[test]
    fn sparse_config_files_fill_from_defaults() {
        let config: RunConfig =
            serde_json::from_str(r#"{"experiment": "decay", "dimension": 2}"#).unwrap();
        assert_eq!(config.experiment, ExperimentKind::Decay);
        assert_eq!(config.dimension, 2);
        assert_eq!(config.seed, 31);
        // Unknown keys are typos, not extensions.
        assert!(serde_json::from_str::<RunConfig>(r#"{"experimnt": "decay"}"#).is_err());
    }

    #[test]
    fn kind_names_round_trip_in_kebab_case() {
        for kind in ExperimentKind::ALL {
            let json = serde_json::to_string(&kind).unwrap();
            assert_eq!(json, format!("\"{}\"", kind.name()));
            let back: ExperimentKind = serde_json::from_str(&json).unwrap();
            assert_eq!(back, kind);
        }
        assert_eq!(ExperimentKind::GlobalSmalldata.name(), "global-smalldata");
    }
}
