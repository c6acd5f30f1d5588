//! Numerical laboratory for the Whitham–Boussinesq water-wave systems
//!
//! The systems couple a surface elevation `eta` with a velocity `v` through
//! the nonlocal operator `K = sqrt(tanh|D| / |D|)`:
//!
//! ```text
//! d/dt eta + div v = -K^2 div(eta v)
//! d/dt v   + K^2 grad eta = -K^2 grad(|v|^2 / 2)
//! ```
//!
//! in one or two space dimensions (2d velocities are curl-free). The crate
//! provides the building blocks to measure, at desk scale, the quantitative
//! behaviour of these systems:
//!
//! * [`symbols`] — scalar evaluation of `K`, the dispersion relation
//!   `m(r) = r K(r)` and its first two derivatives, with the decay-rate
//!   envelopes they satisfy;
//! * [`spectral`] — periodic grids, Fourier multipliers, Littlewood–Paley
//!   projections, Sobolev/energy norms;
//! * [`evolution`] — diagonalized evolution, an exponential (ETDRK4) time
//!   stepper, conserved quantities, Picard/Duhamel iteration;
//! * [`dispersion`] — oscillatory-integral kernels of the linear group, their
//!   sup-norm sweeps, dispersive-decay and Strichartz exponent fits;
//! * [`harness`] — experiment configs, deterministic CSV/JSON output and the
//!   aggregate pass/fail report.
//!
//! The sweeps in [`dispersion`] and [`harness`] are data-parallel; the
//! `parallel` feature (on by default) runs them on a rayon pool while keeping
//! the reduction order deterministic, so results are byte-identical with the
//! sequential fallback (`--no-default-features`).

// Frozen reference coefficients and oracle values keep every printed digit;
// `!(x > 0)`-style guards are NaN-rejecting on purpose; indexed loops walk
// several same-length arrays in lockstep.
#![allow(clippy::excessive_precision)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod dispersion;
pub mod error;
pub mod evolution;
pub mod harness;
pub mod par;
pub mod quad;
pub mod spectral;
pub mod symbols;

pub use error::{Error, Result};

/// Complex scalar used throughout (re-exported from rustfft's num-complex).
pub type Complex = rustfft::num_complex::Complex<f64>;
