//! Frequency-localized free waves: pointwise kernel bounds and space-time norms.
//!
//! The linear half of the system moves each Fourier mode by the phase
//! `exp(-i t m(xi))`, so everything about decay is encoded in oscillatory
//! integrals against a dyadic bump in frequency.  This module evaluates those
//! integrals two independent ways — continuum quadrature with no grid or
//! aliasing in the loop, and exact mode-by-mode propagation on a large torus
//! — and checks that the two agree:
//!
//! * [`bessel`] — `J_0`, needed for the radial reduction of the 2d kernel;
//! * [`oscillatory`] — the localized kernels themselves, plus an independent
//!   tensor-product oracle for the 2d case;
//! * [`decay`] — envelope scans over space, the least-squares fit of the
//!   decay exponents in `(lambda, t)`, and the grid-propagated free-wave
//!   cross-check of the same decay;
//! * [`strichartz`] — discrete space-time Lebesgue norms of band-limited free
//!   waves on a periodic box, for checking the scaling of admissible pairs.

pub mod bessel;
pub mod decay;
pub mod oscillatory;
pub mod strichartz;

pub use bessel::bessel_j0;
pub use decay::{
    decay_sweep, fit_decay_exponents, free_wave_decay, sup_norm_scan, sup_norm_scan_opts,
    DecayReport, DecaySample, FreeWaveOptions, FreeWaveSample, ScanOptions, SupScan,
};
pub use oscillatory::{kernel_1d, kernel_2d, kernel_2d_tensor, stationary_point};
pub use strichartz::{
    band_orbit, delta_profile, strichartz_norm, suggested_steps, StrichartzSpec,
};
