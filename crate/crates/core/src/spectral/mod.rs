//! Periodic pseudo-spectral infrastructure.
//!
//! Fields live on the torus `[-L, L)^d` sampled at `N` points per axis
//! (`N` a power of two), with the wavenumber lattice `xi_k = pi k / L`,
//! `k in [-N/2, N/2)`. Spectral data is stored in FFT order (nonnegative
//! `k` first) and scaled so coefficients are honest Fourier-series
//! coefficients: a unit-amplitude mode has two entries of modulus 1/2.
//!
//! The submodules provide:
//! * [`grid`] — [`Grid`], [`RealField`], [`SpectralField`], [`FieldPair`]
//!   and the precomputed per-grid [`MultiplierTable`];
//! * [`fft`] — forward/inverse transforms (rustfft underneath, planners
//!   cached per thread);
//! * [`bump`] — the concrete Littlewood–Paley cutoff `chi` and annulus bump
//!   `beta`;
//! * [`ops`] — multiplier application, dyadic projections, Sobolev / energy
//!   norms, Riesz transforms, the curl-free projection and the
//!   Brezis–Gallouet ratio.

pub mod bump;
pub mod fft;
pub mod grid;
pub mod ops;

pub use grid::{FieldPair, Grid, MultiplierTable, RealField, SpectralField, Wavenumber};
pub use ops::{
    apply_multiplier, brezis_gallouet_ratio, curl_free_project, curl_residual, dealias,
    dealias_product, l2_quadrature, linf, lp_project, lp_project_spectral, lr_norm,
    random_band_limited, riesz, sobolev_norm, sobolev_norm_spectral, xs_norm,
};
