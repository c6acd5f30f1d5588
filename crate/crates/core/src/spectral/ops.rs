//! Multiplier application, dyadic projections, norms, and vector calculus.
//!
//! Everything here goes through the scaled-coefficient convention of
//! [`super::fft`]: a multiplier acts by plain pointwise scaling of the
//! coefficient array. Odd multipliers (derivatives, Riesz directions) zero
//! the Nyquist wavenumber on the affected axis — that mode has no conjugate
//! partner, so any imaginary symbol value there would leak into the
//! imaginary part of the synthesized field. All such functions share the
//! [`Grid::xi_axis_odd`] convention so their compositions stay consistent.

use super::bump::{beta, chi, is_dyadic};
use super::fft::{to_physical, to_spectral};
use super::grid::{FieldPair, Grid, RealField, SpectralField, Wavenumber};
use crate::error::{Error, Result};
use crate::symbols;
use crate::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Apply a Fourier multiplier `sym(xi)` to a real field and synthesize back.
///
/// The caller's symbol must map real fields to real fields
/// (`sym(-xi) = conj(sym(xi))`, real at unpaired Nyquist modes); if the
/// synthesized imaginary part exceeds roundoff scale the call fails with an
/// integrity error rather than silently discarding it.
pub fn apply_multiplier(
    f: &RealField,
    sym: impl Fn(Wavenumber) -> Complex,
) -> Result<RealField> {
    let grid = f.grid();
    let mut spec = to_spectral(f);
    for (idx, c) in spec.values_mut().iter_mut().enumerate() {
        *c *= sym(grid.wavenumber(idx));
    }
    let (out, residue) = to_physical(&spec);
    let scale = 1.0 + linf(f) + linf(&out);
    if residue > 1e-9 * scale {
        return Err(Error::Integrity(format!(
            "multiplier output has imaginary residue {residue:.3e} (field scale {scale:.3e}); \
             symbol does not preserve real fields"
        )));
    }
    Ok(out)
}

/// Scale spectral coefficients by a real radial factor, in place.
fn scale_radial(f: &mut SpectralField, factor: impl Fn(f64) -> f64) {
    let grid = f.grid();
    for (idx, c) in f.values_mut().iter_mut().enumerate() {
        *c *= factor(grid.xi_abs(idx));
    }
}

/// Dyadic frequency projection: `chi(|xi|)` for `lam = 1` (the low block),
/// `beta(|xi| / lam)` for dyadic `lam >= 2`.
pub fn lp_project(f: &RealField, lam: f64) -> Result<RealField> {
    let spec = lp_project_spectral(&to_spectral(f), lam)?;
    let (out, _residue) = to_physical(&spec);
    Ok(out)
}

/// Spectral-side dyadic projection; see [`lp_project`].
pub fn lp_project_spectral(f: &SpectralField, lam: f64) -> Result<SpectralField> {
    if !is_dyadic(lam) {
        return Err(Error::domain(format!(
            "dyadic projection wants lam in 1, 2, 4, ...; got {lam}"
        )));
    }
    let mut out = f.clone();
    if lam == 1.0 {
        scale_radial(&mut out, chi);
    } else {
        scale_radial(&mut out, |r| beta(r / lam));
    }
    Ok(out)
}

/// Grid L2 norm, `sqrt(sum f^2 dx^dim)`; equals [`SpectralField::l2_norm`]
/// by Parseval.
pub fn l2_quadrature(f: &RealField) -> f64 {
    let s: f64 = f.values().iter().map(|v| v * v).sum();
    (s * f.grid().cell_volume()).sqrt()
}

/// Sup norm over grid points.
pub fn linf(f: &RealField) -> f64 {
    f.values().iter().fold(0.0f64, |a, &b| a.max(b.abs()))
}

/// Lebesgue norm `(sum |f|^r dx^dim)^(1/r)` for `r >= 1`, with
/// `r = f64::INFINITY` meaning the sup norm.
pub fn lr_norm(f: &RealField, r: f64) -> Result<f64> {
    if r == f64::INFINITY {
        return Ok(linf(f));
    }
    if !(r >= 1.0) {
        return Err(Error::domain(format!("Lebesgue exponent must be >= 1, got {r}")));
    }
    let s: f64 = f.values().iter().map(|v| v.abs().powf(r)).sum();
    Ok((s * f.grid().cell_volume()).powf(1.0 / r))
}

/// Sobolev norm `sqrt((2L)^d sum <xi>^(2s) |c_k|^2)` of a spectral field.
pub fn sobolev_norm_spectral(f: &SpectralField, s: f64) -> f64 {
    let grid = f.grid();
    let sum: f64 = f
        .values()
        .iter()
        .enumerate()
        .map(|(idx, c)| symbols::bracket(grid.xi_abs(idx)).powf(2.0 * s) * c.norm_sqr())
        .sum();
    (grid.volume() * sum).sqrt()
}

/// Sobolev norm of a physical field; transforms and defers to
/// [`sobolev_norm_spectral`].
pub fn sobolev_norm(f: &RealField, s: f64) -> f64 {
    sobolev_norm_spectral(&to_spectral(f), s)
}

/// Energy-space norm of an elevation/velocity pair:
/// `sqrt(|eta|_{H^s}^2 + sum_j |K^{-1} v_j|_{H^s}^2)`.
///
/// The velocity components are weighted by `1/K(|xi|)`, which grows like
/// `|xi|^{1/2}`, so this is strictly stronger than the plain Sobolev norm
/// of `v`. This is the quantity the quadratic part of the energy controls.
pub fn xs_norm(state: &FieldPair, s: f64) -> f64 {
    let grid = state.grid();
    let eta_spec = to_spectral(&state.eta);
    let mut sum: f64 = eta_spec
        .values()
        .iter()
        .enumerate()
        .map(|(idx, c)| symbols::bracket(grid.xi_abs(idx)).powf(2.0 * s) * c.norm_sqr())
        .sum();
    for vj in &state.v {
        let spec = to_spectral(vj);
        sum += spec
            .values()
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let r = grid.xi_abs(idx);
                let k = symbols::k_symbol_unchecked(r);
                symbols::bracket(r).powf(2.0 * s) * c.norm_sqr() / (k * k)
            })
            .sum::<f64>();
    }
    (grid.volume() * sum).sqrt()
}

/// Riesz transform along `axis` (2d only): multiplier `i xi_j / |xi|`,
/// zero at the origin and on the Nyquist line of the chosen axis.
/// `cos(x_1)` maps to `-sin(x_1)` under `axis = 0`.
pub fn riesz(f: &RealField, axis: usize) -> Result<RealField> {
    let grid = f.grid();
    if grid.dim() != 2 {
        return Err(Error::domain("Riesz transforms are for 2d fields"));
    }
    if axis > 1 {
        return Err(Error::domain(format!("Riesz axis must be 0 or 1, got {axis}")));
    }
    let n = grid.points_per_axis();
    let mut spec = to_spectral(f);
    for (idx, c) in spec.values_mut().iter_mut().enumerate() {
        let comp = if axis == 0 { grid.xi_axis_odd(idx / n) } else { grid.xi_axis_odd(idx % n) };
        let r = grid.xi_abs(idx);
        let factor = if r == 0.0 { 0.0 } else { comp / r };
        *c *= Complex::new(0.0, factor);
    }
    let (out, _residue) = to_physical(&spec);
    Ok(out)
}

/// Odd-zeroed wavenumber vector at flat index `idx` of a 2d grid.
fn xi_odd_2d(grid: Grid, idx: usize) -> (f64, f64) {
    let n = grid.points_per_axis();
    (grid.xi_axis_odd(idx / n), grid.xi_axis_odd(idx % n))
}

/// Project a 2d velocity field onto its curl-free part, mode by mode:
/// `v_hat -> (xi . v_hat) xi / |xi|^2`.
///
/// Uses the odd-zeroed wavenumbers, so the result has exactly zero discrete
/// curl as measured by [`curl_residual`]. Modes where that wavenumber
/// vanishes (the mean and the pure Nyquist lines) pass through unchanged; a
/// constant field is curl-free on the torus.
pub fn curl_free_project(v1: &RealField, v2: &RealField) -> Result<(RealField, RealField)> {
    let grid = v1.grid();
    if grid.dim() != 2 {
        return Err(Error::domain("curl-free projection is for 2d fields"));
    }
    if v2.grid() != grid {
        return Err(Error::grid("velocity components live on different grids"));
    }
    let mut s1 = to_spectral(v1);
    let mut s2 = to_spectral(v2);
    for idx in 0..grid.len() {
        let (a, b) = xi_odd_2d(grid, idx);
        let den = a * a + b * b;
        if den == 0.0 {
            continue;
        }
        let dot = a * s1.values()[idx] + b * s2.values()[idx];
        s1.values_mut()[idx] = dot * (a / den);
        s2.values_mut()[idx] = dot * (b / den);
    }
    let (p1, _r1) = to_physical(&s1);
    let (p2, _r2) = to_physical(&s2);
    Ok((p1, p2))
}

/// Discrete curl size `|d_1 v_2 - d_2 v_1|_{L^2}` of a 2d velocity field,
/// with the derivatives taken through the odd-zeroed wavenumbers.
pub fn curl_residual(v1: &RealField, v2: &RealField) -> Result<f64> {
    let grid = v1.grid();
    if grid.dim() != 2 {
        return Err(Error::domain("curl residual is for 2d fields"));
    }
    if v2.grid() != grid {
        return Err(Error::grid("velocity components live on different grids"));
    }
    let s1 = to_spectral(v1);
    let s2 = to_spectral(v2);
    let mut curl = SpectralField::zero(grid);
    for idx in 0..grid.len() {
        let (a, b) = xi_odd_2d(grid, idx);
        curl.values_mut()[idx] =
            Complex::new(0.0, 1.0) * (a * s2.values()[idx] - b * s1.values()[idx]);
    }
    Ok(curl.l2_norm())
}

/// Log-interpolation ratio `|f|_inf / (1 + |f|_{H^{d/2}} sqrt(ln(2 + |f|_{H^s})))`.
///
/// For `s > d/2` this stays bounded by a constant depending only on `s` and
/// the dimension, even though `H^{d/2}` alone does not embed into `L^inf`;
/// the scan experiments check that bound on families of fields. Fails for
/// `s <= d/2`, where no such bound holds.
pub fn brezis_gallouet_ratio(f: &RealField, s: f64) -> Result<f64> {
    let d = f.grid().dim() as f64;
    if !(s > d / 2.0) {
        return Err(Error::domain(format!(
            "log-interpolation ratio needs s > d/2 = {}, got {s}",
            d / 2.0
        )));
    }
    let critical = sobolev_norm(f, d / 2.0);
    let high = sobolev_norm(f, s);
    Ok(linf(f) / (1.0 + critical * (2.0 + high).ln().sqrt()))
}

/// Zero every coefficient outside the 2/3-rule band `|k| <= n/3` per axis.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let grid = f.grid();
    let mut out = f.clone();
    for (idx, c) in out.values_mut().iter_mut().enumerate() {
        if !grid.dealias_keep(idx) {
            *c = Complex::new(0.0, 0.0);
        }
    }
    out
}

/// Alias-free pointwise product: band-limit both factors to the 2/3 band,
/// multiply on the grid, and band-limit the product. For factors already
/// inside the band the input filtering is a no-op and the result is the
/// exact Fourier-Galerkin product.
pub fn dealias_product(a: &RealField, b: &RealField) -> Result<RealField> {
    if a.grid() != b.grid() {
        return Err(Error::grid("product factors live on different grids"));
    }
    let (fa, _) = to_physical(&dealias(&to_spectral(a)));
    let (fb, _) = to_physical(&dealias(&to_spectral(b)));
    let values: Vec<f64> =
        fa.values().iter().zip(fb.values()).map(|(x, y)| x * y).collect();
    let prod = RealField::new(a.grid(), values)?;
    let (out, _) = to_physical(&dealias(&to_spectral(&prod)));
    Ok(out)
}

/// Deterministic band-limited test field: a sum of random-phase cosines
/// over integer modes `|k| <= max_mode` per axis, rescaled so the sup norm
/// equals `amplitude`. Same `(grid, seed, max_mode, amplitude)` gives the
/// same bytes regardless of the `parallel` feature.
pub fn random_band_limited(
    grid: Grid,
    seed: u64,
    max_mode: usize,
    amplitude: f64,
) -> Result<RealField> {
    if max_mode == 0 || max_mode > grid.points_per_axis() / 3 {
        return Err(Error::grid(format!(
            "max_mode must be in 1..={} for this grid, got {max_mode}",
            grid.points_per_axis() / 3
        )));
    }
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(Error::domain(format!("amplitude must be positive, got {amplitude}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = std::f64::consts::PI / grid.half_length();
    // One (amplitude, phase) draw per independent mode: k in 1..=max_mode in
    // 1d; in 2d the half-lattice k1 > 0, or k1 = 0 with k2 > 0.
    let mut modes: Vec<(f64, f64, f64, f64)> = Vec::new();
    if grid.dim() == 1 {
        for k in 1..=max_mode {
            modes.push((k as f64 * base, 0.0, rng.gen_range(-1.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU)));
        }
    } else {
        let m = max_mode as i64;
        for k1 in 0..=m {
            for k2 in -m..=m {
                if k1 == 0 && k2 <= 0 {
                    continue;
                }
                modes.push((
                    k1 as f64 * base,
                    k2 as f64 * base,
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                ));
            }
        }
    }
    let sample = |x: f64, y: f64| -> f64 {
        modes.iter().map(|&(kx, ky, a, phase)| a * (kx * x + ky * y + phase).cos()).sum()
    };
    let raw = if grid.dim() == 1 {
        RealField::from_fn_1d(grid, |x| sample(x, 0.0))?
    } else {
        RealField::from_fn_2d(grid, sample)?
    };
    let peak = linf(&raw);
    if peak == 0.0 {
        return Err(Error::domain("random field degenerated to zero; change the seed"));
    }
    let scale = amplitude / peak;
    let values = raw.values().iter().map(|v| v * scale).collect();
    RealField::new(grid, values)
}
