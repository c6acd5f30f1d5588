//! Sup-norm envelopes of the localized kernels and the decay-exponent fit.
//!
//! The dispersive estimate under test says the band-limited kernel obeys
//! `sup_x |K_lambda(t, x)| ~ lambda^{3d/4} t^{-d/2}` once `t >> lambda^{-1/2}`.
//! [`sup_norm_scan`] measures the left-hand side for one `(lambda, t)`:
//! a log-spaced sweep of rays `x / t` covering the group-velocity range of
//! the band with two decades of slack, a uniform refinement around the
//! winner that resolves the carrier oscillation, and a golden-section
//! polish. [`decay_sweep`] runs a grid of such scans and
//! [`fit_decay_exponents`] regresses `log sup` on `(log lambda, log t)`,
//! reporting both exponents with two-standard-error confidence half-widths.
//!
//! Kernel evaluations inside a scan are independent; they run through
//! [`par::map_collect`], so the sweep parallelizes without changing results.

use std::f64::consts::PI;

use super::oscillatory::{kernel_1d, kernel_2d};
use super::strichartz::{band_orbit, delta_profile};
use crate::error::{Error, Result};
use crate::par;
use crate::spectral::grid::Grid;
use crate::spectral::bump::is_dyadic;
use crate::symbols::{log_grid, m_prime};
use crate::Complex;

/// Resolution knobs for [`sup_norm_scan_opts`]. The defaults locate the sup
/// to well below the percent level; doubling `rays` and `refine` is the
/// standard stability check.
#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    /// Log-spaced rays `x/t` in the coarse stage.
    pub rays: usize,
    /// Uniform points in the refinement window around the coarse winner.
    pub refine: usize,
    /// Golden-section iterations polishing the refined maximum.
    pub golden_iters: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { rays: 72, refine: 128, golden_iters: 40 }
    }
}

/// Result of one sup-norm scan: the largest kernel modulus found and where.
#[derive(Debug, Clone, Copy)]
pub struct SupScan {
    /// `sup_x |K_lambda(t, x)|` (1d) or `sup_r |K_lambda(t, r)|` (2d).
    pub sup: f64,
    /// Position (1d) / radius (2d) attaining the sup.
    pub argmax: f64,
    /// Kernel evaluations spent.
    pub evaluations: usize,
}

/// One measured point of a decay sweep.
#[derive(Debug, Clone, Copy)]
pub struct DecaySample {
    pub lam: f64,
    pub time: f64,
    pub sup: f64,
    pub argmax: f64,
}

/// The least-squares fit `log sup = log_amplitude + p log lambda + q log t`
/// over a sweep, with `p` the scale exponent and `q` the time exponent.
#[derive(Debug, Clone)]
pub struct DecayReport {
    pub samples: Vec<DecaySample>,
    /// Fitted `p`; the dispersive estimate predicts `3d/4`.
    pub scale_exponent: f64,
    /// Two-standard-error half-width on `p`.
    pub scale_exponent_ci: f64,
    /// Fitted `q`; the dispersive estimate predicts `-d/2`.
    pub time_exponent: f64,
    /// Two-standard-error half-width on `q`.
    pub time_exponent_ci: f64,
    pub log_amplitude: f64,
    /// Root-mean-square log residual of the fit.
    pub residual_rms: f64,
}

/// Measures `sup_x |K_lambda(t, x)|` with default resolution.
///
/// Requires the dispersed regime `t >= 10 / sqrt(lambda)`: earlier than that
/// the kernel has not left the origin and the power law is not in force.
pub fn sup_norm_scan(dim: usize, lam: f64, t: f64) -> Result<SupScan> {
    sup_norm_scan_opts(dim, lam, t, &ScanOptions::default())
}

/// [`sup_norm_scan`] with explicit resolution.
pub fn sup_norm_scan_opts(dim: usize, lam: f64, t: f64, opts: &ScanOptions) -> Result<SupScan> {
    if dim != 1 && dim != 2 {
        return Err(Error::domain(format!("dimension must be 1 or 2, got {dim}")));
    }
    if !t.is_finite() || !(lam >= 1.0) || t * lam.sqrt() < 10.0 * (1.0 - 1e-12) {
        return Err(Error::domain(format!(
            "scan wants the dispersed regime t >= 10 / sqrt(lam); got t = {t}, lam = {lam}"
        )));
    }
    if opts.rays < 8 || opts.refine < 16 {
        return Err(Error::domain(
            "scan wants at least 8 rays and 16 refinement points".to_string(),
        ));
    }

    let eval = |x: f64| -> Result<f64> {
        match dim {
            1 => Ok(kernel_1d(lam, t, x)?.abs()),
            _ => Ok(kernel_2d(lam, t, x)?.norm()),
        }
    };

    // Coarse stage: rays x/t across the group-velocity range of the band
    // with two decades of slack, three sub-carrier offsets per ray so no
    // sample can sit in a null of the fast oscillation. The origin is
    // included as a guard.
    let root = lam.sqrt();
    let rays = log_grid(0.05 / root, 20.0 / root, opts.rays);
    let offsets = [0.0, PI / (3.0 * lam), 2.0 * PI / (3.0 * lam)];
    let mut xs = vec![0.0];
    for &c in &rays {
        for &o in &offsets {
            xs.push(c * t + o);
        }
    }
    let coarse = eval_all(&xs, &eval)?;
    let (mut best_x, mut best) = arg_max(&xs, &coarse);

    // Refinement: uniform window around the winner, wide enough to hold
    // several carrier wavelengths, sampled far below the carrier scale.
    let w = (8.0 * PI / lam).max(0.06 * best_x);
    let n = opts.refine;
    let xs_fine: Vec<f64> = (0..=n)
        .map(|i| (best_x - w + 2.0 * w * i as f64 / n as f64).max(0.0))
        .collect();
    let fine = eval_all(&xs_fine, &eval)?;
    let (fine_x, fine_v) = arg_max(&xs_fine, &fine);
    if fine_v > best {
        best = fine_v;
        best_x = fine_x;
    }

    // Polish: golden-section inside one refinement step, which brackets a
    // single lobe of the oscillation.
    let h = 2.0 * w / n as f64;
    let (gx, gv, polish) = golden_max(&eval, (best_x - h).max(0.0), best_x + h, opts.golden_iters)?;
    if gv > best {
        best = gv;
        best_x = gx;
    }

    Ok(SupScan { sup: best, argmax: best_x, evaluations: xs.len() + xs_fine.len() + polish })
}

/// Runs [`sup_norm_scan`] over the grid `lams x scaled_times`, taking the
/// physical time as `t = scaled / sqrt(lam)` so every sample sits at the
/// same depth `t sqrt(lam)` into the dispersed regime.
pub fn decay_sweep(dim: usize, lams: &[f64], scaled_times: &[f64]) -> Result<Vec<DecaySample>> {
    if lams.is_empty() || scaled_times.is_empty() {
        return Err(Error::domain(
            "decay sweep wants nonempty lambda and time lists".to_string(),
        ));
    }
    let mut samples = Vec::with_capacity(lams.len() * scaled_times.len());
    for &lam in lams {
        for &scaled in scaled_times {
            let t = scaled / lam.sqrt();
            let scan = sup_norm_scan(dim, lam, t)?;
            samples.push(DecaySample { lam, time: t, sup: scan.sup, argmax: scan.argmax });
        }
    }
    Ok(samples)
}

/// Ordinary least squares of `log sup` on `(1, log lambda, log t)`.
///
/// Wants at least 4 distinct values of each regressor — fewer cannot
/// distinguish a power law from its own noise — and a full-rank design.
pub fn fit_decay_exponents(samples: &[DecaySample]) -> Result<DecayReport> {
    if distinct_count(samples, |s| s.lam) < 4 || distinct_count(samples, |s| s.time) < 4 {
        return Err(Error::Regression(
            "need at least 4 distinct lambda values and 4 distinct times".to_string(),
        ));
    }
    for s in samples {
        if !(s.sup > 0.0) || !s.sup.is_finite() || !(s.lam > 0.0) || !(s.time > 0.0) {
            return Err(Error::Regression(format!(
                "sample (lam {}, t {}, sup {}) is outside the log-log domain",
                s.lam, s.time, s.sup
            )));
        }
    }

    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for s in samples {
        let row = [1.0, s.lam.ln(), s.time.ln()];
        let y = s.sup.ln();
        for i in 0..3 {
            atb[i] += row[i] * y;
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let inv = invert3(&ata)
        .ok_or_else(|| Error::Regression("the (lambda, t) design is rank-deficient".to_string()))?;
    let mut coef = [0.0f64; 3];
    for i in 0..3 {
        for j in 0..3 {
            coef[i] += inv[i][j] * atb[j];
        }
    }

    let mut rss = 0.0;
    for s in samples {
        let fit = coef[0] + coef[1] * s.lam.ln() + coef[2] * s.time.ln();
        rss += (s.sup.ln() - fit).powi(2);
    }
    let n = samples.len() as f64;
    let sigma2 = rss / (n - 3.0).max(1.0);

    Ok(DecayReport {
        samples: samples.to_vec(),
        scale_exponent: coef[1],
        scale_exponent_ci: 2.0 * (sigma2 * inv[1][1]).sqrt(),
        time_exponent: coef[2],
        time_exponent_ci: 2.0 * (sigma2 * inv[2][2]).sqrt(),
        log_amplitude: coef[0],
        residual_rms: (rss / n).sqrt(),
    })
}

/// Torus geometry and wrap-around guard for [`free_wave_decay`].
#[derive(Debug, Clone, Copy)]
pub struct FreeWaveOptions {
    /// Half-length of the periodic box.
    pub half_length: f64,
    /// Points per axis (a power of two).
    pub points_per_axis: usize,
    /// Gaussian width of the initial profile; `None` means `1 / (8 lam)`.
    pub profile_width: Option<f64>,
    /// Width of the boundary guard strip, as a fraction of the half-length.
    pub boundary_fraction: f64,
    /// Largest fraction of the total `|u|` mass tolerated inside the strip
    /// before the box is declared too small.
    pub boundary_mass_tol: f64,
}

impl FreeWaveOptions {
    /// A box that holds the packet up to `t_max` with margin.
    ///
    /// The packet starts at the origin and its energy moves at group speeds
    /// at most `m'(lam/2)`, so the half-length is 1.35x the furthest
    /// excursion plus a fixed apron for the profile tails and the slow
    /// spreading of the front; the mode count resolves `2.75 lam` per axis,
    /// comfortably past the upper edge of the band at `2 lam`.
    pub fn suggested(dim: usize, lam: f64, t_max: f64) -> Result<FreeWaveOptions> {
        if dim != 1 && dim != 2 {
            return Err(Error::domain(format!("dimension must be 1 or 2, got {dim}")));
        }
        if !is_dyadic(lam) || lam < 2.0 {
            return Err(Error::domain(format!("band scale must be dyadic and >= 2, got {lam}")));
        }
        if !(t_max.is_finite() && t_max >= 0.0) {
            return Err(Error::domain(format!("horizon must be nonnegative, got {t_max}")));
        }
        let half_length = 1.35 * m_prime(0.5 * lam) * t_max + 8.0;
        let min_n = 2.0 * half_length * 2.75 * lam / PI;
        let points_per_axis = (min_n.ceil() as usize).max(4).next_power_of_two();
        let cap = if dim == 1 { 1 << 20 } else { 1 << 12 };
        if points_per_axis > cap {
            return Err(Error::grid(format!(
                "resolving lam = {lam} out to t = {t_max} needs {points_per_axis} points \
                 per axis; that is past the desk-scale cap of {cap}"
            )));
        }
        Ok(FreeWaveOptions {
            half_length,
            points_per_axis,
            profile_width: None,
            boundary_fraction: 0.02,
            boundary_mass_tol: 1e-3,
        })
    }
}

/// One time sample of the torus free wave.
#[derive(Debug, Clone, Copy)]
pub struct FreeWaveSample {
    pub time: f64,
    /// Grid sup of `|u(t)|`. The profile has unit `L^1` mass, so this is
    /// exactly the ratio the dispersive bound controls.
    pub linf: f64,
    /// Fraction of the total `|u|` mass inside the boundary strip.
    pub boundary_mass: f64,
}

/// Propagates the unit-mass band profile on a torus and records the sup of
/// `|u(t)|` at each requested time.
///
/// This is the grid-side mirror of [`sup_norm_scan`]: the wave is
/// `u(t) = K_lam(t) * f` with `f >= 0` of unit mass, so Young's inequality
/// pins every sample below the kernel sup at the same `(lam, t)`. Each time
/// is checked against wrap-around — if more than `boundary_mass_tol` of the
/// mass sits within `boundary_fraction` of the box edge the run fails rather
/// than silently folding the packet back onto itself.
pub fn free_wave_decay(
    dim: usize,
    lam: f64,
    times: &[f64],
    opts: &FreeWaveOptions,
) -> Result<Vec<FreeWaveSample>> {
    if times.is_empty() {
        return Err(Error::domain("free-wave check wants a nonempty time list".to_string()));
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::domain("free-wave times must be finite and nonnegative".to_string()));
    }
    if !(opts.boundary_fraction > 0.0 && opts.boundary_fraction < 1.0)
        || !(opts.boundary_mass_tol > 0.0)
    {
        return Err(Error::domain(
            "boundary guard wants fraction in (0, 1) and a positive mass tolerance".to_string(),
        ));
    }
    let grid = match dim {
        1 => Grid::new_1d(opts.half_length, opts.points_per_axis)?,
        2 => Grid::new_2d(opts.half_length, opts.points_per_axis)?,
        _ => return Err(Error::domain(format!("dimension must be 1 or 2, got {dim}"))),
    };
    let width = opts.profile_width.unwrap_or(1.0 / (8.0 * lam));
    let f = delta_profile(grid, width)?;

    let samples = par::map_collect(times, |&t| -> Result<FreeWaveSample> {
        let buf = band_orbit(&f, lam, t)?;
        let (linf, boundary_mass) = survey(grid, &buf, opts.boundary_fraction);
        if boundary_mass > opts.boundary_mass_tol {
            return Err(Error::grid(format!(
                "free wave reached the torus boundary at t = {t}: {:.2e} of the mass sits \
                 within {:.1}% of the edge (tolerance {:.1e}); enlarge the box",
                boundary_mass,
                100.0 * opts.boundary_fraction,
                opts.boundary_mass_tol
            )));
        }
        Ok(FreeWaveSample { time: t, linf, boundary_mass })
    });
    samples.into_iter().collect()
}

/// Sup of `|u|` and the fraction of its `L^1` mass inside the boundary strip.
fn survey(grid: Grid, buf: &[Complex], boundary_fraction: f64) -> (f64, f64) {
    let n = grid.points_per_axis();
    let edge = (1.0 - boundary_fraction) * grid.half_length();
    let mut linf = 0.0f64;
    let mut total = 0.0f64;
    let mut strip = 0.0f64;
    for (idx, c) in buf.iter().enumerate() {
        let a = c.norm();
        linf = linf.max(a);
        total += a;
        let near_edge = if grid.dim() == 1 {
            grid.x_coord(idx).abs() >= edge
        } else {
            grid.x_coord(idx / n).abs() >= edge || grid.x_coord(idx % n).abs() >= edge
        };
        if near_edge {
            strip += a;
        }
    }
    (linf, if total > 0.0 { strip / total } else { 0.0 })
}

fn distinct_count(samples: &[DecaySample], f: impl Fn(&DecaySample) -> f64) -> usize {
    let mut v: Vec<f64> = samples.iter().map(f).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
    v.len()
}

fn eval_all<F>(xs: &[f64], eval: &F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    par::map_collect(xs, |&x| eval(x)).into_iter().collect()
}

/// First index of the largest value — deterministic under reordering-free
/// collection, which [`par::map_collect`] guarantees.
fn arg_max(xs: &[f64], vals: &[f64]) -> (f64, f64) {
    let mut best = 0;
    for i in 1..vals.len() {
        if vals[i] > vals[best] {
            best = i;
        }
    }
    (xs[best], vals[best])
}

fn golden_max<F>(eval: &F, mut a: f64, mut b: f64, iters: usize) -> Result<(f64, f64, usize)>
where
    F: Fn(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    let mut count = 2;
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d)?;
        }
        count += 1;
    }
    Ok(if fc >= fd { (c, fc, count) } else { (d, fd, count) })
}

/// Cofactor inverse with a scale-aware singularity test.
fn invert3(a: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let cof = [
        [
            a[1][1] * a[2][2] - a[1][2] * a[2][1],
            a[1][2] * a[2][0] - a[1][0] * a[2][2],
            a[1][0] * a[2][1] - a[1][1] * a[2][0],
        ],
        [
            a[0][2] * a[2][1] - a[0][1] * a[2][2],
            a[0][0] * a[2][2] - a[0][2] * a[2][0],
            a[0][1] * a[2][0] - a[0][0] * a[2][1],
        ],
        [
            a[0][1] * a[1][2] - a[0][2] * a[1][1],
            a[0][2] * a[1][0] - a[0][0] * a[1][2],
            a[0][0] * a[1][1] - a[0][1] * a[1][0],
        ],
    ];
    let det = a[0][0] * cof[0][0] + a[0][1] * cof[0][1] + a[0][2] * cof[0][2];
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if det.abs() <= 1e-10 * scale.powi(3).max(f64::MIN_POSITIVE) {
        return None;
    }
    let mut inv = [[0.0; 3]; 3];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = cof[j][i] / det;
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::m_prime;
    use approx::assert_relative_eq;

    fn synthetic(amplitude: f64, p: f64, q: f64) -> Vec<DecaySample> {
        let mut out = Vec::new();
        for &lam in &[8.0f64, 16.0, 32.0, 64.0] {
            for &t in &[1.0f64, 2.0, 4.0, 8.0] {
                out.push(DecaySample {
                    lam,
                    time: t,
                    sup: amplitude * lam.powf(p) * t.powf(q),
                    argmax: 0.0,
                });
            }
        }
        out
    }

    #[test]
    fn fit_recovers_a_synthetic_power_law() {
        let report = fit_decay_exponents(&synthetic(2.7, 0.75, -0.5)).unwrap();
        assert_relative_eq!(report.scale_exponent, 0.75, max_relative = 1e-12);
        assert_relative_eq!(report.time_exponent, -0.5, max_relative = 1e-12);
        assert_relative_eq!(report.log_amplitude, 2.7f64.ln(), max_relative = 1e-12);
        assert!(report.residual_rms < 1e-13);
        assert!(report.scale_exponent_ci < 1e-12);
        assert!(report.time_exponent_ci < 1e-12);
    }

    #[test]
    fn fit_absorbs_multiplicative_noise() {
        let mut samples = synthetic(1.0, 1.5, -1.0);
        for (i, s) in samples.iter_mut().enumerate() {
            s.sup *= if i % 2 == 0 { 1.03 } else { 0.97 };
        }
        let report = fit_decay_exponents(&samples).unwrap();
        assert!((report.scale_exponent - 1.5).abs() < 0.05);
        assert!((report.time_exponent + 1.0).abs() < 0.05);
        assert!(report.scale_exponent_ci > 0.0 && report.scale_exponent_ci < 0.1);
        assert!(report.residual_rms > 1e-3);
    }

    #[test]
    fn fit_rejects_thin_or_degenerate_designs() {
        // only three distinct lambdas
        let thin: Vec<DecaySample> = synthetic(1.0, 0.75, -0.5)
            .into_iter()
            .filter(|s| s.lam < 64.0)
            .collect();
        assert!(matches!(fit_decay_exponents(&thin), Err(Error::Regression(_))));

        // t locked to a power of lambda: distinct counts pass, rank fails
        let collinear: Vec<DecaySample> = [1.0f64, 2.0, 4.0, 8.0]
            .iter()
            .map(|&lam| DecaySample { lam, time: lam * lam, sup: lam, argmax: 0.0 })
            .collect();
        assert!(matches!(fit_decay_exponents(&collinear), Err(Error::Regression(_))));

        // a nonpositive sup cannot enter the log-log fit
        let mut bad = synthetic(1.0, 0.75, -0.5);
        bad[5].sup = 0.0;
        assert!(matches!(fit_decay_exponents(&bad), Err(Error::Regression(_))));
    }

    #[test]
    fn scan_finds_the_peak_on_the_group_velocity_ray() {
        let lam = 8.0f64;
        let t = 20.0 / lam.sqrt();
        let scan = sup_norm_scan(1, lam, t).unwrap();
        // the argmax must travel at a group velocity the band contains
        let ray = scan.argmax / t;
        assert!(
            ray > 0.7 * m_prime(2.0 * lam) && ray < 1.3 * m_prime(0.5 * lam),
            "argmax ray {ray} outside the group-velocity band"
        );
        // the sup dominates the single on-ray sample
        let on_ray = kernel_1d(lam, t, t * m_prime(lam)).unwrap().abs();
        assert!(scan.sup >= on_ray);
        // and sits at the predicted magnitude lam^{3/4} t^{-1/2}
        let normalized = scan.sup * t.sqrt() / lam.powf(0.75);
        assert!(
            normalized > 0.2 && normalized < 3.0,
            "normalized sup {normalized} far from the dispersive scale"
        );
    }

    #[test]
    fn doubling_scan_density_barely_moves_the_sup() {
        let lam = 8.0f64;
        let t = 20.0 / lam.sqrt();
        let base = sup_norm_scan(1, lam, t).unwrap();
        let dense = sup_norm_scan_opts(
            1,
            lam,
            t,
            &ScanOptions { rays: 144, refine: 256, golden_iters: 40 },
        )
        .unwrap();
        assert!(
            (base.sup - dense.sup).abs() <= 0.01 * dense.sup,
            "sup moved from {} to {} under density doubling",
            base.sup,
            dense.sup
        );
    }

    #[test]
    fn two_dimensional_scan_sits_at_the_dispersive_scale() {
        // At t*sqrt(lam) = 10 the peak still sits on the focal spike at the
        // origin (planar modes arriving in phase from the full circle); by 20
        // the expanding group-velocity annulus has taken over.
        let lam = 4.0f64;
        let t = 20.0 / lam.sqrt();
        let scan = sup_norm_scan(2, lam, t).unwrap();
        let ray = scan.argmax / t;
        assert!(
            ray > 0.7 * m_prime(2.0 * lam) && ray < 1.3 * m_prime(0.5 * lam),
            "argmax ray {ray} outside the group-velocity band"
        );
        let normalized = scan.sup * t / lam.powf(1.5);
        assert!(
            normalized > 0.2 && normalized < 3.0,
            "normalized sup {normalized} far from the dispersive scale"
        );
    }

    #[test]
    fn sweep_covers_the_grid_in_order() {
        let samples = decay_sweep(1, &[8.0, 16.0], &[10.0, 20.0]).unwrap();
        assert_eq!(samples.len(), 4);
        assert_eq!(samples[0].lam, 8.0);
        assert_eq!(samples[3].lam, 16.0);
        assert_relative_eq!(samples[1].time, 20.0 / 8.0f64.sqrt(), max_relative = 1e-15);
        for s in &samples {
            assert!(s.sup > 0.0 && s.argmax > 0.0);
        }
    }

    #[test]
    fn scan_rejects_bad_inputs() {
        assert!(sup_norm_scan(3, 8.0, 10.0).is_err(), "dimension");
        assert!(sup_norm_scan(1, 8.0, 9.0 / 8.0f64.sqrt()).is_err(), "regime");
        assert!(
            sup_norm_scan_opts(1, 8.0, 10.0, &ScanOptions { rays: 4, refine: 128, golden_iters: 8 })
                .is_err(),
            "degenerate options"
        );
        assert!(decay_sweep(1, &[], &[10.0]).is_err(), "empty sweep");
    }

    #[test]
    fn free_wave_sup_sits_under_the_kernel_sup() {
        // Young's inequality with a unit-mass datum: the torus sup can reach
        // but never exceed the kernel sup (1% slack for periodization and the
        // finite scan).
        let lam = 8.0f64;
        let t = 20.0 / lam.sqrt();
        let opts = FreeWaveOptions::suggested(1, lam, t).unwrap();
        let samples = free_wave_decay(1, lam, &[0.0, t], &opts).unwrap();
        assert!(samples[0].linf <= 0.25 * lam, "t = 0 sample above the zero-time kernel bound");
        assert!(samples[0].linf >= 0.1 * lam, "t = 0 sample too small for a delta-like datum");
        let scan = sup_norm_scan(1, lam, t).unwrap();
        assert!(
            samples[1].linf <= scan.sup * 1.01,
            "torus sup {} above kernel sup {}",
            samples[1].linf,
            scan.sup
        );
        assert!(
            samples[1].linf >= 0.5 * scan.sup,
            "torus sup {} says the narrow profile no longer saturates the kernel sup {}",
            samples[1].linf,
            scan.sup
        );
    }

    #[test]
    fn free_wave_decays_at_the_kernel_rate() {
        // Same scaled times as the kernel sweeps: deep enough into the
        // dispersed regime that the t^{-1/2} law is actually in force.
        let lam = 32.0f64;
        let times: Vec<f64> = [80.0, 160.0, 320.0, 640.0]
            .iter()
            .map(|c| c / lam.sqrt())
            .collect();
        let opts = FreeWaveOptions::suggested(1, lam, *times.last().unwrap()).unwrap();
        let samples = free_wave_decay(1, lam, &times, &opts).unwrap();
        // slope of log linf on log t
        let n = samples.len() as f64;
        let mx = samples.iter().map(|s| s.time.ln()).sum::<f64>() / n;
        let my = samples.iter().map(|s| s.linf.ln()).sum::<f64>() / n;
        let sxx: f64 = samples.iter().map(|s| (s.time.ln() - mx).powi(2)).sum();
        let sxy: f64 = samples.iter().map(|s| (s.time.ln() - mx) * (s.linf.ln() - my)).sum();
        let slope = sxy / sxx;
        assert!(
            (slope + 0.5).abs() < 0.07,
            "free-wave decay slope {slope} off the -1/2 law"
        );
    }

    #[test]
    fn free_wave_wraparound_is_caught() {
        let lam = 8.0f64;
        let opts = FreeWaveOptions {
            half_length: 4.0,
            points_per_axis: 64,
            profile_width: None,
            boundary_fraction: 0.02,
            boundary_mass_tol: 1e-3,
        };
        // Short time: packet still well inside the box.
        assert!(free_wave_decay(1, lam, &[2.0], &opts).is_ok());
        // By t = 16 the packet front has moved m'(4) * 16 ~ 4.0, the full
        // half-length, and the guard must fire.
        let err = free_wave_decay(1, lam, &[16.0], &opts).unwrap_err();
        assert!(matches!(err, Error::Grid(_)), "{err}");
        assert!(err.to_string().contains("boundary"), "{err}");
    }

    #[test]
    fn two_dimensional_free_wave_tracks_the_kernel() {
        let lam = 4.0f64;
        let t = 20.0 / lam.sqrt();
        let opts = FreeWaveOptions::suggested(2, lam, t).unwrap();
        let samples = free_wave_decay(2, lam, &[0.5 * t, t], &opts).unwrap();
        assert!(samples[0].linf > samples[1].linf, "no decay between t/2 and t");
        let scan = sup_norm_scan(2, lam, t).unwrap();
        assert!(
            samples[1].linf <= scan.sup * 1.01,
            "torus sup {} above kernel sup {}",
            samples[1].linf,
            scan.sup
        );
        assert!(samples[1].linf >= 0.3 * scan.sup);
    }
}
