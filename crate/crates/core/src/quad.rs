//! Adaptive Gauss–Kronrod quadrature for the oscillatory-integral kernels.
//!
//! A 15-point Kronrod rule (embedding the 7-point Gauss rule) is applied on
//! a worklist of subintervals; the interval with the largest error estimate
//! is bisected until the summed estimate meets the requested absolute
//! tolerance. The caller may seed the initial subdivision — the dispersion
//! module seeds at the stationary point of the phase and one
//! stationary-window radius to either side, which is exactly where the
//! integrand stops being predictably oscillatory.
//!
//! Integrands are complex-valued (`f64 -> Complex`); real integrands simply
//! leave the imaginary part at zero. Selection of the worst interval scans
//! the worklist linearly, so the subdivision sequence — and therefore the
//! result, bit for bit — is deterministic.

use crate::error::{Error, Result};
use crate::Complex;

/// Kronrod abscissae on [-1, 1] (positive half; the rule is symmetric).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

/// Weights of the embedded 7-point Gauss rule (odd Kronrod abscissae).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_95,
    0.417_959_183_673_469_4,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex,
    /// Summed per-interval error estimate (absolute).
    pub abs_error: f64,
    /// Number of integrand evaluations spent.
    pub evaluations: usize,
}

/// One 15-point Kronrod application on [a, b].
///
/// Returns (kronrod value, error estimate, integral of |f|). The error
/// estimate follows the QUADPACK rescaling: the raw Gauss/Kronrod difference
/// is sharpened by `(200 d / resasc)^{3/2}` when that is favourable.
fn gk15<F: Fn(f64) -> Complex>(f: &F, a: f64, b: f64) -> (Complex, f64, f64) {
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);

    let f_center = f(center);
    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];
    let mut resabs = f_center.norm() * WGK[7];

    let mut values = [Complex::new(0.0, 0.0); 14];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        values[2 * j] = f1;
        values[2 * j + 1] = f2;
        kronrod += (f1 + f2) * WGK[j];
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            // Odd Kronrod abscissae carry the embedded Gauss rule.
            gauss += (f1 + f2) * WG[j / 2];
        }
    }

    // Deviation of |f| from its mean, for the error rescaling.
    let mean = kronrod * 0.5;
    let mut resasc = (f_center - mean).norm() * WGK[7];
    for j in 0..7 {
        resasc += ((values[2 * j] - mean).norm() + (values[2 * j + 1] - mean).norm()) * WGK[j];
    }
    resasc *= half.abs();

    let value = kronrod * half;
    let mut err = ((kronrod - gauss) * half).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let round = f64::EPSILON * 50.0 * resabs * half.abs();
    (value, err.max(round), resabs * half.abs())
}

struct Interval {
    a: f64,
    b: f64,
    value: Complex,
    error: f64,
}

/// Adaptively integrate `f` over [a, b] to absolute tolerance `abs_tol`.
///
/// `seeds` lists interior points at which the initial partition is cut
/// (points outside (a, b) are ignored). `max_intervals` bounds the worklist;
/// exhausting it yields an accuracy error carrying the achieved estimate.
pub fn adaptive<F: Fn(f64) -> Complex>(
    f: F,
    a: f64,
    b: f64,
    seeds: &[f64],
    abs_tol: f64,
    max_intervals: usize,
) -> Result<QuadResult> {
    assert!(b > a, "adaptive quadrature wants b > a");
    assert!(abs_tol > 0.0, "adaptive quadrature wants a positive tolerance");

    let mut cuts: Vec<f64> = seeds.iter().copied().filter(|&s| s > a && s < b).collect();
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    cuts.dedup();
    cuts.insert(0, a);
    cuts.push(b);

    let mut evaluations = 0usize;
    let mut work: Vec<Interval> = Vec::with_capacity(max_intervals);
    for w in cuts.windows(2) {
        let (v, e, _) = gk15(&f, w[0], w[1]);
        evaluations += 15;
        work.push(Interval { a: w[0], b: w[1], value: v, error: e });
    }

    loop {
        let total_err: f64 = work.iter().map(|i| i.error).sum();
        if total_err <= abs_tol {
            let value = work.iter().map(|i| i.value).sum();
            return Ok(QuadResult { value, abs_error: total_err, evaluations });
        }
        if work.len() >= max_intervals {
            return Err(Error::Accuracy { requested: abs_tol, achieved: total_err });
        }
        // Deterministic worst-first: linear scan, first index wins ties.
        let worst = work
            .iter()
            .enumerate()
            .max_by(|(i, p), (j, q)| {
                p.error.partial_cmp(&q.error).unwrap().then(j.cmp(i))
            })
            .map(|(i, _)| i)
            .unwrap();
        let Interval { a: wa, b: wb, .. } = work[worst];
        let mid = 0.5 * (wa + wb);
        if mid <= wa || mid >= wb {
            // Interval at floating-point resolution; cannot refine further.
            return Err(Error::Accuracy { requested: abs_tol, achieved: total_err });
        }
        let (v1, e1, _) = gk15(&f, wa, mid);
        let (v2, e2, _) = gk15(&f, mid, wb);
        evaluations += 30;
        work[worst] = Interval { a: wa, b: mid, value: v1, error: e1 };
        work.push(Interval { a: mid, b: wb, value: v2, error: e2 });
    }
}

/// Convenience wrapper for real integrands.
pub fn adaptive_real<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    seeds: &[f64],
    abs_tol: f64,
    max_intervals: usize,
) -> Result<(f64, f64)> {
    let r = adaptive(|x| Complex::new(f(x), 0.0), a, b, seeds, abs_tol, max_intervals)?;
    Ok((r.value.re, r.abs_error))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact_in_one_panel() {
        // Kronrod-15 integrates degree <= 22 exactly.
        let (v, e) = adaptive_real(|x| x * x, 0.0, 1.0, &[], 1e-12, 8).unwrap();
        assert_relative_eq!(v, 1.0 / 3.0, max_relative = 1e-15);
        assert!(e < 1e-12);
    }

    #[test]
    fn sine_arch() {
        let (v, _) = adaptive_real(f64::sin, 0.0, std::f64::consts::PI, &[], 1e-13, 64).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-13);
    }

    #[test]
    fn oscillatory_cosine() {
        let (v, _) = adaptive_real(|x| (50.0 * x).cos(), 0.0, 1.0, &[], 1e-12, 256).unwrap();
        assert_relative_eq!(v, 50f64.sin() / 50.0, epsilon = 1e-12);
    }

    #[test]
    fn complex_exponential_matches_closed_form() {
        let omega = 37.5;
        let r = adaptive(|x| Complex::new(0.0, omega * x).exp(), 0.0, 1.0, &[0.3, 0.7], 1e-12, 256)
            .unwrap();
        let expected = (Complex::new(0.0, omega).exp() - 1.0) / Complex::new(0.0, omega);
        assert!((r.value - expected).norm() < 1e-12, "off by {:e}", (r.value - expected).norm());
    }

    #[test]
    fn endpoint_singularity_needs_subdivision() {
        let (v, _) = adaptive_real(|x| x.sqrt(), 0.0, 1.0, &[], 1e-10, 512).unwrap();
        assert_relative_eq!(v, 2.0 / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn budget_exhaustion_reports_achieved_error() {
        let res = adaptive_real(|x| (4000.0 * x).cos(), 0.0, 1.0, &[], 1e-14, 4);
        match res {
            Err(Error::Accuracy { requested, achieved }) => {
                assert_eq!(requested, 1e-14);
                assert!(achieved > 1e-14);
            }
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }

    #[test]
    fn seeds_do_not_change_the_answer() {
        let f = |x: f64| (x * x - 0.3 * x).exp();
        let (plain, _) = adaptive_real(f, 0.0, 2.0, &[], 1e-12, 128).unwrap();
        let (seeded, _) = adaptive_real(f, 0.0, 2.0, &[0.1, 1.7, 5.0, -3.0], 1e-12, 128).unwrap();
        assert_relative_eq!(plain, seeded, max_relative = 1e-12);
    }
}
