//! The concrete Littlewood–Paley cutoff.
//!
//! `chi` is the standard exp-glued bump: even, identically 1 on `[-1, 1]`,
//! identically 0 outside `(-2, 2)`, and C-infinity by construction via
//! `g(t) = exp(-1/t)` for `t > 0`. The annulus bump is the difference
//! `beta(s) = chi(s) - chi(2s)`, supported in `1/2 <= |s| <= 2`, and the
//! family `beta(|xi| / lambda)` over dyadic `lambda` tiles frequency space:
//! `chi(|xi|) + sum_lambda beta(|xi|/lambda) = 1`.

/// `exp(-1/t)` glued to zero at `t <= 0`.
fn g(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth even cutoff: 1 on `|s| <= 1`, 0 on `|s| >= 2`.
pub fn chi(s: f64) -> f64 {
    let a = s.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        let up = g(2.0 - a);
        up / (up + g(a - 1.0))
    }
}

/// Annulus bump `beta(s) = chi(s) - chi(2s)`, supported in `1/2 <= |s| <= 2`.
pub fn beta(s: f64) -> f64 {
    chi(s) - chi(2.0 * s)
}

/// True when `lam` is an exact dyadic level `1, 2, 4, ...`.
pub fn is_dyadic(lam: f64) -> bool {
    lam >= 1.0 && lam.is_finite() && lam.log2().fract() == 0.0
}

/// `integral of beta over [1/2, 2]` by composite Simpson; the beta mass that
/// normalizes the trivial kernel bound.
pub fn beta_mass() -> f64 {
    // beta is smooth and vanishes to all orders at both endpoints, so a
    // fixed fine Simpson rule reaches full precision.
    let (a, b) = (0.5, 2.0);
    let n = 4096;
    let h = (b - a) / n as f64;
    let mut s = beta(a) + beta(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * beta(a + i as f64 * h);
    }
    s * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn chi_plateau_and_support() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(1.0), 1.0);
        assert_eq!(chi(-0.7), 1.0);
        assert_eq!(chi(2.0), 0.0);
        assert_eq!(chi(-5.0), 0.0);
        for &s in &[1.1, 1.5, 1.9] {
            let v = chi(s);
            assert!(v > 0.0 && v < 1.0);
            assert_eq!(v, chi(-s), "chi must be even");
        }
    }

    #[test]
    fn chi_transition_is_monotone() {
        let mut prev = 1.0;
        for i in 0..=100 {
            let v = chi(1.0 + i as f64 / 100.0);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn beta_support_and_partition() {
        assert_eq!(beta(0.4), 0.0);
        assert_eq!(beta(0.5), 0.0);
        assert_eq!(beta(2.0), 0.0);
        assert_eq!(beta(1.0), 1.0, "chi(1)=1, chi(2)=0");
        // Telescoping partition of unity at arbitrary points.
        for &x in &[0.05f64, 0.9, 1.3, 2.2, 5.7, 31.2, 100.0] {
            let mut sum = chi(x);
            let mut lam = 2.0;
            while lam <= 4.0 * x.max(1.0) {
                sum += beta(x / lam);
                lam *= 2.0;
            }
            assert_relative_eq!(sum, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn dyadic_detection() {
        for lam in [1.0, 2.0, 4.0, 1024.0] {
            assert!(is_dyadic(lam));
        }
        for lam in [0.5, 3.0, 2.5, -2.0, f64::NAN, f64::INFINITY] {
            assert!(!is_dyadic(lam));
        }
    }

    #[test]
    fn beta_mass_is_stable() {
        // Frozen from the Simpson evaluation; the value is bump-specific.
        let m = beta_mass();
        assert!(m > 0.5 && m < 1.5, "beta mass {m} outside sanity window");
        // Doubling the resolution must not move it.
        let fine = {
            let (a, b) = (0.5, 2.0);
            let n = 8192;
            let h = (b - a) / n as f64;
            let mut s = beta(a) + beta(b);
            for i in 1..n {
                s += if i % 2 == 1 { 4.0 } else { 2.0 } * beta(a + i as f64 * h);
            }
            s * h / 3.0
        };
        assert_relative_eq!(m, fine, max_relative = 1e-12);
    }
}
