//! Exponential time differencing, fourth order (the Cox–Matthews scheme).
//!
//! The linear part of the diagonal system is a pure phase rotation
//! `e^{-+ i m t}` per mode, which the scheme applies exactly; only the
//! quadratic term is approximated, with classical fourth-order accuracy in
//! the step size. That makes the method stiff-proof here: the largest `m`
//! on the grid constrains accuracy, not stability.
//!
//! All per-mode coefficient tables are precomputed for the plus channel
//! (`z = -i m h`); the minus channel (`z = +i m h`) uses their conjugates,
//! since every table entry is an analytic function of `z` with real Taylor
//! coefficients.

use super::conserved::ConservedQuantities;
use super::diag::{diagonalize, undiagonalize, DiagonalState};
use super::nonlinear::nonlinear_rhs;
use crate::error::{Error, Result};
use crate::spectral::{FieldPair, Grid, MultiplierTable};
use crate::Complex;

/// `phi_k(z) = (e^z - sum_{j<k} z^j/j!) / z^k`, the exponential-integrator
/// coefficient functions for `k = 1, 2, 3`.
pub(crate) fn phi(k: u32, z: Complex) -> Complex {
    if z.norm() < 0.5 {
        phi_series(k, z)
    } else {
        phi_direct(k, z)
    }
}

/// Taylor series `sum_j z^j / (j + k)!`; used near the origin where the
/// direct formula divides small differences by small powers.
fn phi_series(k: u32, z: Complex) -> Complex {
    let mut factorial = 1.0;
    for j in 2..=k {
        factorial *= j as f64;
    }
    let mut term = Complex::new(1.0 / factorial, 0.0);
    let mut sum = term;
    for j in 1..40 {
        term = term * z / (j + k) as f64;
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

/// Direct evaluation via the defining recursion; fine away from the origin.
fn phi_direct(k: u32, z: Complex) -> Complex {
    let phi1 = (z.exp() - 1.0) / z;
    if k == 1 {
        return phi1;
    }
    let phi2 = (phi1 - 1.0) / z;
    if k == 2 {
        return phi2;
    }
    (phi2 - 0.5) / z
}

/// One configured stepper: grid, multipliers, and per-mode tables for a
/// fixed step size.
pub struct Etdrk4 {
    mult: MultiplierTable,
    dt: f64,
    linear_only: bool,
    e_full: Vec<Complex>,
    e_half: Vec<Complex>,
    /// `(h/2) phi_1(z/2)`: the stage propagator weight.
    a_half: Vec<Complex>,
    /// `h (phi_1 - 3 phi_2 + 4 phi_3)`: weight of the initial slope.
    w_n: Vec<Complex>,
    /// `2 h (phi_2 - 2 phi_3)`: weight of the two midpoint slopes.
    w_ab: Vec<Complex>,
    /// `h (4 phi_3 - phi_2)`: weight of the endpoint slope.
    w_c: Vec<Complex>,
}

impl Etdrk4 {
    pub fn new(grid: Grid, dt: f64, linear_only: bool) -> Result<Etdrk4> {
        Etdrk4::with_table(MultiplierTable::new(grid), dt, linear_only)
    }

    pub fn with_table(mult: MultiplierTable, dt: f64, linear_only: bool) -> Result<Etdrk4> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::domain(format!("step size must be positive, got {dt}")));
        }
        let len = mult.grid().len();
        let mut e_full = Vec::with_capacity(len);
        let mut e_half = Vec::with_capacity(len);
        let mut a_half = Vec::with_capacity(len);
        let mut w_n = Vec::with_capacity(len);
        let mut w_ab = Vec::with_capacity(len);
        let mut w_c = Vec::with_capacity(len);
        for idx in 0..len {
            let z = Complex::new(0.0, -mult.m[idx] * dt);
            // The exact propagator has unit modulus; renormalize so that
            // long runs do not pick up a linear-in-steps amplitude bias.
            let unit = |c: Complex| c / c.norm();
            e_full.push(unit(z.exp()));
            e_half.push(unit((z / 2.0).exp()));
            a_half.push(0.5 * dt * phi(1, z / 2.0));
            let (p1, p2, p3) = (phi(1, z), phi(2, z), phi(3, z));
            w_n.push(dt * (p1 - 3.0 * p2 + 4.0 * p3));
            w_ab.push(2.0 * dt * (p2 - 2.0 * p3));
            w_c.push(dt * (4.0 * p3 - p2));
        }
        Ok(Etdrk4 { mult, dt, linear_only, e_full, e_half, a_half, w_n, w_ab, w_c })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> Grid {
        self.mult.grid()
    }

    pub fn multipliers(&self) -> &MultiplierTable {
        &self.mult
    }

    /// Advance the state by one step. `time` is the state's current time,
    /// used only for error reporting.
    pub fn step(&self, state: &mut DiagonalState, time: f64) -> Result<()> {
        let len = self.grid().len();
        if self.linear_only {
            for idx in 0..len {
                state.plus[idx] *= self.e_full[idx];
                state.minus[idx] *= self.e_full[idx].conj();
            }
            return Ok(());
        }

        let n1 = nonlinear_rhs(state, &self.mult);
        let mut a = DiagonalState::zero(state.grid());
        for idx in 0..len {
            a.plus[idx] = self.e_half[idx] * state.plus[idx] + self.a_half[idx] * n1.0[idx];
            a.minus[idx] = self.e_half[idx].conj() * state.minus[idx]
                + self.a_half[idx].conj() * n1.1[idx];
        }
        let n2 = nonlinear_rhs(&a, &self.mult);
        let mut b = DiagonalState::zero(state.grid());
        for idx in 0..len {
            b.plus[idx] = self.e_half[idx] * state.plus[idx] + self.a_half[idx] * n2.0[idx];
            b.minus[idx] = self.e_half[idx].conj() * state.minus[idx]
                + self.a_half[idx].conj() * n2.1[idx];
        }
        let n3 = nonlinear_rhs(&b, &self.mult);
        // Third stage propagates the first stage, not the base point.
        let mut c = DiagonalState::zero(state.grid());
        for idx in 0..len {
            c.plus[idx] = self.e_half[idx] * a.plus[idx]
                + self.a_half[idx] * (2.0 * n3.0[idx] - n1.0[idx]);
            c.minus[idx] = self.e_half[idx].conj() * a.minus[idx]
                + self.a_half[idx].conj() * (2.0 * n3.1[idx] - n1.1[idx]);
        }
        let n4 = nonlinear_rhs(&c, &self.mult);
        for idx in 0..len {
            state.plus[idx] = self.e_full[idx] * state.plus[idx]
                + self.w_n[idx] * n1.0[idx]
                + self.w_ab[idx] * (n2.0[idx] + n3.0[idx])
                + self.w_c[idx] * n4.0[idx];
            state.minus[idx] = self.e_full[idx].conj() * state.minus[idx]
                + self.w_n[idx].conj() * n1.1[idx]
                + self.w_ab[idx].conj() * (n2.1[idx] + n3.1[idx])
                + self.w_c[idx].conj() * n4.1[idx];
        }

        let peak = state.max_abs();
        if !peak.is_finite() || peak > 1e10 {
            return Err(Error::Instability {
                time,
                message: format!("coefficient magnitude reached {peak:.3e}"),
            });
        }
        Ok(())
    }
}

/// Knobs for [`evolve`]. `dt: None` picks `0.5 / max |m|`, half a radian of
/// linear phase on the fastest mode, which puts the integrator well inside
/// its fourth-order asymptotic range for the amplitudes used here.
#[derive(Debug, Clone)]
pub struct EvolveOptions {
    pub dt: Option<f64>,
    /// Drop the quadratic term; the step is then the exact free flow.
    pub linear_only: bool,
    /// Number of measurement rows, endpoints included; at least 2.
    pub samples: usize,
    /// Sobolev index of the energy norm recorded per sample.
    pub energy_index: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions { dt: None, linear_only: false, samples: 11, energy_index: 1.0 }
    }
}

/// One measurement row along a trajectory.
#[derive(Debug, Clone)]
pub struct TrajectorySample {
    pub time: f64,
    /// Energy-space norm of the state at this time.
    pub energy_norm: f64,
    pub conserved: ConservedQuantities,
}

/// Result of [`evolve`]: the rows, the reconstructed final state, and the
/// step size actually used.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub final_state: FieldPair,
    pub dt: f64,
    pub steps: usize,
}

impl Trajectory {
    /// Largest invariant drift across all rows, relative to the first.
    pub fn max_conserved_drift(&self) -> f64 {
        let first = &self.samples[0].conserved;
        self.samples
            .iter()
            .map(|s| s.conserved.max_drift(first))
            .fold(0.0, f64::max)
    }

    /// Largest energy norm across all rows.
    pub fn max_energy_norm(&self) -> f64 {
        self.samples.iter().map(|s| s.energy_norm).fold(0.0, f64::max)
    }
}

/// Integrate the system from `initial` to time `t_final`, recording
/// invariants and the energy norm along the way.
///
/// The initial pair is projected onto the 2/3 band first; the discrete flow
/// lives there. In 2d the velocity should be curl-free with zero mean, the
/// class the flow preserves; anything else is silently projected by the
/// diagonalization, and the `t = 0` row reports the projected data.
pub fn evolve(initial: &FieldPair, t_final: f64, opts: &EvolveOptions) -> Result<Trajectory> {
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(Error::domain(format!("final time must be positive, got {t_final}")));
    }
    if opts.samples < 2 {
        return Err(Error::domain("need at least 2 samples (both endpoints)"));
    }
    let grid = initial.grid();
    let mult = MultiplierTable::new(grid);
    let dt_target = match opts.dt {
        Some(dt) if dt.is_finite() && dt > 0.0 => dt,
        Some(dt) => return Err(Error::domain(format!("step size must be positive, got {dt}"))),
        None => 0.5 / mult.max_abs_m(),
    };
    let steps = (t_final / dt_target).ceil().max(1.0) as usize;
    let dt = t_final / steps as f64;
    let stepper = Etdrk4::with_table(mult, dt, opts.linear_only)?;

    let mut state = diagonalize(initial);
    state.dealias_in_place();

    let mut record_at: Vec<usize> = (0..opts.samples)
        .map(|j| (j as f64 / (opts.samples - 1) as f64 * steps as f64).round() as usize)
        .collect();
    record_at.dedup();

    let measure = |state: &DiagonalState, time: f64| -> Result<(TrajectorySample, FieldPair)> {
        let (pair, _residue) = undiagonalize(state)?;
        let sample = TrajectorySample {
            time,
            energy_norm: state.xs_norm(opts.energy_index),
            conserved: ConservedQuantities::measure(&pair),
        };
        Ok((sample, pair))
    };

    let (first, mut last_pair) = measure(&state, 0.0)?;
    let mut samples = vec![first];
    for step_index in 1..=steps {
        stepper.step(&mut state, (step_index - 1) as f64 * dt)?;
        if record_at.contains(&step_index) {
            let (sample, pair) = measure(&state, step_index as f64 * dt)?;
            samples.push(sample);
            last_pair = pair;
        }
    }
    Ok(Trajectory { samples, final_state: last_pair, dt, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::diag::linear_propagate;
    use crate::spectral::{random_band_limited, riesz, RealField};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn phi_branches_agree_at_the_switchover() {
        // Evaluate both branches at the same points on the |z| = 0.5 ring.
        for k in 1..=3 {
            for j in 0..16 {
                let theta = j as f64 / 16.0 * std::f64::consts::TAU;
                let z = 0.5 * Complex::new(theta.cos(), theta.sin());
                let a = phi_series(k, z);
                let b = phi_direct(k, z);
                assert!((a - b).norm() < 5e-14 * a.norm(), "phi_{k} at {z}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn phi_reference_values_at_one() {
        let one = Complex::new(1.0, 0.0);
        let e = 1.0f64.exp();
        assert_relative_eq!(phi(1, one).re, e - 1.0, max_relative = 1e-14);
        assert_relative_eq!(phi(2, one).re, e - 2.0, max_relative = 1e-13);
        assert_relative_eq!(phi(3, one).re, e - 2.5, max_relative = 1e-12);
    }

    fn small_pair_1d(grid: Grid, amp: f64) -> FieldPair {
        let eta = random_band_limited(grid, 31, 12, amp).unwrap();
        let v = random_band_limited(grid, 32, 12, amp).unwrap();
        FieldPair::new_1d(eta, v).unwrap()
    }

    #[test]
    fn linear_step_is_the_exact_rotation() {
        let grid = Grid::new_1d(PI, 64).unwrap();
        let pair = small_pair_1d(grid, 0.5);
        let mut state = diagonalize(&pair);
        let stepper = Etdrk4::new(grid, 0.37, true).unwrap();
        let want = linear_propagate(&state, &stepper.multipliers().m, 0.37);
        stepper.step(&mut state, 0.0).unwrap();
        for idx in 0..grid.len() {
            assert!((state.plus[idx] - want.plus[idx]).norm() < 1e-14);
            assert!((state.minus[idx] - want.minus[idx]).norm() < 1e-14);
        }
    }

    #[test]
    fn steps_converge_at_fourth_order() {
        let grid = Grid::new_1d(PI, 64).unwrap();
        let pair = small_pair_1d(grid, 0.2);
        let t = 0.5;
        let run = |dt: f64| {
            let opts =
                EvolveOptions { dt: Some(dt), samples: 2, ..EvolveOptions::default() };
            diagonalize(&evolve(&pair, t, &opts).unwrap().final_state)
        };
        let reference = run(t / 512.0);
        let coarse = run(t / 16.0).l2_distance(&reference);
        let fine = run(t / 32.0).l2_distance(&reference);
        let order = (coarse / fine).log2();
        assert!(
            (3.7..4.3).contains(&order),
            "observed order {order} (errors {coarse:.3e} / {fine:.3e})"
        );
    }

    #[test]
    fn invariant_drift_is_integrator_error() {
        // The truncated system conserves H and I exactly, so the measured
        // drift must both be small and shrink at the integrator's order
        // when the step is refined.
        let grid = Grid::new_1d(PI, 128).unwrap();
        let pair = small_pair_1d(grid, 0.05);
        let run = |dt: f64| {
            let opts =
                EvolveOptions { dt: Some(dt), samples: 5, ..EvolveOptions::default() };
            evolve(&pair, 2.0, &opts).unwrap()
        };
        let coarse = run(1.0 / 16.0);
        let fine = run(1.0 / 32.0);
        assert!(
            coarse.max_conserved_drift() < 2e-9,
            "drift {:.3e}",
            coarse.max_conserved_drift()
        );
        let ratio = coarse.max_conserved_drift() / fine.max_conserved_drift();
        assert!(ratio > 6.0, "drift fell only {ratio:.2}x under step halving");
        // The energy norm should stay near its initial size.
        let first = coarse.samples[0].energy_norm;
        assert!(coarse.max_energy_norm() < 1.5 * first);
    }

    #[test]
    fn invariants_hold_in_two_dimensions() {
        let grid = Grid::new_2d(PI, 32).unwrap();
        let eta = random_band_limited(grid, 33, 6, 0.05).unwrap();
        let f = random_band_limited(grid, 34, 6, 0.05).unwrap();
        let v1 = riesz(&f, 0).unwrap();
        let v2 = riesz(&f, 1).unwrap();
        let pair = FieldPair::new_2d(eta, v1, v2).unwrap();
        let opts = EvolveOptions { samples: 3, ..EvolveOptions::default() };
        let traj = evolve(&pair, 1.0, &opts).unwrap();
        assert!(
            traj.max_conserved_drift() < 2e-9,
            "drift {:.3e}",
            traj.max_conserved_drift()
        );
        // The 2d flow preserves the curl-free class it starts in.
        let v = &traj.final_state.v;
        assert!(crate::spectral::curl_residual(&v[0], &v[1]).unwrap() < 1e-10);
    }

    #[test]
    fn linear_flow_preserves_energy_norms_to_roundoff() {
        let grid = Grid::new_1d(PI, 128).unwrap();
        let pair = small_pair_1d(grid, 0.5);
        let opts = EvolveOptions {
            linear_only: true,
            samples: 3,
            energy_index: 1.5,
            ..EvolveOptions::default()
        };
        let traj = evolve(&pair, 10.0, &opts).unwrap();
        let first = traj.samples[0].energy_norm;
        for s in &traj.samples {
            assert_relative_eq!(s.energy_norm, first, max_relative = 1e-12);
        }
    }

    #[test]
    fn runaway_states_are_reported_not_propagated() {
        let grid = Grid::new_1d(PI, 64).unwrap();
        let eta = random_band_limited(grid, 35, 12, 40.0).unwrap();
        let v = random_band_limited(grid, 36, 12, 40.0).unwrap();
        let pair = FieldPair::new_1d(eta, v).unwrap();
        let mut state = diagonalize(&pair);
        let stepper = Etdrk4::new(grid, 10.0, false).unwrap();
        let mut hit = None;
        for i in 0..50 {
            if let Err(e) = stepper.step(&mut state, i as f64 * 10.0) {
                hit = Some(e);
                break;
            }
        }
        match hit {
            Some(Error::Instability { .. }) => {}
            other => panic!("expected an instability report, got {other:?}"),
        }
    }

    #[test]
    fn evolve_validates_its_inputs() {
        let grid = Grid::new_1d(PI, 64).unwrap();
        let pair = FieldPair::new_1d(RealField::zero(grid), RealField::zero(grid)).unwrap();
        assert!(evolve(&pair, -1.0, &EvolveOptions::default()).is_err());
        assert!(evolve(&pair, f64::NAN, &EvolveOptions::default()).is_err());
        let bad_dt = EvolveOptions { dt: Some(0.0), ..EvolveOptions::default() };
        assert!(evolve(&pair, 1.0, &bad_dt).is_err());
        let bad_samples = EvolveOptions { samples: 1, ..EvolveOptions::default() };
        assert!(evolve(&pair, 1.0, &bad_samples).is_err());
    }
}
