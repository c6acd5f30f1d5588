//! Forward and inverse transforms between physical and spectral storage.
//!
//! Convention: the forward transform divides by `N^dim`, so spectral values
//! are Fourier-series coefficients; the inverse is the plain unnormalized
//! synthesis sum. Planners are cached per thread (rayon workers each build
//! their own; plans are reused across calls of the same size).

use super::grid::{Grid, RealField, SpectralField};
use crate::Complex;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

/// Cached plans, keyed by transform size and direction (forward?).
type PlanCache = HashMap<(usize, bool), Arc<dyn Fft<f64>>>;

thread_local! {
    static PLANS: RefCell<PlanCache> = RefCell::new(PlanCache::new());
}

/// Run an FFT of size `n` over every contiguous chunk of `buf`.
fn run_fft(buf: &mut [Complex], n: usize, inverse: bool) {
    debug_assert_eq!(buf.len() % n, 0);
    let plan = PLANS.with(|cell| {
        let mut map = cell.borrow_mut();
        map.entry((n, inverse))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    });
    plan.process(buf);
}

/// In-place square transpose of an `n x n` row-major buffer.
fn transpose(buf: &mut [Complex], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

/// Forward transform of a complex buffer laid out on `grid`, in place,
/// including the `1/N^dim` scaling.
pub fn forward_in_place(grid: Grid, buf: &mut [Complex]) {
    let n = grid.points_per_axis();
    run_fft(buf, n, false);
    if grid.dim() == 2 {
        transpose(buf, n);
        run_fft(buf, n, false);
        transpose(buf, n);
    }
    let scale = 1.0 / grid.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Inverse (synthesis) transform, in place; no scaling.
pub fn inverse_in_place(grid: Grid, buf: &mut [Complex]) {
    let n = grid.points_per_axis();
    run_fft(buf, n, true);
    if grid.dim() == 2 {
        transpose(buf, n);
        run_fft(buf, n, true);
        transpose(buf, n);
    }
}

/// Transform a real field to its spectral coefficients.
pub fn to_spectral(f: &RealField) -> SpectralField {
    let grid = f.grid();
    let mut buf: Vec<Complex> = f.values().iter().map(|&v| Complex::new(v, 0.0)).collect();
    forward_in_place(grid, &mut buf);
    SpectralField::new(grid, buf).expect("buffer sized from the field itself")
}

/// Synthesize the physical-space complex samples of a spectral field.
pub fn to_physical_complex(f: &SpectralField) -> Vec<Complex> {
    let mut buf = f.values().to_vec();
    inverse_in_place(f.grid(), &mut buf);
    buf
}

/// Synthesize and take the real part, returning the largest imaginary
/// residue so callers can decide whether the field was honestly real.
pub fn to_physical(f: &SpectralField) -> (RealField, f64) {
    let buf = to_physical_complex(f);
    let mut residue = 0.0f64;
    let values: Vec<f64> = buf
        .iter()
        .map(|c| {
            residue = residue.max(c.im.abs());
            c.re
        })
        .collect();
    let field = RealField::new(f.grid(), values)
        .expect("synthesis of finite spectra yields finite values");
    (field, residue)
}
