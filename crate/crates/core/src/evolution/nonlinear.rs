//! The quadratic right-hand side in diagonal variables.
//!
//! In diagonal variables the system reads `d/dt u_pm = -+ i m u_pm + N_pm`
//! with
//!
//! ```text
//! N_pm = -i B_pm,
//! 1d:  B_pm_hat = (xi K^2 / 2) (eta v)^     +- (m / 2) (v^2 / 2)^
//! 2d:  B_pm_hat = (K^2 / 2) xi . (eta v)^   +- (m / 2) (|v|^2 / 2)^
//! ```
//!
//! Products are formed pointwise on the grid and truncated with the
//! 2/3-rule mask, which makes the discrete flow the exact Fourier-Galerkin
//! truncation of the continuous system; the conserved-quantity tests lean
//! on that. Odd wavenumber factors use the Nyquist-zeroed convention shared
//! with the rest of the crate.

use super::diag::{xi_odd, xi_odd_abs, DiagonalState};
use crate::spectral::fft::{forward_in_place, inverse_in_place};
use crate::spectral::MultiplierTable;
use crate::Complex;

/// Evaluate `N_pm` at a diagonal state. The output is dealiased; the input
/// is masked on the fly so callers need not pre-filter.
pub fn nonlinear_rhs(
    diag: &DiagonalState,
    table: &MultiplierTable,
) -> (Vec<Complex>, Vec<Complex>) {
    let grid = diag.grid();
    let len = grid.len();
    let zero = Complex::new(0.0, 0.0);

    // Masked spectral eta and the longitudinal scalar w = K (u+ - u-).
    let mut eta = vec![zero; len];
    let mut w = vec![zero; len];
    for idx in 0..len {
        if grid.dealias_keep(idx) {
            eta[idx] = diag.plus[idx] + diag.minus[idx];
            w[idx] = table.k[idx] * (diag.plus[idx] - diag.minus[idx]);
        }
    }

    // Velocity components in spectral space, then everything to the grid.
    let dim = grid.dim();
    let mut v: Vec<Vec<Complex>> = Vec::with_capacity(dim);
    if dim == 1 {
        v.push(w.clone());
    } else {
        for axis in 0..2 {
            v.push(
                (0..len)
                    .map(|idx| {
                        let r = xi_odd_abs(grid, idx);
                        if r == 0.0 {
                            zero
                        } else {
                            w[idx] * (xi_odd(grid, idx, axis) / r)
                        }
                    })
                    .collect(),
            );
        }
    }
    inverse_in_place(grid, &mut eta);
    for vj in v.iter_mut() {
        inverse_in_place(grid, vj);
    }

    // Pointwise products: eta v_j and |v|^2 / 2.
    let mut flux: Vec<Vec<Complex>> = (0..dim)
        .map(|j| (0..len).map(|i| eta[i] * v[j][i]).collect())
        .collect();
    let mut speed: Vec<Complex> = (0..len)
        .map(|i| 0.5 * v.iter().map(|vj| vj[i] * vj[i]).sum::<Complex>())
        .collect();
    for fj in flux.iter_mut() {
        forward_in_place(grid, fj);
    }
    forward_in_place(grid, &mut speed);

    // Assemble B_pm and rotate by -i.
    let mut n_plus = vec![zero; len];
    let mut n_minus = vec![zero; len];
    let minus_i = Complex::new(0.0, -1.0);
    for idx in 0..len {
        if !grid.dealias_keep(idx) {
            continue;
        }
        let k2 = table.k[idx] * table.k[idx];
        let common: Complex = (0..dim)
            .map(|j| xi_odd(grid, idx, j) * flux[j][idx])
            .sum::<Complex>()
            * (0.5 * k2);
        let signed = 0.5 * table.m[idx] * speed[idx];
        n_plus[idx] = minus_i * (common + signed);
        n_minus[idx] = minus_i * (common - signed);
    }
    (n_plus, n_minus)
}
