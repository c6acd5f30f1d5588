//! Invariants of the flow: energy and momentum.
//!
//! The energy
//!
//! ```text
//! H = 1/2 integral( eta^2 + |K^{-1} v|^2 + eta |v|^2 ) dx
//! ```
//!
//! and the momentum `I_j = integral( eta K^{-2} v_j ) dx` are exactly
//! conserved by the continuous system (for curl-free `v` in 2d), and the
//! conservation proof survives the 2/3-rule Galerkin truncation: the grid
//! quadrature is exact on the cubic term because three kept modes never
//! wrap around a power-of-two grid. Drift in these numbers therefore
//! measures the time integrator alone, which is what the conservation
//! experiments report.

use crate::spectral::fft::to_spectral;
use crate::spectral::FieldPair;
use crate::symbols;

/// Total energy: quadratic part summed in spectral space, cubic part as a
/// plain grid quadrature.
pub fn hamiltonian(state: &FieldPair) -> f64 {
    let grid = state.grid();
    let eta_hat = to_spectral(&state.eta);
    let mut quad: f64 = eta_hat.values().iter().map(|c| c.norm_sqr()).sum();
    for vj in &state.v {
        let vj_hat = to_spectral(vj);
        quad += vj_hat
            .values()
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let k = symbols::k_symbol_unchecked(grid.xi_abs(idx));
                c.norm_sqr() / (k * k)
            })
            .sum::<f64>();
    }
    let mut cubic = 0.0;
    for (i, &e) in state.eta.values().iter().enumerate() {
        let speed: f64 = state.v.iter().map(|vj| vj.values()[i] * vj.values()[i]).sum();
        cubic += e * speed;
    }
    0.5 * grid.volume() * quad + 0.5 * cubic * grid.cell_volume()
}

/// Momentum components `I_j = integral( eta K^{-2} v_j ) dx`, evaluated as
/// a spectral pairing.
pub fn momentum(state: &FieldPair) -> Vec<f64> {
    let grid = state.grid();
    let eta_hat = to_spectral(&state.eta);
    state
        .v
        .iter()
        .map(|vj| {
            let vj_hat = to_spectral(vj);
            let s: f64 = eta_hat
                .values()
                .iter()
                .zip(vj_hat.values())
                .enumerate()
                .map(|(idx, (e, v))| {
                    let k = symbols::k_symbol_unchecked(grid.xi_abs(idx));
                    (e * v.conj()).re / (k * k)
                })
                .sum();
            grid.volume() * s
        })
        .collect()
}

/// Snapshot of the invariants at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservedQuantities {
    pub hamiltonian: f64,
    pub momentum: Vec<f64>,
}

impl ConservedQuantities {
    pub fn measure(state: &FieldPair) -> ConservedQuantities {
        ConservedQuantities { hamiltonian: hamiltonian(state), momentum: momentum(state) }
    }

    /// Largest absolute deviation across all invariants.
    pub fn max_drift(&self, reference: &ConservedQuantities) -> f64 {
        let mut drift = (self.hamiltonian - reference.hamiltonian).abs();
        for (a, b) in self.momentum.iter().zip(&reference.momentum) {
            drift = drift.max((a - b).abs());
        }
        drift
    }
}
