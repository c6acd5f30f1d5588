//! Time evolution of the coupled elevation/velocity system.
//!
//! The pipeline: physical fields diagonalize into two half-wave channels
//! ([`diag`]), the quadratic term is evaluated pseudo-spectrally with
//! 2/3-rule truncation ([`nonlinear`]), and time stepping is exponential
//! fourth-order Runge–Kutta ([`etdrk4`]), which applies the stiff linear
//! phase exactly. Energy and momentum ([`conserved`]) are exact invariants
//! of the truncated system, so their drift isolates time-stepping error.
//! [`picard`] solves the same equations a second way — fixed-point
//! iteration on the Duhamel integral — giving an independent cross-check
//! and a direct look at the contraction that underlies local existence.

pub mod conserved;
pub mod diag;
pub mod etdrk4;
pub mod nonlinear;
pub mod picard;

pub use conserved::{hamiltonian, momentum, ConservedQuantities};
pub use diag::{diagonalize, linear_propagate, undiagonalize, DiagonalState};
pub use etdrk4::{evolve, Etdrk4, EvolveOptions, Trajectory, TrajectorySample};
pub use nonlinear::nonlinear_rhs;
pub use picard::{picard_iterate, PicardOptions, PicardReport};
