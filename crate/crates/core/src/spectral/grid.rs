//! Grids, fields, and per-grid symbol tables.

use crate::error::{Error, Result};
use crate::symbols;
use crate::Complex;
use std::f64::consts::PI;

/// Periodic grid on `[-L, L)^dim` with `n` points per axis.
///
/// Cheap to copy; wavenumbers are computed on demand. FFT index `i` maps to
/// the integer mode `k = i` for `i < n/2` and `k = i - n` above, so the
/// lattice is symmetric about zero except for the unpaired Nyquist mode
/// `k = -n/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    half_length: f64,
    n: usize,
}

/// A wavenumber on the lattice: signed scalar in 1d, vector in 2d.
#[derive(Debug, Clone, Copy)]
pub enum Wavenumber {
    One(f64),
    Two(f64, f64),
}

impl Wavenumber {
    /// Euclidean magnitude `|xi|`.
    pub fn abs(&self) -> f64 {
        match *self {
            Wavenumber::One(a) => a.abs(),
            Wavenumber::Two(a, b) => a.hypot(b),
        }
    }
}

impl Grid {
    fn new(dim: usize, half_length: f64, n: usize) -> Result<Grid> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::grid(format!("half_length must be positive, got {half_length}")));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::grid(format!("points_per_axis must be a power of two >= 4, got {n}")));
        }
        Ok(Grid { dim, half_length, n })
    }

    /// 1d grid on `[-L, L)`.
    pub fn new_1d(half_length: f64, n: usize) -> Result<Grid> {
        Grid::new(1, half_length, n)
    }

    /// 2d grid on `[-L, L)^2`.
    pub fn new_2d(half_length: f64, n: usize) -> Result<Grid> {
        Grid::new(2, half_length, n)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    /// Total number of grid points (`n` in 1d, `n^2` in 2d).
    pub fn len(&self) -> usize {
        if self.dim == 1 {
            self.n
        } else {
            self.n * self.n
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacing `2L / n`.
    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.n as f64
    }

    /// Quadrature weight per point, `dx^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    /// Total volume `(2L)^dim`.
    pub fn volume(&self) -> f64 {
        (2.0 * self.half_length).powi(self.dim as i32)
    }

    /// Physical coordinate of axis index `i`: `-L + i dx`.
    pub fn x_coord(&self, i: usize) -> f64 {
        -self.half_length + i as f64 * self.dx()
    }

    /// Signed wavenumber of axis index `i` in FFT order.
    pub fn xi_axis(&self, i: usize) -> f64 {
        debug_assert!(i < self.n);
        let k = if i < self.n / 2 { i as f64 } else { i as f64 - self.n as f64 };
        k * PI / self.half_length
    }

    /// Largest resolved wavenumber magnitude, `pi (n/2) / L`.
    pub fn xi_max(&self) -> f64 {
        PI * (self.n / 2) as f64 / self.half_length
    }

    /// Wavenumber at flat index `idx` (row-major in 2d).
    pub fn wavenumber(&self, idx: usize) -> Wavenumber {
        if self.dim == 1 {
            Wavenumber::One(self.xi_axis(idx))
        } else {
            Wavenumber::Two(self.xi_axis(idx / self.n), self.xi_axis(idx % self.n))
        }
    }

    /// `|xi|` at flat index `idx`.
    pub fn xi_abs(&self, idx: usize) -> f64 {
        self.wavenumber(idx).abs()
    }

    /// True if axis index `i` is the unpaired Nyquist mode.
    pub fn is_nyquist_axis(&self, i: usize) -> bool {
        i == self.n / 2
    }

    /// Signed wavenumber for odd symbols: zero on the Nyquist mode so real
    /// fields stay real under odd multipliers (the mode has no conjugate
    /// partner to cancel against).
    pub fn xi_axis_odd(&self, i: usize) -> f64 {
        if self.is_nyquist_axis(i) {
            0.0
        } else {
            self.xi_axis(i)
        }
    }

    /// 2/3-rule dealiasing mask: keep `|k| <= n/3` on every axis.
    pub fn dealias_keep(&self, idx: usize) -> bool {
        let cutoff = self.n / 3;
        let keep_axis = |i: usize| {
            let k = if i < self.n / 2 { i } else { self.n - i };
            k <= cutoff
        };
        if self.dim == 1 {
            keep_axis(idx)
        } else {
            keep_axis(idx / self.n) && keep_axis(idx % self.n)
        }
    }
}

/// Real-valued grid field.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid,
    values: Vec<f64>,
}

impl RealField {
    /// Wrap values; length must match the grid and all entries be finite.
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<RealField> {
        if values.len() != grid.len() {
            return Err(Error::grid(format!(
                "field length {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::grid("field contains non-finite values"));
        }
        Ok(RealField { grid, values })
    }

    pub fn zero(grid: Grid) -> RealField {
        RealField { grid, values: vec![0.0; grid.len()] }
    }

    /// Sample a function of the 1d coordinate.
    pub fn from_fn_1d(grid: Grid, f: impl Fn(f64) -> f64) -> Result<RealField> {
        if grid.dim() != 1 {
            return Err(Error::grid("from_fn_1d wants a 1d grid"));
        }
        let values = (0..grid.len()).map(|i| f(grid.x_coord(i))).collect();
        RealField::new(grid, values)
    }

    /// Sample a function of the 2d coordinates (row index is the first axis).
    pub fn from_fn_2d(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Result<RealField> {
        if grid.dim() != 2 {
            return Err(Error::grid("from_fn_2d wants a 2d grid"));
        }
        let n = grid.points_per_axis();
        let values =
            (0..grid.len()).map(|idx| f(grid.x_coord(idx / n), grid.x_coord(idx % n))).collect();
        RealField::new(grid, values)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Complex spectral field: scaled DFT coefficients in FFT order.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Grid,
    values: Vec<Complex>,
}

impl SpectralField {
    pub fn new(grid: Grid, values: Vec<Complex>) -> Result<SpectralField> {
        if values.len() != grid.len() {
            return Err(Error::grid(format!(
                "spectral field length {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(SpectralField { grid, values })
    }

    pub fn zero(grid: Grid) -> SpectralField {
        SpectralField { grid, values: vec![Complex::new(0.0, 0.0); grid.len()] }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[Complex] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex] {
        &mut self.values
    }

    /// Spectral L2 norm: `sqrt((2L)^d sum |c_k|^2)`; equals the physical
    /// quadrature L2 norm by Parseval.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|c| c.norm_sqr()).sum();
        (self.grid.volume() * s).sqrt()
    }
}

/// Physical state: elevation plus one velocity component per dimension.
#[derive(Debug, Clone)]
pub struct FieldPair {
    pub eta: RealField,
    /// Velocity components; `v.len() == grid.dim()`.
    pub v: Vec<RealField>,
}

impl FieldPair {
    pub fn new_1d(eta: RealField, v: RealField) -> Result<FieldPair> {
        if eta.grid().dim() != 1 || eta.grid() != v.grid() {
            return Err(Error::grid("FieldPair::new_1d wants matching 1d grids"));
        }
        Ok(FieldPair { eta, v: vec![v] })
    }

    pub fn new_2d(eta: RealField, v1: RealField, v2: RealField) -> Result<FieldPair> {
        if eta.grid().dim() != 2 || eta.grid() != v1.grid() || eta.grid() != v2.grid() {
            return Err(Error::grid("FieldPair::new_2d wants matching 2d grids"));
        }
        Ok(FieldPair { eta, v: vec![v1, v2] })
    }

    pub fn zero(grid: Grid) -> FieldPair {
        FieldPair {
            eta: RealField::zero(grid),
            v: (0..grid.dim()).map(|_| RealField::zero(grid)).collect(),
        }
    }

    pub fn grid(&self) -> Grid {
        self.eta.grid()
    }
}

/// Per-grid samples of the dispersion symbols: the one place grid code takes
/// its multiplier values from.
///
/// `m` is the signed odd relation `xi K(|xi|)` in 1d (zero on the Nyquist
/// mode, which has no conjugate partner) and the radial `|xi| K(|xi|)` in 2d.
#[derive(Debug, Clone)]
pub struct MultiplierTable {
    grid: Grid,
    /// `K(|xi|)` per flat index; strictly positive.
    pub k: Vec<f64>,
    /// Dispersion relation per flat index (see type docs for the 1d sign).
    pub m: Vec<f64>,
    /// `m'(|xi|)` per flat index.
    pub m1: Vec<f64>,
    /// `m''(|xi|)` per flat index.
    pub m2: Vec<f64>,
}

impl MultiplierTable {
    pub fn new(grid: Grid) -> MultiplierTable {
        let len = grid.len();
        let mut k = Vec::with_capacity(len);
        let mut m = Vec::with_capacity(len);
        let mut m1 = Vec::with_capacity(len);
        let mut m2 = Vec::with_capacity(len);
        for idx in 0..len {
            let r = grid.xi_abs(idx);
            let kv = symbols::k_symbol_unchecked(r);
            k.push(kv);
            let mv = if grid.dim() == 1 {
                grid.xi_axis_odd(idx) * kv
            } else {
                r * kv
            };
            m.push(mv);
            m1.push(symbols::m_prime(r));
            m2.push(symbols::m_double_prime(r));
        }
        MultiplierTable { grid, k, m, m1, m2 }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Largest |m| on the grid; sets the default time step.
    pub fn max_abs_m(&self) -> f64 {
        self.m.iter().fold(0.0f64, |a, &b| a.max(b.abs()))
    }
}
