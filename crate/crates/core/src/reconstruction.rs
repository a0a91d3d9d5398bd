//! Sampling `psi = exp(sum alpha_n x^n)` on a uniform grid, quadrature of
//! norms and expectation values, and a normalizability predicate.

use thiserror::Error;

use crate::series::{CoefficientState, PhysicalParams, C64};

/// `exp` overflows `f64` just above 709.78; samples beyond this are refused.
pub const EXPONENT_CUTOFF: f64 = 700.0;
pub const MIN_GRID_POINTS: usize = 8;
/// Norms at or below this are treated as zero by [`observables`].
pub const ZERO_NORM: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid needs at least {MIN_GRID_POINTS} points, got {0}")]
    TooFewPoints(usize),
    #[error("window [{xmin}, {xmax}] is empty or not finite")]
    InvalidWindow { xmin: f64, xmax: f64 },
    #[error("Re S(x) = {re} at x = {x} exceeds {EXPONENT_CUTOFF}; the state is not normalizable on this window")]
    ExponentOverflow { x: f64, re: f64 },
    #[error("grid samples are not finite")]
    NonFinite,
    #[error("wavefunction norm is zero")]
    ZeroNorm,
}

/// `values[j] = psi(xmin + j dx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveGrid {
    xmin: f64,
    dx: f64,
    values: Vec<C64>,
    time: f64,
}

impl WaveGrid {
    pub fn new(xmin: f64, dx: f64, values: Vec<C64>, time: f64) -> Result<Self, GridError> {
        if values.len() < MIN_GRID_POINTS {
            return Err(GridError::TooFewPoints(values.len()));
        }
        if !(dx.is_finite() && dx > 0.0 && xmin.is_finite()) {
            return Err(GridError::InvalidWindow {
                xmin,
                xmax: xmin + dx * (values.len() - 1) as f64,
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(GridError::NonFinite);
        }
        Ok(Self {
            xmin,
            dx,
            values,
            time,
        })
    }

    pub fn xmin(&self) -> f64 {
        self.xmin
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn x(&self, j: usize) -> f64 {
        self.xmin + j as f64 * self.dx
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|j| self.x(j))
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    /// Same grid carrying different samples.
    pub fn with_values(&self, values: Vec<C64>, time: f64) -> Self {
        Self {
            xmin: self.xmin,
            dx: self.dx,
            values,
            time,
        }
    }
}

/// Sample the state on `points` equally spaced nodes covering `[xmin, xmax]`
/// inclusive.
pub fn evaluate_on_grid(
    state: &CoefficientState,
    xmin: f64,
    xmax: f64,
    points: usize,
) -> Result<WaveGrid, GridError> {
    if !(xmin.is_finite() && xmax.is_finite() && xmax > xmin) {
        return Err(GridError::InvalidWindow { xmin, xmax });
    }
    if points < MIN_GRID_POINTS {
        return Err(GridError::TooFewPoints(points));
    }
    evaluate_on_lattice(state, xmin, (xmax - xmin) / (points - 1) as f64, points)
}

/// Sample the state at `xmin + j dx`, `j = 0..points`.
pub fn evaluate_on_lattice(
    state: &CoefficientState,
    xmin: f64,
    dx: f64,
    points: usize,
) -> Result<WaveGrid, GridError> {
    if points < MIN_GRID_POINTS {
        return Err(GridError::TooFewPoints(points));
    }
    let mut values = Vec::with_capacity(points);
    for j in 0..points {
        let x = xmin + j as f64 * dx;
        let s = state.exponent_at(x);
        if !(s.re <= EXPONENT_CUTOFF) {
            return Err(GridError::ExponentOverflow { x, re: s.re });
        }
        values.push(s.exp());
    }
    WaveGrid::new(xmin, dx, values, state.time())
}

/// Composite trapezoid rule over the grid.
pub(crate) fn trapezoid(dx: f64, f: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = f.len();
    let sum: f64 = f
        .enumerate()
        .map(|(j, v)| if j == 0 || j + 1 == n { 0.5 * v } else { v })
        .sum();
    sum * dx
}

pub(crate) fn trapezoid_c(dx: f64, f: impl ExactSizeIterator<Item = C64>) -> C64 {
    let n = f.len();
    let sum: C64 = f
        .enumerate()
        .map(|(j, v)| if j == 0 || j + 1 == n { 0.5 * v } else { v })
        .sum();
    sum * dx
}

/// `integral |psi|^2 dx` by the trapezoid rule.
pub fn norm_squared(grid: &WaveGrid) -> f64 {
    trapezoid(grid.dx, grid.values.iter().map(|v| v.norm_sqr()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    pub norm2: f64,
    pub mean_x: f64,
    pub mean_x2: f64,
    pub mean_p: C64,
}

/// `d psi / dx`: fourth-order central differences in the interior, second
/// order next to the ends and one-sided second order at the ends.
fn derivative(values: &[C64], dx: f64) -> Vec<C64> {
    let m = values.len();
    let v = values;
    (0..m)
        .map(|j| {
            if j >= 2 && j + 2 < m {
                (v[j - 2] - 8.0 * v[j - 1] + 8.0 * v[j + 1] - v[j + 2]) / (12.0 * dx)
            } else if j >= 1 && j + 1 < m {
                (v[j + 1] - v[j - 1]) / (2.0 * dx)
            } else if j == 0 {
                (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dx)
            } else {
                (3.0 * v[m - 1] - 4.0 * v[m - 2] + v[m - 3]) / (2.0 * dx)
            }
        })
        .collect()
}

/// Norm and normalized expectation values of `x`, `x^2` and `p = -i hbar d/dx`.
///
/// The imaginary part of `mean_p` is a resolution diagnostic and should be
/// close to zero.
pub fn observables(grid: &WaveGrid, params: &PhysicalParams) -> Result<Observables, GridError> {
    let norm2 = norm_squared(grid);
    if !(norm2 > ZERO_NORM) {
        return Err(GridError::ZeroNorm);
    }
    let dens = || grid.values.iter().map(|v| v.norm_sqr());
    let mean_x = trapezoid(grid.dx, dens().enumerate().map(|(j, d)| grid.x(j) * d)) / norm2;
    let mean_x2 = trapezoid(
        grid.dx,
        dens().enumerate().map(|(j, d)| {
            let x = grid.x(j);
            x * x * d
        }),
    ) / norm2;
    let d = derivative(&grid.values, grid.dx);
    let minus_i_hbar = C64::new(0.0, -params.hbar());
    let mean_p = trapezoid_c(
        grid.dx,
        grid.values.iter().zip(&d).map(|(v, dv)| v.conj() * minus_i_hbar * dv),
    ) / norm2;
    Ok(Observables {
        norm2,
        mean_x,
        mean_x2,
        mean_p,
    })
}

/// True iff the highest coefficient above `epsilon` in magnitude has an even
/// index `n >= 2` and a negative real part.
pub fn normalizability_check(state: &CoefficientState, epsilon: f64) -> bool {
    match state.support_index(epsilon) {
        Some(n) => n >= 2 && n % 2 == 0 && state.alpha(n).re < 0.0,
        None => false,
    }
}
