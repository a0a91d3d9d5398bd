//! Coefficient representation of a log-polynomial wavefunction and the
//! right-hand side of its coefficient flow.
//!
//! A state is `psi(x, t) = exp(sum_n alpha_n(t) x^n)`. Substituting into
//! `i hbar psi_t = -(hbar^2 / 2m) psi_xx + V psi` and matching powers of `x`
//! gives, for every `n`,
//!
//! ```text
//! d(alpha_n)/dt = (i hbar / 2m) [ (n+2)(n+1) alpha_{n+2}
//!                                 + sum_{k=0..n} (k+1)(n-k+1) alpha_{k+1} alpha_{n-k+1} ]
//!                 - (i / hbar) V_n(t)
//! ```
//!
//! where `V_n` is the `n`-th Taylor coefficient of the potential about `x = 0`.
//! The system is closed by holding `alpha_n = 0` for `n` above the truncation
//! order.

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("hbar must be positive and finite, got {0}")]
    InvalidHbar(f64),
    #[error("mass must be positive and finite, got {0}")]
    InvalidMass(f64),
    #[error("truncation order must be at least 2, got {0}")]
    TruncationTooLow(usize),
    #[error("coefficient alpha_{0} is not finite")]
    NonFinite(usize),
    #[error("time must be finite")]
    NonFiniteTime,
}

/// Reduced Planck constant and particle mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    hbar: f64,
    mass: f64,
}

impl PhysicalParams {
    pub fn new(hbar: f64, mass: f64) -> Result<Self, StateError> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(StateError::InvalidHbar(hbar));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(StateError::InvalidMass(mass));
        }
        Ok(Self { hbar, mass })
    }

    /// `hbar = m = 1`.
    pub fn natural() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
        }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// The kinetic prefactor `i hbar / 2m`.
    pub fn kinetic_factor(&self) -> C64 {
        C64::new(0.0, self.hbar / (2.0 * self.mass))
    }

    /// The potential prefactor `-i / hbar`.
    pub fn potential_factor(&self) -> C64 {
        C64::new(0.0, -1.0 / self.hbar)
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self::natural()
    }
}

/// The coefficients `alpha_0 ..= alpha_N` at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientState {
    alphas: Vec<C64>,
    time: f64,
}

impl CoefficientState {
    pub fn new(alphas: Vec<C64>, time: f64) -> Result<Self, StateError> {
        if alphas.len() < 3 {
            return Err(StateError::TruncationTooLow(alphas.len().saturating_sub(1)));
        }
        if let Some(n) = alphas.iter().position(|a| !a.is_finite()) {
            return Err(StateError::NonFinite(n));
        }
        if !time.is_finite() {
            return Err(StateError::NonFiniteTime);
        }
        Ok(Self { alphas, time })
    }

    /// All-zero state (`psi = 1`) at `time = 0`.
    pub fn zeros(truncation_order: usize) -> Result<Self, StateError> {
        Self::new(vec![C64::new(0.0, 0.0); truncation_order + 1], 0.0)
    }

    /// Build from leading coefficients, zero-padding up to `truncation_order`.
    pub fn from_leading(
        leading: &[C64],
        truncation_order: usize,
        time: f64,
    ) -> Result<Self, StateError> {
        let len = (truncation_order + 1).max(leading.len());
        let mut alphas = vec![C64::new(0.0, 0.0); len];
        alphas[..leading.len()].copy_from_slice(leading);
        Self::new(alphas, time)
    }

    /// Real-valued convenience constructor.
    pub fn from_real(leading: &[f64], truncation_order: usize) -> Result<Self, StateError> {
        let leading: Vec<C64> = leading.iter().map(|&a| C64::new(a, 0.0)).collect();
        Self::from_leading(&leading, truncation_order, 0.0)
    }

    // Internal constructor for steppers; may carry non-finite values so that
    // blow-up can be observed rather than rejected.
    pub(crate) fn from_raw(alphas: Vec<C64>, time: f64) -> Self {
        Self { alphas, time }
    }

    pub fn alphas(&self) -> &[C64] {
        &self.alphas
    }

    pub fn alpha(&self, n: usize) -> C64 {
        self.alphas.get(n).copied().unwrap_or_default()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn truncation_order(&self) -> usize {
        self.alphas.len() - 1
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// Same coefficients at a larger truncation order (extra entries zero).
    /// Orders below the current one are ignored.
    pub fn padded(&self, truncation_order: usize) -> Self {
        let mut alphas = self.alphas.clone();
        if truncation_order + 1 > alphas.len() {
            alphas.resize(truncation_order + 1, C64::new(0.0, 0.0));
        }
        Self {
            alphas,
            time: self.time,
        }
    }

    /// Largest index with `|alpha_n| > floor`, if any.
    pub fn support_index(&self, floor: f64) -> Option<usize> {
        self.alphas.iter().rposition(|a| a.norm() > floor)
    }

    pub fn is_finite(&self) -> bool {
        self.alphas.iter().all(|a| a.is_finite())
    }

    /// `sum_n alpha_n x^n` by Horner's rule.
    pub fn exponent_at(&self, x: f64) -> C64 {
        self.alphas
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &a| acc * x + a)
    }
}

/// Time derivatives of the coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityVector {
    derivs: Vec<C64>,
}

impl VelocityVector {
    pub fn derivs(&self) -> &[C64] {
        &self.derivs
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.derivs
    }
}

/// `sum_{k=0..n} (k+1)(n-k+1) alpha_{k+1} alpha_{n-k+1}`, the `x^n`
/// coefficient of `(dS/dx)^2`. Indices past the end of `alphas` read as zero.
pub fn convolution_term(alphas: &[C64], n: usize) -> C64 {
    let at = |i: usize| alphas.get(i).copied().unwrap_or_default();
    let mut sum = C64::new(0.0, 0.0);
    for k in 0..=n {
        let (i, j) = (k + 1, n - k + 1);
        if i >= alphas.len() || j >= alphas.len() {
            continue;
        }
        sum += (i * j) as f64 * at(i) * at(j);
    }
    sum
}

/// Right-hand side of the coefficient flow at the state's truncation order.
///
/// `v_coeffs[n]` is the Taylor coefficient `V_n(t)`; missing entries are zero
/// and entries beyond the truncation order are ignored.
pub fn coefficient_velocity(
    state: &CoefficientState,
    v_coeffs: &[f64],
    params: &PhysicalParams,
) -> VelocityVector {
    VelocityVector {
        derivs: velocity_of(&state.alphas, v_coeffs, params),
    }
}

pub(crate) fn velocity_of(alphas: &[C64], v_coeffs: &[f64], params: &PhysicalParams) -> Vec<C64> {
    let kinetic = params.kinetic_factor();
    let potential = params.potential_factor();
    let len = alphas.len();
    (0..len)
        .map(|n| {
            let curvature = if n + 2 < len {
                ((n + 2) * (n + 1)) as f64 * alphas[n + 2]
            } else {
                C64::new(0.0, 0.0)
            };
            let v = v_coeffs.get(n).copied().unwrap_or(0.0);
            kinetic * (curvature + convolution_term(alphas, n)) + potential * v
        })
        .collect()
}
