//! Initial coefficient states: closed-form Gaussian packets, least-squares
//! log-polynomial fits of sampled wavefunctions, and support bookkeeping.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::series::{CoefficientState, StateError, C64};

/// Samples with `|psi|` at or below this are rejected by the fit.
pub const DEFAULT_MAGNITUDE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InitError {
    #[error("gaussian width must be positive and finite, got {0}")]
    InvalidWidth(f64),
    #[error("gaussian center and wavenumber must be finite")]
    NonFinitePacket,
    #[error("sample {index} at x = {x} has |psi| = {magnitude}, below the floor {floor}")]
    SampleTooSmall {
        index: usize,
        x: f64,
        magnitude: f64,
        floor: f64,
    },
    #[error("least-squares system is rank deficient: {0}")]
    DegenerateSystem(String),
    #[error("need at least {needed} samples for degree {degree}, got {got}")]
    TooFewSamples {
        needed: usize,
        degree: usize,
        got: usize,
    },
    #[error("samples must be sorted by ascending x (violated at index {0})")]
    UnsortedSamples(usize),
    #[error("fit degree must be at least 1")]
    ZeroDegree,
    #[error("sample {0} is not finite")]
    NonFiniteSample(usize),
    #[error(transparent)]
    State(#[from] StateError),
}

/// `psi_0(x) = exp[-(x - x0)^2 / (4 sigma^2) + i k0 (x - x0)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    center: f64,
    width: f64,
    wavenumber: f64,
}

impl GaussianPacket {
    pub fn new(center: f64, width: f64, wavenumber: f64) -> Result<Self, InitError> {
        if !(width.is_finite() && width > 0.0) {
            return Err(InitError::InvalidWidth(width));
        }
        if !(center.is_finite() && wavenumber.is_finite()) {
            return Err(InitError::NonFinitePacket);
        }
        Ok(Self {
            center,
            width,
            wavenumber,
        })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }
}

/// Expand the packet's exponent into `alpha_0 + alpha_1 x + alpha_2 x^2`,
/// zero-padded to `truncation_order` (at least 2).
pub fn gaussian_coefficients(
    packet: &GaussianPacket,
    truncation_order: usize,
) -> Result<CoefficientState, InitError> {
    let (x0, k0) = (packet.center, packet.wavenumber);
    let s2 = packet.width * packet.width;
    let leading = [
        C64::new(-x0 * x0 / (4.0 * s2), -k0 * x0),
        C64::new(x0 / (2.0 * s2), k0),
        C64::new(-1.0 / (4.0 * s2), 0.0),
    ];
    Ok(CoefficientState::from_leading(&leading, truncation_order.max(2), 0.0)?)
}

/// Result of [`fit_log_polynomial`].
#[derive(Debug, Clone, PartialEq)]
pub struct LogPolyFit {
    pub state: CoefficientState,
    pub degree: usize,
    /// Root-mean-square of `|fitted log psi - sampled log psi|`.
    pub rms_residual: f64,
    pub max_residual: f64,
}

/// Least-squares fit of `log|psi| + i phase` by a polynomial of `degree`.
///
/// The phase is unwrapped sequentially along ascending `x`; sampling must be
/// fine enough that the true phase changes by less than `pi` between
/// neighbours. `Im alpha_0` is returned in `(-pi, pi]`.
pub fn fit_log_polynomial(samples: &[(f64, C64)], degree: usize) -> Result<LogPolyFit, InitError> {
    fit_log_polynomial_with_floor(samples, degree, DEFAULT_MAGNITUDE_FLOOR)
}

pub fn fit_log_polynomial_with_floor(
    samples: &[(f64, C64)],
    degree: usize,
    floor: f64,
) -> Result<LogPolyFit, InitError> {
    if degree == 0 {
        return Err(InitError::ZeroDegree);
    }
    if samples.len() < degree + 1 {
        return Err(InitError::TooFewSamples {
            needed: degree + 1,
            degree,
            got: samples.len(),
        });
    }
    for (i, &(x, psi)) in samples.iter().enumerate() {
        if !(x.is_finite() && psi.is_finite()) {
            return Err(InitError::NonFiniteSample(i));
        }
        let magnitude = psi.norm();
        if magnitude <= floor {
            return Err(InitError::SampleTooSmall {
                index: i,
                x,
                magnitude,
                floor,
            });
        }
    }
    for (i, w) in samples.windows(2).enumerate() {
        if w[1].0 == w[0].0 {
            return Err(InitError::DegenerateSystem(format!("duplicated x = {}", w[0].0)));
        }
        if w[1].0 < w[0].0 {
            return Err(InitError::UnsortedSamples(i + 1));
        }
    }

    let logs = log_samples(samples);

    // Fit in the scaled variable u = (x - mid) / half to keep the Vandermonde
    // matrix well conditioned, then map back to powers of x.
    let (lo, hi) = (samples[0].0, samples[samples.len() - 1].0);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let m = samples.len();
    let vander = DMatrix::from_fn(m, degree + 1, |i, j| ((samples[i].0 - mid) / half).powi(j as i32));
    let rhs = DMatrix::from_fn(m, 2, |i, j| if j == 0 { logs[i].re } else { logs[i].im });

    let svd = vander.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > smax * 1e-12) {
        return Err(InitError::DegenerateSystem(format!(
            "singular values span {smin:e} to {smax:e}"
        )));
    }
    let sol = svd
        .solve(&rhs, 0.0)
        .map_err(|e| InitError::DegenerateSystem(e.to_string()))?;
    let scaled: Vec<C64> = (0..=degree).map(|j| C64::new(sol[(j, 0)], sol[(j, 1)])).collect();
    let mut alphas = unscale(&scaled, mid, half);
    // exp is 2 pi i periodic; report the principal branch of the constant phase
    alphas[0].im = wrap_to_pi(alphas[0].im);

    let fitted = &vander * &sol;
    let mut sum_sq = 0.0;
    let mut max_residual: f64 = 0.0;
    for (i, l) in logs.iter().enumerate() {
        let r = (C64::new(fitted[(i, 0)], fitted[(i, 1)]) - l).norm();
        sum_sq += r * r;
        max_residual = max_residual.max(r);
    }
    let state = CoefficientState::from_leading(&alphas, degree.max(2), 0.0)?;
    Ok(LogPolyFit {
        state,
        degree,
        rms_residual: (sum_sq / m as f64).sqrt(),
        max_residual,
    })
}

/// `log|psi| + i phi` with `phi` unwrapped by nearest branch.
fn log_samples(samples: &[(f64, C64)]) -> Vec<C64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut prev_arg = 0.0;
    let mut phase = 0.0;
    for (i, &(_, psi)) in samples.iter().enumerate() {
        let arg = psi.arg();
        if i == 0 {
            phase = arg;
        } else {
            phase += wrap_to_pi(arg - prev_arg);
        }
        prev_arg = arg;
        out.push(C64::new(psi.norm().ln(), phase));
    }
    out
}

/// Fold an angle into `(-pi, pi]`.
fn wrap_to_pi(d: f64) -> f64 {
    let mut w = d.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// Coefficients of `sum_j b_j ((x - mid) / half)^j` in powers of `x`.
fn unscale(b: &[C64], mid: f64, half: f64) -> Vec<C64> {
    let d = b.len();
    let mut out = vec![C64::new(0.0, 0.0); d];
    // poly holds the coefficients of ((x - mid)/half)^j as j increases
    let mut poly = vec![0.0; d];
    poly[0] = 1.0;
    for (j, bj) in b.iter().enumerate() {
        if j > 0 {
            let mut next = vec![0.0; d];
            for k in 0..j {
                next[k + 1] += poly[k] / half;
                next[k] -= poly[k] * mid / half;
            }
            poly = next;
        }
        for k in 0..=j {
            out[k] += bj * poly[k];
        }
    }
    out
}

/// Largest index that can be nonzero after one step from support `{0..=a}`
/// under a potential of degree `d`: `max(a, 2a - 2, d)`.
pub fn support_bound_after_step(a: usize, d: usize) -> usize {
    a.max((2 * a).saturating_sub(2)).max(d)
}

/// True when support and potential degree are both at most 2, in which case
/// the coefficient flow never leaves `{0, 1, 2}`.
pub fn is_closed_system(a: usize, d: usize) -> bool {
    a <= 2 && d <= 2
}
