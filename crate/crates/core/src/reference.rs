//! Exact coefficient trajectories for the cases where the flow closes on
//! `{alpha_0, alpha_1, alpha_2}` and integrates in closed form.
//!
//! With `kappa = i hbar / 2m` the closed flow reads
//!
//! ```text
//! alpha_2' = 4 kappa alpha_2^2 - (i/hbar) V_2
//! alpha_1' = 4 kappa alpha_1 alpha_2 - (i/hbar) V_1
//! alpha_0' = kappa (2 alpha_2 + alpha_1^2) - (i/hbar) V_0
//! ```

use std::str::FromStr;

use thiserror::Error;

use crate::potential::{EvalError, PotentialModel, TimeProfile};
use crate::series::{CoefficientState, PhysicalParams, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// `V = 0`, quadratic initial exponent.
    Free,
    /// `V = f0(t) + f1(t) x`, `alpha_2 = 0`.
    Linear,
    /// `V = V0 + (m w^2 / 2) x^2`, `alpha_2 = -m w / 2 hbar`, `alpha_1 = 0`.
    HarmonicGround,
    /// As `HarmonicGround` with arbitrary `alpha_1`.
    HarmonicCoherent,
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "free" => Ok(Scenario::Free),
            "linear" => Ok(Scenario::Linear),
            "harmonic-ground" => Ok(Scenario::HarmonicGround),
            "harmonic-coherent" => Ok(Scenario::HarmonicCoherent),
            other => Err(format!(
                "unknown scenario '{other}' (expected free, linear, harmonic-ground or harmonic-coherent)"
            )),
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scenario::Free => "free",
            Scenario::Linear => "linear",
            Scenario::HarmonicGround => "harmonic-ground",
            Scenario::HarmonicCoherent => "harmonic-coherent",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReferenceError {
    #[error("scenario {scenario} does not apply: {reason}")]
    NotApplicable { scenario: Scenario, reason: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn not_applicable(scenario: Scenario, reason: impl Into<String>) -> ReferenceError {
    ReferenceError::NotApplicable {
        scenario,
        reason: reason.into(),
    }
}

/// Angular frequency if the potential is `V0 + c2 x^2` with constant `c2 > 0`.
fn harmonic_frequency(potential: &PotentialModel, params: &PhysicalParams) -> Option<f64> {
    if !potential.is_time_independent() || potential.degree() != 2 || potential.term(1).is_some() {
        return None;
    }
    let c2 = potential.term(2)?.as_const()?;
    (c2 > 0.0).then(|| (2.0 * c2 / params.mass()).sqrt())
}

fn ground_width_matches(alpha2: C64, omega: f64, params: &PhysicalParams) -> bool {
    let want = -params.mass() * omega / (2.0 * params.hbar());
    (alpha2 - want).norm() <= 1e-12 * want.abs()
}

/// Pick the scenario that applies to this initial state and potential, if any.
pub fn detect_scenario(
    initial: &CoefficientState,
    potential: &PotentialModel,
    params: &PhysicalParams,
) -> Option<Scenario> {
    if initial.support_index(0.0).unwrap_or(0) > 2 || potential.degree() > 2 {
        return None;
    }
    if potential.is_empty() {
        return Some(Scenario::Free);
    }
    if let Some(omega) = harmonic_frequency(potential, params) {
        if ground_width_matches(initial.alpha(2), omega, params) {
            return Some(if initial.alpha(1) == C64::new(0.0, 0.0) {
                Scenario::HarmonicGround
            } else {
                Scenario::HarmonicCoherent
            });
        }
        return None;
    }
    if potential.degree() <= 1 && initial.alpha(2) == C64::new(0.0, 0.0) {
        return Some(Scenario::Linear);
    }
    None
}

/// The exact state at `initial.time() + elapsed` for `scenario`.
pub fn exact_state(
    scenario: Scenario,
    initial: &CoefficientState,
    potential: &PotentialModel,
    params: &PhysicalParams,
    elapsed: f64,
) -> Result<CoefficientState, ReferenceError> {
    if initial.support_index(0.0).unwrap_or(0) > 2 {
        return Err(not_applicable(scenario, "initial support extends beyond alpha_2"));
    }
    let (a0, a1, a2) = (initial.alpha(0), initial.alpha(1), initial.alpha(2));
    let kappa = params.kinetic_factor();
    let i = C64::new(0.0, 1.0);
    let hbar = params.hbar();
    let t = elapsed;

    let leading: [C64; 3] = match scenario {
        Scenario::Free => {
            if !potential.is_empty() {
                return Err(not_applicable(scenario, "potential is not zero"));
            }
            let d = 1.0 - 4.0 * kappa * a2 * t;
            [a0 - 0.5 * d.ln() + kappa * a1 * a1 * t / d, a1 / d, a2 / d]
        }
        Scenario::HarmonicGround | Scenario::HarmonicCoherent => {
            let omega = harmonic_frequency(potential, params)
                .ok_or_else(|| not_applicable(scenario, "potential is not V0 + c x^2 with constant c > 0"))?;
            if !ground_width_matches(a2, omega, params) {
                return Err(not_applicable(scenario, "alpha_2 is not -m w / 2 hbar"));
            }
            if scenario == Scenario::HarmonicGround && a1 != C64::new(0.0, 0.0) {
                return Err(not_applicable(scenario, "alpha_1 is not zero"));
            }
            let v0 = potential.term(0).and_then(TimeProfile::as_const).unwrap_or(0.0);
            let rot = C64::from_polar(1.0, -omega * t);
            let shift = params.hbar() / (4.0 * params.mass() * omega) * a1 * a1 * (1.0 - rot * rot);
            [a0 - i * (0.5 * omega + v0 / hbar) * t + shift, a1 * rot, a2]
        }
        Scenario::Linear => {
            if potential.degree() > 1 {
                return Err(not_applicable(scenario, "potential has degree above 1"));
            }
            if a2 != C64::new(0.0, 0.0) {
                return Err(not_applicable(scenario, "alpha_2 is not zero"));
            }
            linear_solution(a0, a1, potential, params, initial.time(), t)?
        }
    };
    Ok(CoefficientState::from_leading(&leading, initial.truncation_order(), initial.time() + t)
        .expect("closed-form coefficients are finite for finite inputs"))
}

// Five-point Gauss-Legendre rule on [-1, 1].
const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];
const PANELS: usize = 64;

fn integrate<F>(a: f64, b: f64, mut f: F) -> Result<C64, EvalError>
where
    F: FnMut(f64) -> Result<C64, EvalError>,
{
    let h = (b - a) / PANELS as f64;
    let mut sum = C64::new(0.0, 0.0);
    for p in 0..PANELS {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            sum += w * f(mid + 0.5 * h * x)?;
        }
    }
    Ok(sum * (0.5 * h))
}

/// `alpha_1(t) = a1 - (i/hbar) int f1`, `alpha_0(t) = a0 + int (kappa alpha_1^2 - (i/hbar) f0)`
/// by composite Gauss-Legendre quadrature.
fn linear_solution(
    a0: C64,
    a1: C64,
    potential: &PotentialModel,
    params: &PhysicalParams,
    t0: f64,
    elapsed: f64,
) -> Result<[C64; 3], EvalError> {
    let kappa = params.kinetic_factor();
    let forcing = params.potential_factor();
    let profile = |n: usize, s: f64| -> Result<C64, EvalError> {
        Ok(C64::new(
            potential.term(n).map(|p| p.eval(s)).transpose()?.unwrap_or(0.0),
            0.0,
        ))
    };
    let alpha1 = |s: f64| -> Result<C64, EvalError> {
        Ok(a1 + forcing * integrate(t0, s, |u| profile(1, u))?)
    };
    let end = t0 + elapsed;
    let a1_end = alpha1(end)?;
    let a0_end = a0
        + integrate(t0, end, |s| {
            let a = alpha1(s)?;
            Ok(kappa * a * a + forcing * profile(0, s)?)
        })?;
    Ok([a0_end, a1_end, C64::new(0.0, 0.0)])
}
