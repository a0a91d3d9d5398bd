//! Fixed-step time integration of the coefficient flow.

use thiserror::Error;

use crate::potential::{EvalError, PotentialModel};
use crate::series::{velocity_of, CoefficientState, PhysicalParams, C64};

pub const DEFAULT_BLOWUP_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    /// Forward Euler with the potential sampled at the left end of each step.
    Euler,
    /// Classical four-stage Runge-Kutta.
    Rk4,
}

impl std::str::FromStr for Integrator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euler" => Ok(Integrator::Euler),
            "rk4" => Ok(Integrator::Rk4),
            other => Err(format!("unknown integrator '{other}' (expected euler or rk4)")),
        }
    }
}

impl std::fmt::Display for Integrator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Integrator::Euler => "euler",
            Integrator::Rk4 => "rk4",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepperError {
    #[error("dt must be positive and finite, got {0}")]
    InvalidDt(f64),
    #[error("steps must be at least 1")]
    ZeroSteps,
    #[error("snapshot_stride must be at least 1")]
    ZeroStride,
    #[error("blowup_threshold must be positive, got {0}")]
    InvalidThreshold(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepperConfig {
    dt: f64,
    steps: usize,
    integrator: Integrator,
    blowup_threshold: f64,
    snapshot_stride: usize,
}

impl StepperConfig {
    /// Records every step and uses the default blow-up threshold.
    pub fn new(integrator: Integrator, dt: f64, steps: usize) -> Result<Self, StepperError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(StepperError::InvalidDt(dt));
        }
        if steps == 0 {
            return Err(StepperError::ZeroSteps);
        }
        Ok(Self {
            dt,
            steps,
            integrator,
            blowup_threshold: DEFAULT_BLOWUP_THRESHOLD,
            snapshot_stride: 1,
        })
    }

    pub fn with_snapshot_stride(mut self, stride: usize) -> Result<Self, StepperError> {
        if stride == 0 {
            return Err(StepperError::ZeroStride);
        }
        self.snapshot_stride = stride;
        Ok(self)
    }

    pub fn with_blowup_threshold(mut self, threshold: f64) -> Result<Self, StepperError> {
        if !(threshold > 0.0) {
            return Err(StepperError::InvalidThreshold(threshold));
        }
        self.blowup_threshold = threshold;
        Ok(self)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn integrator(&self) -> Integrator {
        self.integrator
    }

    pub fn blowup_threshold(&self) -> f64 {
        self.blowup_threshold
    }

    pub fn snapshot_stride(&self) -> usize {
        self.snapshot_stride
    }

    /// `dt * steps`.
    pub fn horizon(&self) -> f64 {
        self.dt * self.steps as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectoryStatus {
    Completed,
    /// A coefficient became non-finite or exceeded the threshold at `time`.
    /// The last recorded snapshot is the final state that passed the check.
    AbortedBlowup { time: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    snapshots: Vec<CoefficientState>,
    status: TrajectoryStatus,
}

impl Trajectory {
    pub fn snapshots(&self) -> &[CoefficientState] {
        &self.snapshots
    }

    pub fn status(&self) -> TrajectoryStatus {
        self.status
    }

    pub fn is_completed(&self) -> bool {
        self.status == TrajectoryStatus::Completed
    }

    pub fn initial(&self) -> &CoefficientState {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &CoefficientState {
        self.snapshots.last().expect("trajectory always holds the initial state")
    }
}

fn axpy(base: &[C64], scale: f64, dir: &[C64]) -> Vec<C64> {
    base.iter().zip(dir).map(|(a, d)| a + d * scale).collect()
}

fn velocity_at(
    alphas: &[C64],
    t: f64,
    potential: &PotentialModel,
    params: &PhysicalParams,
) -> Result<Vec<C64>, EvalError> {
    let v = potential.taylor_coefficients(t, alphas.len() - 1)?;
    Ok(velocity_of(alphas, &v, params))
}

/// One forward-Euler step, potential taken at `state.time()`.
pub fn euler_step(
    state: &CoefficientState,
    potential: &PotentialModel,
    params: &PhysicalParams,
    dt: f64,
) -> Result<CoefficientState, EvalError> {
    let t = state.time();
    let k = velocity_at(state.alphas(), t, potential, params)?;
    Ok(CoefficientState::from_raw(axpy(state.alphas(), dt, &k), t + dt))
}

/// One classical RK4 step; the potential is sampled at `t`, `t + dt/2` and `t + dt`.
pub fn rk4_step(
    state: &CoefficientState,
    potential: &PotentialModel,
    params: &PhysicalParams,
    dt: f64,
) -> Result<CoefficientState, EvalError> {
    let t = state.time();
    let a = state.alphas();
    let half = 0.5 * dt;
    let k1 = velocity_at(a, t, potential, params)?;
    let k2 = velocity_at(&axpy(a, half, &k1), t + half, potential, params)?;
    let k3 = velocity_at(&axpy(a, half, &k2), t + half, potential, params)?;
    let k4 = velocity_at(&axpy(a, dt, &k3), t + dt, potential, params)?;
    let next = a
        .iter()
        .enumerate()
        .map(|(n, x)| x + (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]) * (dt / 6.0))
        .collect();
    Ok(CoefficientState::from_raw(next, t + dt))
}

/// True if any coefficient is non-finite or larger than `threshold` in magnitude.
pub fn detect_blowup(state: &CoefficientState, threshold: f64) -> bool {
    state
        .alphas()
        .iter()
        .any(|a| !a.is_finite() || a.norm() > threshold)
}

/// Apply the configured stepper `cfg.steps()` times from `initial`.
///
/// The trajectory holds the initial state, every `snapshot_stride`-th state
/// and the final state. Snapshot times are `t0 + p * dt` rather than a running
/// sum so that long runs do not accumulate drift in the time axis.
pub fn propagate(
    initial: &CoefficientState,
    potential: &PotentialModel,
    params: &PhysicalParams,
    cfg: &StepperConfig,
) -> Result<Trajectory, EvalError> {
    let step = match cfg.integrator {
        Integrator::Euler => euler_step,
        Integrator::Rk4 => rk4_step,
    };
    let t0 = initial.time();
    let mut snapshots = vec![initial.clone()];
    let mut state = initial.clone();
    let mut recorded = true;
    for p in 1..=cfg.steps {
        let next = step(&state, potential, params, cfg.dt)?.with_time(t0 + p as f64 * cfg.dt);
        if detect_blowup(&next, cfg.blowup_threshold) {
            if !recorded {
                snapshots.push(state);
            }
            return Ok(Trajectory {
                snapshots,
                status: TrajectoryStatus::AbortedBlowup { time: next.time() },
            });
        }
        state = next;
        recorded = p % cfg.snapshot_stride == 0 || p == cfg.steps;
        if recorded {
            snapshots.push(state.clone());
        }
    }
    Ok(Trajectory {
        snapshots,
        status: TrajectoryStatus::Completed,
    })
}
