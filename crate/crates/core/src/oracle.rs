//! Independent grid propagator used to validate the coefficient flow.
//!
//! Strang splitting on a periodic grid: a half-step potential phase, a full
//! kinetic step applied in Fourier space, and another half-step potential
//! phase. Both potential phases use the potential at the interval midpoint.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use thiserror::Error;

use crate::integrators::{propagate, StepperConfig, TrajectoryStatus};
use crate::potential::{horner, EvalError, PotentialModel};
use crate::reconstruction::{evaluate_on_lattice, norm_squared, observables, trapezoid, trapezoid_c, GridError, WaveGrid};
use crate::series::{CoefficientState, PhysicalParams, C64};

pub const MIN_ORACLE_POINTS: usize = 256;
/// Edge magnitude relative to the peak above which periodic wrap-around is
/// considered to corrupt the solution.
pub const EDGE_LEAKAGE_LIMIT: f64 = 1e-6;
/// Allowed mismatch between the coefficient-flow and oracle time horizons.
pub const HORIZON_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("oracle grid needs a power-of-two number of points >= {MIN_ORACLE_POINTS}, got {0}")]
    BadPointCount(usize),
    #[error("oracle domain [{xmin}, {xmax}] is empty or not finite")]
    BadDomain { xmin: f64, xmax: f64 },
    #[error("oracle dt must be positive and finite, got {0}")]
    BadDt(f64),
    #[error("snapshot stride must be at least 1")]
    BadStride,
    #[error("grids differ in origin, spacing or length")]
    GridMismatch,
    #[error("edge magnitude reached {ratio:e} of the peak at t = {time}; widen the domain")]
    EdgeLeakage { time: f64, ratio: f64 },
    #[error("time horizons differ: coefficient flow {flow}, oracle {oracle}")]
    HorizonMismatch { flow: f64, oracle: f64 },
    #[error("a wavefunction has zero norm")]
    ZeroNorm,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Periodic domain `[xmin, xmax)` sampled at `xmin + j (xmax - xmin) / points`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    xmin: f64,
    xmax: f64,
    points: usize,
    dt: f64,
    steps: usize,
    snapshot_stride: usize,
}

impl OracleConfig {
    /// Records only the initial and final grids unless a stride is set.
    pub fn new(xmin: f64, xmax: f64, points: usize, dt: f64, steps: usize) -> Result<Self, OracleError> {
        if !(xmin.is_finite() && xmax.is_finite() && xmax > xmin) {
            return Err(OracleError::BadDomain { xmin, xmax });
        }
        if points < MIN_ORACLE_POINTS || !points.is_power_of_two() {
            return Err(OracleError::BadPointCount(points));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(OracleError::BadDt(dt));
        }
        Ok(Self {
            xmin,
            xmax,
            points,
            dt,
            steps,
            snapshot_stride: steps.max(1),
        })
    }

    pub fn with_snapshot_stride(mut self, stride: usize) -> Result<Self, OracleError> {
        if stride == 0 {
            return Err(OracleError::BadStride);
        }
        self.snapshot_stride = stride;
        Ok(self)
    }

    pub fn xmin(&self) -> f64 {
        self.xmin
    }

    pub fn xmax(&self) -> f64 {
        self.xmax
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn snapshot_stride(&self) -> usize {
        self.snapshot_stride
    }

    pub fn dx(&self) -> f64 {
        (self.xmax - self.xmin) / self.points as f64
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.steps as f64
    }

    /// Sample a coefficient state on this configuration's lattice.
    pub fn sample(&self, state: &CoefficientState) -> Result<WaveGrid, GridError> {
        evaluate_on_lattice(state, self.xmin, self.dx(), self.points)
    }

    fn matches(&self, grid: &WaveGrid) -> bool {
        grid.len() == self.points
            && (grid.xmin() - self.xmin).abs() <= 1e-12 * (1.0 + self.xmin.abs())
            && (grid.dx() - self.dx()).abs() <= 1e-12 * self.dx()
    }
}

fn edge_ratio(values: &[C64]) -> f64 {
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let edge = values[0].norm().max(values[values.len() - 1].norm());
    edge / peak
}

struct Propagator {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    kinetic: Vec<C64>,
    scratch: Vec<C64>,
}

impl Propagator {
    fn new(cfg: &OracleConfig, params: &PhysicalParams) -> Self {
        let m = cfg.points;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let length = cfg.xmax - cfg.xmin;
        let factor = params.hbar() * cfg.dt / (2.0 * params.mass());
        let kinetic = (0..m)
            .map(|j| {
                let idx = if j < m / 2 { j as f64 } else { j as f64 - m as f64 };
                let k = 2.0 * PI * idx / length;
                C64::from_polar(1.0 / m as f64, -factor * k * k)
            })
            .collect();
        let scratch = vec![C64::new(0.0, 0.0); forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len())];
        Self {
            forward,
            inverse,
            kinetic,
            scratch,
        }
    }

    fn kinetic_step(&mut self, psi: &mut [C64]) {
        self.forward.process_with_scratch(psi, &mut self.scratch);
        for (v, k) in psi.iter_mut().zip(&self.kinetic) {
            *v *= k;
        }
        self.inverse.process_with_scratch(psi, &mut self.scratch);
    }
}

/// Half-step phase factors `exp(-i V(x, t) dt / 2 hbar)` on the lattice.
fn half_phase(
    potential: &PotentialModel,
    cfg: &OracleConfig,
    params: &PhysicalParams,
    t: f64,
) -> Result<Vec<C64>, EvalError> {
    let coeffs = potential.taylor_coefficients(t, potential.degree())?;
    let scale = -cfg.dt / (2.0 * params.hbar());
    Ok((0..cfg.points)
        .map(|j| {
            let x = cfg.xmin + j as f64 * cfg.dx();
            C64::from_polar(1.0, scale * horner(&coeffs, x))
        })
        .collect())
}

/// Evolve `initial` for `cfg.steps()` split steps.
///
/// Returns the initial grid, every `snapshot_stride`-th grid and the final
/// grid. Fails with [`OracleError::EdgeLeakage`] if a snapshot has
/// significant amplitude at the domain edge.
pub fn split_step_evolve(
    initial: &WaveGrid,
    potential: &PotentialModel,
    params: &PhysicalParams,
    cfg: &OracleConfig,
) -> Result<Vec<WaveGrid>, OracleError> {
    if !cfg.matches(initial) {
        return Err(OracleError::GridMismatch);
    }
    let check = |grid: &WaveGrid| -> Result<(), OracleError> {
        let ratio = edge_ratio(grid.values());
        if ratio > EDGE_LEAKAGE_LIMIT {
            return Err(OracleError::EdgeLeakage { time: grid.time(), ratio });
        }
        Ok(())
    };
    check(initial)?;
    let mut out = vec![initial.clone()];
    if cfg.steps == 0 {
        return Ok(out);
    }

    let mut prop = Propagator::new(cfg, params);
    let static_phase = if potential.is_time_independent() {
        Some(half_phase(potential, cfg, params, 0.0)?)
    } else {
        None
    };
    let t0 = initial.time();
    let mut psi = initial.values().to_vec();
    for p in 1..=cfg.steps {
        let mid = t0 + (p as f64 - 0.5) * cfg.dt;
        let phase = match &static_phase {
            Some(ph) => std::borrow::Cow::Borrowed(ph),
            None => std::borrow::Cow::Owned(half_phase(potential, cfg, params, mid)?),
        };
        psi.iter_mut().zip(phase.iter()).for_each(|(v, f)| *v *= f);
        prop.kinetic_step(&mut psi);
        psi.iter_mut().zip(phase.iter()).for_each(|(v, f)| *v *= f);
        if p % cfg.snapshot_stride == 0 || p == cfg.steps {
            let grid = initial.with_values(psi.clone(), t0 + p as f64 * cfg.dt);
            check(&grid)?;
            out.push(grid);
        }
    }
    Ok(out)
}

fn same_lattice(a: &WaveGrid, b: &WaveGrid) -> bool {
    a.len() == b.len()
        && (a.xmin() - b.xmin()).abs() <= 1e-12 * (1.0 + a.xmin().abs())
        && (a.dx() - b.dx()).abs() <= 1e-12 * a.dx()
}

/// L2 distance between two wavefunctions after normalizing each and removing
/// the relative global phase.
pub fn l2_distance(a: &WaveGrid, b: &WaveGrid) -> Result<f64, OracleError> {
    if !same_lattice(a, b) {
        return Err(OracleError::GridMismatch);
    }
    let dx = a.dx();
    let (na, nb) = (norm_squared(a), norm_squared(b));
    if !(na > 0.0 && nb > 0.0) {
        return Err(OracleError::ZeroNorm);
    }
    let (sa, sb) = (na.sqrt(), nb.sqrt());
    let overlap = trapezoid_c(dx, a.values().iter().zip(b.values()).map(|(x, y)| x.conj() * y)) / (sa * sb);
    let align = if overlap.norm() > 0.0 {
        overlap.conj() / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let dist2 = trapezoid(
        dx,
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x / sa - y * align / sb).norm_sqr()),
    );
    Ok(dist2.max(0.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareRow {
    pub t: f64,
    pub l2_distance: f64,
    /// `<x>` from the coefficient flow minus `<x>` from the oracle.
    pub d_mean_x: f64,
    /// Unnormalized `norm^2` from the coefficient flow minus the oracle's.
    pub d_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub flow_status: TrajectoryStatus,
}

impl CompareReport {
    pub fn final_row(&self) -> Option<&CompareRow> {
        self.rows.last()
    }

    pub fn max_distance(&self) -> f64 {
        self.rows.iter().map(|r| r.l2_distance).fold(0.0, f64::max)
    }
}

/// Run the coefficient flow and the oracle from the same initial state and
/// compare them at every snapshot time the two runs share.
pub fn compare_methods(
    initial: &CoefficientState,
    potential: &PotentialModel,
    params: &PhysicalParams,
    stepper: &StepperConfig,
    oracle: &OracleConfig,
) -> Result<CompareReport, OracleError> {
    let (flow_t, oracle_t) = (stepper.horizon(), oracle.horizon());
    if (flow_t - oracle_t).abs() > HORIZON_TOLERANCE {
        return Err(OracleError::HorizonMismatch {
            flow: flow_t,
            oracle: oracle_t,
        });
    }

    // pick an oracle stride landing on the flow's snapshot times when possible
    let interval = stepper.snapshot_stride() as f64 * stepper.dt();
    let ratio = interval / oracle.dt();
    let stride = if (ratio - ratio.round()).abs() <= 1e-9 * ratio.max(1.0) && ratio.round() >= 1.0 {
        ratio.round() as usize
    } else {
        oracle.steps().max(1)
    };
    let oracle = oracle.clone().with_snapshot_stride(stride)?;

    let start = oracle.sample(initial)?;
    let grids = split_step_evolve(&start, potential, params, &oracle)?;
    let traj = propagate(initial, potential, params, stepper)?;

    let mut rows = Vec::new();
    let mut grid_iter = grids.iter().peekable();
    for snap in traj.snapshots() {
        let t = snap.time();
        let tol = 1e-9 * (1.0 + t.abs());
        while grid_iter.peek().is_some_and(|g| g.time() < t - tol) {
            grid_iter.next();
        }
        let Some(grid) = grid_iter.peek() else { break };
        if (grid.time() - t).abs() > tol {
            continue;
        }
        let flow_grid = oracle.sample(snap)?;
        let flow_obs = observables(&flow_grid, params)?;
        let oracle_obs = observables(grid, params)?;
        rows.push(CompareRow {
            t,
            l2_distance: l2_distance(grid, &flow_grid)?,
            d_mean_x: flow_obs.mean_x - oracle_obs.mean_x,
            d_norm: flow_obs.norm2 - oracle_obs.norm2,
        });
    }
    Ok(CompareReport {
        rows,
        flow_status: traj.status(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initialization::{gaussian_coefficients, GaussianPacket};
    use crate::integrators::Integrator;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn gaussian_grid(cfg: &OracleConfig, x0: f64, sigma: f64, k0: f64) -> WaveGrid {
        let s = gaussian_coefficients(&GaussianPacket::new(x0, sigma, k0).unwrap(), 2).unwrap();
        cfg.sample(&s).unwrap()
    }

    #[test]
    fn zero_steps_is_identity() {
        let cfg = OracleConfig::new(-20.0, 20.0, 256, 0.01, 0).unwrap();
        let g = gaussian_grid(&cfg, 0.0, 1.0, 0.0);
        let out = split_step_evolve(&g, &PotentialModel::zero(), &PhysicalParams::natural(), &cfg).unwrap();
        assert_eq!(out, vec![g]);
    }

    #[test]
    fn config_validation() {
        assert_eq!(OracleConfig::new(0.0, 1.0, 300, 0.1, 1), Err(OracleError::BadPointCount(300)));
        assert_eq!(OracleConfig::new(0.0, 1.0, 128, 0.1, 1), Err(OracleError::BadPointCount(128)));
        assert!(OracleConfig::new(1.0, 0.0, 256, 0.1, 1).is_err());
        assert!(OracleConfig::new(0.0, 1.0, 256, 0.0, 1).is_err());
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let cfg = OracleConfig::new(-20.0, 20.0, 256, 0.01, 1).unwrap();
        let other = OracleConfig::new(-20.0, 20.0, 512, 0.01, 1).unwrap();
        let g = gaussian_grid(&other, 0.0, 1.0, 0.0);
        assert_eq!(
            split_step_evolve(&g, &PotentialModel::zero(), &PhysicalParams::natural(), &cfg),
            Err(OracleError::GridMismatch)
        );
        let a = gaussian_grid(&cfg, 0.0, 1.0, 0.0);
        assert_eq!(l2_distance(&a, &g), Err(OracleError::GridMismatch));
    }

    #[test]
    fn leakage_is_detected() {
        // a fast packet runs into the boundary of a small box
        let cfg = OracleConfig::new(-10.0, 10.0, 256, 0.01, 300).unwrap().with_snapshot_stride(10).unwrap();
        let g = gaussian_grid(&cfg, 0.0, 1.0, 5.0);
        let err = split_step_evolve(&g, &PotentialModel::zero(), &PhysicalParams::natural(), &cfg).unwrap_err();
        assert!(matches!(err, OracleError::EdgeLeakage { .. }), "{err:?}");
    }

    #[test]
    fn distance_examples() {
        let cfg = OracleConfig::new(-20.0, 20.0, 512, 0.01, 1).unwrap();
        let a = gaussian_grid(&cfg, 0.0, 1.0, 0.0);
        assert_eq!(l2_distance(&a, &a).unwrap(), 0.0);
        for theta in [0.3, 1.7, -2.9, PI] {
            let b = a.scaled(C64::from_polar(3.0, theta));
            assert!(l2_distance(&a, &b).unwrap() < 1e-12);
        }
        // even and odd packets are orthogonal
        let odd = a.with_values(
            a.values().iter().enumerate().map(|(j, v)| v * a.x(j)).collect(),
            0.0,
        );
        assert!((l2_distance(&a, &odd).unwrap() - 2f64.sqrt()).abs() < 1e-9);
        let zero = a.scaled(c(0.0, 0.0));
        assert_eq!(l2_distance(&a, &zero), Err(OracleError::ZeroNorm));
    }

    #[test]
    fn free_spreading() {
        let cfg = OracleConfig::new(-25.0, 25.0, 1024, 0.01, 200).unwrap();
        let g = gaussian_grid(&cfg, 0.0, 1.0, 0.0);
        let p = PhysicalParams::natural();
        let out = split_step_evolve(&g, &PotentialModel::zero(), &p, &cfg).unwrap();
        assert_eq!(out.len(), 2);
        let last = out.last().unwrap();
        assert!((last.time() - 2.0).abs() < 1e-12);
        let o = observables(last, &p).unwrap();
        assert!((o.mean_x2 - 2.0).abs() < 1e-3, "{}", o.mean_x2);
    }

    #[test]
    fn harmonic_oscillation() {
        let steps = 2000;
        let cfg = OracleConfig::new(-20.0, 20.0, 512, PI / steps as f64, steps).unwrap();
        let g = gaussian_grid(&cfg, 1.0, 0.5f64.sqrt(), 0.0);
        let p = PhysicalParams::natural();
        let v = PotentialModel::parse("x^2/2").unwrap();
        let out = split_step_evolve(&g, &v, &p, &cfg).unwrap();
        let o = observables(out.last().unwrap(), &p).unwrap();
        assert!((o.mean_x + 1.0).abs() < 1e-3, "{}", o.mean_x);
    }

    #[test]
    fn horizon_mismatch() {
        let s = CoefficientState::from_real(&[0.0, 0.0, -0.25], 2).unwrap();
        let stepper = StepperConfig::new(Integrator::Euler, 0.01, 100).unwrap();
        let oracle = OracleConfig::new(-20.0, 20.0, 256, 0.01, 99).unwrap();
        assert!(matches!(
            compare_methods(&s, &PotentialModel::zero(), &PhysicalParams::natural(), &stepper, &oracle),
            Err(OracleError::HorizonMismatch { .. })
        ));
    }

    #[test]
    fn free_gaussian_methods_agree() {
        let s = CoefficientState::from_real(&[0.0, 0.0, -0.25], 2).unwrap();
        let stepper = StepperConfig::new(Integrator::Rk4, 1e-3, 1000)
            .unwrap()
            .with_snapshot_stride(250)
            .unwrap();
        let oracle = OracleConfig::new(-25.0, 25.0, 1024, 1e-2, 100).unwrap();
        let report =
            compare_methods(&s, &PotentialModel::zero(), &PhysicalParams::natural(), &stepper, &oracle).unwrap();
        let times: Vec<f64> = report.rows.iter().map(|r| r.t).collect();
        assert_eq!(times.len(), 5);
        assert!((times[4] - 1.0).abs() < 1e-12);
        assert!(report.final_row().unwrap().l2_distance <= 1e-4);
        assert!(report.rows.iter().all(|r| r.d_norm.abs() < 1e-6));
    }
}
