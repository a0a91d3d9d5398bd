//! The batch commands behind the `tdse` binary.
//!
//! Each command returns an [`Outcome`] (exit code and one status line for
//! standard output) or a [`CommandError`] whose exit code follows the
//! contract: 2 for configuration and validation errors, 4 for potential
//! expression errors. A run whose coefficients blow up exits with 3 after
//! writing whatever it produced.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::RunConfig;
use crate::csv;
use crate::initialization::fit_log_polynomial;
use crate::integrators::{propagate, StepperConfig, Trajectory, TrajectoryStatus};
use crate::oracle::{compare_methods, l2_distance, split_step_evolve, OracleConfig, OracleError};
use crate::potential::{EvalError, PotentialModel};
use crate::reconstruction::{evaluate_on_grid, normalizability_check, observables, GridError};
use crate::reference::{detect_scenario, exact_state, Scenario};
use crate::series::CoefficientState;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BLOWUP: i32 = 3;
pub const EXIT_POTENTIAL: i32 = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CommandError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Potential(String),
    #[error("{0}")]
    Io(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) => EXIT_CONFIG,
            CommandError::Potential(_) => EXIT_POTENTIAL,
            CommandError::Io(_) => EXIT_IO,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub status: String,
}

fn io_err(path: &Path, e: std::io::Error) -> CommandError {
    CommandError::Io(format!("{}: {e}", path.display()))
}

fn eval_err(e: EvalError) -> CommandError {
    CommandError::Potential(format!("potential: {e}"))
}

fn grid_err(e: GridError) -> CommandError {
    CommandError::Config(format!("reconstruction: {e}"))
}

fn oracle_err(e: OracleError) -> CommandError {
    match e {
        OracleError::Eval(e) => eval_err(e),
        OracleError::Grid(e) => grid_err(e),
        other => CommandError::Config(format!("oracle: {other}")),
    }
}

fn load_config(path: &Path) -> Result<RunConfig, CommandError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CommandError::Config(format!("cannot read config {}: {e}", path.display())))?;
    text.parse()
        .map_err(|e| CommandError::Config(format!("{}: {e}", path.display())))
}

fn load_potential(cfg: &RunConfig, path: &Path) -> Result<PotentialModel, CommandError> {
    PotentialModel::parse(&cfg.potential).map_err(|e| {
        let line = cfg.potential_line.map(|l| format!("line {l}: ")).unwrap_or_default();
        CommandError::Potential(format!(
            "{}: {line}expression column {}: {e}",
            path.display(),
            e.position() + 1
        ))
    })
}

fn output_dir(cfg: &RunConfig, out: Option<&Path>) -> Result<PathBuf, CommandError> {
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .ok_or_else(|| CommandError::Config("no output directory: pass --out or set [output] directory".into()))?;
    fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
    Ok(dir)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CommandError> {
    let path = dir.join(name);
    csv::write(&path, contents).map_err(|e| io_err(&path, e))
}

fn status_word(status: TrajectoryStatus) -> &'static str {
    match status {
        TrajectoryStatus::Completed => "completed",
        TrajectoryStatus::AbortedBlowup { .. } => "aborted_blowup",
    }
}

fn exit_for(status: TrajectoryStatus) -> i32 {
    match status {
        TrajectoryStatus::Completed => EXIT_OK,
        TrajectoryStatus::AbortedBlowup { .. } => EXIT_BLOWUP,
    }
}

/// Propagate the configured initial state and write `coefficients.csv`,
/// `observables.csv` and `wavefunction_final.csv`.
///
/// Observables stop at the first snapshot that cannot be sampled on the grid.
/// That is a validation error (exit 2) unless the run blew up, in which case
/// the blow-up status (exit 3) is reported.
pub fn run_command(config_path: &Path, out: Option<&Path>) -> Result<Outcome, CommandError> {
    let cfg = load_config(config_path)?;
    let potential = load_potential(&cfg, config_path)?;
    let grid = cfg
        .grid
        .ok_or_else(|| CommandError::Config("run needs a [grid] section".into()))?;
    let initial = cfg.initial_state();
    if !normalizability_check(&initial, 0.0) {
        return Err(CommandError::Config(
            "initial state is not normalizable: the highest nonzero coefficient must have an even index >= 2 and a negative real part".into(),
        ));
    }
    evaluate_on_grid(&initial, grid.xmin, grid.xmax, grid.points).map_err(|e| {
        CommandError::Config(format!("initial state cannot be sampled on the grid: {e}"))
    })?;
    let dir = output_dir(&cfg, out)?;

    let traj = propagate(&initial, &potential, &cfg.params, &cfg.stepper).map_err(eval_err)?;
    write_file(&dir, "coefficients.csv", &csv::coefficients_csv(&traj))?;

    let mut rows = Vec::with_capacity(traj.snapshots().len());
    let mut failure = None;
    let mut last_grid = None;
    for snap in traj.snapshots() {
        let sampled = evaluate_on_grid(snap, grid.xmin, grid.xmax, grid.points)
            .and_then(|g| observables(&g, &cfg.params).map(|o| (g, o)));
        match sampled {
            Ok((g, o)) => {
                rows.push((snap.time(), o));
                last_grid = Some(g);
            }
            Err(e) => {
                failure = Some((snap.time(), format!("reconstruction at t = {}: {e}", snap.time())));
                break;
            }
        }
    }
    write_file(&dir, "observables.csv", &csv::observables_csv(&rows))?;
    if let Some(g) = &last_grid {
        write_file(&dir, "wavefunction_final.csv", &csv::wavefunction_csv(g))?;
    }
    // a blow-up outranks the reconstruction failures it causes on the way
    let aborted = !traj.is_completed();
    if let (Some((_, msg)), false) = (&failure, aborted) {
        return Err(CommandError::Config(msg.clone()));
    }

    let last = traj.last();
    let mut pairs = vec![
        ("status", status_word(traj.status()).to_string()),
        ("t", csv::fmt_f64(last.time())),
        ("snapshots", traj.snapshots().len().to_string()),
    ];
    if let TrajectoryStatus::AbortedBlowup { time } = traj.status() {
        pairs.push(("blowup_t", csv::fmt_f64(time)));
    }
    if let Some((t, _)) = failure {
        pairs.push(("reconstruction_failed_t", csv::fmt_f64(t)));
    }
    Ok(Outcome {
        exit_code: exit_for(traj.status()),
        status: csv::status_line(&pairs),
    })
}

fn oracle_config(cfg: &RunConfig, default_dt: f64, default_steps: usize) -> Result<OracleConfig, CommandError> {
    let grid = cfg
        .grid
        .ok_or_else(|| CommandError::Config("the oracle needs a [grid] section".into()))?;
    let spec = cfg.oracle.unwrap_or(crate::config::OracleSpec { dt: None, steps: None });
    OracleConfig::new(
        grid.xmin,
        grid.xmax,
        grid.points,
        spec.dt.unwrap_or(default_dt),
        spec.steps.unwrap_or(default_steps),
    )
    .map_err(oracle_err)
}

/// What [`converge_command`] measures errors against.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvergenceReference {
    ClosedForm(Scenario),
    Oracle,
}

fn final_only(cfg: &StepperConfig, dt: f64, steps: usize) -> StepperConfig {
    StepperConfig::new(cfg.integrator(), dt, steps)
        .and_then(|c| c.with_snapshot_stride(steps))
        .and_then(|c| c.with_blowup_threshold(cfg.blowup_threshold()))
        .expect("halving a valid configuration stays valid")
}

/// Run at `dt, dt/2, ..., dt/2^halvings` over the same horizon and write
/// `convergence.csv` with the final-time error of each run and the ratio of
/// successive errors.
pub fn converge_command(config_path: &Path, halvings: usize, out: Option<&Path>) -> Result<Outcome, CommandError> {
    let cfg = load_config(config_path)?;
    let potential = load_potential(&cfg, config_path)?;
    let initial = cfg.initial_state();
    let horizon = cfg.stepper.horizon();

    let reference = match cfg.scenario.or_else(|| detect_scenario(&initial, &potential, &cfg.params)) {
        Some(s) => ConvergenceReference::ClosedForm(s),
        None if cfg.oracle_fallback => ConvergenceReference::Oracle,
        None => {
            return Err(CommandError::Config(
                "no closed-form reference applies to this configuration and oracle_fallback is disabled".into(),
            ))
        }
    };

    enum Target {
        Exact(CoefficientState),
        Grid(OracleConfig, crate::reconstruction::WaveGrid),
    }
    let target = match &reference {
        ConvergenceReference::ClosedForm(s) => Target::Exact(
            exact_state(*s, &initial, &potential, &cfg.params, horizon)
                .map_err(|e| CommandError::Config(format!("reference: {e}")))?,
        ),
        ConvergenceReference::Oracle => {
            // default oracle step: four times finer than the finest run
            let finest = cfg.stepper.dt() / f64::powi(2.0, halvings as i32 + 2);
            let steps = cfg.stepper.steps() << (halvings + 2);
            let ocfg = oracle_config(&cfg, finest, steps)?;
            if (ocfg.horizon() - horizon).abs() > crate::oracle::HORIZON_TOLERANCE {
                return Err(CommandError::Config(format!(
                    "oracle horizon {} differs from the run horizon {horizon}",
                    ocfg.horizon()
                )));
            }
            let start = ocfg.sample(&initial).map_err(grid_err)?;
            let grids = split_step_evolve(&start, &potential, &cfg.params, &ocfg).map_err(oracle_err)?;
            let last = grids.into_iter().last().expect("oracle returns the initial grid at least");
            Target::Grid(ocfg, last)
        }
    };
    let dir = output_dir(&cfg, out)?;

    let mut rows: Vec<(f64, f64, Option<f64>)> = Vec::new();
    let mut blowup = None;
    for k in 0..=halvings {
        let dt = cfg.stepper.dt() / f64::powi(2.0, k as i32);
        let steps = cfg.stepper.steps() << k;
        let traj: Trajectory = propagate(&initial, &potential, &cfg.params, &final_only(&cfg.stepper, dt, steps))
            .map_err(eval_err)?;
        if let TrajectoryStatus::AbortedBlowup { time } = traj.status() {
            blowup = Some((dt, time));
            break;
        }
        let end = traj.last();
        let error = match &target {
            Target::Exact(exact) => end
                .alphas()
                .iter()
                .zip(exact.alphas())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
            Target::Grid(ocfg, grid) => {
                let flow = ocfg.sample(end).map_err(grid_err)?;
                l2_distance(grid, &flow).map_err(oracle_err)?
            }
        };
        let ratio = rows.last().map(|(_, prev, _)| prev / error);
        rows.push((dt, error, ratio));
    }
    write_file(&dir, "convergence.csv", &csv::convergence_csv(&rows))?;

    let reference_name = match &reference {
        ConvergenceReference::ClosedForm(s) => s.to_string(),
        ConvergenceReference::Oracle => "oracle".to_string(),
    };
    let mut pairs = vec![("reference", reference_name), ("runs", rows.len().to_string())];
    let (code, word) = match blowup {
        Some((dt, time)) => {
            pairs.push(("blowup_dt", csv::fmt_f64(dt)));
            pairs.push(("blowup_t", csv::fmt_f64(time)));
            (EXIT_BLOWUP, "aborted_blowup")
        }
        None => (EXIT_OK, "completed"),
    };
    pairs.insert(0, ("status", word.to_string()));
    Ok(Outcome {
        exit_code: code,
        status: csv::status_line(&pairs),
    })
}

/// Run the coefficient flow against the split-step oracle and write `compare.csv`.
pub fn compare_command(config_path: &Path, out: Option<&Path>) -> Result<Outcome, CommandError> {
    let cfg = load_config(config_path)?;
    let potential = load_potential(&cfg, config_path)?;
    let initial = cfg.initial_state();
    let ocfg = oracle_config(&cfg, cfg.stepper.dt(), cfg.stepper.steps())?;
    let report = compare_methods(&initial, &potential, &cfg.params, &cfg.stepper, &ocfg).map_err(oracle_err)?;
    let dir = output_dir(&cfg, out)?;
    write_file(&dir, "compare.csv", &csv::compare_csv(&report.rows))?;
    let mut pairs = vec![
        ("status", status_word(report.flow_status).to_string()),
        ("rows", report.rows.len().to_string()),
        ("max_l2_distance", csv::fmt_f64(report.max_distance())),
    ];
    if let TrajectoryStatus::AbortedBlowup { time } = report.flow_status {
        pairs.push(("blowup_t", csv::fmt_f64(time)));
    }
    Ok(Outcome {
        exit_code: exit_for(report.flow_status),
        status: csv::status_line(&pairs),
    })
}

/// Fit a log-polynomial to `x,psi_re,psi_im` samples and write `n,alpha_re,alpha_im`.
pub fn fit_command(samples_path: &Path, degree: usize, out: &Path) -> Result<Outcome, CommandError> {
    let samples = csv::read_samples(samples_path)
        .map_err(|e| CommandError::Config(format!("{}: {e}", samples_path.display())))?;
    let fit = fit_log_polynomial(&samples, degree).map_err(|e| CommandError::Config(format!("fit: {e}")))?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    csv::write(out, &csv::fit_csv(&fit)).map_err(|e| io_err(out, e))?;
    Ok(Outcome {
        exit_code: EXIT_OK,
        status: csv::status_line(&[
            ("status", "completed".to_string()),
            ("degree", degree.to_string()),
            ("rms_residual", csv::fmt_f64(fit.rms_residual)),
            ("max_residual", csv::fmt_f64(fit.max_residual)),
        ]),
    })
}
