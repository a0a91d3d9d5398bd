//! Time-dependent Schrödinger equation in one dimension, solved by evolving
//! the coefficients of a log-polynomial wavefunction
//! `psi(x, t) = exp(sum_n alpha_n(t) x^n)`.
//!
//! The pieces:
//!
//! - [`series`]: coefficient states and the coefficient-flow right-hand side.
//! - [`integrators`]: forward Euler and RK4 steppers, the propagation loop.
//! - [`initialization`]: Gaussian packets and log-polynomial fits of samples.
//! - [`potential`]: a small language for potentials polynomial in `x`.
//! - [`reconstruction`]: sampling on a grid, norms and expectation values.
//! - [`oracle`]: an independent split-step Fourier propagator for validation.
//! - [`reference`]: closed-form coefficient solutions for exactly solvable cases.
//! - [`config`], [`csv`] and [`commands`]: the batch front-end behind the `tdse` binary.
//!
//! ## Examples
//!
//! ```bash
//! cargo run --example free_packet          # spreading packet vs the closed form
//! cargo run --example coherent_state       # harmonic oscillation of a displaced ground state
//! cargo run --example potential_language   # text potentials and their Taylor coefficients
//! cargo run --example fit_samples          # coefficients recovered from samples
//! cargo run --example oracle_compare       # anharmonic well, truncated series vs grid
//! cargo run --example convergence          # observed order of Euler and RK4
//! ```
//!
//! Configurations for the binary live in `examples/configs/`.

pub mod commands;
pub mod config;
pub mod csv;
pub mod initialization;
pub mod integrators;
pub mod oracle;
pub mod potential;
pub mod reconstruction;
pub mod reference;
pub mod series;

pub use initialization::{
    fit_log_polynomial, gaussian_coefficients, is_closed_system, support_bound_after_step, GaussianPacket,
    LogPolyFit,
};
pub use integrators::{
    detect_blowup, euler_step, propagate, rk4_step, Integrator, StepperConfig, Trajectory, TrajectoryStatus,
};
pub use oracle::{compare_methods, l2_distance, split_step_evolve, CompareReport, OracleConfig};
pub use potential::{eval_potential_at, eval_taylor_coefficients, parse_potential, PotentialModel, TimeProfile};
pub use reconstruction::{
    evaluate_on_grid, norm_squared, normalizability_check, observables, Observables, WaveGrid,
};
pub use series::{coefficient_velocity, convolution_term, CoefficientState, PhysicalParams, VelocityVector, C64};
