//! Observed order of accuracy: halve dt and watch the final-time error shrink
//! by 2 (Euler) or 16 (RK4).

use tdse_core::reference::{exact_state, Scenario};
use tdse_core::{propagate, CoefficientState, Integrator, PhysicalParams, PotentialModel, StepperConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = PhysicalParams::natural();
    let free = PotentialModel::zero();
    let initial = CoefficientState::from_real(&[0.0, 0.0, -0.25], 2)?;
    let exact = exact_state(Scenario::Free, &initial, &free, &params, 1.0)?;

    for (integrator, dt0) in [(Integrator::Euler, 1e-2f64), (Integrator::Rk4, 1e-1)] {
        println!("{integrator}");
        let mut prev = None;
        for k in 0..5 {
            let steps = (1.0 / dt0).round() as usize * (1 << k);
            let dt = 1.0 / steps as f64;
            let traj = propagate(&initial, &free, &params, &StepperConfig::new(integrator, dt, steps)?)?;
            let err = (traj.last().alpha(2) - exact.alpha(2)).norm();
            match prev {
                Some(p) => println!("  dt = {dt:.5}  error = {err:.3e}  ratio = {:.3}", p / err),
                None => println!("  dt = {dt:.5}  error = {err:.3e}"),
            }
            prev = Some(err);
        }
    }
    Ok(())
}
