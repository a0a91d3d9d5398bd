//! A free Gaussian packet spreads. Its width coefficient obeys a Riccati
//! equation with a closed-form solution, so the flow can be checked exactly.

use tdse_core::reference::{exact_state, Scenario};
use tdse_core::{
    evaluate_on_grid, gaussian_coefficients, observables, propagate, GaussianPacket, Integrator, PhysicalParams,
    PotentialModel, StepperConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = PhysicalParams::natural();
    let free = PotentialModel::zero();
    let initial = gaussian_coefficients(&GaussianPacket::new(0.0, 1.0, 1.0)?, 2)?;
    let cfg = StepperConfig::new(Integrator::Rk4, 1e-2, 200)?.with_snapshot_stride(50)?;
    let traj = propagate(&initial, &free, &params, &cfg)?;

    println!("{:>5} {:>12} {:>12} {:>12}", "t", "<x>", "<x^2>", "|err a2|");
    for snap in traj.snapshots() {
        let grid = evaluate_on_grid(snap, -25.0, 25.0, 2001)?;
        let obs = observables(&grid, &params)?;
        let exact = exact_state(Scenario::Free, &initial, &free, &params, snap.time())?;
        let err = (snap.alpha(2) - exact.alpha(2)).norm();
        println!("{:5.2} {:12.6} {:12.6} {:12.3e}", snap.time(), obs.mean_x, obs.mean_x2, err);
    }
    Ok(())
}
