//! A displaced ground state of the harmonic oscillator keeps its shape and
//! swings back and forth: alpha_1 rotates as e^{-i t}.

use tdse_core::{
    evaluate_on_grid, observables, propagate, CoefficientState, Integrator, PhysicalParams, PotentialModel,
    StepperConfig, C64,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = PhysicalParams::natural();
    let well = PotentialModel::parse("x^2/2")?;
    let initial = CoefficientState::from_real(&[0.0, 1.0, -0.5], 2)?;
    let steps = 1000;
    let cfg = StepperConfig::new(Integrator::Rk4, std::f64::consts::TAU / steps as f64, steps)?
        .with_snapshot_stride(125)?;
    let traj = propagate(&initial, &well, &params, &cfg)?;

    println!("{:>6} {:>10} {:>10} {:>12}", "t", "<x>", "cos t", "|a1 - e^-it|");
    for snap in traj.snapshots() {
        let t = snap.time();
        let obs = observables(&evaluate_on_grid(snap, -10.0, 10.0, 1001)?, &params)?;
        let drift = (snap.alpha(1) - C64::from_polar(1.0, -t)).norm();
        println!("{t:6.3} {:10.6} {:10.6} {drift:12.3e}", obs.mean_x, t.cos());
    }
    Ok(())
}
