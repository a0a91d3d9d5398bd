//! Beyond quadratic potentials the series no longer closes. Compare the
//! truncated flow against the split-step grid propagator for an anharmonic well.

use tdse_core::{
    compare_methods, gaussian_coefficients, GaussianPacket, Integrator, OracleConfig, PhysicalParams,
    PotentialModel, StepperConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = PhysicalParams::natural();
    let well = PotentialModel::parse("x^2/2 + 0.01*x^4")?;
    let packet = GaussianPacket::new(0.5, 0.5f64.sqrt(), 0.0)?;
    let oracle = OracleConfig::new(-8.0, 8.0, 512, 1e-4, 5000)?;

    for truncation in [4, 8, 12, 16] {
        let initial = gaussian_coefficients(&packet, truncation)?;
        let flow = StepperConfig::new(Integrator::Rk4, 1e-4, 5000)?.with_snapshot_stride(1000)?;
        let report = compare_methods(&initial, &well, &params, &flow, &oracle)?;
        println!("N = {truncation}");
        for row in &report.rows {
            println!(
                "  t = {:.1}  l2 = {:.3e}  d<x> = {:+.3e}  d|psi|^2 = {:+.3e}",
                row.t, row.l2_distance, row.d_mean_x, row.d_norm
            );
        }
    }
    Ok(())
}
