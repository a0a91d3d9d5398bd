//! Recover log-polynomial coefficients from sampled wavefunction values.

use tdse_core::{fit_log_polynomial, CoefficientState, C64};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // a quartic exponent with a chirp
    let truth = CoefficientState::from_leading(
        &[C64::new(0.1, 0.3), C64::new(0.4, 1.5), C64::new(-0.6, 0.2), C64::new(0.05, 0.0), C64::new(-0.1, 0.0)],
        4,
        0.0,
    )?;
    let samples: Vec<(f64, C64)> = (0..=200)
        .map(|j| {
            let x = -3.0 + 0.03 * j as f64;
            (x, truth.exponent_at(x).exp())
        })
        .collect();

    for degree in [2, 4, 6] {
        let fit = fit_log_polynomial(&samples, degree)?;
        println!("degree {degree}: rms residual {:.3e}", fit.rms_residual);
        for (n, a) in fit.state.alphas().iter().enumerate() {
            println!("  alpha_{n} = {:+.10} {:+.10}i", a.re, a.im);
        }
    }
    Ok(())
}
