use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tdse_core::commands::{compare_command, converge_command, fit_command, run_command, CommandError, Outcome};

/// Log-polynomial coefficient flow for the 1-D time-dependent Schrödinger equation.
#[derive(Parser)]
#[command(name = "tdse", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate a configuration and write coefficients, observables and the final wavefunction.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides [output] directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure the convergence order by repeatedly halving dt.
    Converge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        halvings: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the coefficient flow with the split-step grid oracle.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit log-polynomial coefficients to sampled wavefunction values.
    Fit {
        /// CSV with columns x,psi_re,psi_im, sorted by x.
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        degree: usize,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<Outcome, CommandError> = match &cli.command {
        Command::Run { config, out } => run_command(config, out.as_deref()),
        Command::Converge { config, halvings, out } => converge_command(config, *halvings, out.as_deref()),
        Command::Compare { config, out } => compare_command(config, out.as_deref()),
        Command::Fit { samples, degree, out } => fit_command(samples, *degree, out),
    };
    match result {
        Ok(outcome) => {
            println!("{}", outcome.status);
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
