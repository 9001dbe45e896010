#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod input;
mod table;
mod verify;

#[derive(Parser)]
#[command(name = "su11", version, about = "Exact and numerical su(1,1) dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transition probability of a constant-coefficient scenario.
    RabiCurve(RabiCurveArgs),
    /// Caley-Klein entries a(t), b(t) of the evolution operator.
    Propagator(PropagatorArgs),
    /// Counter-propagating coupled modes A(z), B(z).
    GuidedWave(GuidedWaveArgs),
    /// Normalized density-matrix evolution.
    OpenEvolve(OpenEvolveArgs),
    /// Closed forms against the numerical oracle over a grid of nu.
    Verify(VerifyArgs),
}

#[derive(Args)]
pub struct Output {
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct Integrator {
    /// Relative tolerance of the numerical integrator.
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Absolute tolerance of the numerical integrator.
    #[arg(long)]
    pub abs_tol: Option<f64>,
}

#[derive(Args)]
pub struct RabiCurveArgs {
    /// Solvable scenario JSON with constant coefficients.
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long)]
    pub t_max: f64,
    #[arg(long, default_value_t = 1001)]
    pub samples: usize,
    /// Comma-separated nu values replacing the scenario's nu; adds a `nu` column.
    #[arg(long, value_delimiter = ',')]
    pub nu_sweep: Vec<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args)]
pub struct PropagatorArgs {
    /// Solvable scenario or general Hamiltonian JSON.
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long)]
    pub t_max: f64,
    #[arg(long, default_value_t = 1001)]
    pub samples: usize,
    #[command(flatten)]
    pub integrator: Integrator,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args)]
pub struct GuidedWaveArgs {
    /// Coupled-mode problem JSON.
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long)]
    pub z_max: f64,
    #[arg(long, default_value_t = 1001)]
    pub samples: usize,
    #[command(flatten)]
    pub integrator: Integrator,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args)]
pub struct OpenEvolveArgs {
    /// Solvable scenario or general Hamiltonian JSON.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Initial density matrix as four `[re, im]` entries, row-major.
    #[arg(long)]
    pub rho0: PathBuf,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 1001)]
    pub samples: usize,
    #[command(flatten)]
    pub integrator: Integrator,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Comma-separated nu values.
    #[arg(long, default_value = "0,0.5,1,1.01,1.2,2,5")]
    pub nu_grid: String,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    /// Allowed closed-form vs oracle deviation.
    #[arg(long, env = "SU11_TOL", default_value_t = 1e-8)]
    pub tol: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::RabiCurve(a) => commands::rabi_curve(&a).map(|_| true),
        Command::Propagator(a) => commands::propagator(&a).map(|_| true),
        Command::GuidedWave(a) => commands::guided_wave(&a).map(|_| true),
        Command::OpenEvolve(a) => commands::open_evolve(&a).map(|_| true),
        Command::Verify(a) => verify::run(&a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            if let Some(usage) = e.downcast_ref::<clap::Error>() {
                usage.exit();
            }
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
