//! Batch front-end for `asym-mms`.
//!
//! Exit codes: 0 ok, 1 property violation, 2 input error, 3 solver stall.

mod commands;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "asym-mms", version, about = "Analysis on finite asymmetric metric measure spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a space file (exit 1 lists violations)
    Validate(Opts),
    /// Sample a Finsler model on a point cloud, random points or a lattice
    Sample(Opts),
    /// Ascending, descending and absolute slopes of a field
    Slope(Opts),
    /// Forward and backward Cheeger energies
    Cheeger(Opts),
    /// Minimal weak upper gradient over a curve family
    Mwug(Opts),
    /// q-heat flow by minimizing movements
    Heatflow(Opts),
    /// q-Laplacian of a field
    Laplacian(Opts),
    /// Hopf-Lax profiles at one or more times
    Hopflax(Opts),
    /// Hamilton-Jacobi residual, on a space or across model lattices
    Hjcheck(Opts),
    /// Optimal transport and W_p
    Wasserstein(Opts),
    /// Kantorovich dual certificate
    Dual(Opts),
    /// W_1 through Lipschitz potentials
    Krw1(Opts),
    /// Speed of a heat flow in W_p against the Fisher-type bound
    Kuwada(Opts),
    /// Cheeger energies of f and -f on refining Funk lattices
    SobolevAsymmetry(Opts),
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct Opts {
    /// Space file (JSON)
    #[arg(long)]
    pub space: Option<PathBuf>,
    /// funk, randers or interp
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Interpolation weight of the interp model
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Point cloud CSV, one point per row with a header
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Nearest neighbors per sampled point
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Number of random sample points
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Field CSV, or a built-in (neg-sqrt, sqrt, smooth, x1) on model lattices
    #[arg(long)]
    pub f: Option<String>,
    /// Measure CSV
    #[arg(long)]
    pub mu: Option<PathBuf>,
    #[arg(long)]
    pub nu: Option<PathBuf>,
    /// Curve family JSON
    #[arg(long)]
    pub curves: Option<PathBuf>,
    /// edges, paths:N or geodesics
    #[arg(long, default_value = "geodesics")]
    pub policy: String,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Time, or comma separated times
    #[arg(long)]
    pub t: Option<String>,
    /// Flow horizon
    #[arg(long = "T", default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Lattice spacing, or comma separated spacings
    #[arg(long)]
    pub mesh: Option<String>,
    /// Euclidean radius cut for lattices and random samples
    #[arg(long)]
    pub radius: Option<f64>,
    /// Steps between compared states in kuwada
    #[arg(long, default_value_t = 100)]
    pub lag: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Also write SVG charts
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug)]
pub enum Failure {
    Violation(String),
    Input(String),
    Stall(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Violation(_) => 1,
            Failure::Input(_) => 2,
            Failure::Stall(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Violation(s) => write!(f, "violation: {}", s),
            Failure::Input(s) => write!(f, "input error: {}", s),
            Failure::Stall(s) => write!(f, "solver stall: {}", s),
        }
    }
}

impl From<asym_mms::Error> for Failure {
    fn from(e: asym_mms::Error) -> Self {
        use asym_mms::Error::*;
        match e {
            SolverStall { .. } | CycleGuardTripped(_) => Failure::Stall(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, opts, run): (&'static str, Opts, commands::Command) = match cli.command {
        Command::Validate(o) => ("validate", o, commands::validate),
        Command::Sample(o) => ("sample", o, commands::sample),
        Command::Slope(o) => ("slope", o, commands::slope),
        Command::Cheeger(o) => ("cheeger", o, commands::cheeger),
        Command::Mwug(o) => ("mwug", o, commands::mwug),
        Command::Heatflow(o) => ("heatflow", o, commands::heatflow),
        Command::Laplacian(o) => ("laplacian", o, commands::laplacian),
        Command::Hopflax(o) => ("hopflax", o, commands::hopflax),
        Command::Hjcheck(o) => ("hjcheck", o, commands::hjcheck),
        Command::Wasserstein(o) => ("wasserstein", o, commands::wasserstein),
        Command::Dual(o) => ("dual", o, commands::dual),
        Command::Krw1(o) => ("krw1", o, commands::krw1),
        Command::Kuwada(o) => ("kuwada", o, commands::kuwada),
        Command::SobolevAsymmetry(o) => ("sobolev-asymmetry", o, commands::sobolev_asymmetry),
    };
    let result = output::Run::new(name, &opts.out, opts.plot).and_then(|mut r| {
        let outcome = commands::check_common(&opts).and_then(|()| run(&mut r, &opts));
        r.finish(&opts, &outcome)?;
        outcome
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("asym-mms {}: {}", name, e);
            ExitCode::from(e.code())
        }
    }
}
