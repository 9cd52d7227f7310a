//! Command-line experiment runner for the inverted-oscillator laboratory.
//!
//! Every subcommand writes one artifact file (CSV or JSON) whose header
//! echoes the full configuration; identical invocations produce
//! byte-identical files. Exit status: 0 when all tolerance gates pass,
//! 1 on a gate failure (the failing gate is named on stderr), 2 on a
//! usage/configuration error, 3 on an I/O failure.

use clap::{Parser, Subcommand, ValueEnum};
use iol_core::experiments::{run, Command as ExpCommand, Format, RunConfig};
use iol_core::IolError;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "iol", version, about = "inverted-oscillator laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliFormat {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Fock truncation dimension (even, >= 4)
    #[arg(long, default_value_t = 256)]
    dim: usize,
    /// Largest family index entering Gram/spectrum tables
    #[arg(long = "n-max", default_value_t = 6)]
    n_max: usize,
    /// Coherent-state modulus |alpha|
    #[arg(long = "alpha-mod", default_value_t = 1.0)]
    alpha_mod: f64,
    /// Angular frequency
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Mass
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    /// Action scale
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    /// Largest evolution time
    #[arg(long = "t-max", default_value_t = 1.0)]
    t_max: f64,
    /// Time step
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    /// Quadrature node count
    #[arg(long, default_value_t = 200)]
    nodes: usize,
    /// Output file (default: <command>.<ext> under $IOL_SEED_DIR or the
    /// working directory)
    #[arg(long)]
    output: Option<String>,
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: CliFormat,
}

#[derive(Subcommand)]
enum Cmd {
    /// Eigenvalue residuals of the inverted-oscillator spectrum
    Spectrum(CommonArgs),
    /// Bi-orthonormality Gram matrices by both metric routes
    Biorth(CommonArgs),
    /// Quasi-Hermiticity residuals (operator-level and literal matrix route)
    Quasiherm(CommonArgs),
    /// Coherent-state moments and uncertainties over a time sweep
    Coherent(CommonArgs),
    /// Propagator evolution against the alpha(t) reconstruction
    Evolve(CommonArgs),
    /// Classical trajectory, closed form and RK4
    Classical(CommonArgs),
    /// Growth exponents of the divergent naive norms
    Divergence(CommonArgs),
    /// The full gate table at the pinned acceptance dimensions
    All(CommonArgs),
}

fn to_config(cmd: ExpCommand, a: &CommonArgs) -> RunConfig {
    RunConfig {
        command: cmd,
        dim: a.dim,
        n_max: a.n_max,
        alpha_mod: a.alpha_mod,
        omega: a.omega,
        mass: a.mass,
        hbar: a.hbar,
        t_max: a.t_max,
        dt: a.dt,
        nodes: a.nodes,
        output_path: a.output.clone(),
        format: match a.format {
            CliFormat::Csv => Format::Csv,
            CliFormat::Json => Format::Json,
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.command {
        Cmd::Spectrum(a) => to_config(ExpCommand::Spectrum, a),
        Cmd::Biorth(a) => to_config(ExpCommand::Biorth, a),
        Cmd::Quasiherm(a) => to_config(ExpCommand::Quasiherm, a),
        Cmd::Coherent(a) => to_config(ExpCommand::Coherent, a),
        Cmd::Evolve(a) => to_config(ExpCommand::Evolve, a),
        Cmd::Classical(a) => to_config(ExpCommand::Classical, a),
        Cmd::Divergence(a) => to_config(ExpCommand::Divergence, a),
        Cmd::All(a) => to_config(ExpCommand::All, a),
    };

    match run(&cfg) {
        Ok(outcome) => {
            for g in &outcome.gates {
                eprintln!(
                    "{:<32} {:>12.3e} <= {:>9.1e}  {}",
                    g.name,
                    g.value,
                    g.threshold,
                    if g.passed { "pass" } else { "FAIL" }
                );
            }
            println!("wrote {}", outcome.path.display());
            if outcome.gates.iter().all(|g| g.passed) {
                ExitCode::SUCCESS
            } else {
                let failing: Vec<&str> = outcome
                    .gates
                    .iter()
                    .filter(|g| !g.passed)
                    .map(|g| g.name.as_str())
                    .collect();
                eprintln!("gate failure: {}", failing.join(", "));
                ExitCode::from(1)
            }
        }
        Err(IolError::Io(e)) => {
            eprintln!("io error: {e}");
            ExitCode::from(3)
        }
        Err(
            e @ (IolError::Config(_)
            | IolError::InvalidParams(_)
            | IolError::InvalidDimension(_)
            | IolError::Truncation { .. }
            | IolError::Range(_)),
        ) => {
            eprintln!("usage error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
