//! Command-line front end: load a configuration, run the interferometer
//! simulations, and emit plot-ready CSV tables plus a JSON run summary.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 non-convergence.

mod manifest;
mod outputs;
mod run;
mod sweep;
mod tune;
mod validate;

use clap::{ArgAction, Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use sgi_core::Error;

/// Simulator of a five-stage magnetic matter-wave interferometer for a
/// levitated, rotating nanoparticle. All outputs are deterministic:
/// repeated runs with the same inputs produce byte-identical files.
#[derive(Parser)]
#[command(name = "sgi", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate the configured sequence and emit figure data + summary.json
    Run(RunArgs),
    /// Tabulate the orientation-channel contrast over a parameter grid
    Sweep(SweepArgs),
    /// Adjust the closing stage (gradient, duration) until the two arms rejoin
    Tune(TuneArgs),
    /// Lint the configuration and check field consistency and derived frequencies
    Validate(CommonArgs),
}

/// Options shared by every subcommand: where the configuration comes
/// from and which parts of the model are switched on.
#[derive(Args)]
struct CommonArgs {
    /// Built-in parameter set (published reference values). `reference`
    /// is an alias of `table1`.
    #[arg(long, value_parser = ["table1", "reference"], conflicts_with = "config")]
    preset: Option<String>,

    /// TOML configuration file (missing sections fall back to the preset)
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override the transverse trap switch (`--trap_on` or `--trap_on=false`)
    #[arg(
        long = "trap_on",
        num_args = 0..=1,
        default_missing_value = "true",
        action = ArgAction::Set
    )]
    trap_on: Option<bool>,

    /// Override the rotor-dynamics switch (`--rotation_on` or `--rotation_on=false`)
    #[arg(
        long = "rotation_on",
        num_args = 0..=1,
        default_missing_value = "true",
        action = ArgAction::Set
    )]
    rotation_on: Option<bool>,

    /// Override the transverse-trap sign convention
    #[arg(long = "trap-sign", value_parser = ["as_written", "conventional"])]
    trap_sign: Option<String>,

    /// Exchange the two arms' spin patterns (negates the separation channel)
    #[arg(long = "swap-arms", action = ArgAction::SetTrue)]
    swap_arms: bool,

    /// Reserved for interface stability: the simulator uses no randomness,
    /// so outputs are already seed-free. Accepted and ignored.
    #[arg(long, action = ArgAction::SetTrue)]
    seedless: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Output directory (created if missing)
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Trajectory samples per stage (minimum 100). Orientation tables
    /// (fig4, fig5) are sampled 8x finer to resolve the fast libration.
    #[arg(long = "samples-per-stage", default_value_t = 2000)]
    samples_per_stage: usize,

    /// Comma-separated selection of figure datasets. `all` adds fig6
    /// (the default contrast sweep) to the standard four.
    #[arg(
        long,
        value_delimiter = ',',
        default_values = ["fig2", "fig3", "fig4", "fig5"],
        value_parser = ["fig2", "fig3", "fig4", "fig5", "fig6", "all"]
    )]
    outputs: Vec<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Output directory (created if missing)
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Lowest body spin rate [rad/s]
    #[arg(long = "omega0-min", default_value_t = 2.0 * std::f64::consts::PI * 1.0e4)]
    omega0_min: f64,

    /// Highest body spin rate [rad/s]
    #[arg(long = "omega0-max", default_value_t = 1.0e8)]
    omega0_max: f64,

    /// Number of logarithmically spaced spin-rate points
    #[arg(long = "omega0-points", default_value_t = 41)]
    omega0_points: usize,

    /// Comma-separated spin-site offsets from the center of mass [m]
    #[arg(long, value_delimiter = ',', default_values = ["0.0", "5e-9", "1e-8"])]
    offsets: Vec<f64>,

    /// Comma-separated thermal occupation numbers of the tilt mode
    #[arg(long = "n-list", value_delimiter = ',', default_values = ["0", "5", "20"])]
    n_list: Vec<f64>,
}

#[derive(Args)]
struct TuneArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Output directory (created if missing)
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Acceptance threshold on the final arm-separation residual [m]
    #[arg(long = "tol-dx", default_value_t = 1e-9)]
    tol_dx: f64,

    /// Acceptance threshold on the final velocity-difference residual [m/s]
    #[arg(long = "tol-dv", default_value_t = 1e-9)]
    tol_dv: f64,

    /// Iteration budget for the closure search
    #[arg(long = "max-iterations", default_value_t = 100)]
    max_iterations: usize,
}

/// Command-level failure: either a simulator error or a consistency
/// check that evaluated false.
pub enum CliError {
    Core(Error),
    /// A validation/consistency check failed (numerical, exit 3).
    Check(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(Error::Io(e))
    }
}

fn exit_code(err: &CliError) -> u8 {
    match err {
        CliError::Check(_) => 3,
        CliError::Core(e) => match e {
            Error::ConfigParse(_)
            | Error::WrongStageCount(_)
            | Error::KindOrderViolation { .. }
            | Error::NonPositiveDuration { .. }
            | Error::NonNegativeSusceptibility(_) => 2,
            Error::NoConvergence { .. } => 4,
            _ => 3,
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Run(args) => run::cmd_run(&args),
        Cmd::Sweep(args) => sweep::cmd_sweep(&args),
        Cmd::Tune(args) => tune::cmd_tune(&args),
        Cmd::Validate(args) => validate::cmd_validate(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            match &err {
                CliError::Core(e) => eprintln!("error: {e}"),
                CliError::Check(msg) => eprintln!("error: {msg}"),
            }
            ExitCode::from(exit_code(&err))
        }
    }
}
