//! The `polyshoot` command line.
//!
//! Every subcommand prints one JSON document on stdout. Exit codes: 0 on
//! success, 1 when the solver comes back negative (no zero found, only
//! Navier data, strict truncation, failed quadrature), 2 on invalid input.

mod commands;

pub use commands::{
    cmd_classify, cmd_degree, cmd_shoot, cmd_solve, cmd_verify, gnuplot_script, ClassifyReport,
    DegreeOutput, RunConfig, ShootReport, SolveReport, SolveStatus, VerifyReport,
};

use crate::analysis::AnalysisError;
use crate::degree::DegreeError;
use crate::integrator::{IntegrationError, IvpControls};
use crate::Error;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "polyshoot",
    version,
    about = "Radial shooting for weighted polyharmonic systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Criticality class and non-degeneracy conditions of a system.
    Classify {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Integrates one shooting vector.
    Shoot(ShootArgs),
    /// Searches the mass simplex for an entire solution.
    Solve(SolveArgs),
    /// Energy and Pohozaev identities on a stored trajectory.
    Verify(VerifyArgs),
    /// Degree of the target map on a labeled lattice of the mass simplex.
    Degree(DegreeArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// System config (TOML).
    #[arg(long)]
    pub spec: PathBuf,
    /// Directory for CSV, JSON and plot files; created if missing.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Recorded in the output; no subcommand draws random numbers.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub controls: ControlArgs,
}

/// Integrator overrides. Defaults are those of [`IvpControls::default`].
#[derive(Debug, Clone, Default, Args)]
pub struct ControlArgs {
    /// Series start radius [default: 1e-6]
    #[arg(long)]
    pub h0: Option<f64>,
    /// Relative step tolerance [default: 1e-10]
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Absolute step tolerance [default: 1e-12]
    #[arg(long)]
    pub abs_tol: Option<f64>,
    /// Integration horizon [default: 1e20]
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Bracket width for wall crossings [default: 1e-10]
    #[arg(long)]
    pub eps_wall: Option<f64>,
    /// Decay threshold [default: 1e-6]
    #[arg(long)]
    pub eps_decay: Option<f64>,
    /// Step budget [default: 1000000]
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Samples recorded per accepted step [default: 8]
    #[arg(long)]
    pub dense_samples: Option<usize>,
    /// Largest step in ln r [default: 0.1]
    #[arg(long)]
    pub max_log_step: Option<f64>,
}

impl ControlArgs {
    pub fn resolve(&self) -> IvpControls {
        let d = IvpControls::default();
        IvpControls {
            h0: self.h0.unwrap_or(d.h0),
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            r_max: self.r_max.unwrap_or(d.r_max),
            eps_wall: self.eps_wall.unwrap_or(d.eps_wall),
            eps_decay: self.eps_decay.unwrap_or(d.eps_decay),
            max_steps: self.max_steps.unwrap_or(d.max_steps),
            dense_samples: self.dense_samples.unwrap_or(d.dense_samples),
            max_log_step: self.max_log_step.unwrap_or(d.max_log_step),
        }
    }
}

#[derive(Debug, Args)]
pub struct ShootArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Initial values of the chain components, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        required = true
    )]
    pub alpha: Vec<f64>,
    /// Exit 1 when the run reaches r_max without resolving.
    #[arg(long)]
    pub strict: bool,
    /// Also write a gnuplot script for the profile.
    #[arg(long, requires = "out_dir")]
    pub emit_plot: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Total mass a of the shooting simplex Σα = a.
    #[arg(long)]
    pub mass: f64,
    /// Starting lattice depth (three or more components).
    #[arg(long, default_value_t = 3)]
    pub depth: u32,
    /// Bisection or refinement iterations.
    #[arg(long, default_value_t = 60)]
    pub budget: u32,
    /// Worker threads for vertex labeling.
    #[arg(long, env = "POLYSHOOT_JOBS")]
    pub jobs: Option<usize>,
    #[arg(long, requires = "out_dir")]
    pub emit_plot: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Trajectory CSV as written by `shoot` or `solve`.
    #[arg(long)]
    pub pohozaev: PathBuf,
    /// Also fit an algebraic tail on `lo,hi`.
    #[arg(long, value_delimiter = ',')]
    pub decay_window: Option<Vec<f64>>,
    /// Chain component for the tail fit.
    #[arg(long, default_value_t = 0)]
    pub component: usize,
}

#[derive(Debug, Args)]
pub struct DegreeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub mass: f64,
    #[arg(long, default_value_t = 3)]
    pub depth: u32,
    #[arg(long, env = "POLYSHOOT_JOBS")]
    pub jobs: Option<usize>,
}

/// Exit code for an error: 1 for solver-negative results, 2 for bad input.
pub fn exit_code(e: &Error) -> u8 {
    let integration = |e: &IntegrationError| match e {
        IntegrationError::StepLimitExceeded { .. } | IntegrationError::StiffnessFailure { .. } => 1,
        _ => 2,
    };
    match e {
        Error::Integration(e) => integration(e),
        Error::Degree(e) => match e {
            DegreeError::NotFound { .. }
            | DegreeError::AllUnresolved
            | DegreeError::InconsistentBoundary { .. } => 1,
            DegreeError::Integration(e) => integration(e),
            _ => 2,
        },
        Error::Analysis(AnalysisError::NotApplicable(_)) => 2,
        Error::Analysis(_) => 1,
        _ => 2,
    }
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    writeln!(out, "{text}")
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, Error> {
    let io = |e: std::io::Error| Error::Io {
        path: "<stdout>".into(),
        source: e,
    };
    match cli.command {
        Command::Classify { spec } => {
            let report = cmd_classify(&spec)?;
            print_json(out, &report).map_err(io)?;
            Ok(0)
        }
        Command::Shoot(args) => {
            let cfg = RunConfig::from_common(&args.common, None);
            let report = cmd_shoot(&cfg, &args.alpha, args.emit_plot)?;
            print_json(out, &report).map_err(io)?;
            let truncated = matches!(
                report.outcome,
                Some(crate::integrator::Outcome::Truncated { .. })
            );
            if args.strict && truncated {
                writeln!(err, "run reached r_max without resolving").map_err(io)?;
                return Ok(1);
            }
            Ok(0)
        }
        Command::Solve(args) => {
            let cfg = RunConfig::from_common(&args.common, Some(args.mass));
            let report = cmd_solve(&cfg, args.depth, args.budget, args.jobs, args.emit_plot)?;
            print_json(out, &report).map_err(io)?;
            match report.status {
                SolveStatus::EntireSolution => Ok(0),
                SolveStatus::NavierOnly => {
                    writeln!(
                        err,
                        "ψ vanishes only at a wall hit: Navier data on a ball, not an entire solution"
                    )
                    .map_err(io)?;
                    Ok(1)
                }
                SolveStatus::NotFound => {
                    writeln!(err, "no zero of the target map found").map_err(io)?;
                    Ok(1)
                }
            }
        }
        Command::Verify(args) => {
            let window = match args.decay_window.as_deref() {
                None => None,
                Some(&[lo, hi]) => Some((lo, hi)),
                Some(_) => {
                    return Err(Error::InvalidArgument(
                        "--decay-window takes exactly two values `lo,hi`".into(),
                    ))
                }
            };
            let report = cmd_verify(&args.spec, &args.pohozaev, window, args.component)?;
            print_json(out, &report).map_err(io)?;
            Ok(0)
        }
        Command::Degree(args) => {
            let cfg = RunConfig::from_common(&args.common, Some(args.mass));
            let report = cmd_degree(&cfg, args.depth, args.jobs)?;
            print_json(out, &report).map_err(io)?;
            Ok(0)
        }
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code.clamp(0, 2) as u8;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
