mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{write_summary, CliError, Output, Report};

#[derive(Parser)]
#[command(name = "kinrel", version, about = "Viscous traveling waves, kinetic functions and kinetic Riemann solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shoot the traveling-wave orbit from a left state.
    Profile(Overrides),
    /// Tabulate the kinetic end states over viscosity directions.
    Manifold(Overrides),
    /// Points of the kinetic Hugoniot curve for the multi-pressure system.
    Hugoniot(Overrides),
    /// Solve a multi-pressure Euler Riemann problem.
    Riemann(Overrides),
    /// Standing wave across a jump of topography or cross-section.
    StandingWave(Overrides),
    /// Check the equation-of-state hypotheses on a grid.
    ValidateEos(Overrides),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Overrides {
    /// JSON problem description.
    #[arg(long)]
    pub config: PathBuf,
    /// Directory receiving the artifacts and summary.json.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Number of viscosity directions (manifold).
    #[arg(long)]
    pub directions: Option<usize>,
    /// Seed of the direction sampler; accepts 0x-prefixed hex.
    #[arg(long, value_parser = parse_seed)]
    pub seed: Option<u64>,
    /// Relative step tolerance of the profile integrator
    #[arg(long)]
    pub tol_rel: Option<f64>,
    /// Absolute step tolerance of the profile integrator
    #[arg(long)]
    pub tol_abs: Option<f64>,
    /// Pseudo-time budget of the profile integration.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Format of the main artifact.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let r = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    r.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

type Runner = fn(&Overrides, &Output, &mut Report) -> Result<(), CliError>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("KR_LOG", "error")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (name, ov, run): (&str, &Overrides, Runner) = match &cli.command {
        Command::Profile(o) => ("profile", o, commands::profile),
        Command::Manifold(o) => ("manifold", o, commands::manifold),
        Command::Hugoniot(o) => ("hugoniot", o, commands::hugoniot),
        Command::Riemann(o) => ("riemann", o, commands::riemann),
        Command::StandingWave(o) => ("standing-wave", o, commands::standing),
        Command::ValidateEos(o) => ("validate-eos", o, commands::validate_eos),
    };

    let start = Instant::now();
    let mut report = Report::default();
    let result = Output::new(&ov.out).and_then(|out| run(ov, &out, &mut report));
    let error = match result {
        Ok(()) => report.failure.clone(),
        Err(e) => Some(e),
    };
    let seconds = start.elapsed().as_secs_f64();
    match write_summary(&ov.out, name, &ov.config, &report, error.as_ref(), seconds) {
        Some(p) => log::info!("wrote {}", p.display()),
        None => eprintln!("warning: could not write summary.json to {}", ov.out.display()),
    }
    match error {
        None => ExitCode::SUCCESS,
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.kind.exit_code())
        }
    }
}
