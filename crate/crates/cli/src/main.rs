//! `deltaprime`: experiment runner for the strong-coupling spectral toolkit.
//!
//! Every subcommand writes its output files plus a manifest next to them; `rerun` replays
//! a manifest. Exit codes: 0 success, 1 usage error, 2 parameter or regime error, 3 solver
//! failure.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{AsymptoticsArgs, CurveArgs, Solve2dArgs, Spectrum1dArgs, ThresholdArgs, TransverseArgs};
use output::{CliError, Invocation};

/// Default output directory when `--out-dir` is absent.
pub const OUT_DIR_ENV: &str = "DPRIME_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "deltaprime", version, about = "Strong-coupling spectra of delta-prime interactions on planar curves")]
struct Cli {
    /// Output directory [default: $DPRIME_OUT_DIR, else the current directory].
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Worker threads for independent grid points.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Curvature bounds, injectivity estimate and a sampled reconstruction.
    Curve(CurveArgs),
    /// Transverse ground states and their envelope.
    Transverse(TransverseArgs),
    /// Eigenvalues of the comparison or bracket operator along the curve.
    Spectrum1d(Spectrum1dArgs),
    /// Lowest eigenvalues of a strip form.
    Solve2d(Solve2dArgs),
    /// Bracket spectra over a coupling grid and the fitted remainder law.
    Asymptotics(AsymptoticsArgs),
    /// Certified lower bound on the essential spectrum.
    Threshold(ThresholdArgs),
    /// Replays a manifest written by an earlier run.
    Rerun {
        manifest: PathBuf,
    },
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let dir = out_dir(cli.out_dir);
    let inv = match cli.command {
        Command::Curve(a) => Invocation::fresh(a)?,
        Command::Transverse(a) => Invocation::fresh(a)?,
        Command::Spectrum1d(a) => Invocation::fresh(a)?,
        Command::Solve2d(a) => Invocation::fresh(a)?,
        Command::Asymptotics(a) => Invocation::fresh(a)?,
        Command::Threshold(a) => Invocation::fresh(a)?,
        Command::Rerun { manifest } => Invocation::replay(&manifest)?,
    };
    inv.execute(&dir)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
