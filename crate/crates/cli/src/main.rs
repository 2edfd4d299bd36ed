//! `majorant`: minimal Fourier majorants from the command line.
//!
//! Exit codes: 0 pass, 1 I/O or schema error, 2 verification failure,
//! 3 solver non-convergence under `--strict`.

mod commands;
mod report;
mod schema;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use majorant_core::primal::MajorantMode;
use majorant_core::MajorantError;

use commands::{NormArgs, Overrides};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Solver(#[from] MajorantError),
}

#[derive(Parser)]
#[command(
    name = "majorant",
    version,
    about = "Minimal-norm Fourier majorants for p = 2j/(2j-1)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the minimal majorant and write a report.
    Solve(SolveArgs),
    /// Check a candidate conjugate H (and optionally F) against f.
    Verify(SolveArgs),
    /// Decide whether a set is a Sidon set of order j.
    Sidon {
        /// Comma-separated integers, e.g. "0,1,3".
        set: String,
        #[arg(long, default_value_t = 2)]
        j: u32,
    },
    /// Write theta,re,im,abs samples of a problem's f or a report's F.
    Sample {
        input: PathBuf,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Norm of a problem's f.
    Norm {
        input: PathBuf,
        /// Exponent; defaults to 2j/(2j-1).
        #[arg(long, conflicts_with = "even")]
        p: Option<f64>,
        /// Exact 2m-norm by Parseval.
        #[arg(long)]
        even: Option<u32>,
        #[arg(long)]
        j: Option<u32>,
        /// Fixed trapezoid grid instead of adaptive doubling.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolveArgs {
    input: PathBuf,
    #[arg(long)]
    j: Option<u32>,
    #[arg(long)]
    mode: Option<MajorantMode>,
    /// Exit 3 when a solver stops short of its tolerance.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    tol_gap: Option<f64>,
    /// Fixed grid of the primal solver.
    #[arg(long)]
    grid: Option<usize>,
    /// Overrides MAJORANT_SEED and the file.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SolveArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            j: self.j,
            mode: self.mode,
            strict: self.strict,
            tol_gap: self.tol_gap,
            grid: self.grid,
            seed: self.seed,
            out: self.out.clone(),
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Solve(a) => commands::cmd_solve(&a.input, &a.overrides()),
        Command::Verify(a) => commands::cmd_verify(&a.input, &a.overrides()),
        Command::Sidon { set, j } => commands::cmd_sidon(&set, j),
        Command::Sample { input, points, out } => {
            commands::cmd_sample(&input, points, out.as_deref())
        }
        Command::Norm {
            input,
            p,
            even,
            j,
            grid,
            out,
        } => commands::cmd_norm(&input, &NormArgs { p, even, j, grid }, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors belong to the I/O-or-schema class
            return ExitCode::from(if e.use_stderr() {
                EXIT_IO as u8
            } else {
                EXIT_PASS as u8
            });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Solver(_) => EXIT_FAIL as u8,
                _ => EXIT_IO as u8,
            })
        }
    }
}
