//! `bilinear-jsr`: batch front-end for growth profiles, JSR brackets and the
//! bilinear reduction.

mod commands;
mod error;
mod problem;

use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use bilinear_jsr::{Limits, Norm, Pruning};
use clap::{Parser, Subcommand};

use crate::commands::{Format, GrowthArgs, ReportFormat};
use crate::error::{CliError, Result};

const CAP_VAR: &str = "BILINEAR_JSR_CAP";

const AFTER_HELP: &str = "\
Problem files are JSON objects with a `kind` of matrix_set, bilinear_system
or joint_system and an optional `mode` (exact, the default, or float):

  {\"kind\": \"matrix_set\", \"matrices\": [[[1, 1], [0, 1]], [[1, 0], [1, 1]]]}
  {\"kind\": \"bilinear_system\", \"dim\": 1, \"map\": [[1, 1, 1, \"1/2\"]], \"v\": [2]}
  {\"kind\": \"joint_system\", \"dim\": 1, \"maps\": [[[1, 1, 1, 1]], [[1, 1, 1, 2]]], \"v\": [1]}

Map entries [out, i, j, c] are 1-based and mean B(x, y)_out += c * x_i * y_j.
Exact numbers are integers or \"p/q\" strings.

CSV columns:
  growth          t,lambda_t,root,level_size
  jsr             t,lower,upper
  jsr-via-growth  t,max_norm,rho_estimate,direct_max_norm,exact_match

Exit codes: 0 success, 1 verification failure (or `false` from jsr-zero),
2 invalid input, 3 resource cap exceeded. Errors are reported on stderr as a
single JSON line {\"error\": <kind>, \"message\": <text>}.

Environment: BILINEAR_JSR_CAP overrides the cap on level sizes and product
counts (default 1000000).";

#[derive(Parser)]
#[command(name = "bilinear-jsr", version, about, after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// λ_t and λ_t^(1/t) of a bilinear system for t = 1..=T.
    Growth {
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        t_max: usize,
        #[arg(long, default_value = "l1")]
        norm: Norm,
        #[arg(long, default_value = "none")]
        pruning: Pruning,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        out: Format,
        /// Include the level sets themselves (JSON output only).
        #[arg(long)]
        levels: bool,
    },
    /// Lower and upper bounds on the joint spectral radius of a matrix set.
    Jsr {
        file: PathBuf,
        #[arg(long, default_value_t = 8)]
        t_max: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        out: Format,
    },
    /// Decide exactly whether the joint spectral radius is zero.
    JsrZero { file: PathBuf },
    /// Write the reduction system for each initial index to a directory.
    Reduce {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Max product norms read off the reduction, checked against direct
    /// enumeration; exits 1 on any mismatch.
    JsrViaGrowth {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        out: Format,
    },
    /// Run the reference checkers that apply to the problem kind.
    Verify {
        file: PathBuf,
        /// Simulation depth for matrix sets and joint systems.
        #[arg(long, default_value_t = 2)]
        r_max: usize,
        /// Levels compared against brute force for bilinear systems.
        #[arg(long, default_value_t = 6)]
        t_max: usize,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        out: ReportFormat,
    },
    /// Fold several bilinear maps into one system and self-validate it.
    Joint {
        file: PathBuf,
        /// Write the system here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn limits() -> Result<Limits> {
    match std::env::var(CAP_VAR) {
        Ok(text) => text
            .trim()
            .parse()
            .map(Limits::uniform)
            .map_err(|_| CliError::parse(format!("{CAP_VAR} must be a nonnegative integer, got {text:?}"))),
        Err(_) => Ok(Limits::default()),
    }
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<u8> {
    let limits = limits()?;
    match cli.command {
        Command::Growth {
            file,
            t_max,
            norm,
            pruning,
            out: format,
            levels,
        } => {
            let args = GrowthArgs {
                t_max,
                norm,
                pruning,
                format,
                levels,
            };
            commands::growth(problem::load(&file)?, &args, &limits, out)
        }
        Command::Jsr {
            file,
            t_max,
            tol,
            out: format,
        } => commands::jsr(problem::load(&file)?, t_max, tol, format, &limits, out),
        Command::JsrZero { file } => commands::jsr_zero(problem::load(&file)?, out),
        Command::Reduce { file, out: dir } => commands::reduce(problem::load(&file)?, &dir, out),
        Command::JsrViaGrowth {
            file,
            depth,
            out: format,
        } => commands::jsr_via_growth(problem::load(&file)?, depth, format, &limits, out),
        Command::Verify {
            file,
            r_max,
            t_max,
            out: format,
        } => commands::verify(problem::load(&file)?, r_max, t_max, format, &limits, out),
        Command::Joint { file, out: target } => commands::joint(problem::load(&file)?, target.as_ref(), out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli, &mut out);
    let flushed = out.flush();
    match result {
        Ok(code) => {
            if let Err(e) = flushed {
                eprintln!("{}", serde_json::json!({"error": "io", "message": e.to_string()}));
                return ExitCode::from(2);
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("{}", serde_json::json!({"error": e.kind(), "message": e.to_string()}));
            ExitCode::from(e.exit_code())
        }
    }
}
