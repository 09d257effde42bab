//! `tsbvp`: batch front-end for the time-scale p-Laplacian solver.

// validation uses `!(x > 0.0)`-style comparisons so NaN inputs fail closed
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{CliError, Outputs};

const GRAMMAR_HELP: &str = "\
CONFIG FORMAT (sections and keys, `#` starts a comment):
  [problem]    p, T, eta, f, h
  [timescale]  kind = interval|integer|union, spec = [lo,hi],{x},...  (union only),
               resolution
  [solver]     tol, max_iter, damping, init
  [check]      a, b, levels, a0, ratio, k_max, samples

EXPRESSION GRAMMAR for `f` (over u) and `h` (over t):
  expr   := term (('+' | '-') term)*
  term   := factor (('*' | '/') factor)*
  factor := '-' factor | power
  power  := atom ('^' factor)?            # right-associative
  atom   := NUMBER | 'u' | 't'
          | FUNC '(' expr (',' expr)* ')'
          | '(' expr ')'
  NUMBER := digits ['.' digits] [('e'|'E') ['+'|'-'] digits]
  FUNC   := abs | exp | log | sqrt | sin | cos | min | max | pow
  (min, max, pow take two arguments; the rest take one; no implicit
   multiplication)

EXIT CODES:
  0  success
  1  solver did not converge (or the iteration broke down numerically)
  2  configuration or input error
  3  a condition check failed and --strict was given (check command)
";

#[derive(Parser)]
#[command(
    name = "tsbvp",
    about = "Solve and analyze the p-Laplacian boundary-value problem on a time scale",
    after_help = GRAMMAR_HELP,
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the problem configuration file.
    #[arg(long)]
    config: PathBuf,
    /// CSV output path (solve, residual, sample-timescale; canonical text
    /// for print-config).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Human-readable report path.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Make failed condition checks fatal (exit 3, `check` only).
    #[arg(long)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Picard iteration and write the solution.
    Solve(CommonArgs),
    /// Evaluate the equation residual of the constant candidate `init`.
    Residual(CommonArgs),
    /// Check the existence conditions at levels (a, b).
    Check(CommonArgs),
    /// Check interleaved levels and solve in the predicted shells.
    ScanMultiplicity(CommonArgs),
    /// Check pairs of geometrically shrinking levels.
    ScanInfinite(CommonArgs),
    /// Emit the sampled grid with jump operators and density flags.
    SampleTimescale(CommonArgs),
    /// Parse the config and emit its canonical form.
    PrintConfig(CommonArgs),
}

type CommandFn = fn(&config::RunConfig, &Outputs) -> Result<i32, CliError>;

fn dispatch(command: &Command) -> Result<i32, CliError> {
    let (args, run): (&CommonArgs, CommandFn) = match command {
        Command::Solve(a) => (a, commands::run_solve),
        Command::Residual(a) => (a, commands::run_residual),
        Command::Check(a) => (a, commands::run_check),
        Command::ScanMultiplicity(a) => (a, commands::run_scan_multiplicity),
        Command::ScanInfinite(a) => (a, commands::run_scan_infinite),
        Command::SampleTimescale(a) => (a, commands::run_sample_timescale),
        Command::PrintConfig(a) => (a, commands::run_print_config),
    };
    let config = commands::load_config(&args.config)?;
    let outputs = Outputs {
        csv: args.output.clone(),
        report: args.report.clone(),
        strict: args.strict,
    };
    run(&config, &outputs)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
