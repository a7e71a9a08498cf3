//! Command-line front end for `divflow-core`.
//!
//! Every subcommand writes `summary.json` plus CSV plot data into the output
//! directory (`--out`, or the `DIVFLOW_OUT` environment variable) and prints
//! the summary on stdout. Outputs depend only on the arguments, so two runs
//! with the same arguments produce byte-identical files.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;
pub mod pool;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use divflow_core::Mode;

use args::{Cli, Command, Experiment, ModeArg};
use commands::Ctx;
pub use error::CliError;

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(summary) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(summary.as_bytes());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs one parsed command and returns the summary text it wrote.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let ctx = Ctx {
        out: io::Output::new(cli.out.clone())?,
        seed: cli.seed,
        check: cli.check,
        mode: match cli.mode {
            ModeArg::Graph => Mode::Graph,
            ModeArg::Mesh => Mode::Mesh,
        },
        tol: cli.tol,
    };
    let summary = match &cli.command {
        Command::Domain { action } => commands::domain(&ctx, action)?,
        Command::SolveL1(a) => commands::solve_l1(&ctx, a)?,
        Command::SolveLinf(a) => commands::solve_linf(&ctx, a)?,
        Command::FreeNorm(a) => commands::free_norm_cmd(&ctx, a)?,
        Command::SchNorm(a) => commands::sch_norm_cmd(&ctx, a)?,
        Command::Pencil(a) => commands::pencil(&ctx, a)?,
        Command::Whitney(a) => commands::whitney(&ctx, a)?,
        Command::Cheeger(a) => commands::cheeger(&ctx, a)?,
        Command::Poincare(a) => commands::poincare(&ctx, a)?,
        Command::Weaklq(a) => commands::weaklq(&ctx, a)?,
        Command::Mz(a) => commands::mz(&ctx, a)?,
        Command::Koch(a) => commands::koch(&ctx, a)?,
        Command::Experiment { which: Experiment::Nikodym(a) } => commands::nikodym(&ctx, a)?,
        Command::Experiment { which: Experiment::Refine(a) } => commands::refine(&ctx, a)?,
    };
    ctx.out.json("summary.json", &summary)
}
