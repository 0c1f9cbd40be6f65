//! Command-line front end for building a high-utility itemset trie and
//! querying it by target items.

pub mod args;
pub mod bench;
pub mod commands;
pub mod error;
pub mod pipeline;
pub mod shell;

use std::ffi::OsString;
use std::io::{self, BufRead, Write};

use clap::error::ErrorKind;
use clap::Parser;
use thui_core::QuerySession;

use args::{Cli, Command};
pub use error::{exit, CliError};

/// Parses `argv` and runs the command, returning the process exit status.
pub fn run<I, T, R, W, E>(argv: I, input: R, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    R: BufRead,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit::OK,
                _ => exit::USAGE,
            };
            let _ = if code == exit::OK { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match dispatch(cli.command, input, out) {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch<R: BufRead, W: Write>(command: Command, input: R, out: &mut W) -> Result<(), CliError> {
    match command {
        Command::Mine(args) => commands::mine(&args, out),
        Command::Query(args) => commands::query(&args, out),
        Command::Bench(args) => bench::bench(&args, out).map(|_| ()),
        Command::Shell(args) => {
            let built = {
                let (db, _) = pipeline::load_database(&args.source.input)?;
                pipeline::build(&db, args.source.min_util, false)?
            };
            writeln!(
                out,
                "# built {} HUIs into {} nodes; type help for commands",
                built.stats.hui_count,
                built.tree.node_count()
            )?;
            shell::Shell::new(QuerySession::new(&built.tree, built.stats), out).run(input)
        }
    }
}

pub fn run_process() -> i32 {
    let stdin = io::stdin();
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), stdin.lock(), &mut stdout.lock(), &mut stderr.lock())
}
