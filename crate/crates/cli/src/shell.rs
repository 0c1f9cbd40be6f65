//! Line-oriented query shell over one frozen trie.
//!
//! Commands:
//!
//! ```text
//! query <ξ> <item ids…>    answer a targeted query
//! stats                    build counters and session totals
//! strategies <mask>        switch pruning strategies, e.g. 123 or 3
//! help                     list commands
//! quit                     end the session
//! ```

use std::io::{BufRead, Write};

use thui_core::query::{QuerySession, StrategySet};

use crate::commands::write_thui;
use crate::error::CliError;
use crate::pipeline;

const HELP: &str = "commands: query <min-util> <items...> | stats | strategies <mask> | help | quit";

pub struct Shell<'t, W> {
    session: QuerySession<'t>,
    tree_nodes: usize,
    out: W,
}

/// What the shell should do after a command.
#[derive(Debug, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Quit,
}

impl<'t, W: Write> Shell<'t, W> {
    pub fn new(session: QuerySession<'t>, out: W) -> Self {
        let tree_nodes = session.tree().node_count();
        Self { session, tree_nodes, out }
    }

    pub fn session(&self) -> &QuerySession<'t> {
        &self.session
    }

    /// Reads commands until `quit` or end of input.
    pub fn run<R: BufRead>(&mut self, input: R) -> Result<(), CliError> {
        for line in input.lines() {
            if self.execute(&line?)? == Flow::Quit {
                break;
            }
        }
        self.out.flush()?;
        Ok(())
    }

    /// Runs one command line. Malformed commands print a message and leave
    /// the session running; only output failures are errors.
    pub fn execute(&mut self, line: &str) -> Result<Flow, CliError> {
        let mut words = line.split_whitespace();
        let Some(cmd) = words.next() else {
            return Ok(Flow::Continue);
        };
        let rest: Vec<&str> = words.collect();
        match cmd {
            "quit" | "exit" => return Ok(Flow::Quit),
            "help" => writeln!(self.out, "{HELP}")?,
            "stats" => self.stats()?,
            "strategies" => match rest.as_slice() {
                [mask] => match StrategySet::from_variant(mask) {
                    Ok(flags) => {
                        self.session.set_strategies(flags);
                        writeln!(self.out, "strategies set to {flags}")?;
                    }
                    Err(e) => writeln!(self.out, "error: {e}")?,
                },
                _ => writeln!(self.out, "error: usage: strategies <mask>")?,
            },
            "query" => self.query(&rest)?,
            other => writeln!(self.out, "error: unknown command {other:?}; {HELP}")?,
        }
        self.out.flush()?;
        Ok(Flow::Continue)
    }

    fn query(&mut self, args: &[&str]) -> Result<(), CliError> {
        let usage = "error: usage: query <min-util> <items...>";
        let [xi, items @ ..] = args else {
            writeln!(self.out, "{usage}")?;
            return Ok(());
        };
        let (Ok(xi), Ok(target)) = (xi.parse(), pipeline::parse_items(&items.join(" "))) else {
            writeln!(self.out, "{usage}")?;
            return Ok(());
        };
        if target.is_empty() {
            writeln!(self.out, "{usage}")?;
            return Ok(());
        }
        match self.session.query(&target, xi) {
            Ok(result) => {
                for t in &result.thuis {
                    write_thui(&mut self.out, t)?;
                }
                writeln!(
                    self.out,
                    "# {} itemsets, {} nodes visited, strategies {}",
                    result.thuis.len(),
                    result.visited_nodes,
                    result.strategies
                )?;
            }
            Err(e) => writeln!(self.out, "error: {e}")?,
        }
        Ok(())
    }

    fn stats(&mut self) -> Result<(), CliError> {
        let s = self.session.build_stats();
        writeln!(
            self.out,
            "# huis={} candidates={} tree_nodes={} db_scans={} queries={} strategies={}",
            s.hui_count,
            s.candidate_count,
            self.tree_nodes,
            self.session.db_scans(),
            self.session.queries_answered(),
            self.session.strategies()
        )?;
        Ok(())
    }
}
