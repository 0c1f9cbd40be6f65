//! Loading a database and building the pattern trie.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;
use std::time::{Duration, Instant};

use thui_core::dataset::{self, Item, Money, ParseOptions, QuantDatabase};
use thui_core::miner::{self, MinerConfig, MiningStats};
use thui_core::tree::{self, PatternTree};

use crate::error::CliError;

pub fn load_database(path: &Path) -> Result<(QuantDatabase, Duration), CliError> {
    let start = Instant::now();
    let file = File::open(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    let db = dataset::parse_database(BufReader::new(file), ParseOptions::default())
        .map_err(|source| CliError::Parse { path: path.to_owned(), source })?;
    Ok((db, start.elapsed()))
}

/// A trie built at one σ, with the HUIs found along the way when requested.
pub struct Built {
    pub tree: PatternTree,
    pub stats: MiningStats,
    pub huis: Vec<(Vec<Item>, Money)>,
    pub elapsed: Duration,
}

pub fn build(db: &QuantDatabase, min_util: Money, keep_huis: bool) -> Result<Built, CliError> {
    let start = Instant::now();
    let config = MinerConfig::default();
    let rdb = miner::revise_for(db, min_util, config);
    let mut huis = Vec::new();
    let (tree, stats) = tree::build_tree_with(&rdb, min_util, config, |hui| {
        if keep_huis {
            huis.push((hui.items(rdb.order()), hui.utility()));
        }
    })?;
    Ok(Built { tree, stats, huis, elapsed: start.elapsed() })
}

/// Parses a list of item ids separated by whitespace or commas.
pub fn parse_items(text: &str) -> Result<Vec<Item>, CliError> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map(Item).map_err(|_| CliError::Usage(format!("invalid item id {s:?}"))))
        .collect()
}

/// Parses a comma-separated list of money amounts.
pub fn parse_amounts(text: &str) -> Result<Vec<Money>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| CliError::Usage(format!("invalid amount {s:?}"))))
        .collect()
}

pub fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

/// Peak resident set size in KiB, read from the process status file. Only
/// available on Linux, and approximate.
pub fn approx_peak_rss_kib() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    status
        .lines()
        .find_map(|l| l.strip_prefix("VmHWM:"))
        .and_then(|v| v.trim().trim_end_matches("kB").trim().parse().ok())
}
