use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "thui", version, about = "Mine high-utility itemsets once, then query them by target items")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine every high-utility itemset and report build statistics.
    Mine(MineArgs),
    /// Answer one targeted query.
    Query(QueryArgs),
    /// Build once, then answer queries read line by line from standard input.
    Shell(ShellArgs),
    /// Run a parameter grid and write one JSON report line per cell.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct Source {
    /// Database in SPMF utility format.
    #[arg(long)]
    pub input: PathBuf,
    /// Minimum utility σ used to build the trie.
    #[arg(long)]
    pub min_util: u64,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[command(flatten)]
    pub source: Source,
    /// Write a pre-order dump of the trie to this file.
    #[arg(long)]
    pub dump_tree: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SortOrder {
    /// Order of discovery in the trie walk.
    Discovery,
    /// Descending utility.
    Utility,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub source: Source,
    /// Minimum utility ξ of reported itemsets; defaults to σ.
    #[arg(long)]
    pub target_min_util: Option<u64>,
    /// Target item ids, separated by spaces or commas.
    #[arg(long)]
    pub target: String,
    /// Enabled pruning strategies as a digit mask containing 3, e.g. 123.
    #[arg(long, default_value = "123")]
    pub strategies: String,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    pub format: Format,
    /// Append a statistics footer.
    #[arg(long)]
    pub stats: bool,
    #[arg(long, value_enum, default_value_t = SortOrder::Discovery)]
    pub sort: SortOrder,
}

#[derive(Debug, Args)]
pub struct ShellArgs {
    #[command(flatten)]
    pub source: Source,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Database in SPMF utility format.
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated σ values.
    #[arg(long)]
    pub min_util: String,
    /// Comma-separated ξ values; when omitted each σ is paired with itself.
    #[arg(long)]
    pub target_min_util: Option<String>,
    /// File with one target per line, item ids separated by spaces or commas.
    #[arg(long)]
    pub targets: PathBuf,
    /// Comma-separated strategy variants.
    #[arg(long, default_value = "full,s13,s23,s3")]
    pub variants: String,
    /// Report file, one JSON object per line.
    #[arg(long)]
    pub out: PathBuf,
}
