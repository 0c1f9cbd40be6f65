use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::time::Instant;

use serde::Serialize;
use thui_core::oracle::post_process_huis;
use thui_core::query::{self, StrategySet};
use thui_core::{Item, Money};

use crate::args::BenchArgs;
use crate::error::CliError;
use crate::pipeline::{self, approx_peak_rss_kib, millis};

/// One cell of the benchmark grid.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchRecord {
    pub input: String,
    pub min_util: Money,
    pub target_min_util: Money,
    pub target: Vec<Item>,
    pub variant: String,
    pub hui_count: u64,
    pub thui_count: usize,
    /// Count from filtering the full HUI set, for cross-validation.
    pub thui_baseline_count: usize,
    pub visited_nodes: u64,
    pub candidates: u64,
    pub db_scans: u32,
    pub parse_ms: f64,
    pub build_ms: f64,
    pub query_ms: f64,
    pub approx_peak_rss_kib: Option<u64>,
}

fn read_targets(args: &BenchArgs) -> Result<Vec<Vec<Item>>, CliError> {
    let text =
        fs::read_to_string(&args.targets).map_err(|source| CliError::Io { path: args.targets.clone(), source })?;
    let targets: Vec<Vec<Item>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(pipeline::parse_items)
        .collect::<Result<_, _>>()?;
    if targets.is_empty() {
        return Err(CliError::Usage(format!("{}: no targets", args.targets.display())));
    }
    Ok(targets)
}

fn parse_variants(text: &str) -> Result<Vec<StrategySet>, CliError> {
    let variants: Vec<StrategySet> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|v| StrategySet::from_variant(v).map_err(CliError::from))
        .collect::<Result<_, _>>()?;
    if variants.is_empty() {
        return Err(CliError::Usage("no strategy variants given".into()));
    }
    Ok(variants)
}

pub fn bench<W: Write>(args: &BenchArgs, out: &mut W) -> Result<Vec<BenchRecord>, CliError> {
    let sigmas = pipeline::parse_amounts(&args.min_util)?;
    if sigmas.is_empty() {
        return Err(CliError::Usage("no --min-util values given".into()));
    }
    let xis = args.target_min_util.as_deref().map(pipeline::parse_amounts).transpose()?;
    let targets = read_targets(args)?;
    let variants = parse_variants(&args.variants)?;

    let (db, parse_time) = pipeline::load_database(&args.input)?;
    let input = args.input.display().to_string();
    let mut records = Vec::new();
    for &sigma in &sigmas {
        let built = pipeline::build(&db, sigma, true)?;
        let cell_xis = xis.clone().unwrap_or_else(|| vec![sigma]);
        for &xi in &cell_xis {
            for target in &targets {
                let baseline = post_process_huis(built.huis.iter().cloned(), target, xi).len();
                for &flags in &variants {
                    let start = Instant::now();
                    let q = query::normalize_query(target, xi, built.tree.order())?;
                    let result = query::query(&built.tree, &q, flags)?;
                    let query_time = start.elapsed();
                    records.push(BenchRecord {
                        input: input.clone(),
                        min_util: sigma,
                        target_min_util: xi,
                        target: target.clone(),
                        variant: flags.to_string(),
                        hui_count: built.stats.hui_count,
                        thui_count: result.thuis.len(),
                        thui_baseline_count: baseline,
                        visited_nodes: result.visited_nodes,
                        candidates: built.stats.candidate_count,
                        db_scans: built.stats.db_scans,
                        parse_ms: millis(parse_time),
                        build_ms: millis(built.elapsed),
                        query_ms: millis(query_time),
                        approx_peak_rss_kib: approx_peak_rss_kib(),
                    });
                }
            }
        }
    }

    let file = File::create(&args.out).map_err(|source| CliError::Io { path: args.out.clone(), source })?;
    let mut report = BufWriter::new(file);
    for r in &records {
        serde_json::to_writer(&mut report, r).map_err(std::io::Error::from)?;
        writeln!(report)?;
    }
    report.flush().map_err(|source| CliError::Io { path: args.out.clone(), source })?;

    write_table(out, &records)?;
    Ok(records)
}

fn write_table<W: Write>(out: &mut W, records: &[BenchRecord]) -> std::io::Result<()> {
    writeln!(
        out,
        "{:>8} {:>8} {:<16} {:<6} {:>8} {:>8} {:>9} {:>9} {:>10} {:>10}",
        "minUtil", "xi", "target", "var", "HUIs", "THUIs", "THUIs*", "visited", "build ms", "query ms"
    )?;
    for r in records {
        let target: Vec<String> = r.target.iter().map(ToString::to_string).collect();
        writeln!(
            out,
            "{:>8} {:>8} {:<16} {:<6} {:>8} {:>8} {:>9} {:>9} {:>10.3} {:>10.3}",
            r.min_util,
            r.target_min_util,
            target.join(" "),
            r.variant,
            r.hui_count,
            r.thui_count,
            r.thui_baseline_count,
            r.visited_nodes,
            r.build_ms,
            r.query_ms
        )?;
    }
    match approx_peak_rss_kib() {
        Some(kib) => writeln!(out, "peak RSS (approximate): {kib} KiB"),
        None => writeln!(out, "peak RSS: unavailable"),
    }
}
