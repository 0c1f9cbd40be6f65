use std::fs::File;
use std::io::{BufWriter, Write};
use std::time::Instant;

use serde::Serialize;
use thui_core::query::{self, QueryResult, StrategySet, Thui};
use thui_core::Money;

use crate::args::{Format, MineArgs, QueryArgs, SortOrder};
use crate::error::CliError;
use crate::pipeline::{self, millis};

/// Counters and timings for one query run.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub parse_ms: f64,
    pub build_ms: f64,
    pub query_ms: f64,
    pub peak_candidates: u64,
    pub hui_count: u64,
    pub thui_count: usize,
    pub visited_nodes: u64,
    pub strategies: String,
    pub db_scans: u32,
}

pub fn mine<W: Write>(args: &MineArgs, out: &mut W) -> Result<(), CliError> {
    let (db, parse_time) = pipeline::load_database(&args.source.input)?;
    let built = pipeline::build(&db, args.source.min_util, false)?;
    if let Some(path) = &args.dump_tree {
        let file = File::create(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
        let mut w = BufWriter::new(file);
        built
            .tree
            .dump(&mut w)
            .and_then(|_| w.flush())
            .map_err(|source| CliError::Io { path: path.clone(), source })?;
    }
    let s = &built.stats;
    writeln!(out, "hui_count: {}", s.hui_count)?;
    writeln!(out, "candidates: {}", s.candidate_count)?;
    writeln!(out, "joins: {}", s.join_count)?;
    writeln!(out, "db_scans: {}", s.db_scans)?;
    writeln!(out, "tree_nodes: {}", built.tree.node_count())?;
    writeln!(out, "parse_ms: {:.3}", millis(parse_time))?;
    writeln!(out, "build_ms: {:.3}", millis(built.elapsed))?;
    Ok(())
}

/// Sorts by descending utility; equal utilities keep their discovery order.
pub fn sort_thuis(thuis: &mut [Thui], order: SortOrder) {
    if order == SortOrder::Utility {
        thuis.sort_by_key(|t| std::cmp::Reverse(t.utility));
    }
}

pub fn write_thui<W: Write>(out: &mut W, t: &Thui) -> std::io::Result<()> {
    let items: Vec<String> = t.items.iter().map(ToString::to_string).collect();
    writeln!(out, "{}\t{}", items.join(" "), t.utility)
}

pub fn query<W: Write>(args: &QueryArgs, out: &mut W) -> Result<(), CliError> {
    let target = pipeline::parse_items(&args.target)?;
    if target.is_empty() {
        return Err(query::QueryError::EmptyTarget.into());
    }
    let flags = StrategySet::from_mask(&args.strategies)?;
    let min_util = args.source.min_util;
    let xi: Money = args.target_min_util.unwrap_or(min_util);

    let (db, parse_time) = pipeline::load_database(&args.source.input)?;
    let built = pipeline::build(&db, min_util, false)?;
    drop(db);

    let start = Instant::now();
    let q = query::normalize_query(&target, xi, built.tree.order())?;
    let QueryResult { mut thuis, visited_nodes, .. } = query::query(&built.tree, &q, flags)?;
    let query_time = start.elapsed();
    sort_thuis(&mut thuis, args.sort);

    let report = RunReport {
        parse_ms: millis(parse_time),
        build_ms: millis(built.elapsed),
        query_ms: millis(query_time),
        peak_candidates: built.stats.candidate_count,
        hui_count: built.stats.hui_count,
        thui_count: thuis.len(),
        visited_nodes,
        strategies: flags.to_string(),
        db_scans: built.stats.db_scans,
    };
    match args.format {
        Format::Tsv => {
            for t in &thuis {
                write_thui(out, t)?;
            }
            if args.stats {
                writeln!(
                    out,
                    "# huis={} thuis={} visited={} strategies={} db_scans={} candidates={}",
                    report.hui_count,
                    report.thui_count,
                    report.visited_nodes,
                    report.strategies,
                    report.db_scans,
                    report.peak_candidates
                )?;
                writeln!(
                    out,
                    "# parse_ms={:.3} build_ms={:.3} query_ms={:.3}",
                    report.parse_ms, report.build_ms, report.query_ms
                )?;
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                thuis: &'a [Thui],
                #[serde(skip_serializing_if = "Option::is_none")]
                stats: Option<&'a RunReport>,
            }
            let doc = Doc { thuis: &thuis, stats: args.stats.then_some(&report) };
            serde_json::to_writer(&mut *out, &doc).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
    }
    Ok(())
}
