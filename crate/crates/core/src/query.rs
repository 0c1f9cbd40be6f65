//! Targeted queries over a built pattern trie.
//!
//! A query walks the header chain of the target item with the largest TWU.
//! From each anchor node it climbs to the root, matching the remaining
//! target items on the way; anchors whose path holds every target then
//! yield their own path and, depth-first, every descendant path.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::dataset::{Item, ItemOrder, Money};
use crate::miner::MiningStats;
use crate::tree::{NodeId, PatternTree};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("target itemset must contain at least one item")]
    EmptyTarget,
    #[error("query was normalized against a different item order than the tree's")]
    OrderMismatch,
    #[error("invalid strategy mask {0:?}: expected a subset of \"123\" containing 3")]
    BadStrategyMask(String),
}

/// Pruning strategies applied while querying.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StrategySet {
    /// Drop a branch once a node's TWU falls below ξ.
    pub twu_bound: bool,
    /// Skip anchors, and stop descending, where sumIu + sumRu < ξ.
    pub utility_bound: bool,
    /// Abort a climb once the node TWU drops below the next target item's TWU.
    pub early_abort: bool,
}

impl StrategySet {
    pub const FULL: Self = Self { twu_bound: true, utility_bound: true, early_abort: true };
    pub const S13: Self = Self { twu_bound: true, utility_bound: false, early_abort: true };
    pub const S23: Self = Self { twu_bound: false, utility_bound: true, early_abort: true };
    pub const S3: Self = Self { twu_bound: false, utility_bound: false, early_abort: true };

    /// Parses a digit mask such as `"123"` or `"3"`.
    pub fn from_mask(mask: &str) -> Result<Self, QueryError> {
        let bad = || QueryError::BadStrategyMask(mask.to_string());
        if mask.is_empty() || !mask.chars().all(|c| matches!(c, '1' | '2' | '3')) || !mask.contains('3') {
            return Err(bad());
        }
        Ok(Self { twu_bound: mask.contains('1'), utility_bound: mask.contains('2'), early_abort: true })
    }

    /// Parses a variant name (`full`, `s13`, `s23`, `s3`) or a bare mask.
    pub fn from_variant(name: &str) -> Result<Self, QueryError> {
        match name {
            "full" => Ok(Self::FULL),
            other => Self::from_mask(other.strip_prefix('s').unwrap_or(other)),
        }
    }

    pub fn mask(&self) -> String {
        let mut s = String::new();
        if self.twu_bound {
            s.push('1');
        }
        if self.utility_bound {
            s.push('2');
        }
        if self.early_abort {
            s.push('3');
        }
        s
    }
}

impl Default for StrategySet {
    fn default() -> Self {
        Self::FULL
    }
}

impl fmt::Display for StrategySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Self::FULL {
            f.write_str("full")
        } else {
            write!(f, "s{}", self.mask())
        }
    }
}

/// A target itemset sorted by the tree's item order, plus ξ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetQuery {
    items: Vec<Item>,
    ranks: Vec<u32>,
    xi: Money,
    unreachable: bool,
    order_fingerprint: u64,
}

impl TargetQuery {
    /// Target items: known items in global order, then unknown ones by id.
    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn xi(&self) -> Money {
        self.xi
    }

    /// True when some target item occurs in no HUI, so nothing can match.
    pub fn is_unreachable(&self) -> bool {
        self.unreachable
    }
}

/// Deduplicates `raw` and sorts it by `order`. Items outside the order are
/// kept but mark the query unreachable.
pub fn normalize_query(raw: &[Item], xi: Money, order: &ItemOrder) -> Result<TargetQuery, QueryError> {
    if raw.is_empty() {
        return Err(QueryError::EmptyTarget);
    }
    let mut known: Vec<(u32, Item)> = raw.iter().filter_map(|&i| order.rank(i).map(|r| (r, i))).collect();
    known.sort_unstable();
    known.dedup();
    let mut unknown: Vec<Item> = raw.iter().copied().filter(|&i| order.rank(i).is_none()).collect();
    unknown.sort_unstable();
    unknown.dedup();
    let unreachable = !unknown.is_empty();
    let ranks = known.iter().map(|k| k.0).collect();
    let items = known.iter().map(|k| k.1).chain(unknown).collect();
    Ok(TargetQuery { items, ranks, xi, unreachable, order_fingerprint: order.fingerprint() })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Thui {
    /// Items in global order.
    pub items: Vec<Item>,
    pub utility: Money,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryResult {
    pub thuis: Vec<Thui>,
    pub visited_nodes: u64,
    pub strategies: StrategySet,
}

impl QueryResult {
    /// Results keyed by id-sorted itemsets, for set comparisons.
    pub fn as_set(&self) -> crate::oracle::ItemsetUtilities {
        self.thuis.iter().map(|t| (crate::oracle::canonical(&t.items), t.utility)).collect()
    }
}

enum Climb {
    /// Every target matched; nodes from the root down to the anchor.
    Matched(Vec<NodeId>),
    /// Gave up after reading `last_read` (the anchor itself if nothing above
    /// it was read).
    Failed {
        #[cfg_attr(not(test), allow(dead_code))]
        last_read: NodeId,
    },
}

struct Querier<'a> {
    tree: &'a PatternTree,
    targets: &'a [u32],
    target_twus: Vec<Money>,
    xi: Money,
    flags: StrategySet,
    visited: u64,
    out: Vec<Thui>,
}

impl Querier<'_> {
    fn climb(&mut self, anchor: NodeId) -> Climb {
        // Index of the next unmatched target, counted from the end; the
        // anchor already matched the last one.
        let mut pending = self.targets.len() - 1;
        let mut path = vec![anchor];
        let mut last_read = anchor;
        let mut cur = self.tree.node(anchor).parent;
        while let Some(id) = cur.filter(|&c| c != NodeId::ROOT) {
            let node = self.tree.node(id);
            self.visited += 1;
            last_read = id;
            if self.flags.twu_bound && node.twu < self.xi {
                return Climb::Failed { last_read };
            }
            if pending > 0 {
                let want = pending - 1;
                let want_twu = self.target_twus[want];
                if self.flags.early_abort && node.twu < want_twu {
                    return Climb::Failed { last_read };
                }
                if node.twu == want_twu && node.rank == self.targets[want] {
                    pending -= 1;
                }
            }
            path.push(id);
            cur = node.parent;
        }
        if pending > 0 {
            return Climb::Failed { last_read };
        }
        path.reverse();
        Climb::Matched(path)
    }

    fn emit(&mut self, items: &[Item], utility: Money) {
        self.out.push(Thui { items: items.to_vec(), utility });
    }

    fn suffix(&mut self, parent: NodeId, prefix: &mut Vec<Item>) {
        for &child in &self.tree.node(parent).children {
            let node = self.tree.node(child);
            self.visited += 1;
            prefix.push(node.item);
            if node.is_end && node.sum_iu >= self.xi {
                self.emit(prefix, node.sum_iu);
            }
            if !node.children.is_empty() && (!self.flags.utility_bound || node.sum_iu + node.sum_ru >= self.xi) {
                self.suffix(child, prefix);
            }
            prefix.pop();
        }
    }

    fn run(&mut self, anchor_rank: u32) {
        let head = self.tree.header().head(anchor_rank);
        let anchors: Vec<NodeId> = self.tree.chain_from(head).collect();
        for anchor in anchors {
            let node = self.tree.node(anchor);
            self.visited += 1;
            if self.flags.utility_bound && node.sum_iu + node.sum_ru < self.xi {
                continue;
            }
            let Climb::Matched(path) = self.climb(anchor) else {
                continue;
            };
            let mut items: Vec<Item> = path.iter().map(|&id| self.tree.node(id).item).collect();
            if node.is_end && node.sum_iu >= self.xi {
                self.emit(&items, node.sum_iu);
            }
            self.suffix(anchor, &mut items);
        }
    }
}

/// Answers `q` from `tree`: every HUI containing all target items whose
/// utility is at least ξ. Results come in discovery order (anchor chain
/// order, then depth-first below each anchor).
pub fn query(tree: &PatternTree, q: &TargetQuery, flags: StrategySet) -> Result<QueryResult, QueryError> {
    if q.order_fingerprint != tree.order().fingerprint() {
        return Err(QueryError::OrderMismatch);
    }
    let empty = QueryResult { thuis: Vec::new(), visited_nodes: 0, strategies: flags };
    if q.unreachable || q.ranks.is_empty() {
        return Ok(empty);
    }
    let target_twus: Vec<Money> = q.ranks.iter().map(|&r| tree.order().twu_of_rank(r)).collect();
    // TWU of the cheapest target bounds the utility of every match.
    if flags.twu_bound && target_twus[0] < q.xi {
        return Ok(empty);
    }
    let mut querier = Querier {
        tree,
        targets: &q.ranks,
        target_twus,
        xi: q.xi,
        flags,
        visited: 0,
        out: Vec::new(),
    };
    querier.run(*q.ranks.last().expect("checked non-empty"));
    Ok(QueryResult { thuis: querier.out, visited_nodes: querier.visited, strategies: flags })
}

/// Repeated querying against one built tree. The database is never touched
/// again; the scan count stays at its post-build value.
pub struct QuerySession<'t> {
    tree: &'t PatternTree,
    build_stats: MiningStats,
    flags: StrategySet,
    queries: u64,
}

impl<'t> QuerySession<'t> {
    pub fn new(tree: &'t PatternTree, build_stats: MiningStats) -> Self {
        Self { tree, build_stats, flags: StrategySet::FULL, queries: 0 }
    }

    pub fn tree(&self) -> &'t PatternTree {
        self.tree
    }

    pub fn set_strategies(&mut self, flags: StrategySet) {
        self.flags = flags;
    }

    pub fn strategies(&self) -> StrategySet {
        self.flags
    }

    pub fn db_scans(&self) -> u32 {
        self.build_stats.db_scans
    }

    pub fn build_stats(&self) -> &MiningStats {
        &self.build_stats
    }

    pub fn queries_answered(&self) -> u64 {
        self.queries
    }

    pub fn query(&mut self, raw: &[Item], xi: Money) -> Result<QueryResult, QueryError> {
        let q = normalize_query(raw, xi, self.tree.order())?;
        let result = query(self.tree, &q, self.flags)?;
        self.queries += 1;
        Ok(result)
    }

    /// Answers a stream of `(target, ξ)` pairs; a failing query yields its
    /// error and the stream carries on.
    pub fn answer_all<'s, I>(&'s mut self, queries: I) -> impl Iterator<Item = Result<QueryResult, QueryError>> + use<'s, 't, I>
    where
        I: IntoIterator<Item = (Vec<Item>, Money)>,
        I::IntoIter: 's,
    {
        queries.into_iter().map(move |(items, xi)| self.query(&items, xi))
    }
}
