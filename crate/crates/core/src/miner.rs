//! Utility-list mining: depth-first join of per-itemset utility-lists,
//! emitting every high-utility itemset together with the cumulative
//! per-prefix values the pattern trie stores.

use serde::Serialize;
use thiserror::Error;

use crate::dataset::{Item, ItemOrder, Money, QuantDatabase, RevisedDatabase, Tid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UtilityEntry {
    pub tid: Tid,
    pub iutil: Money,
    pub rutil: Money,
}

/// Utility-list of one itemset. The itemset is held as item ranks of the
/// global order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityList {
    itemset: Vec<u32>,
    entries: Vec<UtilityEntry>,
    sum_iu: Money,
    sum_ru: Money,
}

impl UtilityList {
    fn new(itemset: Vec<u32>) -> Self {
        Self { itemset, entries: Vec::new(), sum_iu: 0, sum_ru: 0 }
    }

    fn push(&mut self, entry: UtilityEntry) {
        self.sum_iu += entry.iutil;
        self.sum_ru += entry.rutil;
        self.entries.push(entry);
    }

    pub fn itemset(&self) -> &[u32] {
        &self.itemset
    }

    pub fn items(&self, order: &ItemOrder) -> Vec<Item> {
        self.itemset.iter().map(|&r| order.item(r)).collect()
    }

    pub fn last(&self) -> u32 {
        *self.itemset.last().expect("utility-lists are never built for the empty itemset")
    }

    pub fn entries(&self) -> &[UtilityEntry] {
        &self.entries
    }

    pub fn sum_iu(&self) -> Money {
        self.sum_iu
    }

    pub fn sum_ru(&self) -> Money {
        self.sum_ru
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MinerError {
    #[error("join precondition violated: {0}")]
    Precondition(&'static str),
}

/// Which mining-side pruning strategies are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MinerConfig {
    /// Skip items (and so all their supersets) whose TWU is below σ.
    pub twu_pruning: bool,
    /// Only extend X when sumIu(X) + sumRu(X) ≥ σ.
    pub remaining_pruning: bool,
}

impl Default for MinerConfig {
    fn default() -> Self {
        Self { twu_pruning: true, remaining_pruning: true }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct MiningStats {
    pub hui_count: u64,
    /// Utility-lists constructed, single-item lists included.
    pub candidate_count: u64,
    pub join_count: u64,
    pub db_scans: u32,
    pub twu_pruning: bool,
    pub remaining_pruning: bool,
}

/// One discovered HUI with the cumulative values along its prefix chain:
/// position k holds the values of the itemset made of the first k + 1 items.
#[derive(Debug, Clone, Copy)]
pub struct HuiRecord<'a> {
    pub ranks: &'a [u32],
    pub ius: &'a [Money],
    pub rus: &'a [Money],
    pub twus: &'a [Money],
}

impl HuiRecord<'_> {
    pub fn utility(&self) -> Money {
        *self.ius.last().expect("HUIs are non-empty")
    }

    pub fn items(&self, order: &ItemOrder) -> Vec<Item> {
        self.ranks.iter().map(|&r| order.item(r)).collect()
    }
}

/// Revises `db` for mining at `min_util`. With TWU pruning off nothing is
/// filtered, so the item order covers every item.
pub fn revise_for(db: &QuantDatabase, min_util: Money, config: MinerConfig) -> RevisedDatabase {
    crate::dataset::revise_database(db, if config.twu_pruning { min_util } else { 0 })
}

/// One utility-list per item of the revised database, in global order.
pub fn build_single_item_lists(rdb: &RevisedDatabase) -> Vec<UtilityList> {
    let mut lists: Vec<UtilityList> = (0..rdb.order().len() as u32).map(|r| UtilityList::new(vec![r])).collect();
    for t in rdb.transactions() {
        let mut remaining: Money = t.entries.iter().map(|e| e.1).sum();
        for &(rank, utility) in &t.entries {
            remaining -= utility;
            lists[rank as usize].push(UtilityEntry { tid: t.tid, iutil: utility, rutil: remaining });
        }
    }
    lists
}

/// Joins the lists of P∪{x} and P∪{y} into the list of P∪{x, y}. `prefix`
/// is the list of P, or `None` when P is empty.
pub fn join_lists(
    prefix: Option<&UtilityList>,
    px: &UtilityList,
    py: &UtilityList,
) -> Result<UtilityList, MinerError> {
    let n = px.itemset.len();
    if n == 0 || py.itemset.len() != n {
        return Err(MinerError::Precondition("lists must describe itemsets of equal, non-zero length"));
    }
    if px.itemset[..n - 1] != py.itemset[..n - 1] {
        return Err(MinerError::Precondition("lists must share the same prefix"));
    }
    if px.last() >= py.last() {
        return Err(MinerError::Precondition("last item of px must precede last item of py"));
    }
    match prefix {
        None if n != 1 => return Err(MinerError::Precondition("prefix list required for longer itemsets")),
        Some(p) if p.itemset[..] != px.itemset[..n - 1] => {
            return Err(MinerError::Precondition("prefix list does not match the shared prefix"))
        }
        _ => {}
    }
    Ok(join(prefix, px, py))
}

fn join(prefix: Option<&UtilityList>, px: &UtilityList, py: &UtilityList) -> UtilityList {
    let mut itemset = Vec::with_capacity(px.itemset.len() + 1);
    itemset.extend_from_slice(&px.itemset);
    itemset.push(py.last());
    let mut out = UtilityList::new(itemset);

    let (xs, ys) = (&px.entries, &py.entries);
    let (mut i, mut j, mut k) = (0, 0, 0);
    while i < xs.len() && j < ys.len() {
        let (ex, ey) = (xs[i], ys[j]);
        match ex.tid.cmp(&ey.tid) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                let mut iutil = ex.iutil + ey.iutil;
                if let Some(p) = prefix {
                    // Every tid of px also occurs in the prefix list.
                    while p.entries[k].tid < ex.tid {
                        k += 1;
                    }
                    iutil -= p.entries[k].iutil;
                }
                out.push(UtilityEntry { tid: ex.tid, iutil, rutil: ey.rutil });
                i += 1;
                j += 1;
            }
        }
    }
    out
}

struct Search<'a, F> {
    min_util: Money,
    config: MinerConfig,
    order: &'a ItemOrder,
    stats: MiningStats,
    sink: F,
    ranks: Vec<u32>,
    ius: Vec<Money>,
    rus: Vec<Money>,
    twus: Vec<Money>,
}

impl<F, E> Search<'_, F>
where
    F: FnMut(&HuiRecord<'_>) -> Result<(), E>,
{
    fn explore(&mut self, prefix: Option<&UtilityList>, lists: &[UtilityList]) -> Result<(), E> {
        for (i, x) in lists.iter().enumerate() {
            self.ranks.push(x.last());
            self.ius.push(x.sum_iu);
            self.rus.push(x.sum_ru);
            self.twus.push(self.order.twu_of_rank(x.last()));

            if x.sum_iu >= self.min_util {
                self.stats.hui_count += 1;
                let record = HuiRecord { ranks: &self.ranks, ius: &self.ius, rus: &self.rus, twus: &self.twus };
                (self.sink)(&record)?;
            }
            if !self.config.remaining_pruning || x.sum_iu + x.sum_ru >= self.min_util {
                let mut extensions = Vec::new();
                for y in &lists[i + 1..] {
                    self.stats.join_count += 1;
                    let joined = join(prefix, x, y);
                    // An empty list means the itemset occurs nowhere.
                    if !joined.is_empty() {
                        self.stats.candidate_count += 1;
                        extensions.push(joined);
                    }
                }
                if !extensions.is_empty() {
                    self.explore(Some(x), &extensions)?;
                }
            }

            self.ranks.pop();
            self.ius.pop();
            self.rus.pop();
            self.twus.pop();
        }
        Ok(())
    }
}

/// Enumerates every HUI of `rdb` at `min_util` depth-first in global order,
/// handing each one to `sink` as soon as it is found.
pub fn mine<F, E>(rdb: &RevisedDatabase, min_util: Money, config: MinerConfig, sink: F) -> Result<MiningStats, E>
where
    F: FnMut(&HuiRecord<'_>) -> Result<(), E>,
{
    let lists: Vec<UtilityList> = build_single_item_lists(rdb)
        .into_iter()
        .filter(|l| !l.is_empty())
        .filter(|l| !config.twu_pruning || rdb.order().twu_of_rank(l.last()) >= min_util)
        .collect();
    let mut search = Search {
        min_util,
        config,
        order: rdb.order(),
        stats: MiningStats {
            candidate_count: lists.len() as u64,
            db_scans: rdb.scans() + 1,
            twu_pruning: config.twu_pruning,
            remaining_pruning: config.remaining_pruning,
            ..MiningStats::default()
        },
        sink,
        ranks: Vec::new(),
        ius: Vec::new(),
        rus: Vec::new(),
        twus: Vec::new(),
    };
    search.explore(None, &lists)?;
    Ok(search.stats)
}

/// Convenience wrapper collecting every HUI with its utility.
pub fn mine_all(rdb: &RevisedDatabase, min_util: Money, config: MinerConfig) -> (Vec<(Vec<Item>, Money)>, MiningStats) {
    let mut out = Vec::new();
    let stats = mine::<_, std::convert::Infallible>(rdb, min_util, config, |h| {
        out.push((h.items(rdb.order()), h.utility()));
        Ok(())
    })
    .unwrap_or_else(|never| match never {});
    (out, stats)
}
