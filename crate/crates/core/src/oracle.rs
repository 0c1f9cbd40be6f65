//! Ground truth for small databases.
//!
//! Two routes that share nothing with the miner or the trie: exhaustive
//! subset enumeration straight from the definitions, and the "mine everything
//! then filter" baseline applied to any complete HUI set.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::Rng;
use thiserror::Error;

use crate::dataset::{ExternalUtilityTable, Item, Money, QuantDatabase};

/// Itemsets keyed by their items sorted by id.
pub type ItemsetUtilities = BTreeMap<Vec<Item>, Money>;

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    pub max_items: usize,
    pub max_transactions: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { max_items: 15, max_transactions: 32 }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{found} distinct items exceed the enumeration cap of {cap}")]
    TooManyItems { found: usize, cap: usize },
    #[error("{found} transactions exceed the cap of {cap}")]
    TooManyTransactions { found: usize, cap: usize },
}

/// Sorts items by id, the canonical key form used by the oracle.
pub fn canonical(items: &[Item]) -> Vec<Item> {
    let mut v = items.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// u(X): summed utility of X over every transaction containing all of X.
pub fn itemset_utility(db: &QuantDatabase, itemset: &[Item]) -> Money {
    db.transactions()
        .iter()
        .filter_map(|t| itemset.iter().map(|&i| t.utility_of(i)).sum::<Option<Money>>())
        .sum()
}

/// TWU(X): summed transaction utility of every transaction containing X.
pub fn itemset_twu(db: &QuantDatabase, itemset: &[Item]) -> Money {
    db.transactions()
        .iter()
        .filter(|t| itemset.iter().all(|&i| t.contains(i)))
        .map(|t| t.utility())
        .sum()
}

/// Every itemset X occurring in the database with u(X) ≥ σ, u(X) ≥ ξ and
/// target ⊆ X. An empty target turns this into plain HUI enumeration.
pub fn brute_force_thuis(
    db: &QuantDatabase,
    min_util: Money,
    target_min_util: Money,
    target: &[Item],
    cfg: OracleConfig,
) -> Result<ItemsetUtilities, OracleError> {
    let items = db.items();
    if items.len() > cfg.max_items {
        return Err(OracleError::TooManyItems { found: items.len(), cap: cfg.max_items });
    }
    if db.len() > cfg.max_transactions {
        return Err(OracleError::TooManyTransactions { found: db.len(), cap: cfg.max_transactions });
    }
    let bit = |item: Item| items.binary_search(&item).ok().map(|pos| 1u32 << pos);
    let mut target_mask = 0u32;
    for &t in target {
        match bit(t) {
            Some(b) => target_mask |= b,
            // A target item absent from the database is contained in nothing.
            None => return Ok(ItemsetUtilities::new()),
        }
    }

    // Per transaction: item mask and per-position utilities.
    let rows: Vec<(u32, Vec<Money>)> = db
        .transactions()
        .iter()
        .map(|t| {
            let mut utils = vec![0; items.len()];
            let mut mask = 0;
            for e in &t.entries {
                let pos = items.binary_search(&e.item).expect("item collected above");
                mask |= 1 << pos;
                utils[pos] = e.utility;
            }
            (mask, utils)
        })
        .collect();

    let mut out = ItemsetUtilities::new();
    for mask in 1u32..(1u32 << items.len()) {
        if mask & target_mask != target_mask {
            continue;
        }
        let mut occurs = false;
        let mut utility = 0;
        for (tmask, utils) in &rows {
            if tmask & mask == mask {
                occurs = true;
                utility += (0..items.len()).filter(|p| mask & (1 << p) != 0).map(|p| utils[p]).sum::<Money>();
            }
        }
        if occurs && utility >= min_util && utility >= target_min_util {
            let set = (0..items.len()).filter(|p| mask & (1 << p) != 0).map(|p| items[p]).collect();
            out.insert(set, utility);
        }
    }
    Ok(out)
}

pub fn brute_force_huis(
    db: &QuantDatabase,
    min_util: Money,
    cfg: OracleConfig,
) -> Result<ItemsetUtilities, OracleError> {
    brute_force_thuis(db, min_util, 0, &[], cfg)
}

/// Filters a complete HUI set down to the itemsets that contain every target
/// item and reach `target_min_util`.
pub fn post_process_huis<I>(huis: I, target: &[Item], target_min_util: Money) -> ItemsetUtilities
where
    I: IntoIterator<Item = (Vec<Item>, Money)>,
{
    huis.into_iter()
        .filter(|(set, utility)| *utility >= target_min_util && target.iter().all(|t| set.contains(t)))
        .map(|(set, utility)| (canonical(&set), utility))
        .collect()
}

/// Shape of the random databases used by the property suites.
#[derive(Debug, Clone)]
pub struct RandomDbParams {
    pub max_items: usize,
    pub max_transactions: usize,
    pub max_quantity: u32,
    pub max_unit_utility: u64,
    pub max_transaction_len: usize,
    /// Item ids are drawn from 1..=id_space.
    pub id_space: u32,
}

impl Default for RandomDbParams {
    fn default() -> Self {
        Self {
            max_items: 8,
            max_transactions: 10,
            max_quantity: 5,
            max_unit_utility: 10,
            max_transaction_len: 5,
            id_space: 40,
        }
    }
}

/// Draws a random quantitative database: uniform item count, transaction
/// count, transaction length, quantities and unit utilities.
pub fn random_database<R: Rng + ?Sized>(rng: &mut R, params: &RandomDbParams) -> QuantDatabase {
    let n_items = rng.gen_range(1..=params.max_items);
    let ids: Vec<Item> = sample(rng, params.id_space as usize, n_items)
        .into_iter()
        .map(|i| Item(i as u32 + 1))
        .collect();
    let eu: ExternalUtilityTable =
        ids.iter().map(|&i| (i, rng.gen_range(1..=params.max_unit_utility))).collect();
    let n_tx = rng.gen_range(1..=params.max_transactions);
    let rows = (0..n_tx)
        .map(|_| {
            let len = rng.gen_range(1..=params.max_transaction_len.min(n_items));
            sample(rng, n_items, len)
                .into_iter()
                .map(|pos| (ids[pos], rng.gen_range(1..=params.max_quantity)))
                .collect()
        })
        .collect();
    QuantDatabase::from_quantities(rows, &eu).expect("generated rows are well formed")
}
