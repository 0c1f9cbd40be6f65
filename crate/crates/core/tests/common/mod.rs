#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use thui_core::dataset::{Item, Money, QuantDatabase};
use thui_core::miner::{HuiRecord, MinerConfig, MiningStats};
use thui_core::oracle::{self, ItemsetUtilities};
use thui_core::tree::{build_tree_with, NodeId, PatternTree};

/// Items with the per-node utility, remaining-utility and TWU sequences.
pub type Record = (Vec<Item>, Vec<Money>, Vec<Money>, Vec<Money>);

/// A built tree plus every HUI record the miner produced while building it.
pub struct Built {
    pub tree: PatternTree,
    pub stats: MiningStats,
    pub records: Vec<Record>,
}

pub fn build(db: &QuantDatabase, min_util: Money, config: MinerConfig) -> Built {
    let rdb = thui_core::miner::revise_for(db, min_util, config);
    let mut records = Vec::new();
    let order = rdb.order().clone();
    let (tree, stats) = build_tree_with(&rdb, min_util, config, |h: &HuiRecord<'_>| {
        records.push((h.items(&order), h.ius.to_vec(), h.rus.to_vec(), h.twus.to_vec()));
    })
    .expect("build succeeds");
    Built { tree, stats, records }
}

pub fn miner_huis(built: &Built) -> ItemsetUtilities {
    built.records.iter().map(|r| (oracle::canonical(&r.0), *r.1.last().unwrap())).collect()
}

fn dump(tree: &PatternTree) -> String {
    let mut buf = Vec::new();
    tree.dump(&mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

fn chains(tree: &PatternTree) -> Vec<Vec<NodeId>> {
    tree.order().items().iter().map(|&i| tree.chain(i).collect()).collect()
}

/// Checks the structural invariants of a built tree against the expected HUI
/// set. Returns a description of the first violation.
pub fn check_structure(built: &Built, expected_huis: &ItemsetUtilities) -> Result<(), String> {
    let tree = &built.tree;

    // Child twu is no less than its parent's; children strictly rank-ordered.
    for id in tree.node_ids() {
        let n = tree.node(id);
        if let Some(p) = n.parent.filter(|&p| p != NodeId::ROOT) {
            if n.twu < tree.node(p).twu {
                return Err(format!("node {id:?} twu {} below parent twu {}", n.twu, tree.node(p).twu));
            }
        }
        let ranks: Vec<u32> = n.children.iter().map(|&c| tree.node(c).rank).collect();
        if ranks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(format!("children of {id:?} not strictly ordered: {ranks:?}"));
        }
        if n.sum_iu > n.twu {
            return Err(format!("node {id:?} sumIu {} exceeds twu {}", n.sum_iu, n.twu));
        }
    }

    // isEnd paths are exactly the HUIs, each once.
    let paths = tree.huis();
    let unique: BTreeSet<Vec<Item>> = paths.iter().map(|p| oracle::canonical(&p.0)).collect();
    if unique.len() != paths.len() {
        return Err("an HUI appears on more than one path".into());
    }
    let as_map: ItemsetUtilities = paths.iter().map(|(s, u)| (oracle::canonical(s), *u)).collect();
    if &as_map != expected_huis {
        return Err(format!("isEnd paths {} differ from HUI set {}", as_map.len(), expected_huis.len()));
    }
    // Every node lies on some HUI path.
    for id in tree.node_ids() {
        let mut stack = vec![id];
        let mut found = false;
        while let Some(x) = stack.pop() {
            if tree.node(x).is_end {
                found = true;
                break;
            }
            stack.extend(tree.node(x).children.iter().copied());
        }
        if !found {
            return Err(format!("node {id:?} lies on no HUI path"));
        }
    }

    // Header chains hold exactly the nodes of each item, in creation order.
    let mut by_item: BTreeMap<Item, Vec<NodeId>> = BTreeMap::new();
    for id in tree.node_ids() {
        by_item.entry(tree.node(id).item).or_default().push(id);
    }
    for &item in tree.order().items() {
        let chain: Vec<NodeId> = tree.chain(item).collect();
        let expected = by_item.remove(&item).unwrap_or_default();
        if chain != expected {
            return Err(format!("chain of item {item} is {chain:?}, expected {expected:?}"));
        }
        let rank = tree.order().rank(item).unwrap();
        if tree.header().tail(rank) != chain.last().copied() {
            return Err(format!("tail of item {item} is not the last chain node"));
        }
    }

    // Re-inserting every HUI changes nothing.
    let mut again = tree.clone();
    let (before_dump, before_chains) = (dump(tree), chains(tree));
    for (items, ius, rus, twus) in &built.records {
        let created = again.insert_hui(items, ius, rus, twus).map_err(|e| e.to_string())?;
        if created != 0 {
            return Err(format!("re-insertion of {items:?} created {created} nodes"));
        }
    }
    if dump(&again) != before_dump || chains(&again) != before_chains {
        return Err("re-insertion modified the tree".into());
    }
    Ok(())
}

/// Random query parameters over `db`: σ, ξ and a target of one to three
/// items, occasionally including an item the database never mentions.
pub fn random_query<R: Rng>(rng: &mut R, db: &QuantDatabase) -> (Money, Money, Vec<Item>) {
    let total: Money = db.transactions().iter().map(|t| t.utility()).sum();
    let sigma = rng.gen_range(1..=(total / 2).max(1));
    let xi = rng.gen_range(0..=sigma + sigma / 2);
    let items = db.items();
    let k = rng.gen_range(1..=items.len().min(3));
    let mut target: Vec<Item> = rand::seq::index::sample(rng, items.len(), k).into_iter().map(|p| items[p]).collect();
    if rng.gen_bool(0.05) {
        target.push(Item(10_000));
    }
    (sigma, xi, target)
}
