//! Targeted high-utility itemset mining.
//!
//! The pipeline mines every high-utility itemset of a quantitative
//! transaction database once, indexes them in a pattern trie with per-item
//! header chains, and then answers any number of targeted queries ("all
//! high-utility itemsets containing these items, worth at least ξ") from the
//! trie alone.
//!
//! ```
//! use thui_core::{dataset, fixtures, query, tree};
//!
//! let db = fixtures::database();
//! let rdb = dataset::revise_database(&db, 25);
//! let (tree, _stats) = tree::build_tree(&rdb, 25, Default::default()).unwrap();
//! let q = query::normalize_query(&fixtures::items("be"), 30, tree.order()).unwrap();
//! let result = query::query(&tree, &q, query::StrategySet::FULL).unwrap();
//! assert_eq!(result.thuis.len(), 4);
//! ```

pub mod dataset;
pub mod fixtures;
pub mod miner;
pub mod oracle;
pub mod query;
pub mod tree;

pub use dataset::{Item, Money, QuantDatabase, Tid};
pub use miner::{MinerConfig, MiningStats};
pub use query::{QueryResult, QuerySession, StrategySet, TargetQuery};
pub use tree::PatternTree;
