//! Quantitative transaction databases: parsing, transaction utility, TWU and
//! the revised (pruned and reordered) database the miner consumes.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Utility amounts. All utilities are non-negative integers.
pub type Money = u64;

/// Transaction identifier, assigned 1..=m in input order.
pub type Tid = u32;

/// An item identifier as it appears in the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Item(pub u32);

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DatasetError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("no transactions")]
    NoTransactions,
    #[error("no external utility for item {0}")]
    MissingUtility(Item),
    #[error("item {item} appears twice in transaction {tid}")]
    DuplicateItem { tid: Tid, item: Item },
    #[error("quantity of item {item} in transaction {tid} must be positive")]
    ZeroQuantity { tid: Tid, item: Item },
    #[error("utility {utility} of item {item} is not a multiple of its unit utility {unit}")]
    Indivisible { item: Item, utility: Money, unit: Money },
    #[error("i/o error: {0}")]
    Io(String),
}

/// Unit (external) utility per item.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExternalUtilityTable {
    units: HashMap<Item, Money>,
}

impl ExternalUtilityTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, item: Item, unit: Money) {
        self.units.insert(item, unit);
    }

    pub fn get(&self, item: Item) -> Option<Money> {
        self.units.get(&item).copied()
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }
}

impl FromIterator<(Item, Money)> for ExternalUtilityTable {
    fn from_iter<I: IntoIterator<Item = (Item, Money)>>(iter: I) -> Self {
        Self { units: iter.into_iter().collect() }
    }
}

/// One item of a transaction together with its utility u(i, T).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ItemUtility {
    pub item: Item,
    pub utility: Money,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    pub tid: Tid,
    pub entries: Vec<ItemUtility>,
}

impl Transaction {
    /// tu(T): the summed utility of every item in the transaction.
    pub fn utility(&self) -> Money {
        self.entries.iter().map(|e| e.utility).sum()
    }

    pub fn utility_of(&self, item: Item) -> Option<Money> {
        self.entries.iter().find(|e| e.item == item).map(|e| e.utility)
    }

    pub fn contains(&self, item: Item) -> bool {
        self.entries.iter().any(|e| e.item == item)
    }

    /// Recovers purchase quantities by dividing out unit utilities.
    pub fn quantities(&self, eu: &ExternalUtilityTable) -> Result<Vec<(Item, Money)>, DatasetError> {
        self.entries
            .iter()
            .map(|e| {
                let unit = eu.get(e.item).ok_or(DatasetError::MissingUtility(e.item))?;
                if unit == 0 || e.utility % unit != 0 {
                    return Err(DatasetError::Indivisible { item: e.item, utility: e.utility, unit });
                }
                Ok((e.item, e.utility / unit))
            })
            .collect()
    }
}

/// Σ eu(i)·q(i) over the entries of a quantity-form transaction.
pub fn transaction_utility(
    entries: &[(Item, u32)],
    eu: &ExternalUtilityTable,
) -> Result<Money, DatasetError> {
    entries.iter().try_fold(0, |acc, &(item, quantity)| {
        let unit = eu.get(item).ok_or(DatasetError::MissingUtility(item))?;
        Ok(acc + unit * Money::from(quantity))
    })
}

/// A quantitative transaction database with utilities already multiplied out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantDatabase {
    transactions: Vec<Transaction>,
}

impl QuantDatabase {
    /// Builds a database from transactions that already carry per-item
    /// utilities. Tids are reassigned 1..=m.
    pub fn from_utilities(rows: Vec<Vec<(Item, Money)>>) -> Result<Self, DatasetError> {
        let mut transactions = Vec::with_capacity(rows.len());
        for (idx, row) in rows.into_iter().enumerate() {
            let tid = idx as Tid + 1;
            let mut seen = HashSet::with_capacity(row.len());
            for &(item, _) in &row {
                if !seen.insert(item) {
                    return Err(DatasetError::DuplicateItem { tid, item });
                }
            }
            let entries = row.into_iter().map(|(item, utility)| ItemUtility { item, utility }).collect();
            transactions.push(Transaction { tid, entries });
        }
        Ok(Self { transactions })
    }

    /// Builds a database from purchase quantities and a unit-utility table,
    /// multiplying each quantity by its item's unit utility.
    pub fn from_quantities(
        rows: Vec<Vec<(Item, u32)>>,
        eu: &ExternalUtilityTable,
    ) -> Result<Self, DatasetError> {
        let mut out = Vec::with_capacity(rows.len());
        for (idx, row) in rows.into_iter().enumerate() {
            let tid = idx as Tid + 1;
            let mut entries = Vec::with_capacity(row.len());
            for (item, quantity) in row {
                if quantity == 0 {
                    return Err(DatasetError::ZeroQuantity { tid, item });
                }
                let unit = eu.get(item).ok_or(DatasetError::MissingUtility(item))?;
                entries.push((item, unit * Money::from(quantity)));
            }
            out.push(entries);
        }
        Self::from_utilities(out)
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    /// Distinct items in ascending id order.
    pub fn items(&self) -> Vec<Item> {
        let mut items: Vec<Item> =
            self.transactions.iter().flat_map(|t| t.entries.iter().map(|e| e.item)).collect();
        items.sort_unstable();
        items.dedup();
        items
    }
}

/// Parser options for the colon-separated quantitative format.
#[derive(Debug, Clone, Copy)]
pub struct ParseOptions {
    /// Require the transaction-utility field to equal the sum of the item
    /// utilities.
    pub strict: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self { strict: true }
    }
}

/// Parses `items:tu:utilities` lines. Lines starting with `#`, `%` or `@`
/// and blank lines are skipped.
pub fn parse_database<R: BufRead>(reader: R, opts: ParseOptions) -> Result<QuantDatabase, DatasetError> {
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| DatasetError::Io(e.to_string()))?;
        let line = line.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with(['#', '%', '@']) {
            continue;
        }
        rows.push(parse_line(line, line_no, opts)?);
    }
    if rows.is_empty() {
        return Err(DatasetError::NoTransactions);
    }
    QuantDatabase::from_utilities(rows)
}

pub fn parse_str(text: &str, opts: ParseOptions) -> Result<QuantDatabase, DatasetError> {
    parse_database(text.as_bytes(), opts)
}

fn parse_line(line: &str, line_no: usize, opts: ParseOptions) -> Result<Vec<(Item, Money)>, DatasetError> {
    let err = |reason: String| DatasetError::Parse { line: line_no, reason };
    let fields: Vec<&str> = line.split(':').collect();
    if fields.len() != 3 {
        return Err(err(format!("expected 3 colon-separated fields, found {}", fields.len())));
    }
    let items = fields[0]
        .split_whitespace()
        .map(|tok| tok.parse::<u32>().map(Item).map_err(|_| err(format!("invalid item id {tok:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let tu = fields[1]
        .trim()
        .parse::<Money>()
        .map_err(|_| err(format!("invalid transaction utility {:?}", fields[1].trim())))?;
    let utilities = fields[2]
        .split_whitespace()
        .map(|tok| tok.parse::<Money>().map_err(|_| err(format!("invalid utility {tok:?}"))))
        .collect::<Result<Vec<_>, _>>()?;

    if items.is_empty() {
        return Err(err("transaction has no items".into()));
    }
    if items.len() != utilities.len() {
        return Err(err(format!("{} items but {} utilities", items.len(), utilities.len())));
    }
    let mut seen = HashSet::with_capacity(items.len());
    for item in &items {
        if !seen.insert(*item) {
            return Err(err(format!("duplicate item {item}")));
        }
    }
    let sum: Money = utilities.iter().sum();
    if opts.strict && sum != tu {
        return Err(err(format!("transaction utility {tu} does not match item utility sum {sum}")));
    }
    Ok(items.into_iter().zip(utilities).collect())
}

/// TWU of every item: Σ tu(T) over transactions containing it.
pub fn compute_twu(db: &QuantDatabase) -> BTreeMap<Item, Money> {
    let mut twu = BTreeMap::new();
    for t in db.transactions() {
        let tu = t.utility();
        for e in &t.entries {
            *twu.entry(e.item).or_insert(0) += tu;
        }
    }
    twu
}

/// Total order over the promising items: TWU ascending, ties broken by
/// ascending item id. Items are addressed internally by their rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemOrder {
    items: Vec<Item>,
    twu: Vec<Money>,
    rank: HashMap<Item, u32>,
    fingerprint: u64,
}

impl ItemOrder {
    pub fn new(mut entries: Vec<(Item, Money)>) -> Self {
        entries.sort_unstable_by_key(|&(item, twu)| (twu, item));
        let items: Vec<Item> = entries.iter().map(|e| e.0).collect();
        let twu: Vec<Money> = entries.iter().map(|e| e.1).collect();
        let rank = items.iter().enumerate().map(|(r, &i)| (i, r as u32)).collect();
        let mut hasher = DefaultHasher::new();
        entries.hash(&mut hasher);
        Self { items, twu, rank, fingerprint: hasher.finish() }
    }

    pub fn rank(&self, item: Item) -> Option<u32> {
        self.rank.get(&item).copied()
    }

    pub fn item(&self, rank: u32) -> Item {
        self.items[rank as usize]
    }

    pub fn twu_of_rank(&self, rank: u32) -> Money {
        self.twu[rank as usize]
    }

    pub fn twu(&self, item: Item) -> Option<Money> {
        self.rank(item).map(|r| self.twu_of_rank(r))
    }

    /// Items in ascending order.
    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Identifies the order; two trees built from different orders never
    /// share a fingerprint in practice.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Sorts items by this order. Items outside the order are an error.
    pub fn sort(&self, items: &mut [Item]) -> Result<(), Item> {
        if let Some(&missing) = items.iter().find(|i| !self.rank.contains_key(i)) {
            return Err(missing);
        }
        items.sort_unstable_by_key(|i| self.rank[i]);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevisedTransaction {
    pub tid: Tid,
    /// Transaction utility of the original transaction, before pruning.
    pub tu: Money,
    /// (rank, utility) pairs in strictly increasing rank.
    pub entries: Vec<(u32, Money)>,
}

/// Database with unpromising items removed and each transaction sorted by
/// the global item order.
#[derive(Debug, Clone)]
pub struct RevisedDatabase {
    order: ItemOrder,
    twu: BTreeMap<Item, Money>,
    transactions: Vec<RevisedTransaction>,
    min_util: Money,
    scans: u32,
}

impl RevisedDatabase {
    pub fn order(&self) -> &ItemOrder {
        &self.order
    }

    /// TWU of every item of the raw database, pruned items included.
    pub fn twu(&self) -> &BTreeMap<Item, Money> {
        &self.twu
    }

    pub fn transactions(&self) -> &[RevisedTransaction] {
        &self.transactions
    }

    pub fn tu(&self, tid: Tid) -> Option<Money> {
        self.transactions.iter().find(|t| t.tid == tid).map(|t| t.tu)
    }

    /// The threshold used to filter items.
    pub fn min_util(&self) -> Money {
        self.min_util
    }

    /// Passes made over the raw database to produce this revision.
    pub fn scans(&self) -> u32 {
        self.scans
    }

    /// Items of a revised transaction in order.
    pub fn items_of(&self, t: &RevisedTransaction) -> Vec<Item> {
        t.entries.iter().map(|&(r, _)| self.order.item(r)).collect()
    }
}

/// Drops items whose TWU is below `min_util`, sorts each transaction by the
/// TWU-ascending order and drops transactions left empty. Transaction
/// utilities keep their original values.
pub fn revise_database(db: &QuantDatabase, min_util: Money) -> RevisedDatabase {
    let twu = compute_twu(db);
    let order = ItemOrder::new(twu.iter().filter(|(_, &w)| w >= min_util).map(|(&i, &w)| (i, w)).collect());
    let transactions = db
        .transactions()
        .iter()
        .filter_map(|t| {
            let mut entries: Vec<(u32, Money)> =
                t.entries.iter().filter_map(|e| order.rank(e.item).map(|r| (r, e.utility))).collect();
            if entries.is_empty() {
                return None;
            }
            entries.sort_unstable_by_key(|e| e.0);
            Some(RevisedTransaction { tid: t.tid, tu: t.utility(), entries })
        })
        .collect();
    // TWU accumulation is the only full pass; pruning and sorting are folded
    // into the list-building pass.
    RevisedDatabase { order, twu, transactions, min_util, scans: 1 }
}
