//! Pattern trie over the mined HUIs.
//!
//! Every HUI is a root-anchored path whose nodes follow the global
//! TWU-ascending order. Each node stores the TWU of its item and the utility
//! and remaining utility of the itemset spelled by the path from the root to
//! that node. A header table threads all nodes that share an item into one
//! chain, in creation order, so queries can start from any item directly.
//!
//! Nodes live in an arena and are addressed by [`NodeId`]; the root is the
//! sentinel at index 0 and carries no utility values.

use std::io::{self, Write};

use thiserror::Error;

use crate::dataset::{Item, ItemOrder, Money, RevisedDatabase};
use crate::miner::{self, HuiRecord, MinerConfig, MiningStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub item: Item,
    /// Rank of `item` in the tree's order.
    pub rank: u32,
    pub parent: Option<NodeId>,
    /// Sorted by rank.
    pub children: Vec<NodeId>,
    pub twu: Money,
    pub sum_iu: Money,
    pub sum_ru: Money,
    pub is_end: bool,
    /// Next node with the same item.
    pub link: Option<NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct ChainEnds {
    head: NodeId,
    tail: NodeId,
    len: usize,
}

/// Head and tail of the node chain of every item, indexed by rank.
#[derive(Debug, Clone, Default)]
pub struct HeaderTable {
    chains: Vec<Option<ChainEnds>>,
}

impl HeaderTable {
    fn with_items(n: usize) -> Self {
        Self { chains: vec![None; n] }
    }

    /// Appends a freshly created node to the chain of its item.
    fn append(&mut self, nodes: &mut [Node], rank: u32, node: NodeId) {
        let slot = &mut self.chains[rank as usize];
        match slot {
            None => *slot = Some(ChainEnds { head: node, tail: node, len: 1 }),
            Some(chain) => {
                nodes[chain.tail.index()].link = Some(node);
                chain.tail = node;
                chain.len += 1;
            }
        }
    }

    pub fn head(&self, rank: u32) -> Option<NodeId> {
        self.chains.get(rank as usize).copied().flatten().map(|c| c.head)
    }

    pub fn tail(&self, rank: u32) -> Option<NodeId> {
        self.chains.get(rank as usize).copied().flatten().map(|c| c.tail)
    }

    pub fn chain_len(&self, rank: u32) -> usize {
        self.chains.get(rank as usize).copied().flatten().map_or(0, |c| c.len)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("invalid insertion: {0}")]
    Usage(String),
    #[error("node {item} at depth {depth} holds (twu, sumIu, sumRu) = {have:?}, insertion supplied {got:?}")]
    Integrity { item: Item, depth: usize, have: (Money, Money, Money), got: (Money, Money, Money) },
}

#[derive(Debug, Clone)]
pub struct PatternTree {
    nodes: Vec<Node>,
    header: HeaderTable,
    order: ItemOrder,
    min_util: Money,
}

impl PatternTree {
    pub fn new(order: ItemOrder, min_util: Money) -> Self {
        let root = Node {
            item: Item(u32::MAX),
            rank: u32::MAX,
            parent: None,
            children: Vec::new(),
            twu: 0,
            sum_iu: 0,
            sum_ru: 0,
            is_end: false,
            link: None,
        };
        Self { nodes: vec![root], header: HeaderTable::with_items(order.len()), order, min_util }
    }

    pub fn order(&self) -> &ItemOrder {
        &self.order
    }

    /// σ the tree was built for.
    pub fn min_util(&self) -> Money {
        self.min_util
    }

    pub fn header(&self) -> &HeaderTable {
        &self.header
    }

    /// Non-root nodes.
    pub fn node_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (1..self.nodes.len() as u32).map(NodeId)
    }

    /// Nodes named `item`, following header links.
    pub fn chain(&self, item: Item) -> Chain<'_> {
        let head = self.order.rank(item).and_then(|r| self.header.head(r));
        self.chain_from(head)
    }

    pub(crate) fn chain_from(&self, head: Option<NodeId>) -> Chain<'_> {
        Chain { tree: self, next: head }
    }

    /// Items from the root down to `id`.
    pub fn path(&self, id: NodeId) -> Vec<Item> {
        let mut items = Vec::new();
        let mut cur = Some(id);
        while let Some(c) = cur.filter(|&c| c != NodeId::ROOT) {
            items.push(self.nodes[c.index()].item);
            cur = self.nodes[c.index()].parent;
        }
        items.reverse();
        items
    }

    pub fn find_child(&self, parent: NodeId, rank: u32) -> Option<NodeId> {
        let children = &self.nodes[parent.index()].children;
        children.binary_search_by_key(&rank, |c| self.nodes[c.index()].rank).ok().map(|pos| children[pos])
    }

    /// Inserts an HUI given as items of the tree's order with its cumulative
    /// per-position utilities, remaining utilities and item TWUs. Returns the
    /// number of nodes created.
    pub fn insert_hui(
        &mut self,
        itemset: &[Item],
        ius: &[Money],
        rus: &[Money],
        twus: &[Money],
    ) -> Result<usize, TreeError> {
        let ranks = itemset
            .iter()
            .map(|&i| self.order.rank(i).ok_or_else(|| TreeError::Usage(format!("item {i} is not in the tree's order"))))
            .collect::<Result<Vec<_>, _>>()?;
        if ranks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TreeError::Usage("itemset is not sorted by the global order".into()));
        }
        self.insert_ranked(&ranks, ius, rus, twus)
    }

    pub fn insert_record(&mut self, hui: &HuiRecord<'_>) -> Result<usize, TreeError> {
        self.insert_ranked(hui.ranks, hui.ius, hui.rus, hui.twus)
    }

    fn insert_ranked(&mut self, ranks: &[u32], ius: &[Money], rus: &[Money], twus: &[Money]) -> Result<usize, TreeError> {
        if ranks.is_empty() {
            return Err(TreeError::Usage("itemset is empty".into()));
        }
        if ius.len() != ranks.len() || rus.len() != ranks.len() || twus.len() != ranks.len() {
            return Err(TreeError::Usage("value arrays must match the itemset length".into()));
        }
        let mut created = 0;
        let mut current = NodeId::ROOT;
        for (depth, &rank) in ranks.iter().enumerate() {
            let values = (twus[depth], ius[depth], rus[depth]);
            current = match self.find_child(current, rank) {
                Some(existing) => {
                    let n = &self.nodes[existing.index()];
                    // Path values are deterministic; existing nodes are checked, never updated.
                    if (n.twu, n.sum_iu, n.sum_ru) != values {
                        return Err(TreeError::Integrity {
                            item: n.item,
                            depth,
                            have: (n.twu, n.sum_iu, n.sum_ru),
                            got: values,
                        });
                    }
                    existing
                }
                None => {
                    created += 1;
                    self.create_child(current, rank, values)
                }
            };
        }
        self.nodes[current.index()].is_end = true;
        Ok(created)
    }

    fn create_child(&mut self, parent: NodeId, rank: u32, (twu, sum_iu, sum_ru): (Money, Money, Money)) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node {
            item: self.order.item(rank),
            rank,
            parent: Some(parent),
            children: Vec::new(),
            twu,
            sum_iu,
            sum_ru,
            is_end: false,
            link: None,
        });
        let pos = {
            let nodes = &self.nodes;
            nodes[parent.index()].children.partition_point(|c| nodes[c.index()].rank < rank)
        };
        self.nodes[parent.index()].children.insert(pos, id);
        self.header.append(&mut self.nodes, rank, id);
        id
    }

    /// Every root path ending in an `is_end` node, with its utility, in
    /// pre-order.
    pub fn huis(&self) -> Vec<(Vec<Item>, Money)> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_huis(NodeId::ROOT, &mut path, &mut out);
        out
    }

    fn collect_huis(&self, id: NodeId, path: &mut Vec<Item>, out: &mut Vec<(Vec<Item>, Money)>) {
        for &c in &self.nodes[id.index()].children {
            let n = &self.nodes[c.index()];
            path.push(n.item);
            if n.is_end {
                out.push((path.clone(), n.sum_iu));
            }
            self.collect_huis(c, path, out);
            path.pop();
        }
    }

    /// Writes one line per node in pre-order:
    /// `depth item twu sumIu sumRu isEnd`.
    pub fn dump<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut stack: Vec<(NodeId, usize)> =
            self.root().children.iter().rev().map(|&c| (c, 1)).collect();
        while let Some((id, depth)) = stack.pop() {
            let n = self.node(id);
            writeln!(out, "{depth} {} {} {} {} {}", n.item, n.twu, n.sum_iu, n.sum_ru, n.is_end)?;
            stack.extend(n.children.iter().rev().map(|&c| (c, depth + 1)));
        }
        Ok(())
    }
}

/// Iterator over one item's header chain.
pub struct Chain<'a> {
    tree: &'a PatternTree,
    next: Option<NodeId>,
}

impl Iterator for Chain<'_> {
    type Item = NodeId;

    fn next(&mut self) -> Option<NodeId> {
        let cur = self.next?;
        self.next = self.tree.node(cur).link;
        Some(cur)
    }
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Mines `rdb` at `min_util`, inserting each HUI into a fresh tree the
/// moment it is found.
pub fn build_tree(
    rdb: &RevisedDatabase,
    min_util: Money,
    config: MinerConfig,
) -> Result<(PatternTree, MiningStats), BuildError> {
    build_tree_with(rdb, min_util, config, |_| {})
}

/// As [`build_tree`], also handing every HUI to `observe`.
pub fn build_tree_with<F>(
    rdb: &RevisedDatabase,
    min_util: Money,
    config: MinerConfig,
    mut observe: F,
) -> Result<(PatternTree, MiningStats), BuildError>
where
    F: FnMut(&HuiRecord<'_>),
{
    let mut tree = PatternTree::new(rdb.order().clone(), min_util);
    let stats = miner::mine(rdb, min_util, config, |hui| {
        observe(hui);
        tree.insert_record(hui).map(|_| ())
    })?;
    Ok((tree, stats))
}
