//! The eight-item, six-transaction worked example used throughout the tests.
//! Items `a`..`h` are encoded as ids 1..8.

use crate::dataset::{ExternalUtilityTable, Item, QuantDatabase};

/// The example in the colon-separated input format.
pub const EXAMPLE_TEXT: &str = "\
2 3 5 7 8:15:2 2 8 2 1
1 3 6 7:19:6 1 4 8
2 3 5 8:28:10 2 12 4
1 3 4 5 7:30:6 1 15 4 4
3 5:19:3 16
7 8:3:2 1
";

pub fn item(name: char) -> Item {
    assert!(('a'..='h').contains(&name), "example items are a..h");
    Item(name as u32 - 'a' as u32 + 1)
}

pub fn items(names: &str) -> Vec<Item> {
    names.chars().filter(|c| !c.is_whitespace()).map(item).collect()
}

pub fn name(item: Item) -> char {
    char::from_u32('a' as u32 + item.0 - 1).unwrap_or('?')
}

pub fn names(items: &[Item]) -> String {
    items.iter().map(|&i| name(i)).collect()
}

pub fn unit_utilities() -> ExternalUtilityTable {
    [('a', 3), ('b', 2), ('c', 1), ('d', 5), ('e', 4), ('f', 2), ('g', 2), ('h', 1)]
        .into_iter()
        .map(|(n, u)| (item(n), u))
        .collect()
}

pub fn quantity_rows() -> Vec<Vec<(Item, u32)>> {
    let rows: [&[(char, u32)]; 6] = [
        &[('b', 1), ('c', 2), ('e', 2), ('g', 1), ('h', 1)],
        &[('a', 2), ('c', 1), ('f', 2), ('g', 4)],
        &[('b', 5), ('c', 2), ('e', 3), ('h', 4)],
        &[('a', 2), ('c', 1), ('d', 3), ('e', 1), ('g', 2)],
        &[('c', 3), ('e', 4)],
        &[('g', 1), ('h', 1)],
    ];
    rows.iter().map(|r| r.iter().map(|&(n, q)| (item(n), q)).collect()).collect()
}

pub fn database() -> QuantDatabase {
    QuantDatabase::from_quantities(quantity_rows(), &unit_utilities()).expect("example database is well formed")
}
