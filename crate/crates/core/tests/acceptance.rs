//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use thui_core::dataset::{revise_database, Money};
use thui_core::fixtures::{self, items};
use thui_core::miner::{mine_all, MinerConfig};
use thui_core::oracle::{self, brute_force_huis, brute_force_thuis, post_process_huis, ItemsetUtilities, OracleConfig};
use thui_core::query::{normalize_query, query, QuerySession, StrategySet};
use thui_core::tree::{build_tree, NodeId, PatternTree};

const TRIALS: usize = 1000;
const ABLATION_CASES: usize = 100;
const SESSION_QUERIES: usize = 100;
const MINE_BUDGET: Duration = Duration::from_secs(1);
const TRIAL_BUDGET: Duration = Duration::from_secs(60);

type Verdict = Result<String, String>;

fn expect_set(rows: &[(&str, Money)]) -> ItemsetUtilities {
    rows.iter().map(|&(s, u)| (oracle::canonical(&items(s)), u)).collect()
}

fn show(set: &ItemsetUtilities) -> String {
    let parts: Vec<String> = set.iter().map(|(k, u)| format!("{}:{}", fixtures::names(k), u)).collect();
    format!("{{{}}}", parts.join(", "))
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let db = fixtures::database();
    let rdb = revise_database(&db, 30);
    let (huis, _) = mine_all(&rdb, 30, MinerConfig::default());
    let elapsed = start.elapsed();
    let got: ItemsetUtilities = huis.into_iter().map(|(s, u)| (oracle::canonical(&s), u)).collect();
    let want = expect_set(&[
        ("dagec", 30),
        ("be", 32),
        ("bec", 36),
        ("bhe", 37),
        ("e", 40),
        ("bhec", 41),
        ("ec", 48),
    ]);
    if got != want {
        return Err(format!("mined {}, expected {}", show(&got), show(&want)));
    }
    if elapsed >= MINE_BUDGET {
        return Err(format!("took {elapsed:?}, budget {MINE_BUDGET:?}"));
    }
    Ok(format!("7 HUIs with exact utilities in {elapsed:?}"))
}

fn walk(tree: &PatternTree, itemset: &[thui_core::Item]) -> Option<Vec<NodeId>> {
    let mut at = NodeId::ROOT;
    let mut path = Vec::new();
    for &i in itemset {
        at = tree.find_child(at, tree.order().rank(i)?)?;
        path.push(at);
    }
    Some(path)
}

fn criterion_2() -> Verdict {
    let table: [(&str, [Money; 5], [Money; 5]); 15] = [
        ("dag", [15, 21, 25, 0, 0], [15, 9, 5, 0, 0]),
        ("be", [12, 32, 0, 0, 0], [31, 4, 0, 0, 0]),
        ("dage", [15, 21, 25, 29, 0], [15, 9, 5, 1, 0]),
        ("bec", [12, 32, 36, 0, 0], [31, 4, 0, 0, 0]),
        ("dagec", [15, 21, 25, 29, 30], [15, 9, 5, 1, 0]),
        ("he", [6, 25, 0, 0, 0], [28, 4, 0, 0, 0]),
        ("dagc", [15, 21, 25, 26, 0], [15, 9, 5, 0, 0]),
        ("hec", [6, 25, 29, 0, 0], [28, 4, 0, 0, 0]),
        ("dae", [15, 21, 25, 0, 0], [15, 9, 1, 0, 0]),
        ("agc", [12, 24, 26, 0, 0], [18, 6, 0, 0, 0]),
        ("daec", [15, 21, 25, 26, 0], [15, 9, 1, 0, 0]),
        ("e", [40, 0, 0, 0, 0], [8, 0, 0, 0, 0]),
        ("bhe", [12, 17, 37, 0, 0], [31, 26, 4, 0, 0]),
        ("ec", [40, 48, 0, 0, 0], [8, 0, 0, 0, 0]),
        ("bhec", [12, 17, 37, 41, 0], [31, 26, 4, 0, 0]),
    ];
    let db = fixtures::database();
    let rdb = revise_database(&db, 25);
    let (tree, stats) = build_tree(&rdb, 25, MinerConfig::default()).map_err(|e| e.to_string())?;
    if stats.hui_count != 15 || tree.huis().len() != 15 {
        return Err(format!("{} HUIs mined, {} on the tree, expected 15", stats.hui_count, tree.huis().len()));
    }
    for (name, ius, rus) in &table {
        let set = items(name);
        let path = walk(&tree, &set).ok_or_else(|| format!("no tree path for {{{name}}}"))?;
        let n = set.len();
        let got_iu: Vec<Money> = path.iter().map(|&id| tree.node(id).sum_iu).collect();
        let got_ru: Vec<Money> = path.iter().map(|&id| tree.node(id).sum_ru).collect();
        if got_iu != ius[..n] || got_ru != rus[..n] {
            return Err(format!("{{{name}}}: IUs {got_iu:?} RUs {got_ru:?}, expected {:?} {:?}", &ius[..n], &rus[..n]));
        }
        if !tree.node(*path.last().unwrap()).is_end {
            return Err(format!("{{{name}}}: last node is not marked as an HUI end"));
        }
    }
    Ok("15 HUIs, every path's sumIu/sumRu sequence matches".into())
}

fn criterion_3() -> Verdict {
    let db = fixtures::database();
    let rdb = revise_database(&db, 25);
    let (tree, _) = build_tree(&rdb, 25, MinerConfig::default()).map_err(|e| e.to_string())?;
    let run = |target: &str| -> Result<ItemsetUtilities, String> {
        let q = normalize_query(&items(target), 30, tree.order()).map_err(|e| e.to_string())?;
        Ok(query(&tree, &q, StrategySet::FULL).map_err(|e| e.to_string())?.as_set())
    };
    let mut failures = Vec::new();
    let be = run("be")?;
    let be_want = expect_set(&[("bec", 36), ("bhe", 37), ("bhec", 41)]);
    if be != be_want {
        failures.push(format!("{{b,e}} returned {}, expected {}", show(&be), show(&be_want)));
    }
    let ec = run("ec")?;
    let ec_want = expect_set(&[("dagec", 30), ("bhec", 41), ("bec", 36), ("ec", 48)]);
    if ec != ec_want {
        failures.push(format!("{{e,c}} returned {}, expected {}", show(&ec), show(&ec_want)));
    }
    if failures.is_empty() {
        Ok("{b,e} and {e,c} fixtures match".into())
    } else {
        Err(failures.join("; "))
    }
}

/// Criteria 4 and 7 share the same randomized trials.
struct TrialOutcome {
    equivalence: Verdict,
    structure: Verdict,
}

fn criteria_4_and_7() -> TrialOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7468_7569);
    let params = oracle::RandomDbParams::default();
    let start = Instant::now();
    let mut equivalence = None;
    let mut structure = None;
    let mut nonempty = 0usize;
    for trial in 0..TRIALS {
        let db = oracle::random_database(&mut rng, &params);
        let (sigma, xi, target) = common::random_query(&mut rng, &db);
        let built = common::build(&db, sigma, MinerConfig::default());
        let all = brute_force_huis(&db, sigma, OracleConfig::default()).expect("within caps");
        let brute = brute_force_thuis(&db, sigma, xi, &target, OracleConfig::default()).expect("within caps");
        let hui_mp = post_process_huis(all.clone(), &target, xi);
        let engine = normalize_query(&target, xi, built.tree.order())
            .and_then(|q| query(&built.tree, &q, StrategySet::FULL))
            .map(|r| r.as_set());
        nonempty += usize::from(!brute.is_empty());
        if equivalence.is_none() {
            match engine {
                Ok(got) if got == brute && brute == hui_mp => {}
                Ok(got) => {
                    equivalence = Some(format!(
                        "trial {trial} (σ={sigma}, ξ={xi}, T′={target:?}): engine {} brute {} post-processed {}",
                        got.len(),
                        brute.len(),
                        hui_mp.len()
                    ))
                }
                Err(e) => equivalence = Some(format!("trial {trial}: query error {e}")),
            }
        }
        if structure.is_none() {
            if let Err(e) = common::check_structure(&built, &all) {
                structure = Some(format!("trial {trial} (σ={sigma}): {e}"));
            }
        }
    }
    let elapsed = start.elapsed();
    let equivalence = match equivalence {
        Some(e) => Err(e),
        None if elapsed >= TRIAL_BUDGET => Err(format!("{TRIALS} trials took {elapsed:?}, budget {TRIAL_BUDGET:?}")),
        None => Ok(format!("{TRIALS} trials agree ({nonempty} with nonempty answers) in {elapsed:?}")),
    };
    let structure = structure.map_or_else(|| Ok(format!("{TRIALS} randomized trees")), Err);
    TrialOutcome { equivalence, structure }
}

fn criterion_5() -> Verdict {
    let variants = [StrategySet::S3, StrategySet::S13, StrategySet::S23, StrategySet::FULL];
    let mut cases: Vec<(thui_core::QuantDatabase, Money, Money, Vec<thui_core::Item>)> = Vec::new();
    for &(sigma, xi, target) in &[
        (25, 30, "be"),
        (25, 30, "ec"),
        (25, 48, "e"),
        (25, 25, "f"),
        (25, 25, "a"),
        (30, 30, "e"),
        (25, 26, "dc"),
    ] {
        cases.push((fixtures::database(), sigma, xi, items(target)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5333);
    for _ in 0..ABLATION_CASES {
        let db = oracle::random_database(&mut rng, &Default::default());
        let (sigma, xi, target) = common::random_query(&mut rng, &db);
        cases.push((db, sigma, xi, target));
    }
    for (n, (db, sigma, xi, target)) in cases.iter().enumerate() {
        let rdb = revise_database(db, *sigma);
        let (tree, _) = build_tree(&rdb, *sigma, MinerConfig::default()).map_err(|e| e.to_string())?;
        let q = normalize_query(target, *xi, tree.order()).map_err(|e| e.to_string())?;
        let results: Vec<_> = variants
            .iter()
            .map(|&v| query(&tree, &q, v).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        let reference = results[0].as_set();
        for (v, r) in variants.iter().zip(&results) {
            if r.as_set() != reference {
                return Err(format!("case {n}: variant {v} disagrees with s3"));
            }
        }
        if results[3].visited_nodes > results[0].visited_nodes {
            return Err(format!(
                "case {n}: full visited {} nodes, s3 only {}",
                results[3].visited_nodes, results[0].visited_nodes
            ));
        }
    }
    Ok(format!("{} cases, identical sets, full never visits more than s3", cases.len()))
}

fn criterion_6() -> Verdict {
    let (tree, stats) = {
        let db = fixtures::database();
        let rdb = revise_database(&db, 25);
        build_tree(&rdb, 25, MinerConfig::default()).map_err(|e| e.to_string())?
    };
    let after_build = stats.db_scans;
    let mut session = QuerySession::new(&tree, stats);
    let targets = ["e", "be", "ec", "a", "dg", "bhc", "c", "h", "f", "ag"];
    let xis = [25, 30, 35, 40, 48];
    let mut times = Vec::with_capacity(SESSION_QUERIES);
    for n in 0..SESSION_QUERIES {
        let target = items(targets[n % targets.len()]);
        let xi = xis[n % xis.len()];
        let start = Instant::now();
        session.query(&target, xi).map_err(|e| e.to_string())?;
        times.push(start.elapsed());
        if session.db_scans() != after_build {
            return Err(format!("db scans moved to {} after query {n}", session.db_scans()));
        }
    }
    if session.queries_answered() != SESSION_QUERIES as u64 {
        return Err(format!("session answered {} queries", session.queries_answered()));
    }
    let total: Duration = times.iter().sum();
    let max = times.iter().max().copied().unwrap_or_default();
    Ok(format!(
        "{SESSION_QUERIES} queries, db scans held at {after_build}, mean {:?} max {max:?} per query",
        total / SESSION_QUERIES as u32
    ))
}

fn criterion_7_fixture() -> Result<(), String> {
    for sigma in [25, 30] {
        let built = common::build(&fixtures::database(), sigma, MinerConfig::default());
        let expected = brute_force_huis(&fixtures::database(), sigma, OracleConfig::default()).map_err(|e| e.to_string())?;
        common::check_structure(&built, &expected).map_err(|e| format!("example tree at σ={sigma}: {e}"))?;
    }
    Ok(())
}

fn criterion_8() -> Verdict {
    let db = fixtures::database();
    let rdb = revise_database(&db, 25);
    let (tree, _) = build_tree(&rdb, 25, MinerConfig::default()).map_err(|e| e.to_string())?;
    let mut counts = BTreeMap::new();
    let mut last = None;
    for xi in [25, 30, 35, 40, 45, 48] {
        let q = normalize_query(&items("e"), xi, tree.order()).map_err(|e| e.to_string())?;
        let r = query(&tree, &q, StrategySet::FULL).map_err(|e| e.to_string())?;
        counts.insert(xi, r.thuis.len());
        if let Some(prev) = last {
            if r.thuis.len() > prev {
                return Err(format!("count rose to {} at ξ={xi}: {counts:?}", r.thuis.len()));
            }
        }
        last = Some(r.thuis.len());
        if xi == 48 && r.as_set() != expect_set(&[("ec", 48)]) {
            return Err(format!("ξ=48 returned {}", show(&r.as_set())));
        }
    }
    Ok(format!("counts {:?}", counts.values().collect::<Vec<_>>()))
}

fn main() -> ExitCode {
    let trials = criteria_4_and_7();
    let structure = criterion_7_fixture().and(trials.structure).map(|s| format!("example trees and {s}"));
    let verdicts = [
        (1, "HUIs of the example at σ=ξ=30", criterion_1()),
        (2, "per-node utility sequences at σ=25", criterion_2()),
        (3, "targeted query fixtures", criterion_3()),
        (4, "oracle equivalence", trials.equivalence),
        (5, "strategy ablation invariance", criterion_5()),
        (6, "multi-query session", criterion_6()),
        (7, "structural invariants", structure),
        (8, "threshold monotonicity", criterion_8()),
    ];
    let mut failed = 0;
    for (n, title, verdict) in &verdicts {
        match verdict {
            Ok(detail) => println!("[PASS] criterion {n}: {title}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {n}: {title}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", verdicts.len() - failed, verdicts.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
