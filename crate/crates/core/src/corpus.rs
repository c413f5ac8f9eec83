//! Hand fixtures, the query corpus and the engine-versus-oracle check runner.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::counting::count_reduced;
use crate::enumeration::Enumerator;
use crate::error::Result;
use crate::generate::{generate, parse_signature_spec, Schedule};
use crate::model::{Database, Node};
use crate::oracle::naive_eval;
use crate::qe::{eliminate_quantifiers, Config};
use crate::query::{parse_query, Formula};
use crate::testing::Tester;

/// Domain 0..6, B = {1,2}, R = {4,5}, E = {(2,4)}.
pub fn db1() -> Database {
    let mut db = Database::new(6);
    db.add_relation_flat("B", 1, vec![1, 2]).expect("fixture");
    db.add_relation_flat("R", 1, vec![4, 5]).expect("fixture");
    db.add_relation_flat("E", 2, vec![2, 4]).expect("fixture");
    db
}

/// Directed 6-cycle `E(i, i+1 mod 6)`.
pub fn c6() -> Database {
    let mut db = Database::new(6);
    let flat = (0..6).flat_map(|i| [i, (i + 1) % 6]).collect();
    db.add_relation_flat("E", 2, flat).expect("fixture");
    db
}

pub const EXAMPLE_QUERY: &str = "B(x) & R(y) & !E(x,y)";

/// Corpus queries; free variables in first-occurrence order.
pub const QUERIES: &[&str] = &[
    EXAMPLE_QUERY,
    "E(x,y)",
    "E(x,y) & E(y,z)",
    "exists y. E(x,y)",
    "B(x) & !exists y. (E(x,y) & R(y))",
    "dist(x,y) <= 2 & B(x) & R(y) & !E(x,y)",
    "dist(x,y) > 1 & B(x) & B(y) & exists z. E(x,z)",
    "exists y in N_1(x). (R(y) & !B(y))",
    "B(x) & exists y. exists z. (E(y,z) & R(z) & B(y))",
    "exists x. exists y. (E(x,y) & B(x) & R(y))",
    "forall y. (!E(x,y) | R(y))",
    "B(x) & R(y) & !E(x,y) & !E(y,x)",
    "E(x,y) & !E(y,z) & B(z)",
    "B(x) & B(y) & R(z) & !E(x,z)",
    "R(x) & exists a. exists b. (dist(a,b) > 2 & B(a) & B(b))",
    "exists y. exists z. (E(x,y) & E(y,z) & !B(z))",
    "B(x) | R(y)",
    "!B(x) & !R(x)",
    "exists z. (E(x,z) & E(z,y))",
    "E(x,x) | B(x)",
    "(exists x. B(x)) & !(exists y. (R(y) & B(y)))",
    "dist(x,y) <= 2 & !E(x,y) & !E(y,x)",
];

/// Random corpus databases: n in [10, 80], degree at most 4.
pub fn random_databases() -> Vec<(String, Database)> {
    let sig = parse_signature_spec("E/2:1.0,B/1:0.4,R/1:0.4").expect("static spec");
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..10u64)
        .map(|i| {
            let n = rng.gen_range(10..=80usize);
            let d = 2 + (i % 3) as usize;
            let db = generate(n, Schedule::Const(d as f64), &sig, 100 + i).expect("valid generator input");
            (format!("rand{i}(n={n},d={d})"), db)
        })
        .collect()
}

pub fn databases() -> Vec<(String, Database)> {
    let mut out = vec![("DB1".to_string(), db1()), ("C6".to_string(), c6())];
    out.extend(random_databases());
    out
}

/// Engine configuration for corpus runs: the canonicalisation cap is raised so
/// radius-3 neighbourhoods of random instances fit.
pub fn corpus_config() -> Config {
    Config { canon_cap: 200, ..Config::default() }
}

/// Outcome of one (database, query) pair.
#[derive(Clone, Debug, Default)]
pub struct CaseReport {
    pub db: String,
    pub query: String,
    pub expected: usize,
    pub count_ok: bool,
    pub test_ok: bool,
    pub enum_ok: bool,
    pub tests_run: usize,
    pub duplicates: usize,
    pub error: Option<String>,
}

impl CaseReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.count_ok && self.test_ok && self.enum_ok
    }
}

/// Tuples on which `test` is checked: all of them when `n^k` is small, otherwise
/// every answer plus a seeded sample.
fn test_tuples(n: usize, k: usize, answers: &BTreeSet<Vec<Node>>, seed: u64) -> Vec<Vec<Node>> {
    if n <= 40 || (n as u128).pow(k as u32) <= 4096 {
        let mut out = vec![Vec::new()];
        for _ in 0..k {
            out = out
                .into_iter()
                .flat_map(|t: Vec<Node>| {
                    (0..n as Node).map(move |v| {
                        let mut t = t.clone();
                        t.push(v);
                        t
                    })
                })
                .collect();
        }
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Vec<Node>> = answers.iter().cloned().collect();
    out.extend((0..2000).map(|_| (0..k).map(|_| rng.gen_range(0..n as Node)).collect()));
    out
}

pub fn run_case(name: &str, db: &Database, query: &str, cfg: &Config) -> CaseReport {
    let mut rep = CaseReport { db: name.to_string(), query: query.to_string(), ..Default::default() };
    if let Err(e) = run_case_inner(db, query, cfg, &mut rep) {
        rep.error = Some(e.to_string());
    }
    rep
}

fn run_case_inner(db: &Database, query: &str, cfg: &Config, rep: &mut CaseReport) -> Result<()> {
    let phi: Formula = parse_query(query)?;
    let expected = naive_eval(db, &phi)?;
    rep.expected = expected.len();
    let ri = Arc::new(eliminate_quantifiers(db, &phi, cfg)?);
    rep.count_ok = count_reduced(&ri)? == expected.len().into();

    let tester = Tester::new(ri.clone())?;
    let tuples = test_tuples(db.n(), ri.k, &expected, 7);
    rep.tests_run = tuples.len();
    rep.test_ok = true;
    for t in &tuples {
        if tester.test(t)? != expected.contains(t) {
            rep.test_ok = false;
            break;
        }
    }

    let mut seen = BTreeSet::new();
    let mut en = Enumerator::new(ri, cfg)?;
    while let Some(t) = en.next_answer()? {
        if !seen.insert(t) {
            rep.duplicates += 1;
        }
    }
    rep.enum_ok = rep.duplicates == 0 && seen == expected;
    Ok(())
}

/// Every corpus pair.
pub fn run_corpus(cfg: &Config) -> Vec<CaseReport> {
    let dbs = databases();
    let mut out = Vec::new();
    for (name, db) in &dbs {
        for q in QUERIES {
            out.push(run_case(name, db, q, cfg));
        }
    }
    out
}
