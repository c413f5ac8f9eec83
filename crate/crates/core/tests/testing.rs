use lowdeg_core::corpus::db1;
use lowdeg_core::generate::{generate, parse_signature_spec, Schedule};
use lowdeg_core::model::Database;
use lowdeg_core::oracle::Oracle;
use lowdeg_core::qe::Config;
use lowdeg_core::query::parse_query;
use lowdeg_core::steps;
use lowdeg_core::testing::{build_tester, test};
use lowdeg_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXAMPLE: &str = "B(x) & R(y) & !E(x,y)";

#[test]
fn example_verdicts() {
    let t = build_tester(&db1(), &parse_query(EXAMPLE).unwrap(), &Config::default()).unwrap();
    assert_eq!(t.ri.clauses.len(), 1);
    assert!(test(&t, &[1, 5]).unwrap());
    assert!(!test(&t, &[2, 4]).unwrap());
    assert!(!test(&t, &[4, 1]).unwrap());
    assert!(matches!(test(&t, &[1]), Err(Error::Arity(_))));
    assert!(matches!(test(&t, &[1, 6]), Err(Error::OutOfDomain { .. })));
}

#[test]
fn sentences_answer_one_boolean() {
    let db = db1();
    let yes = build_tester(&db, &parse_query("exists a. exists b. (B(a) & R(b) & E(a,b))").unwrap(), &Config::default()).unwrap();
    let no = build_tester(&db, &parse_query("exists a. (B(a) & R(a))").unwrap(), &Config::default()).unwrap();
    assert_eq!(yes.arity(), 0);
    assert!(yes.test(&[]).unwrap());
    assert!(!no.test(&[]).unwrap());
}

#[test]
fn empty_relations_reject_everything() {
    let mut db = Database::new(5);
    for (name, arity) in [("B", 1), ("R", 1), ("E", 2)] {
        db.add_relation_flat(name, arity, Vec::new()).unwrap();
    }
    let t = build_tester(&db, &parse_query("B(x) & E(x,y)").unwrap(), &Config::default()).unwrap();
    for a in 0..5 {
        for b in 0..5 {
            assert!(!t.test(&[a, b]).unwrap());
        }
    }
}

fn family(n: usize) -> Database {
    let sig = parse_signature_spec("E/2:1.5,B/1:0.2,R/1:0.2").unwrap();
    generate(n, Schedule::Const(3.0), &sig, 5).unwrap()
}

#[test]
fn random_tuples_match_oracle_at_ten_thousand() {
    let db = family(10_000);
    let phi = parse_query(EXAMPLE).unwrap();
    let t = build_tester(&db, &phi, &Config::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let b: Vec<u32> = db.relation("B").unwrap().tuples().map(|t| t[0]).collect();
    let r: Vec<u32> = db.relation("R").unwrap().tuples().map(|t| t[0]).collect();
    let oracle = Oracle::new(&db, &phi).unwrap();
    let mut hits = 0;
    for i in 0..10_000 {
        // Half of the probes are blue-red pairs so that both verdicts occur.
        let tuple = if i % 2 == 0 {
            vec![b[rng.gen_range(0..b.len())], r[rng.gen_range(0..r.len())]]
        } else {
            vec![rng.gen_range(0..10_000), rng.gen_range(0..10_000)]
        };
        let got = t.test(&tuple).unwrap();
        hits += got as usize;
        let mut env = vec![("x".to_string(), tuple[0]), ("y".to_string(), tuple[1])];
        assert_eq!(got, oracle.holds(&phi, &mut env).unwrap(), "{tuple:?}");
    }
    assert!(hits > 1000);
}

#[test]
fn step_count_is_the_same_for_every_tuple_and_size() {
    let phi = parse_query("B(x) & !E(x,y) & exists z in N_1(y). (E(y,z) & R(z))").unwrap();
    let mut counts = Vec::new();
    for n in [1_000, 10_000] {
        let db = family(n);
        let t = build_tester(&db, &phi, &Config::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..2000 {
            let a = rng.gen_range(0..n as u32);
            let nb: Vec<u32> = db.relation("E").unwrap().tuples().filter(|t| t[0] == a).map(|t| t[1]).collect();
            let b = if nb.is_empty() || rng.gen_bool(0.5) { rng.gen_range(0..n as u32) } else { nb[0] };
            let (ok, c) = steps::measure(|| t.test(&[a, b]));
            ok.unwrap();
            counts.push(c);
        }
    }
    counts.dedup();
    assert_eq!(counts.len(), 1, "{counts:?}");
}
