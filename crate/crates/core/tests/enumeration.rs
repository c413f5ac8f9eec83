use std::collections::BTreeSet;

use lowdeg_core::corpus::{c6, corpus_config, databases, db1, QUERIES};
use lowdeg_core::enumeration::{audit, build_enumerator, Enumerator, Level};
use lowdeg_core::model::Database;
use lowdeg_core::oracle::naive_eval;
use lowdeg_core::qe::{eliminate_quantifiers, Config};
use lowdeg_core::query::parse_query;
use lowdeg_core::storing::Epsilon;

const EXAMPLE: &str = "B(x) & R(y) & !E(x,y)";

fn enumerator(db: &Database, text: &str) -> Enumerator {
    build_enumerator(db, &parse_query(text).unwrap(), &Config::default()).unwrap()
}

fn drain(en: &mut Enumerator) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    while let Some(t) = en.next_answer().unwrap() {
        out.push(t);
    }
    out
}

#[test]
fn example_has_one_block_over_red_nodes() {
    let en = enumerator(&db1(), EXAMPLE);
    let root = en.root_level().unwrap();
    assert_eq!(root.arity(), 2);
    let blocks = root.blocks();
    assert_eq!(blocks.len(), 1);
    let reds: Vec<u32> = blocks[0].list.iter().map(|&v| en.ri.vnode(v).unwrap().tuple[0]).collect();
    assert_eq!(reds, vec![4, 5]);
}

#[test]
fn skip_examples() {
    let en = enumerator(&db1(), EXAMPLE);
    let b = &en.root_level().unwrap().blocks()[0];
    let blue2 = en.ri.apply_f(&[2, 5]).unwrap().unwrap()[0];
    assert_eq!(b.skip_lookup(0, &[]).unwrap(), Some(0));
    assert_eq!(b.skip_lookup(1, &[]).unwrap(), Some(1));
    // Blue 2 conflicts with red 4, so the first admissible red node is 5.
    assert!(b.ek_contains(blue2, b.list[0]));
    assert_eq!(en.ri.vnode(b.list[b.skip_lookup(0, &[blue2]).unwrap().unwrap()]).unwrap().tuple, vec![5]);

    let mut db = Database::new(5);
    db.add_relation_flat("B", 1, vec![1, 2]).unwrap();
    db.add_relation_flat("R", 1, vec![4]).unwrap();
    db.add_relation_flat("E", 2, vec![1, 4]).unwrap();
    let en = enumerator(&db, EXAMPLE);
    let b = &en.root_level().unwrap().blocks()[0];
    let blue1 = en.ri.vnode(b.ek_sets[0][0]).unwrap();
    assert_eq!(blue1.tuple, vec![1]);
    assert_eq!(b.skip_lookup(0, &b.ek_sets[0]).unwrap(), None);
    assert!(b.skip_lookup(0, &[en.ri.bot]).is_err());
}

#[test]
fn example_answers() {
    let mut en = enumerator(&db1(), EXAMPLE);
    let got = drain(&mut en);
    assert_eq!(got.iter().cloned().collect::<BTreeSet<_>>(), BTreeSet::from([vec![1, 4], vec![1, 5], vec![2, 5]]));
    assert_eq!(got.len(), 3);
    assert_eq!(en.next_answer().unwrap(), None);
}

#[test]
fn unary_and_boolean_cases() {
    let mut en = enumerator(&db1(), "B(x)");
    assert!(matches!(en.root_level(), Some(Level::One { .. })));
    assert_eq!(drain(&mut en), vec![vec![1], vec![2]]);

    let mut en = enumerator(&db1(), "exists x. (B(x) & R(x))");
    assert_eq!(en.next_answer().unwrap(), None);
    let mut en = enumerator(&db1(), "exists x. B(x)");
    assert_eq!(drain(&mut en), vec![Vec::<u32>::new()]);

    let mut en = enumerator(&db1(), "B(x) & R(x)");
    assert_eq!(en.next_answer().unwrap(), None);
    let mut en = enumerator(&db1(), "B(x) & R(y) & E(y,x)");
    assert_eq!(en.next_answer().unwrap(), None);
}

#[test]
fn paths_in_the_cycle() {
    let mut en = enumerator(&c6(), "E(x,y) & E(y,z)");
    let got = drain(&mut en);
    let set: BTreeSet<Vec<u32>> = got.iter().cloned().collect();
    assert_eq!(got.len(), 6);
    assert_eq!(set, naive_eval(&c6(), &parse_query("E(x,y) & E(y,z)").unwrap()).unwrap());
}

#[test]
fn every_emitted_tuple_is_an_answer() {
    for (_, db) in databases().into_iter().take(6) {
        for text in QUERIES {
            let phi = parse_query(text).unwrap();
            let expected = naive_eval(&db, &phi).unwrap();
            let ri = eliminate_quantifiers(&db, &phi, &corpus_config()).unwrap();
            let mut en = Enumerator::new(ri, &corpus_config()).unwrap();
            let mut seen = BTreeSet::new();
            while let Some(v) = en.next_reduced().unwrap() {
                assert!(en.ri.psi_holds(&v), "{text}: {v:?} not in ψ(G)");
                let a = en.ri.decode(&v).unwrap();
                assert!(expected.contains(&a), "{text}: {a:?}");
                assert!(seen.insert(a));
            }
            assert_eq!(seen, expected);
        }
    }
}

#[test]
fn output_does_not_depend_on_epsilon() {
    for (_, db) in databases().into_iter().take(5) {
        for text in [EXAMPLE, "E(x,y) & !E(y,z) & B(z)", "exists z. (E(x,z) & E(z,y))"] {
            let phi = parse_query(text).unwrap();
            let mut outputs = Vec::new();
            for e in ["0.25", "0.5", "1"] {
                let cfg = Config { epsilon: Epsilon::parse(e).unwrap(), ..corpus_config() };
                let mut en = build_enumerator(&db, &phi, &cfg).unwrap();
                outputs.push(drain(&mut en));
            }
            assert_eq!(outputs[0], outputs[1]);
            assert_eq!(outputs[1], outputs[2]);
        }
    }
}

#[test]
fn closeness_levels_and_skip_values_check_out() {
    let mut checks = 0;
    for (name, db) in databases() {
        for text in QUERIES {
            let en = build_enumerator(&db, &parse_query(text).unwrap(), &corpus_config()).unwrap();
            let a = audit(&en).unwrap();
            assert!(a.failures.is_empty(), "{name} {text}: {:?}", &a.failures[..a.failures.len().min(5)]);
            checks += a.skip_checks;
        }
    }
    assert!(checks > 1000);
}
