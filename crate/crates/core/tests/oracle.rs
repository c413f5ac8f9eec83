use std::collections::BTreeSet;

use lowdeg_core::corpus::{c6, db1};
use lowdeg_core::model::Database;
use lowdeg_core::oracle::{naive_eval, naive_eval_guarded, naive_holds};
use lowdeg_core::query::parse_query;
use lowdeg_core::Error;

fn eval(db: &Database, q: &str) -> BTreeSet<Vec<u32>> {
    naive_eval(db, &parse_query(q).unwrap()).unwrap()
}

#[test]
fn example_answers() {
    assert_eq!(eval(&db1(), "B(x) & R(y) & !E(x,y)"), BTreeSet::from([vec![1, 4], vec![1, 5], vec![2, 5]]));
    assert_eq!(eval(&db1(), "exists y. E(x,y)"), BTreeSet::from([vec![2]]));
    assert_eq!(eval(&c6(), "E(x,y) & E(y,z)").len(), 6);
}

#[test]
fn sentences_answer_with_the_empty_tuple() {
    assert_eq!(eval(&db1(), "true"), BTreeSet::from([vec![]]));
    assert!(eval(&db1(), "false").is_empty());
    assert_eq!(eval(&db1(), "exists x. B(x)"), BTreeSet::from([vec![]]));
}

#[test]
fn positive_atom_on_empty_relation() {
    let mut db = Database::new(4);
    db.add_relation_flat("E", 2, vec![]).unwrap();
    assert!(eval(&db, "E(x,y)").is_empty());
    assert_eq!(eval(&db, "!E(x,y)").len(), 16);
}

#[test]
fn distance_atoms_use_the_gaifman_graph() {
    let db = c6();
    let at = |q: &str| naive_holds(&db, &parse_query(q).unwrap(), &[("x".into(), 0), ("y".into(), 3)]).unwrap();
    assert!(at("dist(x,y) <= 3 & !E(x,y)"));
    assert!(!at("dist(x,y) <= 2 & !E(x,y)"));
    // Only relations named in the query contribute edges.
    assert!(!at("dist(x,y) <= 3"));
    assert_eq!(eval(&db, "dist(x,y) <= 1 & E(x,y)").len(), 6);
}

#[test]
fn quantifiers_range_over_the_domain() {
    assert_eq!(eval(&db1(), "forall y. !E(x,y)").len(), 5);
    assert_eq!(eval(&db1(), "exists y in N_1(x). (R(y) & !E(x,y) & !E(y,x))"), BTreeSet::from([vec![4], vec![5]]));
    assert_eq!(eval(&db1(), "exists y in N_1(x). (R(y) & (E(x,y) | E(y,x)))"), BTreeSet::from([vec![2]]));
}

#[test]
fn guard_refuses_large_spaces() {
    let db = Database::new(100);
    let phi = parse_query("!B(x) & !B(y) & !B(z)").unwrap();
    assert!(matches!(naive_eval_guarded(&db, &phi, 1000), Err(Error::ResourceCap(_))));
    assert_eq!(naive_eval_guarded(&db, &phi, 1_000_000).unwrap().len(), 1_000_000);
}
