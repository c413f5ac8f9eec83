use std::collections::BTreeSet;

use lowdeg_core::corpus::{c6, db1, random_databases};
use lowdeg_core::local_eval::{
    check_basic_local, count_connected_cq, eval_connected_cq, eval_local, view_radius, BasicLocalSentence, ConnectedCq,
    DEFAULT_SCATTER_CAP,
};
use lowdeg_core::model::{Database, NeighborhoodIndex, Restriction};
use lowdeg_core::oracle::{naive_eval, naive_holds};
use lowdeg_core::query::{parse_query, Formula, Literal};

fn restriction(db: &Database, rels: &[(&str, usize)]) -> Restriction {
    let rels: Vec<(String, usize)> = rels.iter().map(|(n, a)| (n.to_string(), *a)).collect();
    Restriction::new(db, &rels).unwrap()
}

fn brer(db: &Database) -> Restriction {
    restriction(db, &[("B", 1), ("R", 1), ("E", 2)])
}

fn cq(free: &[&str], exist: &[&str], body: Vec<Literal>) -> ConnectedCq {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect();
    ConnectedCq::new(s(free), s(exist), body).unwrap()
}

fn cq_formula(q: &ConnectedCq) -> Formula {
    let mut f = Formula::and_all(q.body.iter().map(Literal::to_formula));
    for v in q.exist.iter().rev() {
        f = Formula::exists(v, f);
    }
    f
}

#[test]
fn connected_cq_examples() {
    let db = db1();
    let q = cq(&["x", "y"], &[], vec![Literal::pos("B", &["x"]), Literal::pos("R", &["y"]), Literal::pos("E", &["x", "y"])]);
    assert_eq!(eval_connected_cq(&db, &brer(&db), &q).unwrap(), vec![vec![2, 4]]);

    let db = c6();
    let r = restriction(&db, &[("E", 2)]);
    let q = cq(&["x", "y"], &[], vec![Literal::pos("E", &["x", "y"])]);
    let got: BTreeSet<Vec<u32>> = eval_connected_cq(&db, &r, &q).unwrap().into_iter().collect();
    let facts: BTreeSet<Vec<u32>> = db.relation("E").unwrap().tuples().map(|t| t.to_vec()).collect();
    assert_eq!(got, facts);

    let db = db1();
    let q = cq(&["x"], &[], vec![Literal::pos("B", &["x"]), Literal::pos("R", &["x"])]);
    assert!(eval_connected_cq(&db, &brer(&db), &q).unwrap().is_empty());
}

#[test]
fn disconnected_body_is_rejected() {
    let body = vec![Literal::pos("B", &["x"]), Literal::pos("R", &["y"])];
    assert!(ConnectedCq::new(vec!["x".into(), "y".into()], vec![], body).is_err());
}

#[test]
fn connected_cqs_match_oracle() {
    let queries = vec![
        cq(&["x", "y"], &[], vec![Literal::pos("E", &["x", "y"]), Literal::neg("B", &["y"])]),
        cq(&["x"], &["y"], vec![Literal::pos("E", &["x", "y"]), Literal::pos("R", &["y"])]),
        cq(&["x", "z"], &["y"], vec![Literal::pos("E", &["x", "y"]), Literal::pos("E", &["y", "z"]), Literal::neg("E", &["x", "z"])]),
        cq(&["y"], &["x", "z"], vec![Literal::pos("E", &["x", "y"]), Literal::pos("E", &["z", "y"]), Literal::pos("B", &["x"]), Literal::neg("B", &["z"])]),
        cq(&["x", "y", "z"], &[], vec![Literal::pos("E", &["x", "y"]), Literal::pos("E", &["x", "z"])]),
    ];
    let mut dbs = vec![db1(), c6()];
    dbs.extend(random_databases().into_iter().map(|(_, d)| d));
    for db in &dbs {
        let r = brer(db);
        for q in &queries {
            let got = eval_connected_cq(db, &r, q).unwrap();
            let set: BTreeSet<Vec<u32>> = got.iter().cloned().collect();
            assert_eq!(set.len(), got.len(), "duplicates for {q:?}");
            assert!(got.windows(2).all(|w| w[0][0] <= w[1][0]), "answers not grouped by anchor");
            let expected = naive_eval(db, &cq_formula(q)).unwrap();
            assert_eq!(set, expected, "{q:?}");
            assert_eq!(count_connected_cq(db, &r, q).unwrap(), expected.len() as u64);
        }
    }
}

#[test]
fn eval_local_examples() {
    let db = c6();
    let r = restriction(&db, &[("E", 2)]);
    let nb = NeighborhoodIndex::build(&db, &r, 2);
    let s = nb.structure(0);
    let id = |v| s.local_id(v).unwrap();
    assert!(eval_local(s, &parse_query("E(x,y)").unwrap(), &[("x".into(), id(0)), ("y".into(), id(1))]).unwrap());
    assert!(eval_local(s, &parse_query("dist(x,y) <= 2").unwrap(), &[("x".into(), id(0)), ("y".into(), id(2))]).unwrap());

    let db = Database::new(3);
    let r = restriction(&db, &[("E", 2)]);
    let nb = NeighborhoodIndex::build(&db, &r, 1);
    let s = nb.structure(1);
    let phi = parse_query("exists z in N_1(x). E(x,z)").unwrap();
    assert!(!eval_local(s, &phi, &[("x".into(), s.local_id(1).unwrap())]).unwrap());
}

#[test]
fn view_radius_examples() {
    assert_eq!(view_radius(&parse_query("B(x) & E(x,y)").unwrap()), Some(0));
    assert_eq!(view_radius(&parse_query("exists y in N_2(x). E(x,y)").unwrap()), Some(2));
    assert_eq!(view_radius(&parse_query("exists y in N_1(x). exists z in N_1(y). E(y,z)").unwrap()), Some(2));
    assert_eq!(view_radius(&parse_query("exists y. E(x,y)").unwrap()), None);
}

#[test]
fn local_formulas_are_stable_under_larger_balls() {
    let phis = [
        "exists y in N_1(x). (E(x,y) & R(y))",
        "exists y in N_2(x). ((B(y) & !E(x,y)) | R(x))",
        "exists y in N_1(x). exists z in N_1(y). (E(y,z) & B(z))",
    ];
    for (_, db) in random_databases().into_iter().take(5) {
        let r = brer(&db);
        for text in phis {
            let phi = parse_query(text).unwrap();
            let rad = view_radius(&phi).unwrap();
            let small = NeighborhoodIndex::build(&db, &r, rad);
            let big = NeighborhoodIndex::build(&db, &r, rad + 1);
            for a in 0..db.n() as u32 {
                let (s, b) = (small.structure(a), big.structure(a));
                let x = eval_local(s, &phi, &[("x".into(), s.local_id(a).unwrap())]).unwrap();
                let y = eval_local(b, &phi, &[("x".into(), b.local_id(a).unwrap())]).unwrap();
                assert_eq!(x, y);
                assert_eq!(x, naive_holds(&db, &phi, &[("x".into(), a)]).unwrap());
            }
        }
    }
}

fn sentence(count: usize, radius: u32, theta: &str) -> BasicLocalSentence {
    BasicLocalSentence { count, radius, var: "v".into(), theta: parse_query(theta).unwrap() }
}

#[test]
fn basic_local_examples() {
    let db = db1();
    let r = brer(&db);
    let nb = NeighborhoodIndex::build(&db, &r, 1);
    let check = |s: &BasicLocalSentence| check_basic_local(&db, &r, &nb, s, DEFAULT_SCATTER_CAP).unwrap();
    assert!(check(&sentence(1, 0, "B(v)")));
    assert!(!check(&sentence(1, 0, "B(v) & R(v)")));
    assert!(check(&sentence(2, 0, "B(v)")));
    assert!(!check(&sentence(3, 0, "B(v)")));
    assert!(!check(&sentence(2, 1, "R(v) & exists w in N_1(v). E(w,v)")));
}

#[test]
fn basic_local_sentences_match_oracle() {
    let thetas = [
        "B(v)",
        "R(v) & !B(v)",
        "exists w in N_1(v). (E(v,w) & R(w))",
        "exists w in N_1(v). E(w,v)",
    ];
    for (_, db) in random_databases().into_iter().filter(|(_, d)| d.n() <= 60) {
        let r = brer(&db);
        for radius in 0..3u32 {
            let nb = NeighborhoodIndex::build(&db, &r, radius.max(1));
            for theta in thetas {
                let s = sentence(2 + radius as usize % 2, radius.max(view_radius(&parse_query(theta).unwrap()).unwrap()), theta);
                let got = check_basic_local(&db, &r, &nb, &s, DEFAULT_SCATTER_CAP).unwrap();
                assert_eq!(got, naive_holds(&db, &s.to_formula(), &[]).unwrap(), "{s:?}");
            }
        }
    }
}
