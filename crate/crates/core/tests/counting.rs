use lowdeg_core::corpus::{c6, db1, random_databases};
use lowdeg_core::counting::{count_answers, count_gen_conjunction, Counter};
use lowdeg_core::model::Database;
use lowdeg_core::oracle::naive_eval;
use lowdeg_core::qe::{eliminate_quantifiers, Config};
use lowdeg_core::query::{exclusive_dnf, parse_query, GeneralizedConjunction, Literal};
use num_bigint::BigUint;
use proptest::prelude::*;

fn count(db: &Database, text: &str) -> BigUint {
    count_answers(db, &parse_query(text).unwrap(), &Config::default()).unwrap()
}

fn oracle_count(db: &Database, g: &GeneralizedConjunction) -> usize {
    // Unconstrained variables range over the whole domain.
    let constrained: Vec<&String> = g.vars.iter().filter(|v| g.literals.iter().any(|l| l.args.contains(v))).collect();
    let free = g.vars.len() - constrained.len();
    let base = if g.literals.is_empty() { 1 } else { naive_eval(db, &g.to_formula()).unwrap().len() };
    base * db.n().pow(free as u32)
}

#[test]
fn conjunction_examples() {
    let db = db1();
    let g = GeneralizedConjunction::new(vec![Literal::pos("B", &["x"]), Literal::pos("R", &["y"]), Literal::neg("E", &["x", "y"])]);
    assert_eq!(count_gen_conjunction(&db, &g).unwrap(), 3u32.into());
    let g = GeneralizedConjunction::new(vec![Literal::pos("B", &["x"]), Literal::pos("R", &["y"])]);
    assert_eq!(count_gen_conjunction(&db, &g).unwrap(), 4u32.into());
    let g = GeneralizedConjunction::new(vec![Literal::pos("B", &["x"]), Literal::neg("B", &["x"])]);
    assert_eq!(count_gen_conjunction(&db, &g).unwrap(), 0u32.into());
}

#[test]
fn answer_counts() {
    assert_eq!(count(&db1(), "B(x) & R(y) & !E(x,y)"), 3u32.into());
    assert_eq!(count(&db1(), "exists x. B(x)"), 1u32.into());
    assert_eq!(count(&db1(), "exists x. (B(x) & R(x))"), 0u32.into());
    assert_eq!(count(&c6(), "E(x,y)"), 6u32.into());
}

#[test]
fn counts_exceed_machine_words() {
    let db = Database::new(1 << 16);
    let g = GeneralizedConjunction::with_vars((0..5).map(|i| format!("v{i}")).collect(), Vec::new());
    assert_eq!(count_gen_conjunction(&db, &g).unwrap(), BigUint::from(2u32).pow(80));
}

#[test]
fn recursion_depth_matches_negated_atoms() {
    let db = db1();
    let g = GeneralizedConjunction::new(vec![
        Literal::pos("B", &["x"]),
        Literal::neg("E", &["x", "y"]),
        Literal::neg("E", &["y", "z"]),
        Literal::neg("E", &["z", "x"]),
    ]);
    let mut c = Counter::new(&db);
    c.count(&g).unwrap();
    assert_eq!(c.max_depth, 3);
    let leaves = (c.calls + 1) / 2;
    assert!(leaves <= 1 << 3);
}

#[test]
fn exclusive_disjuncts_sum_to_psi_count() {
    let db = db1();
    let ri = eliminate_quantifiers(&db, &parse_query("B(x) & R(y) & !E(x,y)").unwrap(), &Config::default()).unwrap();
    let rows = exclusive_dnf(&ri.psi_formula()).unwrap();
    let mut total = BigUint::from(0u32);
    for row in &rows {
        total += count_gen_conjunction(&ri.g, row).unwrap();
    }
    assert_eq!(total, 3u32.into());
}

fn literal() -> impl Strategy<Value = Literal> {
    let v = prop::sample::select(vec!["x", "y", "z", "w"]);
    prop_oneof![
        (prop::sample::select(vec!["B", "R"]), v.clone(), any::<bool>())
            .prop_map(|(r, a, pos)| Literal { positive: pos, rel: r.into(), args: vec![a.into()] }),
        (v.clone(), v, any::<bool>()).prop_map(|(a, b, pos)| Literal { positive: pos, rel: "E".into(), args: vec![a.into(), b.into()] }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn splits_and_products_match_oracle(lits in prop::collection::vec(literal(), 1..5), which in 0usize..4) {
        let db = if which == 0 { db1() } else { random_databases().swap_remove(which).1 };
        prop_assume!(db.n() <= 40);
        let g = GeneralizedConjunction::new(lits);
        let mut c = Counter::new(&db);
        c.trace = true;
        let total = c.count(&g).unwrap();
        prop_assert_eq!(total, oracle_count(&db, &g).into());
        for s in &c.splits {
            prop_assert_eq!(&s.count, &(&s.count1 - &s.count2));
            prop_assert_eq!(s.count.clone(), oracle_count(&db, &s.gamma).into());
            prop_assert_eq!(s.count1.clone(), oracle_count(&db, &s.gamma1).into());
            prop_assert_eq!(s.count2.clone(), oracle_count(&db, &s.gamma2).into());
        }
        for p in &c.products {
            let product = p.factors.iter().fold(BigUint::from(1u32), |a, f| a * f);
            prop_assert_eq!(product, oracle_count(&db, &p.gamma).into());
            for (part, f) in p.components.iter().zip(&p.factors) {
                prop_assert_eq!(f.clone(), oracle_count(&db, part).into());
            }
        }
    }
}
