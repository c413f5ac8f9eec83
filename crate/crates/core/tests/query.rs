use lowdeg_core::corpus::{db1, random_databases};
use lowdeg_core::oracle::naive_holds;
use lowdeg_core::query::{
    exclusive_dnf, parse_query, query_graph, split_negated_binary, Formula, GeneralizedConjunction, Literal,
};
use lowdeg_core::Error;
use proptest::prelude::*;

fn lits(g: &GeneralizedConjunction) -> Vec<String> {
    g.literals.iter().map(|l| l.to_string()).collect()
}

#[test]
fn parses_example_conjunction_left_associated() {
    let f = parse_query("B(x) & R(y) & !E(x,y)").unwrap();
    let expected = Formula::and(
        Formula::and(Formula::rel("B", &["x"]), Formula::rel("R", &["y"])),
        Formula::not(Formula::rel("E", &["x", "y"])),
    );
    assert_eq!(f, expected);
    assert_eq!(f.free_vars(), vec!["x", "y"]);
}

#[test]
fn exists_has_one_free_variable() {
    let f = parse_query("exists y. E(x,y)").unwrap();
    assert_eq!(f, Formula::exists("y", Formula::rel("E", &["x", "y"])));
    assert_eq!(f.free_vars(), vec!["x"]);
}

#[test]
fn dot_extends_to_the_right() {
    let f = parse_query("exists x. B(x) & B(x)").unwrap();
    assert!(f.free_vars().is_empty());
    assert!(matches!(f, Formula::Exists(_, _)));
}

#[test]
fn relativized_and_distance_syntax() {
    let f = parse_query("exists z in N_2(x,y). (E(x,z) & dist(z,y) <= 1)").unwrap();
    match &f {
        Formula::ExistsIn { var, radius, centers, .. } => {
            assert_eq!((var.as_str(), *radius), ("z", 2));
            assert_eq!(centers, &["x", "y"]);
        }
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(f.free_vars(), vec!["x", "y"]);
}

#[test]
fn syntax_errors_and_rebinding() {
    assert!(matches!(parse_query("B(x) &"), Err(Error::Syntax { .. })));
    assert!(matches!(parse_query("exists x. exists x. B(x)"), Err(Error::Syntax { .. })));
    assert!(parse_query("(exists x. B(x)) & (exists x. R(x))").is_ok());
}

#[test]
fn query_graph_examples() {
    let g = GeneralizedConjunction::new(vec![Literal::pos("B", &["x"]), Literal::pos("R", &["y"]), Literal::pos("E", &["x", "y"])]);
    let qg = query_graph(&g);
    assert!(qg.is_connected());
    assert_eq!(qg.named_edges().into_iter().collect::<Vec<_>>(), vec![("x".to_string(), "y".to_string())]);

    let g = GeneralizedConjunction::new(vec![Literal::pos("B", &["x"]), Literal::pos("R", &["y"])]);
    let qg = query_graph(&g);
    assert!(qg.edges.is_empty());
    assert_eq!(qg.components().len(), 2);

    let g = GeneralizedConjunction::new(vec![Literal::pos("R", &["x", "y", "z"])]);
    assert_eq!(query_graph(&g).edges.len(), 3);
}

#[test]
fn query_graph_ignores_literal_order() {
    let a = vec![Literal::pos("E", &["x", "y"]), Literal::neg("F", &["y", "z"]), Literal::pos("B", &["w"]), Literal::pos("E", &["z", "w"])];
    let mut b = a.clone();
    b.reverse();
    let ga = query_graph(&GeneralizedConjunction::new(a));
    let gb = query_graph(&GeneralizedConjunction::new(b));
    assert_eq!(ga.named_edges(), gb.named_edges());
}

#[test]
fn exclusive_dnf_examples() {
    let rows = exclusive_dnf(&parse_query("B(x) | R(x)").unwrap()).unwrap();
    let mut got: Vec<Vec<String>> = rows.iter().map(lits).collect();
    got.sort();
    assert_eq!(got, vec![vec!["!B(x)", "R(x)"], vec!["B(x)", "!R(x)"], vec!["B(x)", "R(x)"]]);

    assert!(exclusive_dnf(&parse_query("B(x) & !B(x)").unwrap()).unwrap().is_empty());

    let rows = exclusive_dnf(&parse_query("E(x,y)").unwrap()).unwrap();
    assert_eq!(rows.iter().map(lits).collect::<Vec<_>>(), vec![vec!["E(x,y)"]]);
}

#[test]
fn split_examples() {
    let g = GeneralizedConjunction::new(vec![Literal::pos("B", &["x"]), Literal::pos("R", &["y"]), Literal::neg("E", &["x", "y"])]);
    let (g1, g2) = split_negated_binary(&g).unwrap();
    assert_eq!(lits(&g1), vec!["B(x)", "R(y)"]);
    assert_eq!(lits(&g2), vec!["B(x)", "R(y)", "E(x,y)"]);
    assert_eq!(g1.vars, g.vars);

    let g = GeneralizedConjunction::new(vec![Literal::pos("B", &["x"]), Literal::neg("R", &["y"])]);
    assert!(split_negated_binary(&g).is_none());

    let g = GeneralizedConjunction::new(vec![Literal::neg("E", &["x", "y"]), Literal::neg("F", &["y", "z"])]);
    let (g1, g2) = split_negated_binary(&g).unwrap();
    assert_eq!(lits(&g1), vec!["!F(y,z)"]);
    assert_eq!(lits(&g2), vec!["!F(y,z)", "E(x,y)"]);
    assert!(g1.negated_non_unary() < g.negated_non_unary());
}

fn atom() -> impl Strategy<Value = Formula> {
    let v = prop::sample::select(vec!["x", "y", "z"]);
    prop_oneof![
        (prop::sample::select(vec!["B", "R"]), v.clone()).prop_map(|(r, a)| Formula::rel(r, &[a])),
        (v.clone(), v.clone()).prop_map(|(a, b)| Formula::rel("E", &[a, b])),
        (v.clone(), v, 0u32..4, any::<bool>()).prop_map(|(a, b, c, le)| {
            Formula::dist(a, b, if le { lowdeg_core::query::Cmp::Le } else { lowdeg_core::query::Cmp::Gt }, c)
        }),
        Just(Formula::True),
        Just(Formula::False),
    ]
}

fn formula() -> impl Strategy<Value = Formula> {
    atom().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (prop::sample::select(vec!["u", "w"]), inner.clone()).prop_map(|(v, b)| Formula::exists(v, b)),
            (prop::sample::select(vec!["u", "w"]), inner.clone()).prop_map(|(v, b)| Formula::forall(v, b)),
            (prop::sample::select(vec!["u", "w"]), 0u32..3, inner).prop_map(|(v, r, b)| Formula::exists_in(v, r, &["x"], b)),
        ]
    })
}

fn rebinds(f: &Formula, bound: &mut Vec<String>) -> bool {
    match f {
        Formula::Exists(v, b) | Formula::Forall(v, b) | Formula::ExistsIn { var: v, body: b, .. } => {
            if bound.contains(v) {
                return true;
            }
            bound.push(v.clone());
            let r = rebinds(b, bound);
            bound.pop();
            r
        }
        Formula::Not(a) => rebinds(a, bound),
        Formula::And(a, b) | Formula::Or(a, b) => rebinds(a, bound) || rebinds(b, bound),
        _ => false,
    }
}

fn qf_formula() -> impl Strategy<Value = Formula> {
    let v = prop::sample::select(vec!["x", "y"]);
    let leaf = prop_oneof![
        (prop::sample::select(vec!["B", "R"]), v.clone()).prop_map(|(r, a)| Formula::rel(r, &[a])),
        (v.clone(), v).prop_map(|(a, b)| Formula::rel("E", &[a, b])),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::or(a, b)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_parse_round_trip(f in formula()) {
        prop_assume!(!rebinds(&f, &mut Vec::new()));
        let printed = f.to_string();
        let back = parse_query(&printed).unwrap();
        prop_assert_eq!(back, f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn exclusive_dnf_partitions_assignments(psi in qf_formula(), which in 0usize..3) {
        let db = if which == 0 { db1() } else { random_databases().swap_remove(which * 3).1 };
        prop_assume!(db.n() <= 40);
        let rows = exclusive_dnf(&psi).unwrap();
        let vars = psi.free_vars();
        let n = db.n() as u32;
        let total = n.pow(vars.len() as u32);
        for code in 0..total {
            let mut c = code;
            let assignment: Vec<(String, u32)> = vars.iter().map(|v| { let a = c % n; c /= n; (v.clone(), a) }).collect();
            let holds = naive_holds(&db, &psi, &assignment).unwrap();
            let mut hits = 0;
            for row in &rows {
                let sub: Vec<(String, u32)> = assignment.clone();
                if naive_holds(&db, &row.to_formula(), &sub).unwrap() {
                    hits += 1;
                }
            }
            prop_assert_eq!(hits, usize::from(holds));
        }
    }
}
