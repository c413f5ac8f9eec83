//! Exact answer counting by inclusion–exclusion on negated non-unary atoms and
//! factorisation over connected components.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::local_eval::{count_connected_cq, ConnectedCq};
use crate::model::{Database, Restriction};
use crate::qe::{eliminate_quantifiers, Config, ReducedInstance};
use crate::query::{query_graph, split_negated_binary, Formula, GeneralizedConjunction, Literal};

/// One inclusion–exclusion step: `|γ| = |γ₁| − |γ₂|`.
#[derive(Clone, Debug)]
pub struct SplitRecord {
    pub gamma: GeneralizedConjunction,
    pub gamma1: GeneralizedConjunction,
    pub gamma2: GeneralizedConjunction,
    pub count: BigUint,
    pub count1: BigUint,
    pub count2: BigUint,
}

/// One factorisation step: `|γ|` as the product of its component counts.
#[derive(Clone, Debug)]
pub struct ProductRecord {
    pub gamma: GeneralizedConjunction,
    pub components: Vec<GeneralizedConjunction>,
    pub factors: Vec<BigUint>,
}

/// Counter over a fixed database with memoised component counts.
pub struct Counter<'a> {
    db: &'a Database,
    restriction: Restriction,
    memo: HashMap<String, BigUint>,
    pub calls: u64,
    pub max_depth: usize,
    pub trace: bool,
    pub splits: Vec<SplitRecord>,
    pub products: Vec<ProductRecord>,
}

impl<'a> Counter<'a> {
    pub fn new(db: &'a Database) -> Self {
        Counter {
            db,
            restriction: Restriction::full(db),
            memo: HashMap::new(),
            calls: 0,
            max_depth: 0,
            trace: false,
            splits: Vec::new(),
            products: Vec::new(),
        }
    }

    pub fn count(&mut self, g: &GeneralizedConjunction) -> Result<BigUint> {
        self.count_at(g, 0)
    }

    fn count_at(&mut self, g: &GeneralizedConjunction, depth: usize) -> Result<BigUint> {
        self.calls += 1;
        self.max_depth = self.max_depth.max(depth);
        if let Some((g1, g2)) = split_negated_binary(g) {
            let c1 = self.count_at(&g1, depth + 1)?;
            let c2 = self.count_at(&g2, depth + 1)?;
            let c = &c1 - &c2;
            if self.trace {
                self.splits.push(SplitRecord {
                    gamma: g.clone(),
                    gamma1: g1,
                    gamma2: g2,
                    count: c.clone(),
                    count1: c1,
                    count2: c2,
                });
            }
            return Ok(c);
        }
        let graph = query_graph(g);
        let comps = graph.components();
        let mut parts = Vec::with_capacity(comps.len());
        let mut factors = Vec::with_capacity(comps.len());
        for comp in &comps {
            let vars: Vec<String> = comp.iter().map(|&i| g.vars[i].clone()).collect();
            let lits: Vec<Literal> =
                g.literals.iter().filter(|l| l.args.iter().any(|a| vars.contains(a))).cloned().collect();
            let part = GeneralizedConjunction::with_vars(vars, lits);
            let c = self.component(&part)?;
            parts.push(part);
            factors.push(c);
        }
        let product = factors.iter().fold(BigUint::one(), |acc, f| acc * f);
        if self.trace && comps.len() > 1 {
            self.products.push(ProductRecord { gamma: g.clone(), components: parts, factors });
        }
        Ok(product)
    }

    fn component(&mut self, part: &GeneralizedConjunction) -> Result<BigUint> {
        if part.literals.is_empty() {
            return Ok(BigUint::from(self.db.n()).pow(part.vars.len() as u32));
        }
        let key = memo_key(part);
        if let Some(c) = self.memo.get(&key) {
            return Ok(c.clone());
        }
        let q = ConnectedCq::new(part.vars.clone(), Vec::new(), part.literals.clone())?;
        let c = BigUint::from(count_connected_cq(self.db, &self.restriction, &q)?);
        self.memo.insert(key, c.clone());
        Ok(c)
    }
}

/// Literal multiset with variables renamed by first occurrence in `vars`.
fn memo_key(g: &GeneralizedConjunction) -> String {
    let rename = |v: &String| g.vars.iter().position(|w| w == v).map(|i| format!("v{i}")).unwrap_or_default();
    let mut lits: Vec<String> = g
        .literals
        .iter()
        .map(|l| format!("{}{}({})", if l.positive { "" } else { "!" }, l.rel, l.args.iter().map(rename).collect::<Vec<_>>().join(",")))
        .collect();
    lits.sort_unstable();
    format!("{}|{}", g.vars.len(), lits.join("&"))
}

/// `|γ(db)|`.
pub fn count_gen_conjunction(db: &Database, g: &GeneralizedConjunction) -> Result<BigUint> {
    Counter::new(db).count(g)
}

/// `|ψ(G)|` as a sum over the mutually exclusive clauses of ψ.
pub fn count_reduced(ri: &ReducedInstance) -> Result<BigUint> {
    let mut counter = Counter::new(&ri.g);
    let mut total = BigUint::zero();
    for clause in &ri.clauses {
        total += counter.count(&ri.clause_conjunction(clause))?;
    }
    Ok(total)
}

/// `|φ(A)|`.
pub fn count_answers(db: &Database, phi: &Formula, cfg: &Config) -> Result<BigUint> {
    count_reduced(&eliminate_quantifiers(db, phi, cfg)?)
}
