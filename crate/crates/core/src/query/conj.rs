use std::collections::BTreeSet;
use std::fmt;

use super::Formula;
use crate::error::{Error, Result};

/// A possibly negated relational atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub positive: bool,
    pub rel: String,
    pub args: Vec<String>,
}

impl Literal {
    pub fn pos(rel: &str, args: &[&str]) -> Self {
        Literal { positive: true, rel: rel.into(), args: args.iter().map(|s| s.to_string()).collect() }
    }

    pub fn neg(rel: &str, args: &[&str]) -> Self {
        Literal { positive: false, ..Literal::pos(rel, args) }
    }

    pub fn negated(&self) -> Self {
        Literal { positive: !self.positive, ..self.clone() }
    }

    pub fn to_formula(&self) -> Formula {
        let atom = Formula::Rel { name: self.rel.clone(), args: self.args.clone() };
        if self.positive {
            atom
        } else {
            Formula::not(atom)
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("!")?;
        }
        write!(f, "{}({})", self.rel, self.args.join(","))
    }
}

/// A conjunction of literals over an explicit, ordered variable list. Variables that
/// occur in no literal are unconstrained.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeneralizedConjunction {
    pub vars: Vec<String>,
    pub literals: Vec<Literal>,
}

impl GeneralizedConjunction {
    /// Variables default to first-occurrence order in the literal list.
    pub fn new(literals: Vec<Literal>) -> Self {
        let mut vars: Vec<String> = Vec::new();
        for l in &literals {
            for a in &l.args {
                if !vars.contains(a) {
                    vars.push(a.clone());
                }
            }
        }
        GeneralizedConjunction { vars, literals }
    }

    pub fn with_vars(vars: Vec<String>, literals: Vec<Literal>) -> Self {
        GeneralizedConjunction { vars, literals }
    }

    pub fn to_formula(&self) -> Formula {
        Formula::and_all(self.literals.iter().map(Literal::to_formula))
    }

    /// Number of negated literals of arity at least two.
    pub fn negated_non_unary(&self) -> usize {
        self.literals.iter().filter(|l| !l.positive && l.args.len() >= 2).count()
    }
}

impl fmt::Display for GeneralizedConjunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.literals.is_empty() {
            return f.write_str("true");
        }
        let parts: Vec<String> = self.literals.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join(" & "))
    }
}

/// Variables of a conjunction joined when they share a positive atom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryGraph {
    pub vertices: Vec<String>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl QueryGraph {
    /// Connected components as lists of vertex indices, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut c = x;
            while p[c] != r {
                let next = p[c];
                p[c] = r;
                c = next;
            }
            r
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut comps: Vec<Vec<usize>> = Vec::new();
        let mut root_of: Vec<Option<usize>> = vec![None; n];
        for v in 0..n {
            let r = find(&mut parent, v);
            match root_of[r] {
                Some(c) => comps[c].push(v),
                None => {
                    root_of[r] = Some(comps.len());
                    comps.push(vec![v]);
                }
            }
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Edge set over variable names, independent of vertex numbering.
    pub fn named_edges(&self) -> BTreeSet<(String, String)> {
        self.edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (&self.vertices[a], &self.vertices[b]);
                if x <= y {
                    (x.clone(), y.clone())
                } else {
                    (y.clone(), x.clone())
                }
            })
            .collect()
    }
}

pub fn query_graph(g: &GeneralizedConjunction) -> QueryGraph {
    let vertices = g.vars.clone();
    let idx = |v: &String| vertices.iter().position(|w| w == v);
    let mut edges = BTreeSet::new();
    for l in g.literals.iter().filter(|l| l.positive) {
        for (i, a) in l.args.iter().enumerate() {
            for b in &l.args[i + 1..] {
                if let (Some(x), Some(y)) = (idx(a), idx(b)) {
                    if x != y {
                        edges.insert((x.min(y), x.max(y)));
                    }
                }
            }
        }
    }
    QueryGraph { vertices, edges }
}

/// Largest atom set accepted by [`exclusive_dnf`].
pub const MAX_DNF_ATOMS: usize = 22;

fn collect_atoms(f: &Formula, out: &mut Vec<(String, Vec<String>)>) -> Result<()> {
    match f {
        Formula::True | Formula::False => Ok(()),
        Formula::Rel { name, args } => {
            let a = (name.clone(), args.clone());
            if !out.contains(&a) {
                out.push(a);
            }
            Ok(())
        }
        Formula::Not(a) => collect_atoms(a, out),
        Formula::And(a, b) | Formula::Or(a, b) => {
            collect_atoms(a, out)?;
            collect_atoms(b, out)
        }
        other => Err(Error::Unsupported(format!("exclusive_dnf needs a quantifier-free relational formula, got {other}"))),
    }
}

fn eval_row(f: &Formula, atoms: &[(String, Vec<String>)], row: u64) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Rel { name, args } => {
            let i = atoms.iter().position(|(n, a)| n == name && a == args).expect("atom collected");
            row >> i & 1 == 1
        }
        Formula::Not(a) => !eval_row(a, atoms, row),
        Formula::And(a, b) => eval_row(a, atoms, row) && eval_row(b, atoms, row),
        Formula::Or(a, b) => eval_row(a, atoms, row) || eval_row(b, atoms, row),
        _ => unreachable!("checked by collect_atoms"),
    }
}

/// Mutually exclusive disjuncts equivalent to `psi`: one full signed conjunction per
/// satisfying truth-table row.
pub fn exclusive_dnf(psi: &Formula) -> Result<Vec<GeneralizedConjunction>> {
    let mut atoms = Vec::new();
    collect_atoms(psi, &mut atoms)?;
    if atoms.len() > MAX_DNF_ATOMS {
        return Err(Error::ResourceCap(format!("{} atoms exceed the truth-table limit {MAX_DNF_ATOMS}", atoms.len())));
    }
    let vars = psi.free_vars();
    let mut out = Vec::new();
    for row in 0..1u64 << atoms.len() {
        if eval_row(psi, &atoms, row) {
            let literals = atoms
                .iter()
                .enumerate()
                .map(|(i, (n, a))| Literal { positive: row >> i & 1 == 1, rel: n.clone(), args: a.clone() })
                .collect();
            out.push(GeneralizedConjunction::with_vars(vars.clone(), literals));
        }
    }
    Ok(out)
}

/// Removes the first negated non-unary literal `!R(x̄)`: returns `(γ₁, γ₁ ∧ R(x̄))`.
pub fn split_negated_binary(g: &GeneralizedConjunction) -> Option<(GeneralizedConjunction, GeneralizedConjunction)> {
    let i = g.literals.iter().position(|l| !l.positive && l.args.len() >= 2)?;
    let mut rest = g.literals.clone();
    let removed = rest.remove(i);
    let g1 = GeneralizedConjunction::with_vars(g.vars.clone(), rest.clone());
    rest.push(removed.negated());
    let g2 = GeneralizedConjunction::with_vars(g.vars.clone(), rest);
    Some((g1, g2))
}
