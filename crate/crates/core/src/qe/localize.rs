//! Rewriting queries into boolean combinations of local formulas and basic-local
//! sentences.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::local_eval::{check_basic_local, view_radius, BasicLocalSentence};
use crate::model::{Database, NeighborhoodIndex, Restriction};
use crate::query::{Cmp, Formula, Literal};

/// Boolean skeleton over local formulas and sentence references.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Skel {
    Const(bool),
    Local(Formula),
    /// Index into [`LocalizedQuery::sentences`].
    Sentence(usize),
    Not(Box<Skel>),
    And(Vec<Skel>),
    Or(Vec<Skel>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalizedQuery {
    pub free: Vec<String>,
    /// Largest view radius of a local leaf.
    pub radius: u32,
    pub skeleton: Skel,
    pub sentences: Vec<BasicLocalSentence>,
}

impl LocalizedQuery {
    /// Plain formula equivalent to the localized query.
    pub fn to_formula(&self) -> Formula {
        fn go(s: &Skel, lq: &LocalizedQuery) -> Formula {
            match s {
                Skel::Const(true) => Formula::True,
                Skel::Const(false) => Formula::False,
                Skel::Local(f) => f.clone(),
                Skel::Sentence(i) => lq.sentences[*i].to_formula(),
                Skel::Not(a) => Formula::not(go(a, lq)),
                Skel::And(xs) => Formula::and_all(xs.iter().map(|x| go(x, lq))),
                Skel::Or(xs) => Formula::or_all(xs.iter().map(|x| go(x, lq))),
            }
        }
        go(&self.skeleton, self)
    }
}

/// Disjuncts of an existential block beyond which localization gives up.
const MAX_DISJUNCTS: usize = 4096;

#[derive(Clone, Debug)]
enum Item {
    Lit(Literal),
    Other(Formula),
}

impl Item {
    fn vars(&self) -> Vec<String> {
        match self {
            Item::Lit(l) => l.args.clone(),
            Item::Other(f) => f.free_vars(),
        }
    }

    fn to_formula(&self) -> Formula {
        match self {
            Item::Lit(l) => l.to_formula(),
            Item::Other(f) => f.clone(),
        }
    }
}

#[derive(Clone, Debug, Default)]
struct Disjunct {
    bound: Vec<String>,
    items: Vec<Item>,
}

fn has_plain_quantifier(f: &Formula) -> bool {
    match f {
        Formula::Exists(..) | Formula::Forall(..) => true,
        Formula::Not(a) => has_plain_quantifier(a),
        Formula::And(a, b) | Formula::Or(a, b) => has_plain_quantifier(a) || has_plain_quantifier(b),
        Formula::ExistsIn { body, .. } => has_plain_quantifier(body),
        _ => false,
    }
}

fn all_vars(f: &Formula, out: &mut HashSet<String>) {
    match f {
        Formula::True | Formula::False => {}
        Formula::Rel { args, .. } => out.extend(args.iter().cloned()),
        Formula::Dist { x, y, .. } => {
            out.insert(x.clone());
            out.insert(y.clone());
        }
        Formula::Not(a) => all_vars(a, out),
        Formula::And(a, b) | Formula::Or(a, b) => {
            all_vars(a, out);
            all_vars(b, out);
        }
        Formula::Exists(v, b) | Formula::Forall(v, b) => {
            out.insert(v.clone());
            all_vars(b, out);
        }
        Formula::ExistsIn { var, centers, body, .. } => {
            out.insert(var.clone());
            out.extend(centers.iter().cloned());
            all_vars(body, out);
        }
    }
}

struct Localizer {
    used: HashSet<String>,
    fresh: usize,
    sentences: Vec<BasicLocalSentence>,
}

impl Localizer {
    fn fresh(&mut self, base: &str) -> String {
        loop {
            let name = format!("{base}_{}", self.fresh);
            self.fresh += 1;
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }

    fn skel(&mut self, f: &Formula) -> Result<Skel> {
        if !has_plain_quantifier(f) {
            return Ok(match f {
                Formula::True => Skel::Const(true),
                Formula::False => Skel::Const(false),
                _ => Skel::Local(f.clone()),
            });
        }
        match f {
            Formula::Not(a) => Ok(Skel::Not(Box::new(self.skel(a)?))),
            Formula::And(a, b) => Ok(Skel::And(vec![self.skel(a)?, self.skel(b)?])),
            Formula::Or(a, b) => Ok(Skel::Or(vec![self.skel(a)?, self.skel(b)?])),
            Formula::Exists(..) => self.block(f),
            Formula::Forall(v, body) => {
                let dual = Formula::Exists(v.clone(), Box::new(Formula::not((**body).clone())));
                Ok(Skel::Not(Box::new(self.block(&dual)?)))
            }
            Formula::ExistsIn { .. } => {
                Err(Error::Unsupported(format!("unrelativized quantifier inside a relativized one in {f}")))
            }
            _ => unreachable!("atoms carry no quantifier"),
        }
    }

    fn block(&mut self, f: &Formula) -> Result<Skel> {
        if f.free_vars().is_empty() {
            if let Some(s) = recognise_basic_local(f) {
                self.sentences.push(s);
                return Ok(Skel::Sentence(self.sentences.len() - 1));
            }
        }
        let disjuncts = self.dnf(f, true)?;
        let mut parts = Vec::new();
        for d in disjuncts {
            parts.push(self.disjunct(d, f)?);
        }
        Ok(Skel::Or(parts))
    }

    /// Existential DNF of `f` under polarity `pol`.
    fn dnf(&mut self, f: &Formula, pol: bool) -> Result<Vec<Disjunct>> {
        let unsupported = || Error::Unsupported(format!("quantifier alternation in {f}"));
        Ok(match f {
            Formula::True | Formula::False => {
                if matches!(f, Formula::True) == pol {
                    vec![Disjunct::default()]
                } else {
                    Vec::new()
                }
            }
            Formula::Rel { name, args } => {
                let l = Literal { positive: pol, rel: name.clone(), args: args.clone() };
                vec![Disjunct { bound: Vec::new(), items: vec![Item::Lit(l)] }]
            }
            Formula::Dist { .. } => {
                let g = if pol { f.clone() } else { Formula::not(f.clone()) };
                vec![Disjunct { bound: Vec::new(), items: vec![Item::Other(g)] }]
            }
            Formula::ExistsIn { .. } => {
                if has_plain_quantifier(f) {
                    return Err(unsupported());
                }
                let g = if pol { f.clone() } else { Formula::not(f.clone()) };
                vec![Disjunct { bound: Vec::new(), items: vec![Item::Other(g)] }]
            }
            Formula::Not(a) => self.dnf(a, !pol)?,
            Formula::And(a, b) | Formula::Or(a, b) => {
                let (x, y) = (self.dnf(a, pol)?, self.dnf(b, pol)?);
                let conj = matches!(f, Formula::And(..)) == pol;
                if conj {
                    if x.len() * y.len() > MAX_DISJUNCTS {
                        return Err(Error::ResourceCap(format!("disjunctive form of {f} is too large")));
                    }
                    let mut out = Vec::new();
                    for p in &x {
                        for q in &y {
                            let mut d = p.clone();
                            d.bound.extend(q.bound.iter().cloned());
                            d.items.extend(q.items.iter().cloned());
                            out.push(d);
                        }
                    }
                    out
                } else {
                    let mut out = x;
                    out.extend(y);
                    if out.len() > MAX_DISJUNCTS {
                        return Err(Error::ResourceCap(format!("disjunctive form of {f} is too large")));
                    }
                    out
                }
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                if matches!(f, Formula::Exists(..)) != pol {
                    return Err(unsupported());
                }
                let name = self.fresh(v);
                let body = body.rename_free(&|w| (w == v).then(|| name.clone()));
                let mut ds = self.dnf(&body, pol)?;
                for d in &mut ds {
                    d.bound.push(name.clone());
                }
                ds
            }
        })
    }

    fn disjunct(&mut self, d: Disjunct, whole: &Formula) -> Result<Skel> {
        let mention: HashSet<String> = d.items.iter().flat_map(|i| i.vars()).collect();
        let bound: Vec<String> = d.bound.iter().filter(|v| mention.contains(*v)).cloned().collect();
        let is_bound = |v: &str| bound.iter().any(|b| b == v);
        let mut vars: Vec<String> = bound.clone();
        for i in &d.items {
            for v in i.vars() {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
        let idx = |v: &str| vars.iter().position(|w| w == v).expect("collected");
        let mut parent: Vec<usize> = (0..vars.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for i in &d.items {
            if let Item::Lit(l) = i {
                if l.positive {
                    for w in l.args.windows(2) {
                        let (a, b) = (find(&mut parent, idx(&w[0])), find(&mut parent, idx(&w[1])));
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut free_items = Vec::new();
        let mut comp_items: Vec<(usize, Vec<Formula>)> = Vec::new();
        for i in &d.items {
            let bvars: Vec<String> = i.vars().into_iter().filter(|v| is_bound(v)).collect();
            if bvars.is_empty() {
                free_items.push(i.to_formula());
                continue;
            }
            let roots: HashSet<usize> = bvars.iter().map(|v| find(&mut parent, idx(v))).collect();
            if roots.len() > 1 {
                return Err(Error::Unsupported(format!(
                    "{} links quantified variables that no positive atom connects, in {whole}",
                    i.to_formula()
                )));
            }
            let root = *roots.iter().next().expect("non-empty");
            match comp_items.iter_mut().find(|(r, _)| *r == root) {
                Some((_, list)) => list.push(i.to_formula()),
                None => comp_items.push((root, vec![i.to_formula()])),
            }
        }
        let mut local_parts = free_items;
        let mut skel_parts = Vec::new();
        for (root, items) in comp_items {
            let members: Vec<String> =
                vars.iter().filter(|v| find(&mut parent, idx(v)) == root).cloned().collect();
            let m = members.len() as u32;
            let comp_bound: Vec<String> = members.iter().filter(|v| is_bound(v)).cloned().collect();
            let centers: Vec<String> = members.iter().filter(|v| !is_bound(v)).cloned().collect();
            let body = Formula::and_all(items);
            if centers.is_empty() {
                let outside = body.free_vars().into_iter().any(|v| !comp_bound.contains(&v));
                if outside {
                    return Err(Error::Unsupported(format!(
                        "quantified variables far from every free variable in {whole}"
                    )));
                }
                let var = comp_bound[0].clone();
                let mut theta = body;
                for v in comp_bound[1..].iter().rev() {
                    theta = Formula::ExistsIn { var: v.clone(), radius: m, centers: vec![var.clone()], body: Box::new(theta) };
                }
                let radius = view_radius(&theta).expect("relativized");
                self.sentences.push(BasicLocalSentence { count: 1, radius, var, theta });
                skel_parts.push(Skel::Sentence(self.sentences.len() - 1));
            } else {
                let mut f = body;
                for v in comp_bound.iter().rev() {
                    f = Formula::ExistsIn { var: v.clone(), radius: m, centers: centers.clone(), body: Box::new(f) };
                }
                local_parts.push(f);
            }
        }
        if !local_parts.is_empty() {
            skel_parts.insert(0, Skel::Local(Formula::and_all(local_parts)));
        }
        Ok(if skel_parts.is_empty() { Skel::Const(true) } else { Skel::And(skel_parts) })
    }
}

fn conjuncts(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        other => out.push(other.clone()),
    }
}

/// Recognises `∃y₁..∃y_ℓ (⋀ dist(y_i,y_j) > 2r ∧ ⋀ θ(y_i))` written out explicitly.
fn recognise_basic_local(f: &Formula) -> Option<BasicLocalSentence> {
    let mut vars = Vec::new();
    let mut body = f;
    while let Formula::Exists(v, b) = body {
        vars.push(v.clone());
        body = b;
    }
    let l = vars.len();
    let mut parts = Vec::new();
    conjuncts(body, &mut parts);
    let mut scatter: Option<u32> = None;
    let mut pairs = HashSet::new();
    let mut per_var: Vec<Vec<Formula>> = vec![Vec::new(); l];
    for p in parts {
        if let Formula::Dist { x, y, cmp: Cmp::Gt, c } = &p {
            let (i, j) = (vars.iter().position(|v| v == x), vars.iter().position(|v| v == y));
            if let (Some(i), Some(j)) = (i, j) {
                if i != j && scatter.is_none_or(|s| s == *c) {
                    scatter = Some(*c);
                    pairs.insert((i.min(j), i.max(j)));
                    continue;
                }
            }
        }
        let fv = p.free_vars();
        if fv.len() != 1 {
            return None;
        }
        let i = vars.iter().position(|v| *v == fv[0])?;
        per_var[i].push(p);
    }
    if l < 2 || pairs.len() != l * (l - 1) / 2 {
        return None;
    }
    let c = scatter?;
    if c % 2 != 0 {
        return None;
    }
    let r = c / 2;
    let thetas: Vec<Formula> = per_var.into_iter().map(Formula::and_all).collect();
    let first = thetas[0].clone();
    for (i, t) in thetas.iter().enumerate().skip(1) {
        let renamed = t.rename_free(&|w| (w == vars[i]).then(|| vars[0].clone()));
        if renamed != first {
            return None;
        }
    }
    if view_radius(&first)? > r {
        return None;
    }
    Some(BasicLocalSentence { count: l, radius: r, var: vars[0].clone(), theta: first })
}

/// Splits `phi` into local formulas around its free variables and basic-local sentences.
pub fn localize(phi: &Formula) -> Result<LocalizedQuery> {
    let mut used = HashSet::new();
    all_vars(phi, &mut used);
    let mut loc = Localizer { used, fresh: 0, sentences: Vec::new() };
    let skeleton = loc.skel(phi)?;
    fn radius(s: &Skel) -> Result<u32> {
        Ok(match s {
            Skel::Const(_) | Skel::Sentence(_) => 0,
            Skel::Local(f) => view_radius(f)
                .ok_or_else(|| Error::Unsupported(format!("local part {f} has an unrelativized quantifier")))?,
            Skel::Not(a) => radius(a)?,
            Skel::And(xs) | Skel::Or(xs) => xs.iter().map(radius).collect::<Result<Vec<_>>>()?.into_iter().max().unwrap_or(0),
        })
    }
    let radius = radius(&skeleton)?;
    Ok(LocalizedQuery { free: phi.free_vars(), radius, skeleton, sentences: loc.sentences })
}

/// Folds constants out of a skeleton.
fn simplify(s: Skel) -> Skel {
    match s {
        Skel::Not(a) => match simplify(*a) {
            Skel::Const(b) => Skel::Const(!b),
            other => Skel::Not(Box::new(other)),
        },
        Skel::And(xs) => {
            let mut keep = Vec::new();
            for x in xs {
                match simplify(x) {
                    Skel::Const(false) => return Skel::Const(false),
                    Skel::Const(true) => {}
                    other => keep.push(other),
                }
            }
            match keep.len() {
                0 => Skel::Const(true),
                1 => keep.pop().expect("one"),
                _ => Skel::And(keep),
            }
        }
        Skel::Or(xs) => {
            let mut keep = Vec::new();
            for x in xs {
                match simplify(x) {
                    Skel::Const(true) => return Skel::Const(true),
                    Skel::Const(false) => {}
                    other => keep.push(other),
                }
            }
            match keep.len() {
                0 => Skel::Const(false),
                1 => keep.pop().expect("one"),
                _ => Skel::Or(keep),
            }
        }
        other => other,
    }
}

fn skel_formula(s: &Skel) -> Formula {
    match s {
        Skel::Const(true) => Formula::True,
        Skel::Const(false) => Formula::False,
        Skel::Local(f) => f.clone(),
        Skel::Sentence(_) => unreachable!("sentences are replaced before conversion"),
        Skel::Not(a) => Formula::not(skel_formula(a)),
        Skel::And(xs) => Formula::and_all(xs.iter().map(skel_formula)),
        Skel::Or(xs) => Formula::or_all(xs.iter().map(skel_formula)),
    }
}

/// Decides every sentence leaf and returns the remaining local formula.
pub fn eval_and_strip_sentences(
    db: &Database,
    restriction: &Restriction,
    lq: &LocalizedQuery,
    scatter_cap: u64,
) -> Result<Formula> {
    let mut truth = Vec::with_capacity(lq.sentences.len());
    let mut cache: Vec<(u32, NeighborhoodIndex)> = Vec::new();
    for s in &lq.sentences {
        if !cache.iter().any(|(r, _)| *r == s.radius) {
            cache.push((s.radius, NeighborhoodIndex::build(db, restriction, s.radius)));
        }
        let nbhd = &cache.iter().find(|(r, _)| *r == s.radius).expect("built").1;
        truth.push(check_basic_local(db, restriction, nbhd, s, scatter_cap)?);
    }
    fn replace(s: &Skel, truth: &[bool]) -> Skel {
        match s {
            Skel::Sentence(i) => Skel::Const(truth[*i]),
            Skel::Not(a) => Skel::Not(Box::new(replace(a, truth))),
            Skel::And(xs) => Skel::And(xs.iter().map(|x| replace(x, truth)).collect()),
            Skel::Or(xs) => Skel::Or(xs.iter().map(|x| replace(x, truth)).collect()),
            other => other.clone(),
        }
    }
    Ok(skel_formula(&simplify(replace(&lq.skeleton, &truth))))
}
