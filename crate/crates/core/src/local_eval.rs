//! Evaluation inside neighbourhoods: connected conjunctive queries, local formulas
//! and basic-local sentences.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::model::{Bfs, Database, LocalStructure, NeighborhoodIndex, Node, Restriction};
use crate::query::{query_graph, Cmp, Formula, GeneralizedConjunction, Literal};
use crate::steps;

/// Radius of the neighbourhood around the free variables that `phi` can observe.
///
/// Free variables reach 0; a variable bound in `N_s(c̄)` reaches `s + max reach(c̄)`;
/// a plain quantifier is unbounded and reported as `None`.
pub fn view_radius(phi: &Formula) -> Option<u32> {
    fn walk(f: &Formula, reach: &mut Vec<(String, u32)>) -> Option<u32> {
        let get = |v: &String, reach: &Vec<(String, u32)>| {
            reach.iter().rev().find(|(w, _)| w == v).map(|(_, r)| *r).unwrap_or(0)
        };
        match f {
            Formula::True | Formula::False => Some(0),
            Formula::Rel { args, .. } => Some(args.iter().map(|a| get(a, reach)).max().unwrap_or(0)),
            Formula::Dist { x, y, cmp, c } => {
                let (rx, ry) = (get(x, reach), get(y, reach));
                match cmp {
                    Cmp::Le | Cmp::Gt => Some(rx.max(ry).max(rx.min(ry) + c)),
                }
            }
            Formula::Not(a) => walk(a, reach),
            Formula::And(a, b) | Formula::Or(a, b) => Some(walk(a, reach)?.max(walk(b, reach)?)),
            Formula::Exists(..) | Formula::Forall(..) => None,
            Formula::ExistsIn { var, radius, centers, body } => {
                let base = centers.iter().map(|c| get(c, reach)).max().unwrap_or(0);
                let r = base + radius;
                reach.push((var.clone(), r));
                let inner = walk(body, reach);
                reach.pop();
                Some(inner?.max(r))
            }
        }
    }
    walk(phi, &mut Vec::new())
}

/// Brute-force evaluator over a small structure with cached distances.
pub struct LocalEvaluator<'a> {
    s: &'a LocalStructure,
    adj: Vec<Vec<u32>>,
    dist: HashMap<u32, Vec<u32>>,
}

impl<'a> LocalEvaluator<'a> {
    pub fn new(s: &'a LocalStructure) -> Self {
        LocalEvaluator { adj: s.adjacency(), s, dist: HashMap::new() }
    }

    fn distances(&mut self, src: u32) -> &Vec<u32> {
        let adj = &self.adj;
        self.dist.entry(src).or_insert_with(|| {
            let mut d = vec![u32::MAX; adj.len()];
            let mut q = VecDeque::from([src]);
            d[src as usize] = 0;
            while let Some(u) = q.pop_front() {
                for &w in &adj[u as usize] {
                    steps::tick();
                    if d[w as usize] == u32::MAX {
                        d[w as usize] = d[u as usize] + 1;
                        q.push_back(w);
                    }
                }
            }
            d
        })
    }

    fn lookup(env: &[(String, u32)], v: &str) -> Result<u32> {
        env.iter().rev().find(|(w, _)| w == v).map(|(_, x)| *x).ok_or_else(|| Error::Unassigned(v.to_string()))
    }

    /// Truth of `phi` under `env` (variable to local id).
    pub fn eval(&mut self, phi: &Formula, env: &mut Vec<(String, u32)>) -> Result<bool> {
        steps::tick();
        Ok(match phi {
            Formula::True => true,
            Formula::False => false,
            Formula::Rel { name, args } => {
                let t = args.iter().map(|a| Self::lookup(env, a)).collect::<Result<Vec<_>>>()?;
                match self.s.signature.index(name) {
                    Some(ri) => self.s.holds(ri, &t),
                    None => false,
                }
            }
            Formula::Dist { x, y, cmp, c } => {
                let (a, b) = (Self::lookup(env, x)?, Self::lookup(env, y)?);
                let within = self.distances(a)[b as usize] <= *c;
                match cmp {
                    Cmp::Le => within,
                    Cmp::Gt => !within,
                }
            }
            Formula::Not(a) => !self.eval(a, env)?,
            Formula::And(a, b) => self.eval(a, env)? && self.eval(b, env)?,
            Formula::Or(a, b) => self.eval(a, env)? || self.eval(b, env)?,
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let want = matches!(phi, Formula::Exists(..));
                let mut result = !want;
                for x in 0..self.s.size() as u32 {
                    env.push((v.clone(), x));
                    let r = self.eval(body, env);
                    env.pop();
                    if r? == want {
                        result = want;
                        break;
                    }
                }
                result
            }
            Formula::ExistsIn { var, radius, centers, body } => {
                let cs = centers.iter().map(|c| Self::lookup(env, c)).collect::<Result<Vec<_>>>()?;
                let mut in_ball = vec![false; self.s.size()];
                for c in cs {
                    for (x, &d) in self.distances(c).iter().enumerate() {
                        if d <= *radius {
                            in_ball[x] = true;
                        }
                    }
                }
                let mut found = false;
                for x in 0..self.s.size() as u32 {
                    if !in_ball[x as usize] {
                        continue;
                    }
                    env.push((var.clone(), x));
                    let r = self.eval(body, env);
                    env.pop();
                    if r? {
                        found = true;
                        break;
                    }
                }
                found
            }
        })
    }
}

/// Truth of `phi` in the structure `s` with free variables bound to local ids.
pub fn eval_local(s: &LocalStructure, phi: &Formula, assignment: &[(String, u32)]) -> Result<bool> {
    let mut env = assignment.to_vec();
    LocalEvaluator::new(s).eval(phi, &mut env)
}

/// `∃ȳ body(x̄, ȳ)` with a connected body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectedCq {
    pub free: Vec<String>,
    pub exist: Vec<String>,
    pub body: Vec<Literal>,
}

impl ConnectedCq {
    pub fn new(free: Vec<String>, exist: Vec<String>, body: Vec<Literal>) -> Result<Self> {
        let mut vars = free.clone();
        vars.extend(exist.iter().cloned());
        let g = query_graph(&GeneralizedConjunction::with_vars(vars.clone(), body.clone()));
        if vars.is_empty() || !g.is_connected() {
            return Err(Error::Invalid("conjunctive query body is not connected".into()));
        }
        for v in &vars {
            if !body.iter().any(|l| l.args.contains(v)) {
                return Err(Error::Invalid(format!("variable {v} does not occur in the body")));
            }
        }
        Ok(ConnectedCq { free, exist, body })
    }
}

struct CqPlan {
    order: Vec<usize>,
    parent: Vec<Option<usize>>,
    // literals checked right after the variable at that position is assigned
    checks: Vec<Vec<(Option<usize>, bool, Vec<usize>)>>,
    free_pos: Vec<usize>,
}

fn plan(db: &Database, q: &ConnectedCq) -> Result<CqPlan> {
    let mut vars = q.free.clone();
    vars.extend(q.exist.iter().cloned());
    let g = query_graph(&GeneralizedConjunction::with_vars(vars.clone(), q.body.clone()));
    let mut adj = vec![Vec::new(); vars.len()];
    for &(a, b) in &g.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut order = vec![0usize];
    let mut parent = vec![None; vars.len()];
    let mut seen = vec![false; vars.len()];
    seen[0] = true;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(v);
                order.push(w);
            }
        }
        i += 1;
    }
    let rank: Vec<usize> = {
        let mut r = vec![0; vars.len()];
        for (p, &v) in order.iter().enumerate() {
            r[v] = p;
        }
        r
    };
    let mut checks = vec![Vec::new(); order.len()];
    for l in &q.body {
        let idx: Vec<usize> =
            l.args.iter().map(|a| vars.iter().position(|v| v == a).expect("body variable")).collect();
        let last = idx.iter().map(|&v| rank[v]).max().unwrap_or(0);
        let rel = db.signature().index(&l.rel);
        if let Some(r) = rel {
            if db.signature().arity(r) != l.args.len() {
                return Err(Error::Arity(format!("{} used with arity {}", l.rel, l.args.len())));
            }
        }
        checks[last].push((rel, l.positive, idx));
    }
    Ok(CqPlan { order, parent, checks, free_pos: (0..q.free.len()).collect() })
}

fn search(
    db: &Database,
    adj: &crate::model::AdjacencyIndex,
    p: &CqPlan,
    depth: usize,
    val: &mut Vec<Node>,
    emit: &mut dyn FnMut(&[Node]),
) {
    if depth == p.order.len() {
        emit(val);
        return;
    }
    let v = p.order[depth];
    let candidates: Vec<Node> = match p.parent[v] {
        None => unreachable!("anchor assigned by caller"),
        Some(par) => {
            let base = val[par];
            std::iter::once(base).chain(adj.neighbors(base).iter().copied()).collect()
        }
    };
    for c in candidates {
        val[v] = c;
        if checks_pass(db, p, depth, val) {
            search(db, adj, p, depth + 1, val, emit);
        }
    }
}

fn checks_pass(db: &Database, p: &CqPlan, depth: usize, val: &[Node]) -> bool {
    let mut t = Vec::new();
    for (rel, positive, idx) in &p.checks[depth] {
        steps::tick();
        t.clear();
        t.extend(idx.iter().map(|&i| val[i]));
        let holds = rel.is_some_and(|r| db.relation_at(r).contains(&t));
        if holds != *positive {
            return false;
        }
    }
    true
}

/// Runs `visit(anchor, answers_with_that_first_component)` for every anchor in order.
fn per_anchor(
    db: &Database,
    adj: &crate::model::AdjacencyIndex,
    q: &ConnectedCq,
    mut visit: impl FnMut(Node, &mut dyn Iterator<Item = Vec<Node>>),
) -> Result<()> {
    let p = plan(db, q)?;
    let nvars = q.free.len() + q.exist.len();
    let mut val = vec![0 as Node; nvars];
    for a in 0..db.n() as Node {
        steps::tick();
        val[p.order[0]] = a;
        if !checks_pass(db, &p, 0, &val) {
            continue;
        }
        let mut found: BTreeSet<Vec<Node>> = BTreeSet::new();
        search(db, adj, &p, 1, &mut val, &mut |v: &[Node]| {
            found.insert(p.free_pos.iter().map(|&i| v[i]).collect());
        });
        if !found.is_empty() {
            visit(a, &mut found.into_iter());
        }
    }
    Ok(())
}

/// Answers of a connected conjunctive query: for every anchor `a`, the answers whose
/// first component is `a`, found by searching inside the ball around `a`.
pub fn eval_connected_cq(db: &Database, restriction: &Restriction, q: &ConnectedCq) -> Result<Vec<Vec<Node>>> {
    let mut out = Vec::new();
    per_anchor(db, &restriction.adj, q, |_, it| out.extend(it))?;
    Ok(out)
}

/// Number of answers, without materialising them.
pub fn count_connected_cq(db: &Database, restriction: &Restriction, q: &ConnectedCq) -> Result<u64> {
    let mut total = 0u64;
    per_anchor(db, &restriction.adj, q, |_, it| total += it.count() as u64)?;
    Ok(total)
}

/// `∃y₁..y_ℓ (⋀ dist(y_i, y_j) > 2r ∧ ⋀ θ(y_i))` with `θ` r-local around its variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicLocalSentence {
    pub count: usize,
    pub radius: u32,
    pub var: String,
    pub theta: Formula,
}

impl BasicLocalSentence {
    /// The sentence written out as a formula.
    pub fn to_formula(&self) -> Formula {
        let names: Vec<String> = (0..self.count).map(|i| format!("{}_{i}", self.var)).collect();
        let mut parts = Vec::new();
        for i in 0..self.count {
            for j in i + 1..self.count {
                parts.push(Formula::dist(&names[i], &names[j], Cmp::Gt, 2 * self.radius));
            }
        }
        for name in &names {
            let theta = self.theta.rename_free(&|v| (v == self.var).then(|| name.clone()));
            parts.push(theta);
        }
        let mut f = Formula::and_all(parts);
        for name in names.iter().rev() {
            f = Formula::exists(name, f);
        }
        f
    }
}

/// Default bound on candidate subsets explored by the scattered-set fallback.
pub const DEFAULT_SCATTER_CAP: u64 = 10_000;

/// Decides a basic-local sentence by a greedy scattered-set pass with a bounded
/// exhaustive fallback.
pub fn check_basic_local(
    db: &Database,
    restriction: &Restriction,
    nbhd: &NeighborhoodIndex,
    s: &BasicLocalSentence,
    cap: u64,
) -> Result<bool> {
    if s.count == 0 {
        return Ok(true);
    }
    if nbhd.radius < s.radius {
        return Err(Error::Contract("neighbourhood radius smaller than the sentence radius".into()));
    }
    let mut sat = Vec::new();
    for a in 0..db.n() as Node {
        let st = nbhd.structure(a);
        let local = st.local_id(a).expect("centre lies in its ball");
        if eval_local(st, &s.theta, &[(s.var.clone(), local)])? {
            sat.push(a);
        }
    }
    if sat.len() < s.count {
        return Ok(false);
    }
    if s.count == 1 {
        return Ok(true);
    }
    let scatter = 2 * s.radius;
    let mut bfs = Bfs::new(db.n());
    let mut blocked = vec![false; db.n()];
    let mut picked = 0usize;
    for &a in &sat {
        if blocked[a as usize] {
            continue;
        }
        picked += 1;
        if picked >= s.count {
            return Ok(true);
        }
        for b in bfs.ball(&restriction.adj, &[a], scatter) {
            blocked[b as usize] = true;
        }
    }
    // Every satisfying node lies within 2r of the short greedy set, so `sat` is small.
    let mut budget = cap;
    let mut chosen: Vec<Node> = Vec::new();
    fn extend(
        sat: &[Node],
        start: usize,
        need: usize,
        chosen: &mut Vec<Node>,
        bfs: &mut Bfs,
        adj: &crate::model::AdjacencyIndex,
        scatter: u32,
        budget: &mut u64,
    ) -> Result<bool> {
        if chosen.len() == need {
            return Ok(true);
        }
        for i in start..sat.len() {
            if *budget == 0 {
                return Err(Error::ResourceCap("scattered-set search exceeded its candidate cap".into()));
            }
            *budget -= 1;
            let a = sat[i];
            if chosen.iter().all(|&c| bfs.distance(adj, a, c, scatter).is_none()) {
                chosen.push(a);
                if extend(sat, i + 1, need, chosen, bfs, adj, scatter, budget)? {
                    return Ok(true);
                }
                chosen.pop();
            }
        }
        Ok(false)
    }
    extend(&sat, 0, s.count, &mut chosen, &mut bfs, &restriction.adj, scatter, &mut budget)
}
