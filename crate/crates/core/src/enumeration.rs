//! Constant-delay enumeration of `ψ(G)` by recursion on the arity, with closeness
//! levels and a precomputed skip function.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{Database, Node};
use crate::qe::{eliminate_quantifiers, Config, ReducedInstance};
use crate::query::Formula;
use crate::steps;
use crate::storing::{store_epsilon, Epsilon, TupleStore};

/// Requirement on one position: a colour and non-adjacency to some nodes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Req {
    pub colour: u32,
    pub not_adj: Vec<Node>,
}

/// One requirement per position.
pub type Clause = Vec<Req>;

struct Ctx<'a> {
    ri: &'a ReducedInstance,
    by_colour: HashMap<u32, Vec<Node>>,
    epsilon: Epsilon,
    skip_cap: u64,
}

impl Ctx<'_> {
    fn holds(&self, req: &Req, u: Node) -> bool {
        steps::tick();
        self.ri.colour_of(u) == req.colour && req.not_adj.iter().all(|&z| !self.ri.e_adj.is_adjacent(u, z))
    }

    fn candidates(&self, req: &Req) -> Vec<Node> {
        let Some(nodes) = self.by_colour.get(&req.colour) else { return Vec::new() };
        nodes.iter().copied().filter(|&u| self.holds(req, u)).collect()
    }

    fn domain(&self, m: usize) -> usize {
        self.ri.n_g().max(m + 1)
    }
}

/// Enumerator for one arity level: a sorted list at arity 1, blocks above.
pub enum Level {
    One { list: Vec<Node>, pos: usize },
    Many { arity: usize, blocks: Vec<Block>, cur: usize },
}

impl Level {
    pub fn is_empty(&self) -> bool {
        match self {
            Level::One { list, .. } => list.is_empty(),
            Level::Many { blocks, .. } => blocks.is_empty(),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Level::One { .. } => 1,
            Level::Many { arity, .. } => *arity,
        }
    }

    pub fn blocks(&self) -> &[Block] {
        match self {
            Level::One { .. } => &[],
            Level::Many { blocks, .. } => blocks,
        }
    }

    pub fn next(&mut self) -> Result<Option<Vec<Node>>> {
        match self {
            Level::One { list, pos } => {
                steps::tick();
                if *pos < list.len() {
                    *pos += 1;
                    Ok(Some(vec![list[*pos - 1]]))
                } else {
                    Ok(None)
                }
            }
            Level::Many { blocks, cur, .. } => loop {
                steps::tick();
                let Some(b) = blocks.get_mut(*cur) else { return Ok(None) };
                if let Some(t) = b.next()? {
                    return Ok(Some(t));
                }
                *cur += 1;
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Fresh,
    Emitted(usize),
    Done,
}

/// `θ_j = φ_j(ȳ_{m−1}) ∧ P_j(y_m) ∧ γ`, with the machinery to enumerate it.
pub struct Block {
    pub arity: usize,
    /// `φ_j` as clauses over the first `m − 1` positions.
    pub residual: Vec<Clause>,
    /// Clauses of `θ'_j = ∃y_m θ_j`.
    pub theta_prime: Vec<Clause>,
    /// `P_j(G)` in node order.
    pub list: Vec<Node>,
    /// Colours of nodes that can occur among the first `m − 1` positions.
    pub feasible: HashSet<u32>,
    /// For each list position, the feasible `u` with `E_m(u, y)`.
    pub ek_sets: Vec<Vec<Node>>,
    pub sub: Box<Level>,
    ek: TupleStore<()>,
    skip: TupleStore<Option<u32>>,
    u: Vec<Node>,
    state: State,
}

impl Block {
    fn skip_key(&self, y: Node, v: &[Node]) -> Vec<Node> {
        let mut key = Vec::with_capacity(self.arity + 1);
        key.push(y);
        key.push(v.len() as Node);
        key.extend_from_slice(v);
        key.resize(self.arity + 1, 0);
        key
    }

    /// `skip(y, V)` as a list position; errors outside the precomputed domain.
    pub fn skip_lookup(&self, y_pos: usize, v: &[Node]) -> Result<Option<usize>> {
        let key = self.skip_key(self.list[y_pos], v);
        match self.skip.get(&key) {
            Some(z) => Ok(z.map(|z| z as usize)),
            None => Err(Error::Contract(format!("skip key {key:?} outside the precomputed domain"))),
        }
    }

    pub fn ek_contains(&self, u: Node, y: Node) -> bool {
        self.ek.get(&[u, y]).is_some()
    }

    fn emit(&mut self) -> Result<Option<Vec<Node>>> {
        // Line numbers refer to the enumeration loop.
        let mut y: usize;
        match self.state {
            State::Done => return Ok(None),
            State::Fresh => {
                steps::tick(); // line 1
                match self.sub.next()? {
                    None => {
                        self.state = State::Done;
                        return Ok(None);
                    }
                    Some(u) => self.u = u,
                }
                steps::tick(); // line 2
                y = 0;
            }
            State::Emitted(z) => {
                steps::tick(); // line 9
                y = z + 1;
                steps::tick(); // line 10
                if y == self.list.len() {
                    if !self.advance()? {
                        return Ok(None);
                    }
                    y = 0;
                }
            }
        }
        loop {
            steps::tick(); // line 3
            let yn = self.list[y];
            let mut v: Vec<Node> = Vec::with_capacity(self.u.len());
            for &c in &self.u {
                if self.ek.get(&[c, yn]).is_some() && !v.contains(&c) {
                    v.push(c);
                }
            }
            v.sort_unstable();
            steps::tick(); // line 4
            let z = self.skip_lookup(y, &v)?;
            steps::tick(); // line 5
            if let Some(z) = z {
                self.state = State::Emitted(z);
                let mut out = self.u.clone();
                out.push(self.list[z]);
                return Ok(Some(out));
            }
            if !self.advance()? {
                return Ok(None);
            }
            y = 0;
        }
    }

    /// Lines 6–8 and 2: the next `ū` of `θ'`, or exhaustion.
    fn advance(&mut self) -> Result<bool> {
        steps::tick(); // line 7
        match self.sub.next()? {
            None => {
                steps::tick(); // line 8
                self.state = State::Done;
                Ok(false)
            }
            Some(u) => {
                steps::tick(); // lines 8 and 2
                self.u = u;
                Ok(true)
            }
        }
    }

    fn next(&mut self) -> Result<Option<Vec<Node>>> {
        self.emit()
    }
}

fn build_level(ctx: &Ctx, clauses: Vec<Clause>, m: usize) -> Result<Level> {
    if m == 1 {
        let mut list = Vec::new();
        for c in &clauses {
            list.extend(ctx.candidates(&c[0]));
        }
        list.sort_unstable();
        list.dedup();
        return Ok(Level::One { list, pos: 0 });
    }
    // Profile of a node: the clauses whose last requirement it meets.
    let mut profile: BTreeMap<Node, Vec<usize>> = BTreeMap::new();
    for (ci, c) in clauses.iter().enumerate() {
        for u in ctx.candidates(&c[m - 1]) {
            profile.entry(u).or_default().push(ci);
        }
    }
    let mut by_profile: BTreeMap<Vec<usize>, Vec<Node>> = BTreeMap::new();
    for (u, p) in profile {
        by_profile.entry(p).or_default().push(u);
    }
    let mut by_residual: BTreeMap<Vec<Clause>, Vec<Node>> = BTreeMap::new();
    for (p, nodes) in by_profile {
        let mut residual: Vec<Clause> = p.iter().map(|&ci| clauses[ci][..m - 1].to_vec()).collect();
        residual.sort_unstable();
        residual.dedup();
        by_residual.entry(residual).or_default().extend(nodes);
    }
    let mut blocks = Vec::new();
    for (residual, mut list) in by_residual {
        list.sort_unstable();
        if let Some(b) = build_block(ctx, residual, list, m)? {
            blocks.push(b);
        }
    }
    Ok(Level::Many { arity: m, blocks, cur: 0 })
}

fn build_block(ctx: &Ctx, residual: Vec<Clause>, list: Vec<Node>, m: usize) -> Result<Option<Block>> {
    let e = &ctx.ri.e_adj;
    // Largest number of list nodes adjacent to a single node.
    let mut hits: HashMap<Node, usize> = HashMap::new();
    for &z in &list {
        for &u in e.neighbors(z) {
            steps::tick();
            *hits.entry(u).or_default() += 1;
        }
    }
    let d = hits.values().copied().max().unwrap_or(0);
    let theta_prime: Vec<Clause> = if list.len() > (m - 1) * d {
        residual.clone()
    } else {
        let mut out = Vec::new();
        for r in &residual {
            for &z in &list {
                let c: Clause = r
                    .iter()
                    .map(|req| {
                        let mut q = req.clone();
                        if let Err(p) = q.not_adj.binary_search(&z) {
                            q.not_adj.insert(p, z);
                        }
                        q
                    })
                    .collect();
                out.push(c);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    };
    let sub = build_level(ctx, theta_prime.clone(), m - 1)?;
    if sub.is_empty() {
        return Ok(None);
    }
    let feasible: HashSet<u32> = residual.iter().flatten().map(|r| r.colour).collect();
    let is_feasible = |u: Node| feasible.contains(&ctx.ri.colour_of(u));

    // E_1..E_m restricted to feasible intermediates, backwards from each y.
    let mut ek_sets = Vec::with_capacity(list.len());
    let domain = ctx.domain(m);
    let mut ek = TupleStore::new(domain, 2, store_epsilon(ctx.epsilon, 2))?;
    for &y in &list {
        let level = closeness_levels(e, &list, y, m, &|u| is_feasible(u)).pop().expect("m ≥ 1");
        let set: Vec<Node> = level.into_iter().filter(|&u| is_feasible(u)).collect();
        for &u in &set {
            ek.insert(&[u, y], ())?;
        }
        ek_sets.push(set);
    }

    let mut skip = TupleStore::new(domain, m + 1, store_epsilon(ctx.epsilon, m + 1))?;
    let mut block = Block {
        arity: m,
        residual,
        theta_prime,
        list,
        feasible,
        ek_sets,
        sub: Box::new(sub),
        ek,
        skip: TupleStore::new(1, 1, ctx.epsilon)?,
        u: Vec::new(),
        state: State::Fresh,
    };
    for yi in 0..block.list.len() {
        let set = &block.ek_sets[yi];
        let total: u128 = (0..m).map(|s| binomial(set.len(), s)).sum();
        if total > ctx.skip_cap as u128 {
            return Err(Error::SkipDomainOverflow(format!(
                "{total} conflict sets at list position {yi} exceed the cap {}",
                ctx.skip_cap
            )));
        }
        for v in subsets_below(set, m) {
            let z = scan_skip(e, &block.list, yi, &v);
            let key = block.skip_key(block.list[yi], &v);
            skip.insert(&key, z.map(|z| z as u32))?;
        }
    }
    block.skip = skip;
    Ok(Some(block))
}

/// Smallest list position `≥ y` whose node has no E-edge to any member of `v`.
pub fn scan_skip(e: &crate::model::AdjacencyIndex, list: &[Node], y: usize, v: &[Node]) -> Option<usize> {
    (y..list.len()).find(|&i| {
        steps::tick();
        v.iter().all(|&c| !e.is_adjacent(c, list[i]))
    })
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// All subsets of `set` with fewer than `m` elements, each sorted.
fn subsets_below(set: &[Node], m: usize) -> Vec<Vec<Node>> {
    fn go(set: &[Node], start: usize, m: usize, cur: &mut Vec<Node>, out: &mut Vec<Vec<Node>>) {
        out.push(cur.clone());
        if cur.len() + 1 >= m {
            return;
        }
        for i in start..set.len() {
            cur.push(set[i]);
            go(set, i + 1, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(set, 0, m, &mut Vec::new(), &mut out);
    out
}

/// `E_1(·,y) .. E_levels(·,y)` as sorted node lists. Intermediate nodes `v` in the
/// inductive step must satisfy `through`.
pub fn closeness_levels(
    e: &crate::model::AdjacencyIndex,
    list: &[Node],
    y: Node,
    levels: usize,
    through: &dyn Fn(Node) -> bool,
) -> Vec<Vec<Node>> {
    let mut out: Vec<Vec<Node>> = Vec::with_capacity(levels);
    let mut cur: Vec<Node> = e.neighbors(y).to_vec();
    steps::add(cur.len() as u64);
    out.push(cur.clone());
    for _ in 1..levels {
        let mut next: Vec<Node> = cur.clone();
        for &v in &cur {
            if !through(v) {
                continue;
            }
            for &zp in e.neighbors(v) {
                steps::tick();
                let Ok(i) = list.binary_search(&zp) else { continue };
                let Some(&z) = list.get(i + 1) else { continue };
                next.extend_from_slice(e.neighbors(z));
            }
        }
        next.sort_unstable();
        next.dedup();
        cur = next;
        out.push(cur.clone());
    }
    out
}

enum Root {
    Bool { value: bool, done: bool },
    Level(Level),
}

/// Cursor over `φ(A)`.
pub struct Enumerator {
    pub ri: Arc<ReducedInstance>,
    root: Root,
}

/// Outcome of draining an enumerator with delay measurement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunStats {
    pub answers: u64,
    pub max_delay_steps: u64,
}

impl Enumerator {
    pub fn new(ri: impl Into<Arc<ReducedInstance>>, cfg: &Config) -> Result<Self> {
        let ri: Arc<ReducedInstance> = ri.into();
        let root = if ri.k == 0 {
            Root::Bool { value: !ri.clauses.is_empty(), done: false }
        } else {
            let mut by_colour: HashMap<u32, Vec<Node>> = HashMap::new();
            for v in 0..ri.n_g() as Node {
                let c = ri.colour_of(v);
                if c != crate::qe::NO_COLOUR {
                    by_colour.entry(c).or_default().push(v);
                }
            }
            let ctx = Ctx { ri: &ri, by_colour, epsilon: cfg.epsilon, skip_cap: cfg.skip_cap };
            let clauses: Vec<Clause> = ri
                .clauses
                .iter()
                .map(|c| c.iter().map(|&colour| Req { colour, not_adj: Vec::new() }).collect())
                .collect();
            Root::Level(build_level(&ctx, clauses, ri.k)?)
        };
        Ok(Enumerator { ri, root })
    }

    pub fn root_level(&self) -> Option<&Level> {
        match &self.root {
            Root::Level(l) => Some(l),
            Root::Bool { .. } => None,
        }
    }

    /// Next answer tuple of `ψ(G)`, as nodes of `G`.
    pub fn next_reduced(&mut self) -> Result<Option<Vec<Node>>> {
        match &mut self.root {
            Root::Bool { value, done } => {
                steps::tick();
                if *value && !*done {
                    *done = true;
                    Ok(Some(Vec::new()))
                } else {
                    Ok(None)
                }
            }
            Root::Level(l) => l.next(),
        }
    }

    /// Next answer of `φ(A)`.
    pub fn next_answer(&mut self) -> Result<Option<Vec<Node>>> {
        match self.next_reduced()? {
            None => Ok(None),
            Some(v) => match self.ri.decode(&v) {
                Some(a) => Ok(Some(a)),
                None => Err(Error::Contract(format!("enumerated {v:?} does not decode"))),
            },
        }
    }

    /// Drains up to `limit` answers, recording the largest step count between outputs
    /// (including the final call that reports exhaustion).
    pub fn run(&mut self, limit: Option<u64>, mut sink: impl FnMut(&[Node])) -> Result<RunStats> {
        let mut stats = RunStats { answers: 0, max_delay_steps: 0 };
        loop {
            if limit.is_some_and(|l| stats.answers >= l) {
                return Ok(stats);
            }
            let (out, cost) = steps::measure(|| self.next_answer());
            stats.max_delay_steps = stats.max_delay_steps.max(cost);
            match out? {
                Some(t) => {
                    stats.answers += 1;
                    sink(&t);
                }
                None => return Ok(stats),
            }
        }
    }
}

impl Iterator for Enumerator {
    type Item = Result<Vec<Node>>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_answer().transpose()
    }
}

pub fn build_enumerator(db: &Database, phi: &Formula, cfg: &Config) -> Result<Enumerator> {
    Enumerator::new(eliminate_quantifiers(db, phi, cfg)?, cfg)
}

/// Outcome of [`audit`]: how many facts were checked and which ones failed.
#[derive(Clone, Debug, Default)]
pub struct Audit {
    pub blocks: usize,
    pub level_checks: u64,
    pub skip_checks: u64,
    pub failures: Vec<String>,
}

/// Checks the closeness levels and the skip function of every block at every
/// recursion level against direct computations: levels grow monotonically, stay
/// within distance `3i` in `Ĝ` (E plus successor edges of the list), stabilise once
/// two consecutive levels agree, contain the stored restricted level, and every
/// stored skip value equals a linear scan.
pub fn audit(en: &Enumerator) -> Result<Audit> {
    let mut out = Audit::default();
    if let Some(level) = en.root_level() {
        audit_level(&en.ri, level, &mut out)?;
    }
    Ok(out)
}

fn audit_level(ri: &ReducedInstance, level: &Level, out: &mut Audit) -> Result<()> {
    for b in level.blocks() {
        out.blocks += 1;
        audit_block(ri, b, out)?;
        audit_level(ri, &b.sub, out)?;
    }
    Ok(())
}

fn audit_block(ri: &ReducedInstance, b: &Block, out: &mut Audit) -> Result<()> {
    let e = &ri.e_adj;
    let m = b.arity;
    let mut edges: Vec<(Node, Node)> = Vec::new();
    for v in 0..ri.n_g() as Node {
        edges.extend(e.neighbors(v).iter().map(|&u| (v, u)));
    }
    edges.extend(b.list.windows(2).map(|w| (w[0], w[1])));
    let hat = crate::model::AdjacencyIndex::from_edges(ri.n_g(), edges);
    let mut bfs = crate::model::Bfs::new(ri.n_g());
    for (yi, &y) in b.list.iter().enumerate() {
        let full = closeness_levels(e, &b.list, y, m + 2, &|_| true);
        for (i, lvl) in full.iter().enumerate() {
            out.level_checks += 1;
            let bound = 3 * (i as u32 + 1) - 1;
            if let Some(&u) = lvl.iter().find(|&&u| bfs.distance(&hat, u, y, bound).is_none()) {
                out.failures.push(format!("E_{}({u},{y}) at distance ≥ {}", i + 1, bound + 1));
            }
            if i + 1 < full.len() && !lvl.iter().all(|u| full[i + 1].binary_search(u).is_ok()) {
                out.failures.push(format!("E_{} ⊄ E_{} at y={y}", i + 1, i + 2));
            }
            if i >= 1 && full[i] == full[i - 1] && full[i..].iter().any(|l| *l != full[i - 1]) {
                out.failures.push(format!("levels change after stabilising at E_{} for y={y}", i + 1));
            }
        }
        let stored = &b.ek_sets[yi];
        if !stored.iter().all(|u| full[m - 1].binary_search(u).is_ok()) {
            out.failures.push(format!("restricted E_{m} not contained in the full level at y={y}"));
        }
        for u in 0..ri.n_g() as Node {
            let expect = stored.binary_search(&u).is_ok();
            if b.ek_contains(u, y) != expect {
                out.failures.push(format!("E_{m} store disagrees with the level list at ({u},{y})"));
            }
        }
        for v in subsets_below(stored, m) {
            out.skip_checks += 1;
            let got = b.skip_lookup(yi, &v)?;
            let want = scan_skip(e, &b.list, yi, &v);
            if got != want {
                out.failures.push(format!("skip({y},{v:?}) = {got:?}, scan gives {want:?}"));
            }
            if v.is_empty() && got != Some(yi) {
                out.failures.push(format!("skip({y},∅) ≠ {y}"));
            }
        }
    }
    Ok(())
}
