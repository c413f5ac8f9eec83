//! Quantifier elimination: a database and a query become a coloured graph `G`, a
//! quantifier-free formula over it and an encoding of answer tuples.

mod localize;
mod partition;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::canon::{canonical_form, DEFAULT_CANON_CAP};
use crate::error::{Error, Result};
use crate::local_eval::{eval_local, view_radius, DEFAULT_SCATTER_CAP};
use crate::model::{AdjacencyIndex, Bfs, Database, LocalStructure, Node, Restriction};
use crate::query::{Formula, GeneralizedConjunction, Literal};
use crate::steps;
use crate::storing::{store_epsilon, Epsilon, TupleStore};

pub use localize::{eval_and_strip_sentences, localize, LocalizedQuery, Skel};
pub use partition::{detect_partition, partitions, rho_holds, Partition};

/// Tunables shared by every stage of the pipeline.
#[derive(Clone, Debug)]
pub struct Config {
    pub epsilon: Epsilon,
    pub canon_cap: usize,
    /// Drop V-nodes whose colour occurs in no satisfying clause.
    pub prune: bool,
    pub scatter_cap: u64,
    /// Largest number of type combinations evaluated per partition.
    pub sat_cap: u64,
    /// Largest number of conflict sets per skip position.
    pub skip_cap: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            epsilon: Epsilon::default(),
            canon_cap: DEFAULT_CANON_CAP,
            prune: true,
            scatter_cap: DEFAULT_SCATTER_CAP,
            sat_cap: 1_000_000,
            skip_cap: 1 << 20,
        }
    }
}

/// A node `v_(b̄,ι)` of `G`: tuple `b̄` of `A` and the answer positions it fills.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VNode {
    pub anchor: Node,
    pub tuple: Vec<Node>,
    /// 0-based answer positions, `iota[j]` receives `tuple[j]`.
    pub iota: Vec<usize>,
    pub ty: u32,
}

/// Combined unary colour of a node of `G`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Colour {
    Bot,
    Block { iota: Vec<usize>, ty: u32 },
}

/// Colour id of ⊥.
pub const BOT: u32 = 0;
/// Colour slot of nodes of `A`, which carry no colour.
pub const NO_COLOUR: u32 = u32::MAX;

/// Isomorphism type of a pointed neighbourhood with a representative.
#[derive(Clone, Debug)]
pub struct TypeInfo {
    pub size: usize,
    pub form: Vec<u32>,
    pub rep: LocalStructure,
    pub point: Vec<u32>,
}

#[derive(Debug)]
pub struct ReducedInstance {
    pub k: usize,
    pub r: u32,
    pub free: Vec<String>,
    /// The local formula left after deciding the sentences.
    pub local: Formula,
    pub n: usize,
    pub restriction: Restriction,
    pub g: Database,
    pub vnodes: Vec<VNode>,
    pub bot: Node,
    pub colours: Vec<Colour>,
    pub node_colour: Vec<u32>,
    /// Satisfying colour tuples; ψ₂ is their disjunction.
    pub clauses: Vec<Vec<u32>>,
    sat: HashSet<Vec<u32>>,
    pub e_adj: AdjacencyIndex,
    pub types: Vec<TypeInfo>,
    pub prune: bool,
    pub epsilon: Epsilon,
    partitions: Vec<Partition>,
    partition_index: HashMap<Vec<usize>, usize>,
    block_iota: Vec<Vec<usize>>,
    zeta: Vec<Option<TupleStore<Node>>>,
    closeness: Option<TupleStore<()>>,
}

/// Injective maps `0..s → 0..k` as value lists, lexicographic.
fn injections(s: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, s: usize, k: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for v in 0..k {
            if !cur.contains(&v) {
                cur.push(v);
                go(cur, s, k, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), s, k, &mut out);
    out
}

/// Tuples of length ≤ k starting at `a` whose components are connected under closeness.
fn anchored_tuples<'a>(a: Node, k: usize, close: &dyn Fn(Node) -> &'a [Node]) -> Vec<Vec<Node>> {
    let mut subsets: BTreeSet<Vec<Node>> = BTreeSet::new();
    let mut frontier = vec![vec![a]];
    subsets.insert(vec![a]);
    while let Some(s) = frontier.pop() {
        if s.len() == k {
            continue;
        }
        for &m in &s {
            for &w in close(m) {
                steps::tick();
                if let Err(pos) = s.binary_search(&w) {
                    let mut t = s.clone();
                    t.insert(pos, w);
                    if subsets.insert(t.clone()) {
                        frontier.push(t);
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for set in subsets {
        for len in set.len()..=k {
            let mut seq = vec![a];
            cover_sequences(&set, len, &mut seq, &mut out);
        }
    }
    out.sort_unstable_by(|x, y| (x.len(), x).cmp(&(y.len(), y)));
    out
}

fn cover_sequences(set: &[Node], len: usize, seq: &mut Vec<Node>, out: &mut Vec<Vec<Node>>) {
    if seq.len() == len {
        if set.iter().all(|v| seq.contains(v)) {
            out.push(seq.clone());
        }
        return;
    }
    for &v in set {
        seq.push(v);
        cover_sequences(set, len, seq, out);
        seq.pop();
    }
}

/// Names of the variables of ψ.
pub fn psi_vars(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("y{i}")).collect()
}

fn iota_name(iota: &[usize]) -> String {
    let parts: Vec<String> = iota.iter().map(|i| (i + 1).to_string()).collect();
    format!("C_iota_{}", parts.join("_"))
}

fn type_name(t: u32) -> String {
    format!("T{t}")
}

/// Runs the elimination pipeline on `phi`.
pub fn eliminate_quantifiers(db: &Database, phi: &Formula, cfg: &Config) -> Result<ReducedInstance> {
    let free = phi.free_vars();
    let k = free.len();
    let rels = phi.relations()?;
    let restriction = Restriction::new(db, &rels)?;
    let lq = localize(phi)?;
    let local = eval_and_strip_sentences(db, &restriction, &lq, cfg.scatter_cap)?;
    let r = view_radius(&local).ok_or_else(|| Error::Unsupported(format!("{local} is not local")))?;
    let n = db.n();
    let t = 2 * r + 1;
    let adj = &restriction.adj;

    // Closeness lists N_{2r+1}(u) \ {u}.
    let mut bfs = Bfs::new(n);
    let mut close_off = vec![0usize];
    let mut close_list: Vec<Node> = Vec::new();
    if k >= 1 {
        for u in 0..n as Node {
            close_list.extend(bfs.ball(adj, &[u], t).into_iter().filter(|&w| w != u));
            close_off.push(close_list.len());
        }
    }
    let close = |u: Node| &close_list[close_off[u as usize]..close_off[u as usize + 1]];

    // Candidate tuples and their types.
    let mut tuples: Vec<(Vec<Node>, u32)> = Vec::new();
    let mut types: Vec<TypeInfo> = Vec::new();
    let mut type_ids: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut types_by_size: Vec<Vec<u32>> = vec![Vec::new(); k + 1];
    if k >= 1 {
        for a in 0..n as Node {
            for tup in anchored_tuples(a, k, &close) {
                let mut centres = tup.clone();
                centres.sort_unstable();
                centres.dedup();
                let ball = bfs.ball(adj, &centres, r);
                let st = restriction.induced(db, ball);
                let point: Vec<u32> = tup.iter().map(|&b| st.local_id(b).expect("in ball")).collect();
                let form = canonical_form(&st, &point, cfg.canon_cap)?;
                let id = match type_ids.get(&form) {
                    Some(&id) => id,
                    None => {
                        let id = types.len() as u32;
                        type_ids.insert(form.clone(), id);
                        types_by_size[tup.len()].push(id);
                        types.push(TypeInfo { size: tup.len(), form, rep: st, point });
                        id
                    }
                };
                tuples.push((tup, id));
            }
        }
    }

    // Satisfying type combinations per partition.
    let parts = partitions(k);
    let mut table = ColourTable::new();
    let empty = LocalStructure { signature: restriction.signature.clone(), nodes: Vec::new(), rels: vec![Vec::new(); restriction.signature.len()] };
    let mut clauses: Vec<Vec<u32>> = Vec::new();
    for p in &parts {
        let choices: Vec<&Vec<u32>> = p.blocks.iter().map(|b| &types_by_size[b.len()]).collect();
        let total: u128 = choices.iter().map(|c| c.len() as u128).product();
        if total > cfg.sat_cap as u128 {
            return Err(Error::ResourceCap(format!("{total} type combinations for partition {p}")));
        }
        if total == 0 {
            continue;
        }
        let mut pick = vec![0usize; p.len()];
        loop {
            let chosen: Vec<u32> = pick.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
            let holds = if p.is_empty() {
                eval_local(&empty, &local, &[])?
            } else {
                let reps: Vec<&LocalStructure> = chosen.iter().map(|&ty| &types[ty as usize].rep).collect();
                let (union, offsets) = LocalStructure::disjoint_union(&reps);
                let mut assignment = vec![(String::new(), 0u32); k];
                for (j, block) in p.blocks.iter().enumerate() {
                    let ty = &types[chosen[j] as usize];
                    for (q, &i) in block.iter().enumerate() {
                        assignment[i] = (free[i].clone(), offsets[j] + ty.point[q]);
                    }
                }
                eval_local(&union, &local, &assignment)?
            };
            if holds {
                let mut clause = Vec::with_capacity(k);
                for (j, block) in p.blocks.iter().enumerate() {
                    clause.push(table.intern(Colour::Block { iota: block.clone(), ty: chosen[j] }));
                }
                clause.resize(k, BOT);
                clauses.push(clause);
            }
            // Advance the mixed-radix counter.
            let mut j = 0;
            while j < pick.len() {
                pick[j] += 1;
                if pick[j] < choices[j].len() {
                    break;
                }
                pick[j] = 0;
                j += 1;
            }
            if j == pick.len() {
                break;
            }
        }
    }
    let allowed: HashSet<u32> = clauses.iter().flatten().copied().collect();

    // V-nodes in the fixed order: anchor, length, tuple, ι.
    let inj: Vec<Vec<Vec<usize>>> = (0..=k).map(|s| injections(s, k)).collect();
    let mut vnodes: Vec<VNode> = Vec::new();
    let mut node_colour: Vec<u32> = vec![NO_COLOUR; n];
    for (tup, ty) in &tuples {
        for iota in &inj[tup.len()] {
            let c = Colour::Block { iota: iota.clone(), ty: *ty };
            let id = if cfg.prune {
                match table.get(&c) {
                    Some(i) if allowed.contains(&i) => i,
                    _ => continue,
                }
            } else {
                table.intern(c)
            };
            steps::tick();
            vnodes.push(VNode { anchor: tup[0], tuple: tup.clone(), iota: iota.clone(), ty: *ty });
            node_colour.push(id);
        }
    }
    let bot = (n + vnodes.len()) as Node;
    node_colour.push(BOT);
    let n_g = bot as usize + 1;

    // E: V-nodes whose tuples come within distance 2r+1.
    let mut containing: Vec<Vec<Node>> = vec![Vec::new(); n];
    for (i, v) in vnodes.iter().enumerate() {
        let mut comps = v.tuple.clone();
        comps.sort_unstable();
        comps.dedup();
        for c in comps {
            containing[c as usize].push((n + i) as Node);
        }
    }
    let mut e_pairs: Vec<(Node, Node)> = Vec::new();
    let mut near: Vec<Node> = Vec::new();
    for (i, v) in vnodes.iter().enumerate() {
        let id = (n + i) as Node;
        near.clear();
        for &b in &v.tuple {
            near.extend(containing[b as usize].iter().copied());
            for &c in close(b) {
                near.extend(containing[c as usize].iter().copied());
            }
        }
        near.sort_unstable();
        near.dedup();
        for &w in &near {
            steps::tick();
            if w != id {
                e_pairs.push((id, w));
            }
        }
    }
    let e_adj = AdjacencyIndex::from_edges(n_g, e_pairs.iter().copied());

    // Forward encoding stores.
    let mut iotas: Vec<Vec<usize>> = Vec::new();
    let mut block_iota = Vec::with_capacity(parts.len());
    let mut partition_index = HashMap::new();
    for (pi, p) in parts.iter().enumerate() {
        let mut ids = Vec::new();
        for b in &p.blocks {
            let id = match iotas.iter().position(|x| x == b) {
                Some(i) => i,
                None => {
                    iotas.push(b.clone());
                    iotas.len() - 1
                }
            };
            ids.push(id);
        }
        block_iota.push(ids);
        partition_index.insert(p.assignment(), pi);
    }
    let mut zeta: Vec<Option<TupleStore<Node>>> = Vec::with_capacity(iotas.len());
    for iota in &iotas {
        zeta.push(Some(TupleStore::new(n, iota.len(), store_epsilon(cfg.epsilon, iota.len()))?));
    }
    for (i, v) in vnodes.iter().enumerate() {
        if let Some(id) = iotas.iter().position(|x| *x == v.iota) {
            zeta[id].as_mut().expect("built").insert(&v.tuple, (n + i) as Node)?;
        }
    }
    let closeness = if k >= 2 {
        let mut store = TupleStore::new(n, 2, store_epsilon(cfg.epsilon, 2))?;
        for u in 0..n as Node {
            for &w in close(u) {
                store.insert(&[u, w], ())?;
            }
        }
        Some(store)
    } else {
        None
    };

    // G as a database.
    let mut g = Database::new(n_g);
    g.add_relation_flat("C_bot", 1, vec![bot])?;
    let mut by_iota: HashMap<&[usize], Vec<Node>> = HashMap::new();
    let mut by_type: Vec<Vec<Node>> = vec![Vec::new(); types.len()];
    let mut f_rel: Vec<Vec<Node>> = vec![Vec::new(); k];
    for (i, v) in vnodes.iter().enumerate() {
        let id = (n + i) as Node;
        by_iota.entry(&v.iota).or_default().push(id);
        by_type[v.ty as usize].push(id);
        for (j, &pos) in v.iota.iter().enumerate() {
            f_rel[pos].extend([id, v.tuple[j]]);
        }
    }
    let mut iota_keys: Vec<&&[usize]> = by_iota.keys().collect();
    iota_keys.sort_unstable_by(|a, b| (a.len(), *a).cmp(&(b.len(), *b)));
    for key in iota_keys {
        g.add_relation_flat(&iota_name(key), 1, by_iota[*key].clone())?;
    }
    for (t, nodes) in by_type.into_iter().enumerate() {
        if !nodes.is_empty() {
            g.add_relation_flat(&type_name(t as u32), 1, nodes)?;
        }
    }
    g.add_relation_flat("E", 2, e_pairs.into_iter().flat_map(|(a, b)| [a, b]).collect())?;
    for (i, flat) in f_rel.into_iter().enumerate() {
        g.add_relation_flat(&format!("F{}", i + 1), 2, flat)?;
    }

    clauses.sort_unstable();
    clauses.dedup();
    let sat = clauses.iter().cloned().collect();
    Ok(ReducedInstance {
        k,
        r,
        free,
        local,
        n,
        restriction,
        g,
        vnodes,
        bot,
        colours: table.list,
        node_colour,
        clauses,
        sat,
        e_adj,
        types,
        prune: cfg.prune,
        epsilon: cfg.epsilon,
        partitions: parts,
        partition_index,
        block_iota,
        zeta,
        closeness,
    })
}

impl ReducedInstance {
    /// Domain size of `G`.
    pub fn n_g(&self) -> usize {
        self.bot as usize + 1
    }

    pub fn vnode(&self, v: Node) -> Option<&VNode> {
        (v as usize).checked_sub(self.n).and_then(|i| self.vnodes.get(i))
    }

    /// Whether `a` and `b` are within distance 2r+1. Charges one lookup.
    pub fn close(&self, a: Node, b: Node) -> bool {
        match &self.closeness {
            Some(s) => s.get(&[a, b]).is_some() || a == b,
            None => a == b,
        }
    }

    pub fn partition_of(&self, tuple: &[Node]) -> Partition {
        detect_partition(tuple, |a, b| self.close(a, b))
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    /// Forward encoding with one slot per position; a slot is `None` when its block has
    /// no V-node (only possible for non-answers under pruning). The number of charged
    /// steps depends on `k` only.
    pub fn forward_slots(&self, tuple: &[Node]) -> Vec<Option<Node>> {
        let p = self.partition_of(tuple);
        steps::tick();
        let pi = self.partition_index[&p.assignment()];
        let mut out = Vec::with_capacity(self.k);
        let mut key = Vec::with_capacity(self.k);
        for (j, block) in p.blocks.iter().enumerate() {
            key.clear();
            key.extend(block.iter().map(|&i| tuple[i]));
            let store = self.zeta[self.block_iota[pi][j]].as_ref().expect("built");
            out.push(store.get(&key).copied());
        }
        while out.len() < self.k {
            steps::tick();
            out.push(Some(self.bot));
        }
        out
    }

    pub fn check_tuple(&self, tuple: &[Node]) -> Result<()> {
        if tuple.len() != self.k {
            return Err(Error::Arity(format!("tuple of length {} for a query of arity {}", tuple.len(), self.k)));
        }
        if let Some(&bad) = tuple.iter().find(|&&a| a as usize >= self.n) {
            return Err(Error::OutOfDomain { node: bad as u64, n: self.n });
        }
        Ok(())
    }

    /// `f(ā)`, or `None` when a block of `ā` has no V-node.
    pub fn apply_f(&self, tuple: &[Node]) -> Result<Option<Vec<Node>>> {
        self.check_tuple(tuple)?;
        Ok(self.forward_slots(tuple).into_iter().collect())
    }

    /// `f⁻¹(v̄)` for `v̄ ∈ ψ(G)`, else `None`.
    pub fn apply_f_inverse(&self, v: &[Node]) -> Option<Vec<Node>> {
        if !self.psi_holds(v) {
            return None;
        }
        self.decode(v)
    }

    /// Reassembles `ā` from the tuples and position maps of the V-nodes, without
    /// checking ψ.
    pub fn decode(&self, v: &[Node]) -> Option<Vec<Node>> {
        let mut out: Vec<Option<Node>> = vec![None; self.k];
        for &x in v {
            steps::tick();
            if x == self.bot {
                continue;
            }
            let node = self.vnode(x)?;
            for (j, &pos) in node.iota.iter().enumerate() {
                if out[pos].replace(node.tuple[j]).is_some() {
                    return None;
                }
            }
        }
        out.into_iter().collect()
    }

    pub fn colour_of(&self, v: Node) -> u32 {
        self.node_colour.get(v as usize).copied().unwrap_or(NO_COLOUR)
    }

    pub fn sat_contains(&self, colours: &[u32]) -> bool {
        steps::tick();
        self.sat.contains(colours)
    }

    /// Whether `G ⊨ ψ(v̄)`.
    pub fn psi_holds(&self, v: &[Node]) -> bool {
        if v.len() != self.k || v.iter().any(|&x| x as usize >= self.n_g()) {
            return false;
        }
        for i in 0..v.len() {
            for j in 0..v.len() {
                if i != j && self.e_adj.is_adjacent(v[i], v[j]) {
                    return false;
                }
            }
        }
        let cols: Vec<u32> = v.iter().map(|&x| self.colour_of(x)).collect();
        self.sat_contains(&cols)
    }

    /// Relation names of `G` that make up a colour.
    pub fn colour_relations(&self, c: u32) -> Vec<String> {
        match &self.colours[c as usize] {
            Colour::Bot => vec!["C_bot".to_string()],
            Colour::Block { iota, ty } => vec![iota_name(iota), type_name(*ty)],
        }
    }

    /// Conjunction of a clause with ψ₁, over `y1..yk`. Since E is symmetric, each
    /// unordered pair is constrained once.
    pub fn clause_conjunction(&self, clause: &[u32]) -> GeneralizedConjunction {
        let vars = psi_vars(self.k);
        let mut lits = Vec::new();
        for (i, &c) in clause.iter().enumerate() {
            for rel in self.colour_relations(c) {
                lits.push(Literal { positive: true, rel, args: vec![vars[i].clone()] });
            }
        }
        for i in 0..self.k {
            for j in i + 1..self.k {
                lits.push(Literal { positive: false, rel: "E".into(), args: vec![vars[i].clone(), vars[j].clone()] });
            }
        }
        GeneralizedConjunction::with_vars(vars, lits)
    }

    /// ψ = ψ₁ ∧ ψ₂ as a formula over `y1..yk`.
    pub fn psi_formula(&self) -> Formula {
        let vars = psi_vars(self.k);
        let mut psi1 = Vec::new();
        for i in 0..self.k {
            for j in 0..self.k {
                if i != j {
                    psi1.push(Formula::not(Formula::rel("E", &[&vars[i], &vars[j]])));
                }
            }
        }
        let mut disjuncts = Vec::with_capacity(self.clauses.len());
        for c in &self.clauses {
            let mut atoms = Vec::new();
            for (i, &col) in c.iter().enumerate() {
                for rel in self.colour_relations(col) {
                    atoms.push(Formula::rel(&rel, &[&vars[i]]));
                }
            }
            disjuncts.push(Formula::and_all(atoms));
        }
        let psi2 = Formula::or_all(disjuncts);
        Formula::and(Formula::and_all(psi1), psi2)
    }

    /// Degree of `A↓q`, clamped to at least 2.
    pub fn source_degree(&self) -> usize {
        self.restriction.adj.degree().max(2)
    }

    /// `2·k!·d^{(r'+1)(k+1)}` with `r' = r + (2k+1)(2r+1)`.
    pub fn degree_bound(&self) -> f64 {
        let k = self.k as f64;
        let r = self.r as f64;
        let rp = r + (2.0 * k + 1.0) * (2.0 * r + 1.0);
        let fact: f64 = (1..=self.k).map(|i| i as f64).product();
        2.0 * fact * (self.source_degree() as f64).powf((rp + 1.0) * (k + 1.0))
    }

    /// Gaifman degree of `G` over all of its relations.
    pub fn measured_degree(&self) -> usize {
        Restriction::full(&self.g).adj.degree()
    }

    /// Fact-file rendering of `G` and the V-node map (`v_id anchor b1..bs ι1..ιs`).
    pub fn dump(&self) -> (String, String) {
        let mut map = String::new();
        for (i, v) in self.vnodes.iter().enumerate() {
            let _ = write!(map, "{} {}", self.n + i, v.anchor);
            for b in &v.tuple {
                let _ = write!(map, " {b}");
            }
            for p in &v.iota {
                let _ = write!(map, " {}", p + 1);
            }
            map.push('\n');
        }
        (self.g.to_fact_text(), map)
    }

    pub fn signature(&self) -> &Arc<crate::model::Signature> {
        &self.restriction.signature
    }
}

struct ColourTable {
    list: Vec<Colour>,
    ids: HashMap<Colour, u32>,
}

impl ColourTable {
    fn new() -> Self {
        ColourTable { list: vec![Colour::Bot], ids: HashMap::from([(Colour::Bot, BOT)]) }
    }

    fn get(&self, c: &Colour) -> Option<u32> {
        self.ids.get(c).copied()
    }

    fn intern(&mut self, c: Colour) -> u32 {
        if let Some(&id) = self.ids.get(&c) {
            return id;
        }
        let id = self.list.len() as u32;
        self.ids.insert(c.clone(), id);
        self.list.push(c);
        id
    }
}

/// ψ₁ holds only negated E-atoms between distinct variables and ψ₂ is a positive
/// combination of unary atoms.
pub fn check_psi_shape(psi: &Formula) -> bool {
    fn psi1(f: &Formula) -> bool {
        match f {
            Formula::True => true,
            Formula::And(a, b) => psi1(a) && psi1(b),
            Formula::Not(a) => matches!(&**a, Formula::Rel { name, args } if name == "E" && args.len() == 2 && args[0] != args[1]),
            _ => false,
        }
    }
    fn psi2(f: &Formula) -> bool {
        match f {
            Formula::True | Formula::False => true,
            Formula::Rel { args, .. } => args.len() == 1,
            Formula::And(a, b) | Formula::Or(a, b) => psi2(a) && psi2(b),
            _ => false,
        }
    }
    match psi {
        Formula::And(a, b) => psi1(a) && psi2(b),
        _ => false,
    }
}
