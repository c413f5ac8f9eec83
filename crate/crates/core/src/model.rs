//! Relational structures, Gaifman graphs, distances and neighbourhoods.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::steps;

/// Domain elements are dense integers `0..n`.
pub type Node = u32;

/// A bounded distance: `None` stands for "farther than the bound" (or unreachable).
pub type Distance = Option<u32>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    rels: Vec<(String, usize)>,
    index: HashMap<String, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a relation and returns its index. Re-adding with the same arity is a no-op.
    pub fn add(&mut self, name: &str, arity: usize) -> Result<usize> {
        if arity == 0 {
            return Err(Error::Arity(format!("relation {name} must have arity at least 1")));
        }
        if let Some(&i) = self.index.get(name) {
            if self.rels[i].1 != arity {
                return Err(Error::Arity(format!(
                    "relation {name} declared with arity {} and {arity}",
                    self.rels[i].1
                )));
            }
            return Ok(i);
        }
        self.rels.push((name.to_string(), arity));
        self.index.insert(name.to_string(), self.rels.len() - 1);
        Ok(self.rels.len() - 1)
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.rels[i].0
    }

    pub fn arity(&self, i: usize) -> usize {
        self.rels[i].1
    }

    pub fn len(&self) -> usize {
        self.rels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.rels.iter().map(|(n, a)| (n.as_str(), *a))
    }
}

/// Tuples of one relation, stored flat, sorted lexicographically and duplicate free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    arity: usize,
    data: Vec<Node>,
}

impl Relation {
    pub fn from_flat(arity: usize, data: Vec<Node>) -> Self {
        assert!(arity > 0 && data.len() % arity == 0);
        let mut rows: Vec<&[Node]> = data.chunks_exact(arity).collect();
        rows.sort_unstable();
        rows.dedup();
        let data = rows.concat();
        Relation { arity, data }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.arity
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn tuple(&self, i: usize) -> &[Node] {
        &self.data[i * self.arity..(i + 1) * self.arity]
    }

    pub fn tuples(&self) -> std::slice::ChunksExact<'_, Node> {
        self.data.chunks_exact(self.arity)
    }

    /// Binary search over the sorted tuple list.
    pub fn contains(&self, t: &[Node]) -> bool {
        if t.len() != self.arity {
            return false;
        }
        let (mut lo, mut hi) = (0usize, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.tuple(mid).cmp(t) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }
}

#[derive(Clone, Debug)]
pub struct Database {
    signature: Signature,
    n: usize,
    relations: Vec<Relation>,
}

impl Database {
    pub fn new(n: usize) -> Self {
        Database { signature: Signature::new(), n, relations: Vec::new() }
    }

    /// Adds (or extends) a relation from explicit tuples.
    pub fn add_relation(&mut self, name: &str, arity: usize, tuples: &[Vec<Node>]) -> Result<()> {
        let mut flat = Vec::with_capacity(tuples.len() * arity);
        for t in tuples {
            if t.len() != arity {
                return Err(Error::Arity(format!("tuple {t:?} for {name}/{arity}")));
            }
            flat.extend_from_slice(t);
        }
        self.add_relation_flat(name, arity, flat)
    }

    pub fn add_relation_flat(&mut self, name: &str, arity: usize, flat: Vec<Node>) -> Result<()> {
        if let Some(&bad) = flat.iter().find(|&&v| v as usize >= self.n) {
            return Err(Error::OutOfDomain { node: bad as u64, n: self.n });
        }
        let id = self.signature.add(name, arity)?;
        if id == self.relations.len() {
            self.relations.push(Relation::from_flat(arity, flat));
        } else {
            let mut all = std::mem::take(&mut self.relations[id].data);
            all.extend(flat);
            self.relations[id] = Relation::from_flat(arity, all);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.signature.index(name).map(|i| &self.relations[i])
    }

    pub fn relation_at(&self, i: usize) -> &Relation {
        &self.relations[i]
    }

    pub fn holds(&self, name: &str, t: &[Node]) -> bool {
        self.relation(name).is_some_and(|r| r.contains(t))
    }

    /// Total number of stored tuples.
    pub fn tuple_count(&self) -> usize {
        self.relations.iter().map(Relation::len).sum()
    }

    pub fn relation_names(&self) -> Vec<&str> {
        self.signature.iter().map(|(n, _)| n).collect()
    }

    /// Serialises the database in the fact-file format.
    pub fn to_fact_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "domain {}", self.n);
        for (name, arity) in self.signature.iter() {
            let _ = writeln!(s, "#rel {name} {arity}");
        }
        for (i, (name, _)) in self.signature.iter().enumerate() {
            for t in self.relations[i].tuples() {
                s.push_str(name);
                for v in t {
                    let _ = write!(s, " {v}");
                }
                s.push('\n');
            }
        }
        s
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses a fact file: `domain N`, optional `#rel NAME ARITY`, fact lines `NAME v1 .. vk`.
pub fn load_database(text: &str) -> Result<Database> {
    let mut n: Option<usize> = None;
    let mut declared: Vec<(String, usize, usize)> = Vec::new();
    let mut facts: HashMap<String, (usize, Vec<Node>)> = HashMap::new();
    let mut order: Vec<String> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |msg: &str| Error::Parse { line: line_no, msg: msg.to_string() };
        let trimmed = raw.trim();
        if let Some(rest) = trimmed.strip_prefix("#rel") {
            if rest.starts_with(char::is_whitespace) {
                let parts: Vec<&str> = rest.split('#').next().unwrap_or("").split_whitespace().collect();
                if parts.len() != 2 || !is_identifier(parts[0]) {
                    return Err(err("expected `#rel NAME ARITY`"));
                }
                let arity: usize = parts[1].parse().map_err(|_| err("bad arity"))?;
                if arity == 0 {
                    return Err(err("arity must be at least 1"));
                }
                declared.push((parts[0].to_string(), arity, line_no));
                continue;
            }
        }
        let content = trimmed.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut words = content.split_whitespace();
        let head = words.next().unwrap_or_default();
        if n.is_none() {
            if head != "domain" {
                return Err(err("first line must be `domain N`"));
            }
            let size = words.next().ok_or_else(|| err("missing domain size"))?;
            let size: usize = size.parse().map_err(|_| err("bad domain size"))?;
            if words.next().is_some() {
                return Err(err("trailing tokens after domain size"));
            }
            n = Some(size);
            continue;
        }
        if head == "domain" {
            return Err(err("duplicate domain line"));
        }
        if !is_identifier(head) {
            return Err(err("bad relation name"));
        }
        let size = n.unwrap_or(0);
        let mut comps = Vec::new();
        for w in words {
            let v: u64 = w.parse().map_err(|_| err("bad node id"))?;
            if v >= size as u64 {
                return Err(err("component out of domain"));
            }
            comps.push(v as Node);
        }
        if comps.is_empty() {
            return Err(err("fact without components"));
        }
        let header = declared.iter().find(|d| d.0 == head).map(|d| d.1);
        let entry = facts.entry(head.to_string()).or_insert_with(|| {
            order.push(head.to_string());
            (header.unwrap_or(comps.len()), Vec::new())
        });
        if entry.0 != comps.len() {
            return Err(err("arity mismatch"));
        }
        entry.1.extend(comps);
    }

    let n = n.ok_or(Error::Parse { line: 0, msg: "missing `domain N` line".into() })?;
    let mut db = Database::new(n);
    for (name, arity, line) in &declared {
        if let Some((a, _)) = facts.get(name) {
            if a != arity {
                return Err(Error::Parse { line: *line, msg: "arity mismatch".into() });
            }
        }
        db.add_relation_flat(name, *arity, Vec::new())
            .map_err(|e| Error::Parse { line: *line, msg: e.to_string() })?;
    }
    for name in order {
        let (arity, flat) = facts.remove(&name).unwrap_or_default();
        db.add_relation_flat(&name, arity, flat)?;
    }
    Ok(db)
}

/// Gaifman graph as sorted adjacency lists (CSR layout).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyIndex {
    offsets: Vec<usize>,
    targets: Vec<Node>,
}

impl AdjacencyIndex {
    /// Builds a symmetric, loop-free adjacency from an edge list.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (Node, Node)>) -> Self {
        let mut pairs: Vec<(Node, Node)> = Vec::new();
        for (a, b) in edges {
            if a != b {
                pairs.push((a, b));
                pairs.push((b, a));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        let mut offsets = vec![0usize; n + 1];
        for &(a, _) in &pairs {
            offsets[a as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = pairs.into_iter().map(|(_, b)| b).collect();
        AdjacencyIndex { offsets, targets }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn neighbors(&self, a: Node) -> &[Node] {
        &self.targets[self.offsets[a as usize]..self.offsets[a as usize + 1]]
    }

    pub fn is_adjacent(&self, a: Node, b: Node) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }

    /// Maximum list length, i.e. the degree of the structure.
    pub fn degree(&self) -> usize {
        (0..self.n()).map(|a| self.offsets[a + 1] - self.offsets[a]).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }
}

fn clique_edges(rel: &Relation, out: &mut Vec<(Node, Node)>) {
    for t in rel.tuples() {
        for i in 0..t.len() {
            for j in i + 1..t.len() {
                if t[i] != t[j] {
                    out.push((t[i], t[j]));
                }
            }
        }
    }
}

/// Gaifman graph of `db` restricted to the relations in `rels`.
pub fn gaifman_graph(db: &Database, rels: &[&str]) -> Result<AdjacencyIndex> {
    let mut edges = Vec::new();
    for name in rels {
        let rel = db.relation(name).ok_or_else(|| Error::UnknownRelation(name.to_string()))?;
        clique_edges(rel, &mut edges);
    }
    Ok(AdjacencyIndex::from_edges(db.n(), edges))
}

/// `dist(a, b)` if it is at most `bound`, otherwise `None`.
pub fn bounded_distance(adj: &AdjacencyIndex, a: Node, b: Node, bound: u32) -> Result<Distance> {
    let n = adj.n();
    for v in [a, b] {
        if v as usize >= n {
            return Err(Error::OutOfDomain { node: v as u64, n });
        }
    }
    if a == b {
        return Ok(Some(0));
    }
    let mut seen: HashSet<Node> = HashSet::from([a]);
    let mut frontier = vec![a];
    for d in 1..=bound {
        let mut next = Vec::new();
        for &u in &frontier {
            for &w in adj.neighbors(u) {
                steps::tick();
                if w == b {
                    return Ok(Some(d));
                }
                if seen.insert(w) {
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(None)
}

/// Reusable breadth-first search with O(1) reset, for many small searches on one graph.
pub struct Bfs {
    stamp: Vec<u32>,
    dist: Vec<u32>,
    round: u32,
    queue: VecDeque<Node>,
}

impl Bfs {
    pub fn new(n: usize) -> Self {
        Bfs { stamp: vec![0; n], dist: vec![0; n], round: 0, queue: VecDeque::new() }
    }

    fn start(&mut self) {
        self.round = self.round.wrapping_add(1);
        if self.round == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.round = 1;
        }
        self.queue.clear();
    }

    /// Nodes within distance `r` of some source, sorted.
    pub fn ball(&mut self, adj: &AdjacencyIndex, sources: &[Node], r: u32) -> Vec<Node> {
        self.start();
        let mut out = Vec::new();
        for &s in sources {
            if self.stamp[s as usize] != self.round {
                self.stamp[s as usize] = self.round;
                self.dist[s as usize] = 0;
                self.queue.push_back(s);
                out.push(s);
            }
        }
        while let Some(u) = self.queue.pop_front() {
            let du = self.dist[u as usize];
            if du == r {
                continue;
            }
            for &w in adj.neighbors(u) {
                steps::tick();
                if self.stamp[w as usize] != self.round {
                    self.stamp[w as usize] = self.round;
                    self.dist[w as usize] = du + 1;
                    self.queue.push_back(w);
                    out.push(w);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Bounded distance from `a` to `b`.
    pub fn distance(&mut self, adj: &AdjacencyIndex, a: Node, b: Node, bound: u32) -> Distance {
        if a == b {
            return Some(0);
        }
        self.start();
        self.stamp[a as usize] = self.round;
        self.dist[a as usize] = 0;
        self.queue.push_back(a);
        while let Some(u) = self.queue.pop_front() {
            let du = self.dist[u as usize];
            if du == bound {
                continue;
            }
            for &w in adj.neighbors(u) {
                steps::tick();
                if w == b {
                    return Some(du + 1);
                }
                if self.stamp[w as usize] != self.round {
                    self.stamp[w as usize] = self.round;
                    self.dist[w as usize] = du + 1;
                    self.queue.push_back(w);
                }
            }
        }
        None
    }
}

/// A small structure with local node ids `0..m`. `nodes[i]` is the label (usually the
/// original node id) of local node `i`; relations follow `signature`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalStructure {
    pub signature: Arc<Signature>,
    pub nodes: Vec<Node>,
    pub rels: Vec<Vec<u32>>,
}

impl LocalStructure {
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// Local id of a labelled node; requires `nodes` sorted (true for induced substructures).
    pub fn local_id(&self, label: Node) -> Option<u32> {
        self.nodes.binary_search(&label).ok().map(|i| i as u32)
    }

    pub fn holds(&self, rel: usize, t: &[u32]) -> bool {
        let arity = self.signature.arity(rel);
        if t.len() != arity {
            return false;
        }
        let rows = &self.rels[rel];
        let count = rows.len() / arity;
        let (mut lo, mut hi) = (0usize, count);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match rows[mid * arity..(mid + 1) * arity].cmp(t) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    /// Local Gaifman adjacency, sorted lists.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.size()];
        for (ri, rows) in self.rels.iter().enumerate() {
            let arity = self.signature.arity(ri);
            for t in rows.chunks_exact(arity) {
                for i in 0..arity {
                    for j in 0..arity {
                        if t[i] != t[j] {
                            adj[t[i] as usize].push(t[j]);
                        }
                    }
                }
            }
        }
        for l in &mut adj {
            l.sort_unstable();
            l.dedup();
        }
        adj
    }

    /// Disjoint union; returns the union and the local-id offset of every part.
    pub fn disjoint_union(parts: &[&LocalStructure]) -> (LocalStructure, Vec<u32>) {
        let signature = parts.first().map(|p| p.signature.clone()).unwrap_or_default();
        let mut rels = vec![Vec::new(); signature.len()];
        let mut offsets = Vec::with_capacity(parts.len());
        let mut total = 0u32;
        for p in parts {
            offsets.push(total);
            for (ri, rows) in p.rels.iter().enumerate() {
                rels[ri].extend(rows.iter().map(|&v| v + total));
            }
            total += p.size() as u32;
        }
        let nodes = (0..total).collect();
        (LocalStructure { signature, nodes, rels }, offsets)
    }
}

/// The restriction A↓q of a database to the relations a query mentions: signature,
/// Gaifman adjacency and node-to-tuple incidence. Relations the database lacks are empty.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub signature: Arc<Signature>,
    pub db_ids: Vec<Option<usize>>,
    pub adj: AdjacencyIndex,
    inc_offsets: Vec<usize>,
    inc: Vec<(u32, u32)>,
}

impl Restriction {
    /// `rels` lists (name, arity) pairs of the query signature.
    pub fn new(db: &Database, rels: &[(String, usize)]) -> Result<Self> {
        let mut signature = Signature::new();
        let mut db_ids = Vec::new();
        for (name, arity) in rels {
            signature.add(name, *arity)?;
            let id = db.signature().index(name);
            if let Some(i) = id {
                if db.signature().arity(i) != *arity {
                    return Err(Error::Arity(format!(
                        "query uses {name} with arity {arity}, database has {}",
                        db.signature().arity(i)
                    )));
                }
            }
            db_ids.push(id);
        }
        let mut edges = Vec::new();
        let mut pairs: Vec<(Node, u32, u32)> = Vec::new();
        for (pos, id) in db_ids.iter().enumerate() {
            let Some(id) = id else { continue };
            let rel = db.relation_at(*id);
            clique_edges(rel, &mut edges);
            for (ti, t) in rel.tuples().enumerate() {
                for (i, &v) in t.iter().enumerate() {
                    if !t[..i].contains(&v) {
                        pairs.push((v, pos as u32, ti as u32));
                    }
                }
            }
        }
        steps::add((edges.len() + pairs.len()) as u64);
        let adj = AdjacencyIndex::from_edges(db.n(), edges);
        pairs.sort_unstable();
        let mut inc_offsets = vec![0usize; db.n() + 1];
        for &(v, _, _) in &pairs {
            inc_offsets[v as usize + 1] += 1;
        }
        for i in 0..db.n() {
            inc_offsets[i + 1] += inc_offsets[i];
        }
        let inc = pairs.into_iter().map(|(_, r, t)| (r, t)).collect();
        Ok(Restriction { signature: Arc::new(signature), db_ids, adj, inc_offsets, inc })
    }

    /// Restriction to every relation of the database.
    pub fn full(db: &Database) -> Self {
        let rels: Vec<(String, usize)> =
            db.signature().iter().map(|(n, a)| (n.to_string(), a)).collect();
        Restriction::new(db, &rels).expect("database signature is consistent")
    }

    fn incident(&self, v: Node) -> &[(u32, u32)] {
        &self.inc[self.inc_offsets[v as usize]..self.inc_offsets[v as usize + 1]]
    }

    /// Induced substructure on a sorted, duplicate-free node set.
    pub fn induced(&self, db: &Database, nodes: Vec<Node>) -> LocalStructure {
        let mut rels: Vec<Vec<u32>> = vec![Vec::new(); self.signature.len()];
        let mut local = Vec::new();
        for &v in &nodes {
            for &(pos, ti) in self.incident(v) {
                steps::tick();
                let id = self.db_ids[pos as usize].expect("incidence only for present relations");
                let t = db.relation_at(id).tuple(ti as usize);
                // Each tuple is visited from its smallest component only.
                if t.iter().copied().min() != Some(v) {
                    continue;
                }
                local.clear();
                let mut inside = true;
                for &c in t {
                    match nodes.binary_search(&c) {
                        Ok(i) => local.push(i as u32),
                        Err(_) => {
                            inside = false;
                            break;
                        }
                    }
                }
                if inside {
                    rels[pos as usize].extend_from_slice(&local);
                }
            }
        }
        for (ri, rows) in rels.iter_mut().enumerate() {
            let arity = self.signature.arity(ri);
            let mut chunks: Vec<&[u32]> = rows.chunks_exact(arity).collect();
            chunks.sort_unstable();
            chunks.dedup();
            *rows = chunks.concat();
        }
        LocalStructure { signature: self.signature.clone(), nodes, rels }
    }
}

/// For every node `a`, the ball `N_r(a)` and the induced substructure on it.
#[derive(Clone, Debug)]
pub struct NeighborhoodIndex {
    pub radius: u32,
    offsets: Vec<usize>,
    balls: Vec<Node>,
    structures: Vec<LocalStructure>,
}

impl NeighborhoodIndex {
    pub fn build(db: &Database, restriction: &Restriction, r: u32) -> Self {
        let n = db.n();
        let mut bfs = Bfs::new(n);
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut balls = Vec::new();
        let mut structures = Vec::with_capacity(n);
        for a in 0..n as Node {
            let ball = bfs.ball(&restriction.adj, &[a], r);
            balls.extend_from_slice(&ball);
            offsets.push(balls.len());
            structures.push(restriction.induced(db, ball));
        }
        NeighborhoodIndex { radius: r, offsets, balls, structures }
    }

    pub fn ball(&self, a: Node) -> &[Node] {
        &self.balls[self.offsets[a as usize]..self.offsets[a as usize + 1]]
    }

    pub fn structure(&self, a: Node) -> &LocalStructure {
        &self.structures[a as usize]
    }

    pub fn n(&self) -> usize {
        self.structures.len()
    }
}

/// Balls and induced substructures of radius `r` in `db` restricted to `rels`.
pub fn neighborhoods(db: &Database, rels: &[&str], r: u32) -> Result<NeighborhoodIndex> {
    let mut sig = Vec::new();
    for name in rels {
        let id = db.signature().index(name).ok_or_else(|| Error::UnknownRelation(name.to_string()))?;
        sig.push((name.to_string(), db.signature().arity(id)));
    }
    let restriction = Restriction::new(db, &sig)?;
    Ok(NeighborhoodIndex::build(db, &restriction, r))
}
