//! Fixed-depth array trie for partial functions on `[n]^k`, and a fact index built on it.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{Database, Node};
use crate::steps;

/// A positive rational `num/den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Epsilon {
    num: u64,
    den: u64,
}

impl Epsilon {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::Invalid("epsilon must be a positive rational".into()));
        }
        let g = gcd(num, den);
        Ok(Epsilon { num: num / g, den: den / g })
    }

    /// Accepts `0.25`, `1/4` or `2`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("bad epsilon `{text}`"));
        let text = text.trim();
        if let Some((a, b)) = text.split_once('/') {
            return Epsilon::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        }
        let (int, frac) = text.split_once('.').unwrap_or((text, ""));
        if frac.len() > 12 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac_v: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        Epsilon::new(int * den + frac_v, den)
    }

    /// Trie depth `⌈1/ε⌉`.
    pub fn depth(&self) -> usize {
        self.den.div_ceil(self.num) as usize
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn divided_by(&self, k: u64) -> Epsilon {
        Epsilon::new(self.num, self.den * k.max(1)).expect("positive")
    }
}

impl Default for Epsilon {
    fn default() -> Self {
        Epsilon { num: 1, den: 2 }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Epsilon used for stores inside the pipeline: keeps branching at `n^{ε/2}` for any key arity.
pub fn store_epsilon(eps: Epsilon, arity: usize) -> Epsilon {
    eps.divided_by(2 * arity.max(1) as u64)
}

/// Child arrays larger than this are refused.
pub const MAX_BRANCHING: u64 = 1 << 26;

const EMPTY: u32 = 0;

/// Trie of depth `D = ⌈1/ε⌉` over digits in `[0, B)`, `B = ⌈n^{k/D}⌉`. A key
/// `(a_0..a_{k-1})` folds into `Σ a_i n^{k-1-i}` and is split into `D` base-`B`
/// digits, most significant first. Internal nodes are dense child arrays allocated
/// on first write; after `D` digit steps the slot holds the value index.
#[derive(Clone, Debug)]
pub struct TupleStore<V> {
    n: usize,
    k: usize,
    depth: usize,
    branching: u64,
    powers: Vec<u128>,
    slots: Vec<u32>,
    internal: usize,
    values: Vec<V>,
}

fn branching_for(n: usize, k: usize, depth: usize) -> Result<u64> {
    let space = (n as u128)
        .checked_pow(k as u32)
        .ok_or_else(|| Error::ResourceCap(format!("key space {n}^{k} too large")))?;
    if space <= 1 {
        return Ok(1);
    }
    let covers = |b: u64| (b as u128).checked_pow(depth as u32).is_none_or(|p| p >= space);
    let mut b = ((space as f64).powf(1.0 / depth as f64).ceil() as u64).max(1);
    while b > 1 && covers(b - 1) {
        b -= 1;
    }
    while !covers(b) {
        b += 1;
    }
    Ok(b)
}

impl<V> TupleStore<V> {
    pub fn new(n: usize, k: usize, eps: Epsilon) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invalid("tuple arity must be at least 1".into()));
        }
        let depth = eps.depth();
        let branching = branching_for(n, k, depth)?;
        if branching > MAX_BRANCHING {
            return Err(Error::ResourceCap(format!("branching {branching} for n={n}, k={k}, eps={eps}")));
        }
        let powers = (0..depth)
            .map(|i| (branching as u128).checked_pow((depth - 1 - i) as u32).unwrap_or(u128::MAX))
            .collect();
        Ok(TupleStore { n, k, depth, branching, powers, slots: Vec::new(), internal: 0, values: Vec::new() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn branching(&self) -> u64 {
        self.branching
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Allocated trie nodes: internal child arrays plus leaves.
    pub fn node_count(&self) -> usize {
        self.internal + self.values.len()
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    fn check(&self, key: &[Node]) -> Result<()> {
        if key.len() != self.k {
            return Err(Error::Arity(format!("key of length {} for a store of arity {}", key.len(), self.k)));
        }
        if let Some(&bad) = key.iter().find(|&&v| v as usize >= self.n) {
            return Err(Error::OutOfDomain { node: bad as u64, n: self.n });
        }
        Ok(())
    }

    fn fold(&self, key: &[Node]) -> u128 {
        key.iter().fold(0u128, |acc, &a| acc * self.n as u128 + a as u128)
    }

    /// Base-`B` digits of the folded key, most significant first.
    pub fn digits(&self, key: &[Node]) -> Result<Vec<u64>> {
        self.check(key)?;
        let folded = self.fold(key);
        Ok(self.powers.iter().map(|&p| ((folded / p) % self.branching as u128) as u64).collect())
    }

    fn digit(&self, folded: u128, level: usize) -> usize {
        ((folded / self.powers[level]) % self.branching as u128) as usize
    }

    fn alloc(&mut self) -> u32 {
        let id = self.internal as u32;
        self.slots.resize(self.slots.len() + self.branching as usize, EMPTY);
        self.internal += 1;
        steps::add(self.branching);
        id
    }

    pub fn insert(&mut self, key: &[Node], value: V) -> Result<()> {
        self.check(key)?;
        if self.internal == 0 {
            self.alloc();
        }
        let folded = self.fold(key);
        let b = self.branching as usize;
        let mut node = 0usize;
        for level in 0..self.depth {
            steps::tick();
            let slot = node * b + self.digit(folded, level);
            if level + 1 == self.depth {
                if self.slots[slot] != EMPTY {
                    return Err(Error::DuplicateKey(key.to_vec()));
                }
                self.values.push(value);
                self.slots[slot] = self.values.len() as u32;
                return Ok(());
            }
            if self.slots[slot] == EMPTY {
                let child = self.alloc();
                self.slots[slot] = child + 1;
            }
            node = self.slots[slot] as usize - 1;
        }
        unreachable!("depth is at least one")
    }

    /// Lookup that also reports the number of visited trie nodes (at most `D + 1`).
    pub fn lookup_counted(&self, key: &[Node]) -> (Option<&V>, usize) {
        if self.internal == 0 || key.len() != self.k || key.iter().any(|&v| v as usize >= self.n) {
            return (None, 0);
        }
        let folded = self.fold(key);
        let b = self.branching as usize;
        let mut node = 0usize;
        let mut visits = 1;
        for level in 0..self.depth {
            let s = self.slots[node * b + self.digit(folded, level)];
            if s == EMPTY {
                return (None, visits);
            }
            visits += 1;
            if level + 1 == self.depth {
                return (Some(&self.values[s as usize - 1]), visits);
            }
            node = s as usize - 1;
        }
        unreachable!("depth is at least one")
    }

    /// Value stored under `key`; out-of-range keys are simply absent. Charges one step.
    pub fn get(&self, key: &[Node]) -> Option<&V> {
        steps::tick();
        self.lookup_counted(key).0
    }

    /// Checked lookup: errors on a key outside `[n]^k`.
    pub fn lookup(&self, key: &[Node]) -> Result<Option<&V>> {
        self.check(key)?;
        Ok(self.get(key))
    }

    pub fn contains(&self, key: &[Node]) -> bool {
        self.get(key).is_some()
    }
}

/// Builds a store from explicit entries; fails on duplicate or out-of-range keys.
pub fn build_store<V>(entries: Vec<(Vec<Node>, V)>, n: usize, k: usize, eps: Epsilon) -> Result<TupleStore<V>> {
    let mut store = TupleStore::new(n, k, eps)?;
    for (key, v) in entries {
        store.insert(&key, v)?;
    }
    Ok(store)
}

/// One presence store per relation.
#[derive(Clone, Debug)]
pub struct FactIndex {
    names: Vec<String>,
    stores: Vec<TupleStore<()>>,
}

impl FactIndex {
    pub fn store(&self, rel: &str) -> Option<&TupleStore<()>> {
        self.names.iter().position(|n| n == rel).map(|i| &self.stores[i])
    }

    /// Whether `rel(t)` is a fact; unknown relations hold nowhere.
    pub fn holds(&self, rel: &str, t: &[Node]) -> bool {
        match self.store(rel) {
            Some(s) => s.contains(t),
            None => {
                steps::tick();
                false
            }
        }
    }

    pub fn holds_at(&self, rel: usize, t: &[Node]) -> bool {
        self.stores[rel].contains(t)
    }

    pub fn rel_index(&self, rel: &str) -> Option<usize> {
        self.names.iter().position(|n| n == rel)
    }
}

/// Per-relation stores for constant-time fact membership.
pub fn build_fact_index(db: &Database, eps: Epsilon) -> Result<FactIndex> {
    let mut names = Vec::new();
    let mut stores = Vec::new();
    for (i, (name, arity)) in db.signature().iter().enumerate() {
        let mut store = TupleStore::new(db.n(), arity, store_epsilon(eps, arity))?;
        for t in db.relation_at(i).tuples() {
            store.insert(t, ())?;
        }
        names.push(name.to_string());
        stores.push(store);
    }
    Ok(FactIndex { names, stores })
}
