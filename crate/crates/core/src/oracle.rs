//! Brute-force first-order evaluation over the full domain, used as ground truth.
//! Deliberately independent of the engine's indexes.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::model::{Database, Node};
use crate::query::{Cmp, Formula};

/// Default bound on `n^k` candidate answer tuples.
pub const DEFAULT_GUARD: u128 = 10_000_000;

pub struct Oracle<'a> {
    n: usize,
    facts: HashMap<&'a str, BTreeSet<Vec<Node>>>,
    adj: Vec<Vec<Node>>,
    dist: RefCell<HashMap<Node, Vec<u32>>>,
}

impl<'a> Oracle<'a> {
    /// Distances are taken in the Gaifman graph of the relations `phi` mentions.
    pub fn new(db: &'a Database, phi: &Formula) -> Result<Self> {
        let mut facts = HashMap::new();
        let mut adj = vec![Vec::new(); db.n()];
        for (name, arity) in phi.relations()? {
            let Some(rel) = db.relation(&name) else { continue };
            if rel.arity() != arity {
                return Err(Error::Arity(format!("{name} has arity {} in the database", rel.arity())));
            }
            let set: BTreeSet<Vec<Node>> = rel.tuples().map(|t| t.to_vec()).collect();
            for t in &set {
                for &a in t {
                    for &b in t {
                        if a != b {
                            adj[a as usize].push(b);
                        }
                    }
                }
            }
            let key = db.signature().name(db.signature().index(&name).expect("present"));
            facts.insert(key, set);
        }
        for l in &mut adj {
            l.sort_unstable();
            l.dedup();
        }
        Ok(Oracle { n: db.n(), facts, adj, dist: RefCell::new(HashMap::new()) })
    }

    fn distance(&self, a: Node, b: Node) -> u32 {
        let mut cache = self.dist.borrow_mut();
        let row = cache.entry(a).or_insert_with(|| {
            let mut d = vec![u32::MAX; self.n];
            d[a as usize] = 0;
            let mut q = VecDeque::from([a]);
            while let Some(u) = q.pop_front() {
                for &w in &self.adj[u as usize] {
                    if d[w as usize] == u32::MAX {
                        d[w as usize] = d[u as usize] + 1;
                        q.push_back(w);
                    }
                }
            }
            d
        });
        row[b as usize]
    }

    fn get(env: &[(String, Node)], v: &str) -> Result<Node> {
        env.iter().rev().find(|(w, _)| w == v).map(|(_, a)| *a).ok_or_else(|| Error::Unassigned(v.to_string()))
    }

    /// Truth of `phi` under `env`.
    pub fn holds(&self, phi: &Formula, env: &mut Vec<(String, Node)>) -> Result<bool> {
        Ok(match phi {
            Formula::True => true,
            Formula::False => false,
            Formula::Rel { name, args } => {
                let t = args.iter().map(|a| Self::get(env, a)).collect::<Result<Vec<_>>>()?;
                self.facts.get(name.as_str()).is_some_and(|s| s.contains(&t))
            }
            Formula::Dist { x, y, cmp, c } => {
                let d = self.distance(Self::get(env, x)?, Self::get(env, y)?);
                match cmp {
                    Cmp::Le => d <= *c,
                    Cmp::Gt => d > *c,
                }
            }
            Formula::Not(a) => !self.holds(a, env)?,
            Formula::And(a, b) => self.holds(a, env)? && self.holds(b, env)?,
            Formula::Or(a, b) => self.holds(a, env)? || self.holds(b, env)?,
            Formula::Exists(v, body) => {
                for a in 0..self.n as Node {
                    env.push((v.clone(), a));
                    let r = self.holds(body, env);
                    env.pop();
                    if r? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Forall(v, body) => {
                for a in 0..self.n as Node {
                    env.push((v.clone(), a));
                    let r = self.holds(body, env);
                    env.pop();
                    if !r? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::ExistsIn { var, radius, centers, body } => {
                let cs = centers.iter().map(|c| Self::get(env, c)).collect::<Result<Vec<_>>>()?;
                for a in 0..self.n as Node {
                    if !cs.iter().any(|&c| self.distance(c, a) <= *radius) {
                        continue;
                    }
                    env.push((var.clone(), a));
                    let r = self.holds(body, env);
                    env.pop();
                    if r? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }
}

/// `φ(A)` over the free variables in first-occurrence order.
pub fn naive_eval(db: &Database, phi: &Formula) -> Result<BTreeSet<Vec<Node>>> {
    naive_eval_guarded(db, phi, DEFAULT_GUARD)
}

pub fn naive_eval_guarded(db: &Database, phi: &Formula, guard: u128) -> Result<BTreeSet<Vec<Node>>> {
    let free = phi.free_vars();
    let k = free.len();
    let space = (db.n() as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if space > guard {
        return Err(Error::ResourceCap(format!("oracle would enumerate {space} tuples")));
    }
    let oracle = Oracle::new(db, phi)?;
    let mut out = BTreeSet::new();
    if db.n() == 0 && k > 0 {
        return Ok(out);
    }
    let mut tuple = vec![0 as Node; k];
    let mut env = Vec::with_capacity(k + 8);
    loop {
        env.clear();
        env.extend(free.iter().cloned().zip(tuple.iter().copied()));
        if oracle.holds(phi, &mut env)? {
            out.insert(tuple.clone());
        }
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            tuple[i] += 1;
            if (tuple[i] as usize) < db.n() {
                break;
            }
            tuple[i] = 0;
        }
    }
}

/// Truth of `phi` under a full assignment of its free variables.
pub fn naive_holds(db: &Database, phi: &Formula, assignment: &[(String, Node)]) -> Result<bool> {
    let oracle = Oracle::new(db, phi)?;
    oracle.holds(phi, &mut assignment.to_vec())
}
