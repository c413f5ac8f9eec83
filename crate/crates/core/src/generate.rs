//! Seeded random databases under a degree schedule.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Database, Node};

/// Degree bound as a function of `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Schedule {
    Const(f64),
    LogPow(f64),
    Poly(f64),
}

impl Schedule {
    pub fn bound(&self, n: usize) -> Result<usize> {
        let n = n.max(1) as f64;
        // Guard against 10^4^0.25 landing a hair above 10.
        let ceil = |x: f64| (x - 1e-9).ceil();
        let b = match *self {
            Schedule::Const(d) => d.floor(),
            Schedule::LogPow(c) => ceil(ceil(n.log2()).max(0.0).powf(c)),
            Schedule::Poly(delta) => ceil(n.powf(delta)),
        };
        if !b.is_finite() || b < 0.0 {
            return Err(Error::Invalid(format!("schedule {self} has infeasible bound {b}")));
        }
        Ok(b as usize)
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, val) = s
            .split_once(':')
            .ok_or_else(|| Error::Invalid(format!("schedule {s:?}: expected kind:value")))?;
        let v: f64 = val.trim().parse().map_err(|_| Error::Invalid(format!("schedule {s:?}: bad number")))?;
        if !v.is_finite() || v < 0.0 {
            return Err(Error::Invalid(format!("schedule {s:?}: infeasible (negative bound)")));
        }
        match kind.trim() {
            "const" => Ok(Schedule::Const(v)),
            "log_pow" => Ok(Schedule::LogPow(v)),
            "poly" => Ok(Schedule::Poly(v)),
            other => Err(Error::Invalid(format!("unknown schedule kind {other:?}"))),
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Const(d) => write!(f, "const:{d}"),
            Schedule::LogPow(c) => write!(f, "log_pow:{c}"),
            Schedule::Poly(d) => write!(f, "poly:{d}"),
        }
    }
}

/// One relation of a signature spec such as `E/2:1.5`. For unary relations the
/// parameter is the membership probability; otherwise it is the number of tuples
/// attempted per domain element.
#[derive(Clone, Debug, PartialEq)]
pub struct RelSpec {
    pub name: String,
    pub arity: usize,
    pub param: f64,
}

pub fn parse_signature_spec(s: &str) -> Result<Vec<RelSpec>> {
    let bad = |m: &str| Error::Invalid(format!("signature spec {s:?}: {m}"));
    let mut out: Vec<RelSpec> = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (head, param) = item.split_once(':').ok_or_else(|| bad("expected NAME/ARITY:PARAM"))?;
        let (name, arity) = head.split_once('/').ok_or_else(|| bad("expected NAME/ARITY"))?;
        let arity: usize = arity.trim().parse().map_err(|_| bad("bad arity"))?;
        let param: f64 = param.trim().parse().map_err(|_| bad("bad parameter"))?;
        if arity == 0 || !param.is_finite() || param < 0.0 || (arity == 1 && param > 1.0) {
            return Err(bad("arity must be positive and the parameter in range"));
        }
        if out.iter().any(|r| r.name == name.trim()) {
            return Err(bad("duplicate relation"));
        }
        out.push(RelSpec { name: name.trim().to_string(), arity, param });
    }
    Ok(out)
}

/// Random database on `0..n`. Candidate tuples are drawn uniformly and rejected
/// when they repeat a node, repeat a fact, or would push some Gaifman degree above
/// the schedule's bound.
pub fn generate(n: usize, schedule: Schedule, sig: &[RelSpec], seed: u64) -> Result<Database> {
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    let bound = schedule.bound(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut neighbours: Vec<HashSet<Node>> = vec![HashSet::new(); n];
    let mut db = Database::new(n);
    for spec in sig {
        let mut flat: Vec<Node> = Vec::new();
        if spec.arity == 1 {
            for v in 0..n as Node {
                if rng.gen_bool(spec.param) {
                    flat.push(v);
                }
            }
        } else if spec.arity <= n {
            let target = (spec.param * n as f64).round() as usize;
            let mut facts: HashSet<Vec<Node>> = HashSet::new();
            let mut attempts = 0usize;
            while facts.len() < target && attempts < 20 * target {
                attempts += 1;
                let t: Vec<Node> = (0..spec.arity).map(|_| rng.gen_range(0..n as Node)).collect();
                if (1..t.len()).any(|i| t[..i].contains(&t[i])) || facts.contains(&t) {
                    continue;
                }
                let fits = t.iter().all(|&a| {
                    let fresh = t.iter().filter(|&&b| b != a && !neighbours[a as usize].contains(&b)).count();
                    neighbours[a as usize].len() + fresh <= bound
                });
                if !fits {
                    continue;
                }
                for &a in &t {
                    for &b in &t {
                        if a != b {
                            neighbours[a as usize].insert(b);
                        }
                    }
                }
                flat.extend_from_slice(&t);
                facts.insert(t);
            }
        }
        db.add_relation_flat(&spec.name, spec.arity, flat)?;
    }
    Ok(db)
}
