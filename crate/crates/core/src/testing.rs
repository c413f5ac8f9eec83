//! Membership tests `ā ∈ φ(A)` with work independent of the database.

use std::sync::Arc;

use crate::error::Result;
use crate::model::{Database, Node};
use crate::qe::{eliminate_quantifiers, Config, ReducedInstance};
use crate::query::Formula;
use crate::steps;
use crate::storing::{build_fact_index, FactIndex};

/// Reduced instance plus a fact index over `G`.
///
/// `test` runs a fixed plan: all closeness lookups, one slot per position, all ordered
/// E lookups, one colour per position and one satisfaction lookup. It never exits
/// early, so its step count depends only on the arity.
pub struct Tester {
    pub ri: Arc<ReducedInstance>,
    facts: FactIndex,
    e: Option<usize>,
}

impl Tester {
    pub fn new(ri: impl Into<Arc<ReducedInstance>>) -> Result<Self> {
        let ri = ri.into();
        let facts = build_fact_index(&ri.g, ri.epsilon)?;
        let e = facts.rel_index("E");
        Ok(Tester { ri, facts, e })
    }

    pub fn arity(&self) -> usize {
        self.ri.k
    }

    pub fn test(&self, tuple: &[Node]) -> Result<bool> {
        let ri = &self.ri;
        ri.check_tuple(tuple)?;
        let slots = ri.forward_slots(tuple);
        let present = slots.iter().all(|s| s.is_some());
        let v: Vec<Node> = slots.iter().map(|s| s.unwrap_or(ri.bot)).collect();
        let mut ok = present;
        for i in 0..v.len() {
            for j in 0..v.len() {
                if i != j {
                    let adjacent = match self.e {
                        Some(e) => self.facts.holds_at(e, &[v[i], v[j]]),
                        None => {
                            steps::tick();
                            false
                        }
                    };
                    ok &= !adjacent;
                }
            }
        }
        let cols: Vec<u32> = v
            .iter()
            .map(|&x| {
                steps::tick();
                ri.colour_of(x)
            })
            .collect();
        ok &= ri.sat_contains(&cols);
        Ok(ok)
    }
}

pub fn build_tester(db: &Database, phi: &Formula, cfg: &Config) -> Result<Tester> {
    Tester::new(eliminate_quantifiers(db, phi, cfg)?)
}

pub fn test(t: &Tester, tuple: &[Node]) -> Result<bool> {
    t.test(tuple)
}
