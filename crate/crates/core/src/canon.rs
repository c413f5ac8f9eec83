//! Canonical forms of small pointed structures, used as neighbourhood types.

use crate::error::{Error, Result};
use crate::model::LocalStructure;
use crate::steps;

/// Default bound on the number of nodes a canonicalised structure may have.
pub const DEFAULT_CANON_CAP: usize = 24;

struct Incidence {
    // per node: (relation, tuple index, position)
    inc: Vec<Vec<(u32, u32, u32)>>,
}

fn incidence(s: &LocalStructure) -> Incidence {
    let mut inc = vec![Vec::new(); s.size()];
    for (ri, rows) in s.rels.iter().enumerate() {
        let arity = s.signature.arity(ri);
        for (ti, t) in rows.chunks_exact(arity).enumerate() {
            for (p, &v) in t.iter().enumerate() {
                inc[v as usize].push((ri as u32, ti as u32, p as u32));
            }
        }
    }
    Incidence { inc }
}

/// Refines `colour` to the coarsest equitable colouring finer than it. Colour ids are
/// assigned by sorting signatures, so the result is isomorphism invariant.
fn refine(s: &LocalStructure, inc: &Incidence, colour: &mut [u32]) {
    let m = colour.len();
    let mut classes = count_classes(colour);
    loop {
        let mut sigs: Vec<(Vec<u32>, usize)> = (0..m)
            .map(|v| {
                let mut entries: Vec<Vec<u32>> = inc.inc[v]
                    .iter()
                    .map(|&(ri, ti, p)| {
                        let arity = s.signature.arity(ri as usize);
                        let t = &s.rels[ri as usize][ti as usize * arity..(ti as usize + 1) * arity];
                        let mut e = vec![ri, p];
                        e.extend(t.iter().map(|&w| colour[w as usize]));
                        e
                    })
                    .collect();
                entries.sort_unstable();
                let mut sig = vec![colour[v]];
                for e in entries {
                    sig.push(e.len() as u32);
                    sig.extend(e);
                }
                steps::tick();
                (sig, v)
            })
            .collect();
        sigs.sort_unstable();
        let mut next = 0u32;
        for i in 0..m {
            if i > 0 && sigs[i].0 != sigs[i - 1].0 {
                next += 1;
            }
            colour[sigs[i].1] = next;
        }
        let now = next as usize + 1;
        if now == classes {
            return;
        }
        classes = now;
    }
}

fn count_classes(colour: &[u32]) -> usize {
    let mut c = colour.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn serialise(s: &LocalStructure, point: &[u32], label: &[u32]) -> Vec<u32> {
    let mut out = vec![s.size() as u32, point.len() as u32];
    out.extend(point.iter().map(|&p| label[p as usize]));
    for (ri, rows) in s.rels.iter().enumerate() {
        let arity = s.signature.arity(ri);
        let mut tuples: Vec<Vec<u32>> =
            rows.chunks_exact(arity).map(|t| t.iter().map(|&v| label[v as usize]).collect()).collect();
        tuples.sort_unstable();
        out.push(tuples.len() as u32);
        for t in tuples {
            out.extend(t);
        }
    }
    out
}

/// Whether swapping `a` and `b` maps every relation onto itself.
fn are_twins(s: &LocalStructure, inc: &Incidence, a: u32, b: u32) -> bool {
    let swap = |v: u32| {
        if v == a {
            b
        } else if v == b {
            a
        } else {
            v
        }
    };
    for &(ri, ti, _) in inc.inc[a as usize].iter().chain(&inc.inc[b as usize]) {
        let arity = s.signature.arity(ri as usize);
        let t = &s.rels[ri as usize][ti as usize * arity..(ti as usize + 1) * arity];
        let image: Vec<u32> = t.iter().map(|&v| swap(v)).collect();
        if !s.holds(ri as usize, &image) {
            return false;
        }
    }
    true
}

fn search(s: &LocalStructure, inc: &Incidence, point: &[u32], colour: Vec<u32>, best: &mut Option<Vec<u32>>) {
    let m = colour.len();
    let mut sizes = vec![0usize; m];
    for &c in &colour {
        sizes[c as usize] += 1;
    }
    let Some(target) = (0..m).find(|&c| sizes[c] > 1) else {
        let form = serialise(s, point, &colour);
        if best.as_ref().is_none_or(|b| form < *b) {
            *best = Some(form);
        }
        return;
    };
    let cell: Vec<u32> = (0..m as u32).filter(|&v| colour[v as usize] == target as u32).collect();
    let mut reps: Vec<u32> = Vec::new();
    for &v in &cell {
        if reps.iter().any(|&r| are_twins(s, inc, r, v)) {
            continue;
        }
        reps.push(v);
        // Individualise v: it gets the cell's colour, the rest of the cell moves up by one.
        let mut c: Vec<u32> = colour.iter().map(|&x| if x > target as u32 { x + 1 } else { x }).collect();
        for &w in &cell {
            if w != v {
                c[w as usize] = target as u32 + 1;
            }
        }
        refine(s, inc, &mut c);
        search(s, inc, point, c, best);
    }
}

/// Canonical serialisation of `(s, point)`: equal outputs exactly for isomorphic
/// pointed structures. `point` holds local ids and may repeat.
pub fn canonical_form(s: &LocalStructure, point: &[u32], cap: usize) -> Result<Vec<u32>> {
    if s.size() > cap {
        return Err(Error::NeighborhoodTooLarge { size: s.size(), cap });
    }
    if s.size() == 0 {
        return Ok(serialise(s, point, &[]));
    }
    let inc = incidence(s);
    // Initial colour: positions the node occupies in the point.
    let mut init: Vec<Vec<u32>> = vec![Vec::new(); s.size()];
    for (i, &p) in point.iter().enumerate() {
        init[p as usize].push(i as u32);
    }
    let mut keys: Vec<(Vec<u32>, usize)> = init.into_iter().enumerate().map(|(v, k)| (k, v)).collect();
    keys.sort_unstable_by(|a, b| {
        // Pointed nodes first, ordered by their position lists.
        (a.0.is_empty(), &a.0).cmp(&(b.0.is_empty(), &b.0))
    });
    let mut colour = vec![0u32; s.size()];
    let mut next = 0u32;
    for i in 0..keys.len() {
        if i > 0 && keys[i].0 != keys[i - 1].0 {
            next += 1;
        }
        colour[keys[i].1] = next;
    }
    refine(s, &inc, &mut colour);
    let mut best = None;
    search(s, &inc, point, colour, &mut best);
    Ok(best.expect("search reaches at least one leaf"))
}
