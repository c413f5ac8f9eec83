use std::fmt;

use crate::model::{AdjacencyIndex, Bfs, Node};

/// Set partition of the positions `0..k`; blocks are sorted and ordered by minimum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// From a block-assignment vector whose labels appear in increasing first-use order.
    pub fn from_assignment(a: &[usize]) -> Self {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, &b) in a.iter().enumerate() {
            if b == blocks.len() {
                blocks.push(Vec::new());
            }
            blocks[b].push(i);
        }
        Partition { blocks }
    }

    pub fn assignment(&self) -> Vec<usize> {
        let k = self.blocks.iter().map(|b| b.len()).sum();
        let mut a = vec![0; k];
        for (j, b) in self.blocks.iter().enumerate() {
            for &i in b {
                a[i] = j;
            }
        }
        a
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Printed 1-based, e.g. `({1,3},{2})`.
impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (j, b) in self.blocks.iter().enumerate() {
            if j > 0 {
                f.write_str(",")?;
            }
            let items: Vec<String> = b.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, "{{{}}}", items.join(","))?;
        }
        f.write_str(")")
    }
}

/// All partitions of `0..k`, lexicographic in the assignment vector.
pub fn partitions(k: usize) -> Vec<Partition> {
    fn go(a: &mut Vec<usize>, k: usize, used: usize, out: &mut Vec<Partition>) {
        if a.len() == k {
            out.push(Partition::from_assignment(a));
            return;
        }
        for b in 0..=used {
            a.push(b);
            go(a, k, used.max(b + 1), out);
            a.pop();
        }
    }
    let mut out = Vec::new();
    if k == 0 {
        out.push(Partition { blocks: Vec::new() });
        return out;
    }
    go(&mut Vec::with_capacity(k), k, 0, &mut out);
    out
}

/// Components of the graph on positions joined when `close(a_i, a_j)`.
pub fn detect_partition(tuple: &[Node], mut close: impl FnMut(Node, Node) -> bool) -> Partition {
    let k = tuple.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for i in 0..k {
        for j in i + 1..k {
            if close(tuple[i], tuple[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut label = vec![usize::MAX; k];
    let mut next = 0;
    let mut assignment = Vec::with_capacity(k);
    for i in 0..k {
        let r = find(&mut parent, i);
        if label[r] == usize::MAX {
            label[r] = next;
            next += 1;
        }
        assignment.push(label[r]);
    }
    Partition::from_assignment(&assignment)
}

/// Whether `tuple` satisfies ρ_P at closeness threshold `t`: positions in different
/// blocks are farther than `t` apart and every block is connected under `≤ t`.
pub fn rho_holds(adj: &AdjacencyIndex, bfs: &mut Bfs, p: &Partition, tuple: &[Node], t: u32) -> bool {
    let close = |bfs: &mut Bfs, a: Node, b: Node| bfs.distance(adj, a, b, t).is_some();
    for (x, bx) in p.blocks.iter().enumerate() {
        for by in &p.blocks[x + 1..] {
            for &i in bx {
                for &j in by {
                    if close(bfs, tuple[i], tuple[j]) {
                        return false;
                    }
                }
            }
        }
        let mut reached = vec![bx[0]];
        let mut frontier = vec![bx[0]];
        while let Some(i) = frontier.pop() {
            for &j in bx {
                if !reached.contains(&j) && close(bfs, tuple[i], tuple[j]) {
                    reached.push(j);
                    frontier.push(j);
                }
            }
        }
        if reached.len() != bx.len() {
            return false;
        }
    }
    true
}
