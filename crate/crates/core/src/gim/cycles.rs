use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use super::{Gim, Ordering};
use crate::matrix::SkewMatrix;

/// An induced cycle of the nonzero pattern of `B`, listed in cyclic order
/// starting from its smallest index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChordlessCycle {
    pub vertices: Vec<usize>,
    pub oriented: bool,
}

impl ChordlessCycle {
    pub fn vertex_set(&self) -> BTreeSet<usize> {
        self.vertices.iter().copied().collect()
    }

    /// Consecutive pairs around the cycle, including the closing one.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let d = self.vertices.len();
        (0..d).map(move |j| (self.vertices[j], self.vertices[(j + 1) % d]))
    }
}

pub(crate) fn adjacency(b: &SkewMatrix) -> Vec<Vec<bool>> {
    let n = b.rank();
    (0..n)
        .map(|i| (0..n).map(|j| !b.entry(i, j).is_zero()).collect())
        .collect()
}

/// Induced cycles of length at least three in the graph `adj`, one per
/// vertex set.
pub(crate) fn induced_cycles(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for start in 0..n {
        let mut path = vec![start];
        extend(adj, start, &mut path, &mut seen, &mut out);
    }
    out
}

fn extend(
    adj: &[Vec<bool>],
    start: usize,
    path: &mut Vec<usize>,
    seen: &mut BTreeSet<Vec<usize>>,
    out: &mut Vec<Vec<usize>>,
) {
    let last = *path.last().unwrap();
    for w in (start + 1)..adj.len() {
        if !adj[last][w] || path.contains(&w) {
            continue;
        }
        // w may only touch the last vertex and (when closing) the start.
        if path
            .iter()
            .skip(1)
            .take(path.len().saturating_sub(2))
            .any(|&p| adj[p][w])
        {
            continue;
        }
        if path.len() >= 2 && adj[start][w] {
            let mut cycle = path.clone();
            cycle.push(w);
            let mut key = cycle.clone();
            key.sort_unstable();
            if seen.insert(key) {
                out.push(cycle);
            }
            continue;
        }
        path.push(w);
        extend(adj, start, path, seen, out);
        path.pop();
    }
}

/// Whether the arrows `b[v_j][v_{j+1}]` around the cycle all have one sign.
pub(crate) fn is_oriented(b: &SkewMatrix, cycle: &[usize]) -> bool {
    let d = cycle.len();
    let signs: BTreeSet<bool> = (0..d)
        .map(|j| b.entry(cycle[j], cycle[(j + 1) % d]).is_positive())
        .collect();
    signs.len() == 1
}

/// All chordless cycles of `B`, each reported once with its orientation.
pub fn chordless_cycles(b: &SkewMatrix) -> Vec<ChordlessCycle> {
    let mut cycles: Vec<ChordlessCycle> = induced_cycles(&adjacency(b))
        .into_iter()
        .map(|vertices| {
            let oriented = is_oriented(b, &vertices);
            ChordlessCycle { vertices, oriented }
        })
        .collect();
    cycles.sort_by(|x, y| {
        (x.vertices.len(), x.vertex_set()).cmp(&(y.vertices.len(), y.vertex_set()))
    });
    cycles
}

/// Every oriented chordless cycle carries an odd number of positive GIM
/// entries `a_{i_j, i_{j+1}}`.
pub fn ordering_satisfies_parity(b: &SkewMatrix, o: &Ordering) -> bool {
    let Ok(gim) = Gim::from_ordering(b, o) else {
        return false;
    };
    chordless_cycles(b).iter().filter(|c| c.oriented).all(|c| {
        c.edges()
            .filter(|&(i, j)| gim.entry(i, j).is_positive())
            .count()
            % 2
            == 1
    })
}
