//! Orderings whose GIM puts an odd number of positive entries on every
//! oriented chordless cycle: a constructive spanning-tree search and an
//! exhaustive oracle.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use num_traits::Signed;

use super::cycles::{adjacency, chordless_cycles, ordering_satisfies_parity};
use super::{all_orderings, Ordering};
use crate::error::{Error, Result};
use crate::matrix::SkewMatrix;

pub const BRUTE_FORCE_MAX_RANK: usize = 8;

/// Cap on the number of edge-order extensions tried across all trees.
const SEARCH_NODE_BUDGET: usize = 200_000;

type Edge = (usize, usize);

fn undirected_edges(b: &SkewMatrix) -> Vec<Edge> {
    let n = b.rank();
    let adj = adjacency(b);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if adj[i][j] {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// `Some(true)` if the arrow of `{i, j}` in the digraph `G` (arrow `i → j`
/// iff `b_ij < 0`) points from `i` to `j`.
fn points_forward(b: &SkewMatrix, i: usize, j: usize) -> bool {
    b.entry(i, j).is_negative()
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    r
}

fn components(n: usize, edges: &[Edge]) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    let mut count = n;
    for &(u, v) in edges {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
            count -= 1;
        }
    }
    count
}

/// Spanning forests of the nonzero pattern of `B`, enumerated by
/// edge-lexicographic backtracking (edges sorted as pairs `i < j`).
pub fn spanning_trees(b: &SkewMatrix) -> impl Iterator<Item = Vec<Edge>> {
    let n = b.rank();
    let edges = undirected_edges(b);
    let target = n - components(n, &edges);
    TreeIter::new(n, edges, target)
}

struct TreeIter {
    n: usize,
    edges: Vec<Edge>,
    target: usize,
    // Each frame: (next edge index to decide, chosen edges so far).
    stack: Vec<(usize, Vec<usize>)>,
}

impl TreeIter {
    fn new(n: usize, edges: Vec<Edge>, target: usize) -> Self {
        Self {
            n,
            edges,
            target,
            stack: vec![(0, Vec::new())],
        }
    }

    fn creates_cycle(&self, chosen: &[usize], e: usize) -> bool {
        let mut parent: Vec<usize> = (0..self.n).collect();
        for &c in chosen {
            let (u, v) = self.edges[c];
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            parent[ru] = rv;
        }
        let (u, v) = self.edges[e];
        find(&mut parent, u) == find(&mut parent, v)
    }
}

impl Iterator for TreeIter {
    type Item = Vec<Edge>;

    fn next(&mut self) -> Option<Vec<Edge>> {
        while let Some((idx, chosen)) = self.stack.pop() {
            if chosen.len() == self.target {
                return Some(chosen.iter().map(|&e| self.edges[e]).collect());
            }
            if idx >= self.edges.len() || self.edges.len() - idx < self.target - chosen.len() {
                continue;
            }
            // Push "exclude" first so "include" is explored first.
            self.stack.push((idx + 1, chosen.clone()));
            if !self.creates_cycle(&chosen, idx) {
                let mut with = chosen;
                with.push(idx);
                self.stack.push((idx + 1, with));
            }
        }
        None
    }
}

/// Graph on `n` vertices with an explicit edge set.
struct EdgeGraph {
    adj: Vec<Vec<bool>>,
}

impl EdgeGraph {
    fn new(n: usize, edges: &[Edge]) -> Self {
        let mut adj = vec![vec![false; n]; n];
        for &(u, v) in edges {
            adj[u][v] = true;
            adj[v][u] = true;
        }
        Self { adj }
    }

    /// Induced cycles through the edge `{u, v}`, returned as vertex lists
    /// starting `u, …, v`.
    fn induced_cycles_through(&self, u: usize, v: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut path = vec![u];
        self.paths(v, &mut path, &mut out);
        out
    }

    fn paths(&self, v: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        for w in 0..self.adj.len() {
            if w == v || !self.adj[last][w] || path.contains(&w) {
                continue;
            }
            // Interior vertices may touch only their path neighbours.
            if path[..path.len() - 1].iter().any(|&p| self.adj[p][w]) {
                continue;
            }
            if self.adj[w][v] {
                let mut cycle = path.clone();
                cycle.extend([w, v]);
                out.push(cycle);
                continue;
            }
            path.push(w);
            self.paths(v, path, out);
            path.pop();
        }
    }
}

fn is_chordless_in(adj: &[Vec<bool>], cycle: &[usize]) -> bool {
    let d = cycle.len();
    for x in 0..d {
        for y in (x + 1)..d {
            let consecutive = y == x + 1 || (x == 0 && y == d - 1);
            if !consecutive && adj[cycle[x]][cycle[y]] {
                return false;
            }
        }
    }
    true
}

fn cycle_edges(cycle: &[usize]) -> Vec<Edge> {
    let d = cycle.len();
    (0..d).map(|j| norm(cycle[j], cycle[(j + 1) % d])).collect()
}

fn norm(u: usize, v: usize) -> Edge {
    (u.min(v), u.max(v))
}

/// Whether the cycle is oriented when the arrows of the edges in `reversed`
/// are flipped.
fn oriented_with(b: &SkewMatrix, cycle: &[usize], reversed: &BTreeSet<Edge>) -> bool {
    let d = cycle.len();
    let dirs: BTreeSet<bool> = (0..d)
        .map(|j| {
            let (x, y) = (cycle[j], cycle[(j + 1) % d]);
            points_forward(b, x, y) ^ reversed.contains(&norm(x, y))
        })
        .collect();
    dirs.len() == 1
}

/// Lexicographically smallest topological order of `G` with the arrows in
/// `reversed` flipped, or `None` if that digraph has a cycle.
fn topological_order(b: &SkewMatrix, reversed: &BTreeSet<Edge>) -> Option<Vec<usize>> {
    let n = b.rank();
    let mut succ = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for (i, j) in undirected_edges(b) {
        let forward = points_forward(b, i, j) ^ reversed.contains(&(i, j));
        let (from, to) = if forward { (i, j) } else { (j, i) };
        succ[from].push(to);
        indeg[to] += 1;
    }
    let mut heap: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&v| indeg[v] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(v)) = heap.pop() {
        order.push(v);
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                heap.push(Reverse(w));
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Runs the reversal-set construction for one spanning tree.
///
/// The non-tree edges are added one at a time in an order where every
/// chordless cycle of the partial graph stays chordless in `G` and the new
/// edge closes exactly one such cycle `C_i`. Edge `e_i` is reversed when
/// `C_i` becomes oriented with the earlier reversals applied, or when `C_i`
/// is oriented in `G` and an even number of its edges were already reversed.
/// Returns the linear extension of the resulting acyclic digraph if its GIM
/// passes the parity check.
pub fn admissible_ordering_from_tree(b: &SkewMatrix, tree: &[Edge]) -> Option<Ordering> {
    let mut budget = SEARCH_NODE_BUDGET;
    from_tree(b, tree, &mut budget)
}

fn from_tree(b: &SkewMatrix, tree: &[Edge], budget: &mut usize) -> Option<Ordering> {
    let n = b.rank();
    let g_adj = adjacency(b);
    let tree: Vec<Edge> = tree.iter().map(|&(u, v)| norm(u, v)).collect();
    let rest: Vec<Edge> = undirected_edges(b)
        .into_iter()
        .filter(|e| !tree.contains(e))
        .collect();
    let mut placed = Vec::new();
    let mut reversed = BTreeSet::new();
    let mut used = vec![false; rest.len()];
    order_extra_edges(
        b,
        &g_adj,
        n,
        &tree,
        &rest,
        &mut used,
        &mut placed,
        &mut reversed,
        budget,
    )
}

#[allow(clippy::too_many_arguments)]
fn order_extra_edges(
    b: &SkewMatrix,
    g_adj: &[Vec<bool>],
    n: usize,
    tree: &[Edge],
    rest: &[Edge],
    used: &mut [bool],
    placed: &mut Vec<Edge>,
    reversed: &mut BTreeSet<Edge>,
    budget: &mut usize,
) -> Option<Ordering> {
    if placed.len() == rest.len() {
        let order = topological_order(b, reversed)?;
        let ordering = Ordering::from_chain(&order).ok()?;
        return ordering_satisfies_parity(b, &ordering).then_some(ordering);
    }
    for idx in 0..rest.len() {
        if used[idx] {
            continue;
        }
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        let (u, v) = rest[idx];
        let mut edges: Vec<Edge> = tree.to_vec();
        edges.extend(placed.iter().copied());
        edges.push((u, v));
        let partial = EdgeGraph::new(n, &edges);
        let through = partial.induced_cycles_through(u, v);
        if through.len() != 1 || !is_chordless_in(g_adj, &through[0]) {
            continue;
        }
        let cycle = &through[0];
        let cyc_edges = cycle_edges(cycle);
        let rule_one = oriented_with(b, cycle, reversed);
        let already = cyc_edges.iter().filter(|e| reversed.contains(e)).count();
        let rule_two = oriented_with(b, cycle, &BTreeSet::new()) && already % 2 == 0;
        let take = rule_one || rule_two;

        used[idx] = true;
        placed.push((u, v));
        if take {
            reversed.insert((u, v));
        }
        let found = order_extra_edges(b, g_adj, n, tree, rest, used, placed, reversed, budget);
        if take {
            reversed.remove(&(u, v));
        }
        placed.pop();
        used[idx] = false;
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Searches spanning trees of `G` that contain an edge of every oriented
/// chordless cycle and returns the first ordering the reversal construction
/// certifies. When no tree works (dense graphs where added edges close
/// several cycles at once) and the rank allows it, falls back to the first
/// ordering found by exhaustive search.
pub fn find_admissible_ordering(b: &SkewMatrix) -> Option<Ordering> {
    construct_admissible_ordering(b).or_else(|| {
        brute_force_ordering_search(b)
            .ok()
            .and_then(|all| all.into_iter().next())
    })
}

/// The spanning-tree construction alone, without the exhaustive fallback.
pub fn construct_admissible_ordering(b: &SkewMatrix) -> Option<Ordering> {
    let oriented: Vec<BTreeSet<Edge>> = chordless_cycles(b)
        .into_iter()
        .filter(|c| c.oriented)
        .map(|c| cycle_edges(&c.vertices).into_iter().collect())
        .collect();
    let mut budget = SEARCH_NODE_BUDGET;
    for tree in spanning_trees(b) {
        if budget == 0 {
            break;
        }
        let covers = oriented
            .iter()
            .all(|cyc| tree.iter().any(|e| cyc.contains(e)));
        if !covers {
            continue;
        }
        if let Some(o) = from_tree(b, &tree, &mut budget) {
            return Some(o);
        }
    }
    None
}

/// Every ordering passing the parity check, in lexicographic chain order.
pub fn brute_force_ordering_search(b: &SkewMatrix) -> Result<Vec<Ordering>> {
    let n = b.rank();
    if n > BRUTE_FORCE_MAX_RANK {
        return Err(Error::RankTooLarge {
            rank: n,
            limit: BRUTE_FORCE_MAX_RANK,
        });
    }
    Ok(all_orderings(n)
        .filter(|o| ordering_satisfies_parity(b, o))
        .collect())
}
