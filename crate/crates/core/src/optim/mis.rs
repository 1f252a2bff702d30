//! Greedy maximal independent set over a conflict graph.

use std::collections::BTreeSet;

/// Simple undirected graph over vertex ids `0..n`.
#[derive(Debug, Clone, Default)]
pub struct ConflictGraph {
    adj: Vec<BTreeSet<usize>>,
}

impl ConflictGraph {
    pub fn new(n: usize) -> Self {
        ConflictGraph { adj: vec![BTreeSet::new(); n] }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    /// Self-loops are ignored.
    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.adj[a].insert(b);
        self.adj[b].insert(a);
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj.get(a).is_some_and(|s| s.contains(&b))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|s| s.len()).sum::<usize>() / 2
    }
}

/// Greedy maximal independent set.
///
/// Vertices are taken in descending weight, then ascending degree, then
/// ascending id; a vertex joins the set when none of its neighbors has.
/// The result is always independent and maximal. Returned sorted ascending.
pub fn greedy_mis(g: &ConflictGraph, weight: Option<&[f64]>) -> Vec<usize> {
    let n = g.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let wa = weight.map(|w| w[a]).unwrap_or(0.0);
        let wb = weight.map(|w| w[b]).unwrap_or(0.0);
        wb.partial_cmp(&wa)
            .unwrap()
            .then(g.degree(a).cmp(&g.degree(b)))
            .then(a.cmp(&b))
    });
    let mut selected = vec![false; n];
    let mut blocked = vec![false; n];
    let mut out = Vec::new();
    for v in order {
        if blocked[v] {
            continue;
        }
        selected[v] = true;
        out.push(v);
        for u in g.neighbors(v) {
            blocked[u] = true;
        }
    }
    debug_assert!(out.iter().all(|&v| selected[v]));
    out.sort_unstable();
    out
}
