//! Deterministic Dijkstra over a 4-connected grid with obstacles and
//! direction-dependent edge weights.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

use crate::error::{Error, Result};

/// Weighted lattice. Nodes are (col, row); obstacles block path interiors
/// but never the endpoints themselves.
#[derive(Debug, Clone)]
pub struct GridGraph {
    pub cols: u32,
    pub rows: u32,
    pub obstacles: BTreeSet<(u32, u32)>,
    /// Cost of a horizontal step.
    pub h_cost: f64,
    /// Cost of a vertical step.
    pub v_cost: f64,
}

impl GridGraph {
    pub fn open(cols: u32, rows: u32) -> Self {
        GridGraph { cols, rows, obstacles: BTreeSet::new(), h_cost: 1.0, v_cost: 1.0 }
    }

    pub fn contains(&self, node: (u32, u32)) -> bool {
        node.0 < self.cols && node.1 < self.rows
    }

    fn id(&self, node: (u32, u32)) -> u64 {
        node.1 as u64 * self.cols as u64 + node.0 as u64
    }
}

#[derive(Debug, Clone, Copy)]
struct QueueEntry {
    cost: f64,
    id: u64,
    node: (u32, u32),
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cost == other.cost && self.id == other.id
    }
}
impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on (cost, id): reverse the natural order.
        other
            .cost
            .total_cmp(&self.cost)
            .then(other.id.cmp(&self.id))
    }
}
impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn search(
    g: &GridGraph,
    src: (u32, u32),
    goal: impl Fn((u32, u32)) -> bool,
) -> Result<(Vec<(u32, u32)>, f64)> {
    if !g.contains(src) {
        return Err(Error::Invalid(format!("source {src:?} off grid")));
    }
    if goal(src) {
        return Ok((vec![src], 0.0));
    }
    let n = (g.cols as usize) * (g.rows as usize);
    let mut dist = vec![f64::INFINITY; n];
    let mut parent: Vec<Option<(u32, u32)>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[g.id(src) as usize] = 0.0;
    heap.push(QueueEntry { cost: 0.0, id: g.id(src), node: src });

    while let Some(QueueEntry { cost, node, .. }) = heap.pop() {
        let nid = g.id(node) as usize;
        if cost > dist[nid] {
            continue;
        }
        if goal(node) {
            let mut path = vec![node];
            let mut cur = node;
            while let Some(p) = parent[g.id(cur) as usize] {
                path.push(p);
                cur = p;
            }
            path.reverse();
            return Ok((path, cost));
        }
        // Vertical neighbors first, then horizontal.
        let (c, r) = node;
        let mut neighbors: [Option<((u32, u32), f64)>; 4] = [None, None, None, None];
        if r > 0 {
            neighbors[0] = Some(((c, r - 1), g.v_cost));
        }
        if r + 1 < g.rows {
            neighbors[1] = Some(((c, r + 1), g.v_cost));
        }
        if c > 0 {
            neighbors[2] = Some(((c - 1, r), g.h_cost));
        }
        if c + 1 < g.cols {
            neighbors[3] = Some(((c + 1, r), g.h_cost));
        }
        for (next, step) in neighbors.into_iter().flatten() {
            // Interior nodes must be free; goal nodes are always allowed.
            if g.obstacles.contains(&next) && !goal(next) {
                continue;
            }
            let nd = cost + step;
            let idx = g.id(next) as usize;
            if nd < dist[idx] {
                dist[idx] = nd;
                parent[idx] = Some(node);
                heap.push(QueueEntry { cost: nd, id: g.id(next), node: next });
            }
        }
    }
    Err(Error::Unreachable)
}

/// Minimum-cost 4-connected path from `src` to `dst`, avoiding obstacles in
/// the interior. Endpoints may sit on obstacle cells.
pub fn grid_shortest_path(
    g: &GridGraph,
    src: (u32, u32),
    dst: (u32, u32),
) -> Result<(Vec<(u32, u32)>, f64)> {
    if !g.contains(dst) {
        return Err(Error::Invalid(format!("destination {dst:?} off grid")));
    }
    search(g, src, |n| n == dst)
}

/// Minimum-cost path from `src` to the nearest member of `targets`.
pub fn grid_shortest_path_to_set(
    g: &GridGraph,
    src: (u32, u32),
    targets: &BTreeSet<(u32, u32)>,
) -> Result<(Vec<(u32, u32)>, f64)> {
    if targets.is_empty() {
        return Err(Error::Unreachable);
    }
    search(g, src, |n| targets.contains(&n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::VecDeque;

    /// Exhaustive BFS oracle for unit-weight grids.
    pub(crate) fn bfs_cost(g: &GridGraph, src: (u32, u32), dst: (u32, u32)) -> Option<usize> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        queue.push_back((src, 0usize));
        seen.insert(src);
        while let Some((node, d)) = queue.pop_front() {
            if node == dst {
                return Some(d);
            }
            let (c, r) = node;
            let mut next = Vec::new();
            if r > 0 {
                next.push((c, r - 1));
            }
            if r + 1 < g.rows {
                next.push((c, r + 1));
            }
            if c > 0 {
                next.push((c - 1, r));
            }
            if c + 1 < g.cols {
                next.push((c + 1, r));
            }
            for n in next {
                if (g.obstacles.contains(&n) && n != dst) || !seen.insert(n) {
                    continue;
                }
                queue.push_back((n, d + 1));
            }
        }
        None
    }

    fn assert_valid_path(g: &GridGraph, path: &[(u32, u32)]) {
        for w in path.windows(2) {
            let dc = w[0].0.abs_diff(w[1].0);
            let dr = w[0].1.abs_diff(w[1].1);
            assert_eq!(dc + dr, 1, "non-adjacent step {w:?}");
        }
        for node in &path[1..path.len().saturating_sub(1)] {
            assert!(!g.obstacles.contains(node), "path crosses obstacle {node:?}");
        }
    }

    #[test]
    fn identity_path() {
        let g = GridGraph::open(3, 3);
        let (path, cost) = grid_shortest_path(&g, (1, 1), (1, 1)).unwrap();
        assert_eq!(path, vec![(1, 1)]);
        assert_eq!(cost, 0.0);
    }

    #[test]
    fn open_grid_manhattan() {
        let g = GridGraph::open(3, 3);
        let (path, cost) = grid_shortest_path(&g, (0, 0), (2, 2)).unwrap();
        assert_eq!(cost, 4.0);
        assert_eq!(path.len(), 5);
        assert_valid_path(&g, &path);
    }

    #[test]
    fn wall_detour_matches_bfs() {
        let mut g = GridGraph::open(5, 5);
        for r in 0..4 {
            g.obstacles.insert((2, r));
        }
        let (path, cost) = grid_shortest_path(&g, (0, 0), (4, 0)).unwrap();
        assert_valid_path(&g, &path);
        let oracle = bfs_cost(&g, (0, 0), (4, 0)).unwrap();
        assert_eq!(cost, oracle as f64);
    }

    #[test]
    fn unreachable_reported() {
        let mut g = GridGraph::open(3, 1);
        g.obstacles.insert((1, 0));
        assert!(matches!(
            grid_shortest_path(&g, (0, 0), (2, 0)),
            Err(Error::Unreachable)
        ));
    }

    #[test]
    fn random_grids_match_bfs() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let mut g = GridGraph::open(10, 10);
            for c in 0..10 {
                for r in 0..10 {
                    if rng.gen_bool(0.25) {
                        g.obstacles.insert((c, r));
                    }
                }
            }
            let src = (rng.gen_range(0..10), rng.gen_range(0..10));
            let dst = (rng.gen_range(0..10), rng.gen_range(0..10));
            g.obstacles.remove(&src);
            g.obstacles.remove(&dst);
            match (grid_shortest_path(&g, src, dst), bfs_cost(&g, src, dst)) {
                (Ok((path, cost)), Some(oracle)) => {
                    assert_valid_path(&g, &path);
                    assert_eq!(cost, oracle as f64);
                }
                (Err(Error::Unreachable), None) => {}
                (got, oracle) => panic!("mismatch: {got:?} vs oracle {oracle:?}"),
            }
        }
    }

    #[test]
    fn vertical_weight_respected() {
        let mut g = GridGraph::open(4, 4);
        g.v_cost = 2.0;
        let (_, cost) = grid_shortest_path(&g, (0, 0), (3, 3)).unwrap();
        assert_eq!(cost, 3.0 + 6.0);
    }

    #[test]
    fn deterministic_paths() {
        let mut g = GridGraph::open(8, 8);
        g.obstacles.insert((3, 3));
        g.obstacles.insert((4, 2));
        let a = grid_shortest_path(&g, (0, 0), (7, 7)).unwrap();
        let b = grid_shortest_path(&g, (0, 0), (7, 7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn multi_target_picks_nearest() {
        let g = GridGraph::open(6, 6);
        let targets: BTreeSet<(u32, u32)> = [(5, 0), (1, 1)].into_iter().collect();
        let (path, cost) = grid_shortest_path_to_set(&g, (0, 0), &targets).unwrap();
        assert_eq!(cost, 2.0);
        assert_eq!(*path.last().unwrap(), (1, 1));
    }
}
