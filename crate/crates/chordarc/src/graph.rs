//! Weighted-graph primitives: Dijkstra, hop BFS, union-find.
//!
//! All algorithms work on adjacency lists indexed by dense vertex ids and
//! use `f64::total_cmp` ordering so results are deterministic.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Adjacency list: `adj[v]` lists `(neighbor, edge_length)`.
pub type Adjacency = Vec<Vec<(u32, f64)>>;

#[derive(Copy, Clone, PartialEq)]
struct HeapEntry {
    dist: f64,
    node: u32,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed for a min-heap; ties broken by node id for determinism.
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub const UNREACHED: u32 = u32::MAX;

/// Multi-source Dijkstra. Returns per-vertex distance (`f64::INFINITY` when
/// unreachable) and predecessor (`UNREACHED` for sources and unreachable
/// vertices).
pub fn dijkstra(adj: &Adjacency, sources: &[u32]) -> (Vec<f64>, Vec<u32>) {
    dijkstra_filtered(adj, sources, |_| true)
}

/// Dijkstra restricted to vertices accepted by `allow`.
pub fn dijkstra_filtered(
    adj: &Adjacency,
    sources: &[u32],
    allow: impl Fn(u32) -> bool,
) -> (Vec<f64>, Vec<u32>) {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![UNREACHED; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        if allow(s) {
            dist[s as usize] = 0.0;
            heap.push(HeapEntry { dist: 0.0, node: s });
        }
    }
    while let Some(HeapEntry { dist: d, node: u }) = heap.pop() {
        if d > dist[u as usize] {
            continue;
        }
        for &(v, w) in &adj[u as usize] {
            if !allow(v) {
                continue;
            }
            let nd = d + w;
            if nd < dist[v as usize] {
                dist[v as usize] = nd;
                pred[v as usize] = u;
                heap.push(HeapEntry { dist: nd, node: v });
            }
        }
    }
    (dist, pred)
}

/// Dijkstra where every vertex carries an entry cost in addition to edge
/// lengths being ignored; the path cost is the sum of vertex costs along the
/// path including both endpoints. Ties are broken by fewer hops.
pub fn dijkstra_node_cost(
    neighbors: impl Fn(u32, &mut Vec<u32>),
    n: usize,
    start: u32,
    node_cost: &[f64],
) -> (Vec<f64>, Vec<u32>, Vec<u32>) {
    #[derive(Copy, Clone, PartialEq)]
    struct Entry {
        cost: f64,
        hops: u32,
        node: u32,
    }
    impl Eq for Entry {}
    impl Ord for Entry {
        fn cmp(&self, other: &Self) -> Ordering {
            other
                .cost
                .total_cmp(&self.cost)
                .then_with(|| other.hops.cmp(&self.hops))
                .then_with(|| other.node.cmp(&self.node))
        }
    }
    impl PartialOrd for Entry {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }

    let mut cost = vec![f64::INFINITY; n];
    let mut hops = vec![u32::MAX; n];
    let mut pred = vec![UNREACHED; n];
    let mut heap = BinaryHeap::new();
    cost[start as usize] = node_cost[start as usize];
    hops[start as usize] = 0;
    heap.push(Entry { cost: cost[start as usize], hops: 0, node: start });
    let mut buf = Vec::new();
    while let Some(Entry { cost: c, hops: h, node: u }) = heap.pop() {
        if c > cost[u as usize] || (c == cost[u as usize] && h > hops[u as usize]) {
            continue;
        }
        buf.clear();
        neighbors(u, &mut buf);
        for &v in &buf {
            let nc = c + node_cost[v as usize];
            let nh = h + 1;
            let better = nc < cost[v as usize]
                || (nc == cost[v as usize] && nh < hops[v as usize])
                || (nc == cost[v as usize] && nh == hops[v as usize] && u < pred[v as usize]);
            if better {
                cost[v as usize] = nc;
                hops[v as usize] = nh;
                pred[v as usize] = u;
                heap.push(Entry { cost: nc, hops: nh, node: v });
            }
        }
    }
    (cost, hops, pred)
}

/// Hop-count BFS over an implicit neighbor function.
pub fn bfs_hops(
    neighbors: impl Fn(u32, &mut Vec<u32>),
    n: usize,
    start: u32,
) -> (Vec<u32>, Vec<u32>) {
    let mut hops = vec![u32::MAX; n];
    let mut pred = vec![UNREACHED; n];
    let mut queue = std::collections::VecDeque::new();
    hops[start as usize] = 0;
    queue.push_back(start);
    let mut buf = Vec::new();
    while let Some(u) = queue.pop_front() {
        buf.clear();
        neighbors(u, &mut buf);
        for &v in &buf {
            if hops[v as usize] == u32::MAX {
                hops[v as usize] = hops[u as usize] + 1;
                pred[v as usize] = u;
                queue.push_back(v);
            }
        }
    }
    (hops, pred)
}

/// Reconstruct the path to `target` from a predecessor array. The path is
/// returned source-first; `None` when the target was never reached.
pub fn path_to(pred: &[u32], target: u32) -> Option<Vec<u32>> {
    let mut path = vec![target];
    let mut cur = target;
    while pred[cur as usize] != UNREACHED {
        cur = pred[cur as usize];
        path.push(cur);
        if path.len() > pred.len() {
            return None; // cycle guard
        }
    }
    path.reverse();
    Some(path)
}

/// Union-find with path halving and union by size.
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            self.parent[x as usize] = self.parent[self.parent[x as usize] as usize];
            x = self.parent[x as usize];
        }
        x
    }

    /// Returns the surviving root, or `None` if already joined.
    pub fn union(&mut self, a: u32, b: u32) -> Option<(u32, u32)> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        let (big, small) = if self.size[ra as usize] >= self.size[rb as usize] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
        Some((big, small))
    }

    pub fn same(&mut self, a: u32, b: u32) -> bool {
        self.find(a) == self.find(b)
    }
}
