//! Finite metric spaces, nets, neighborhood graphs, the induced path metric,
//! and Hausdorff-measure proxies.
//!
//! A [`FiniteMetricSpace`] is immutable after construction and safe to share
//! across threads. Distances come from a backend (full matrix, coordinates
//! with a named metric, or a custom closure); an `h`-neighborhood graph is
//! built once and drives every connectivity question. The induced path
//! metric `d'` lives in [`PathMetricSpace`] and is computed by Dijkstra on
//! demand, one source at a time, with caching.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{GeomError, Result};
use crate::graph::{self, Adjacency};

pub type PointId = usize;

/// Named metrics for coordinate-backed spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordMetric {
    Euclidean,
    Manhattan,
}

/// Where distances come from.
pub enum DistanceSource {
    /// Row-major square matrix.
    Matrix(Vec<f64>),
    /// Points in up-to-3-dimensional space with a named metric.
    Coords(Vec<[f64; 3]>, CoordMetric),
    /// Weighted undirected edges; the metric is completed by shortest paths.
    Edges { n: usize, edges: Vec<(usize, usize, f64)> },
    /// Arbitrary symmetric distance function (used by exotic fixtures).
    Custom(usize, Arc<dyn Fn(usize, usize) -> f64 + Send + Sync>),
}

enum Backend {
    Matrix { n: usize, d: Arc<Vec<f64>> },
    Coords { pts: Arc<Vec<[f64; 3]>>, metric: CoordMetric },
    Custom { n: usize, f: Arc<dyn Fn(usize, usize) -> f64 + Send + Sync> },
}

impl Backend {
    fn len(&self) -> usize {
        match self {
            Backend::Matrix { n, .. } => *n,
            Backend::Coords { pts, .. } => pts.len(),
            Backend::Custom { n, .. } => *n,
        }
    }

    #[inline]
    fn dist(&self, i: usize, j: usize) -> f64 {
        match self {
            Backend::Matrix { n, d } => d[i * n + j],
            Backend::Coords { pts, metric } => {
                let (a, b) = (pts[i], pts[j]);
                match metric {
                    CoordMetric::Euclidean => {
                        let dx = a[0] - b[0];
                        let dy = a[1] - b[1];
                        let dz = a[2] - b[2];
                        (dx * dx + dy * dy + dz * dz).sqrt()
                    }
                    CoordMetric::Manhattan => {
                        (a[0] - b[0]).abs() + (a[1] - b[1]).abs() + (a[2] - b[2]).abs()
                    }
                }
            }
            Backend::Custom { f, .. } => f(i, j),
        }
    }
}

/// A finite metric space with its h-neighborhood graph.
pub struct FiniteMetricSpace {
    backend: Backend,
    n: usize,
    chart: Option<Vec<[f64; 2]>>,
    weight2: Option<Vec<f64>>,
    connect_radius: f64,
    spacing: f64,
    diameter: f64,
    adjacency: Adjacency,
    buckets: Option<BucketGrid>,
}

/// Uniform bucket grid over 3D coordinates for radius queries.
struct BucketGrid {
    cell: f64,
    map: HashMap<(i64, i64, i64), Vec<u32>>,
    pts: Arc<Vec<[f64; 3]>>,
}

impl BucketGrid {
    fn build(pts: &Arc<Vec<[f64; 3]>>, cell: f64) -> Self {
        let mut map: HashMap<(i64, i64, i64), Vec<u32>> = HashMap::new();
        for (i, p) in pts.iter().enumerate() {
            map.entry(Self::key(p, cell)).or_default().push(i as u32);
        }
        BucketGrid { cell, map, pts: pts.clone() }
    }

    #[inline]
    fn key(p: &[f64; 3], cell: f64) -> (i64, i64, i64) {
        (
            (p[0] / cell).floor() as i64,
            (p[1] / cell).floor() as i64,
            (p[2] / cell).floor() as i64,
        )
    }

    /// All point ids with Euclidean distance <= r from point i (includes i).
    fn within(&self, i: usize, r: f64, out: &mut Vec<u32>) {
        let p = self.pts[i];
        let span = (r / self.cell).ceil() as i64 + 1;
        let (kx, ky, kz) = Self::key(&p, self.cell);
        let r2 = r * r;
        for dx in -span..=span {
            for dy in -span..=span {
                for dz in -span..=span {
                    if let Some(cellpts) = self.map.get(&(kx + dx, ky + dy, kz + dz)) {
                        for &j in cellpts {
                            let q = self.pts[j as usize];
                            let (ex, ey, ez) = (p[0] - q[0], p[1] - q[1], p[2] - q[2]);
                            if ex * ex + ey * ey + ez * ez <= r2 {
                                out.push(j);
                            }
                        }
                    }
                }
            }
        }
        out.sort_unstable();
    }
}

/// Triangle-inequality audit policy.
#[derive(Debug, Clone, Copy)]
pub enum TriangleAudit {
    /// Full check below 300 points, otherwise up to 1e5 sampled triples.
    Default,
    /// Skip entirely (trusted constructions such as fixture generators).
    Skip,
}

/// Builder for [`FiniteMetricSpace`]; see [`build_space`].
pub struct SpaceBuilder {
    source: DistanceSource,
    chart: Option<Vec<[f64; 2]>>,
    weight2: Option<Vec<f64>>,
    connect_radius: Option<f64>,
    audit: TriangleAudit,
    audit_seed: u64,
}

impl SpaceBuilder {
    pub fn new(source: DistanceSource) -> Self {
        SpaceBuilder {
            source,
            chart: None,
            weight2: None,
            connect_radius: None,
            audit: TriangleAudit::Default,
            audit_seed: 0,
        }
    }

    pub fn chart(mut self, chart: Vec<[f64; 2]>) -> Self {
        self.chart = Some(chart);
        self
    }

    pub fn weight2(mut self, w: Vec<f64>) -> Self {
        self.weight2 = Some(w);
        self
    }

    /// Neighborhood-graph scale; defaults to 3x the median nearest-neighbor
    /// spacing.
    pub fn connect_radius(mut self, h: f64) -> Self {
        self.connect_radius = Some(h);
        self
    }

    pub fn audit(mut self, audit: TriangleAudit) -> Self {
        self.audit = audit;
        self
    }

    pub fn build(self) -> Result<FiniteMetricSpace> {
        let backend = match self.source {
            DistanceSource::Matrix(d) => {
                let n = (d.len() as f64).sqrt().round() as usize;
                if n * n != d.len() {
                    return Err(GeomError::RaggedMatrix { rows: n, cols: d.len(), row: 0 });
                }
                if n == 0 {
                    return Err(GeomError::EmptyInput("empty distance matrix".into()));
                }
                for i in 0..n {
                    if d[i * n + i] != 0.0 {
                        return Err(GeomError::NonzeroDiagonal { i, d: d[i * n + i] });
                    }
                    for j in (i + 1)..n {
                        let (dij, dji) = (d[i * n + j], d[j * n + i]);
                        if !dij.is_finite() || dij < 0.0 {
                            return Err(GeomError::BadDistance { i, j, d: dij });
                        }
                        let tol = 1e-9 * dij.abs().max(1.0);
                        if (dij - dji).abs() > tol {
                            return Err(GeomError::Asymmetric { i, j, dij, dji });
                        }
                        if dij == 0.0 {
                            return Err(GeomError::ZeroDistance { i, j });
                        }
                    }
                }
                Backend::Matrix { n, d: Arc::new(d) }
            }
            DistanceSource::Coords(pts, metric) => {
                if pts.is_empty() {
                    return Err(GeomError::EmptyInput("empty coordinate list".into()));
                }
                for p in &pts {
                    if !p.iter().all(|c| c.is_finite()) {
                        return Err(GeomError::InvalidParameter(
                            "non-finite coordinate".into(),
                        ));
                    }
                }
                Backend::Coords { pts: Arc::new(pts), metric }
            }
            DistanceSource::Edges { n, edges } => {
                if n == 0 {
                    return Err(GeomError::EmptyInput("empty edge-list space".into()));
                }
                if n > 2048 {
                    return Err(GeomError::Unsupported(format!(
                        "edge-list metric completion capped at 2048 points, got {n}"
                    )));
                }
                let mut adj: Adjacency = vec![Vec::new(); n];
                for &(a, b, w) in &edges {
                    if a >= n || b >= n || !w.is_finite() || w <= 0.0 {
                        return Err(GeomError::BadDistance { i: a, j: b, d: w });
                    }
                    adj[a].push((b as u32, w));
                    adj[b].push((a as u32, w));
                }
                let mut d = vec![0.0; n * n];
                for i in 0..n {
                    let (dist, _) = graph::dijkstra(&adj, &[i as u32]);
                    if dist.iter().any(|x| x.is_infinite()) {
                        let comps = count_components(&adj);
                        return Err(GeomError::DisconnectedEdges { components: comps });
                    }
                    d[i * n..(i + 1) * n].copy_from_slice(&dist);
                }
                // Symmetrize roundoff from per-source runs.
                for i in 0..n {
                    for j in (i + 1)..n {
                        let m = 0.5 * (d[i * n + j] + d[j * n + i]);
                        d[i * n + j] = m;
                        d[j * n + i] = m;
                    }
                }
                Backend::Matrix { n, d: Arc::new(d) }
            }
            DistanceSource::Custom(n, f) => {
                if n == 0 {
                    return Err(GeomError::EmptyInput("empty custom space".into()));
                }
                Backend::Custom { n, f }
            }
        };

        let n = backend.len();
        if let Some(chart) = &self.chart {
            if chart.len() != n {
                return Err(GeomError::InvalidParameter(format!(
                    "chart has {} entries for {} points",
                    chart.len(),
                    n
                )));
            }
            let mut seen: HashMap<(u64, u64), usize> = HashMap::new();
            for (i, c) in chart.iter().enumerate() {
                let key = (c[0].to_bits(), c[1].to_bits());
                if let Some(&j) = seen.get(&key) {
                    return Err(GeomError::ChartNotInjective { i, j });
                }
                seen.insert(key, i);
            }
        }
        if let Some(w) = &self.weight2 {
            if w.len() != n {
                return Err(GeomError::InvalidParameter(format!(
                    "weight2 has {} entries for {} points",
                    w.len(),
                    n
                )));
            }
        }

        // Nearest-neighbor spacing and diameter in one pairwise pass.
        let mut nn = vec![f64::INFINITY; n];
        let mut diameter: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = backend.dist(i, j);
                if d <= 0.0 && !matches!(backend, Backend::Matrix { .. }) {
                    return Err(GeomError::ZeroDistance { i, j });
                }
                if d < nn[i] {
                    nn[i] = d;
                }
                if d < nn[j] {
                    nn[j] = d;
                }
                if d > diameter {
                    diameter = d;
                }
            }
        }
        let spacing = if n > 1 {
            let mut s = nn.clone();
            s.sort_by(f64::total_cmp);
            s[s.len() / 2]
        } else {
            0.0
        };

        audit_triangles(&backend, self.audit, self.audit_seed)?;

        let connect_radius = self.connect_radius.unwrap_or(3.0 * spacing);
        let buckets = match &backend {
            Backend::Coords { pts, metric: CoordMetric::Euclidean } if n > 256 => {
                let cell = if connect_radius > 0.0 { connect_radius } else { 1.0 };
                Some(BucketGrid::build(pts, cell))
            }
            _ => None,
        };

        let adjacency = build_adjacency(&backend, buckets.as_ref(), connect_radius);

        Ok(FiniteMetricSpace {
            backend,
            n,
            chart: self.chart,
            weight2: self.weight2,
            connect_radius,
            spacing,
            diameter,
            adjacency,
            buckets,
        })
    }
}

fn count_components(adj: &Adjacency) -> usize {
    let mut uf = graph::UnionFind::new(adj.len());
    for (i, nbrs) in adj.iter().enumerate() {
        for &(j, _) in nbrs {
            uf.union(i as u32, j);
        }
    }
    let mut roots = std::collections::HashSet::new();
    for i in 0..adj.len() as u32 {
        roots.insert(uf.find(i));
    }
    roots.len()
}

fn build_adjacency(backend: &Backend, buckets: Option<&BucketGrid>, h: f64) -> Adjacency {
    let n = backend.len();
    let mut adj: Adjacency = vec![Vec::new(); n];
    if let Some(grid) = buckets {
        let mut buf = Vec::new();
        for i in 0..n {
            buf.clear();
            grid.within(i, h, &mut buf);
            for &j in &buf {
                if j as usize != i {
                    adj[i].push((j, backend.dist(i, j as usize)));
                }
            }
        }
    } else {
        for i in 0..n {
            for j in 0..n {
                if j != i {
                    let d = backend.dist(i, j);
                    if d <= h {
                        adj[i].push((j as u32, d));
                    }
                }
            }
        }
    }
    for nbrs in &mut adj {
        nbrs.sort_unstable_by_key(|a| a.0);
    }
    adj
}

fn audit_triangles(backend: &Backend, audit: TriangleAudit, seed: u64) -> Result<()> {
    if matches!(audit, TriangleAudit::Skip) {
        return Ok(());
    }
    if matches!(backend, Backend::Coords { .. }) {
        // Norm-induced metrics satisfy the inequality by construction; spot
        // check a handful of triples to catch NaN contamination.
        return check_triples(backend, &sample_triples(backend.len(), 100, seed));
    }
    let n = backend.len();
    if n <= 300 {
        let mut triples = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i != j && j != k && i != k {
                        triples.push((i, j, k));
                    }
                }
            }
        }
        check_triples(backend, &triples)
    } else {
        check_triples(backend, &sample_triples(n, 100_000, seed))
    }
}

fn sample_triples(n: usize, count: usize, seed: u64) -> Vec<(usize, usize, usize)> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7261_6e64);
    let mut out = Vec::with_capacity(count);
    if n < 3 {
        return out;
    }
    while out.len() < count {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        let k = rng.random_range(0..n);
        if i != j && j != k && i != k {
            out.push((i, j, k));
        }
    }
    out
}

fn check_triples(backend: &Backend, triples: &[(usize, usize, usize)]) -> Result<()> {
    for &(i, j, k) in triples {
        let dik = backend.dist(i, k);
        let sum = backend.dist(i, j) + backend.dist(j, k);
        if dik > sum * (1.0 + 1e-9) {
            return Err(GeomError::TriangleViolation { i, j, k, dik, sum });
        }
    }
    Ok(())
}

/// Validated construction from a distance source. Symmetry is enforced, the
/// triangle inequality is audited, and the h-neighborhood graph is built.
pub fn build_space(
    source: DistanceSource,
    chart: Option<Vec<[f64; 2]>>,
    weight2: Option<Vec<f64>>,
    h: Option<f64>,
) -> Result<FiniteMetricSpace> {
    let mut b = SpaceBuilder::new(source);
    if let Some(c) = chart {
        b = b.chart(c);
    }
    if let Some(w) = weight2 {
        b = b.weight2(w);
    }
    if let Some(h) = h {
        b = b.connect_radius(h);
    }
    b.build()
}

impl FiniteMetricSpace {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dist(&self, i: PointId, j: PointId) -> f64 {
        if i == j {
            0.0
        } else {
            self.backend.dist(i, j)
        }
    }

    /// Median nearest-neighbor distance.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Neighborhood-graph scale h.
    pub fn connect_radius(&self) -> f64 {
        self.connect_radius
    }

    pub fn chart(&self) -> Option<&[[f64; 2]]> {
        self.chart.as_deref()
    }

    pub fn chart_point(&self, i: PointId) -> Option<[f64; 2]> {
        self.chart.as_ref().map(|c| c[i])
    }

    pub fn weight2(&self) -> Option<&[f64]> {
        self.weight2.as_deref()
    }

    /// The h-neighborhood graph (edges are pairs at distance <= h).
    pub fn adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    /// Point ids within distance `r` of `i`, sorted by id, excluding `i`.
    pub fn neighbors_within(&self, i: PointId, r: f64) -> Vec<u32> {
        if r <= self.connect_radius {
            return self.adjacency[i]
                .iter()
                .filter(|&&(_, d)| d <= r)
                .map(|&(j, _)| j)
                .collect();
        }
        let mut out = Vec::new();
        if let Some(grid) = &self.buckets {
            grid.within(i, r, &mut out);
            out.retain(|&j| j as usize != i);
        } else {
            for j in 0..self.n {
                if j != i && self.dist(i, j) <= r {
                    out.push(j as u32);
                }
            }
        }
        out
    }

    /// Ids of all points in the closed ball around `i` of radius `r`,
    /// including the center, sorted by id.
    pub fn ball(&self, i: PointId, r: f64) -> Vec<PointId> {
        let mut out: Vec<PointId> =
            self.neighbors_within(i, r).into_iter().map(|j| j as usize).collect();
        out.push(i);
        out.sort_unstable();
        out
    }

    /// Scaled copy: every distance multiplied by `s`, chart and weights
    /// scaled consistently. Certificates and dimensionless constants must be
    /// invariant under this map.
    pub fn rescaled(&self, s: f64) -> FiniteMetricSpace {
        assert!(s > 0.0 && s.is_finite());
        let backend = match &self.backend {
            Backend::Matrix { n, d } => {
                Backend::Matrix { n: *n, d: Arc::new(d.iter().map(|x| x * s).collect()) }
            }
            Backend::Coords { pts, metric } => Backend::Coords {
                pts: Arc::new(
                    pts.iter().map(|p| [p[0] * s, p[1] * s, p[2] * s]).collect(),
                ),
                metric: *metric,
            },
            Backend::Custom { n, f } => {
                let inner = f.clone();
                Backend::Custom { n: *n, f: Arc::new(move |i, j| inner(i, j) * s) }
            }
        };
        let buckets = match &backend {
            Backend::Coords { pts, metric: CoordMetric::Euclidean } if self.buckets.is_some() => {
                Some(BucketGrid::build(pts, self.connect_radius * s))
            }
            _ => None,
        };
        let adjacency = self
            .adjacency
            .iter()
            .map(|nbrs| nbrs.iter().map(|&(j, d)| (j, d * s)).collect())
            .collect();
        FiniteMetricSpace {
            backend,
            n: self.n,
            chart: self
                .chart
                .as_ref()
                .map(|c| c.iter().map(|p| [p[0] * s, p[1] * s]).collect()),
            weight2: self.weight2.as_ref().map(|w| w.iter().map(|x| x * s * s).collect()),
            connect_radius: self.connect_radius * s,
            spacing: self.spacing * s,
            diameter: self.diameter * s,
            adjacency,
            buckets,
        }
    }

    /// Relabeled copy: new point `k` is old point `perm[k]`.
    pub fn permuted(&self, perm: &[PointId]) -> FiniteMetricSpace {
        assert_eq!(perm.len(), self.n);
        let backend = match &self.backend {
            Backend::Matrix { n, d } => {
                let mut nd = vec![0.0; n * n];
                for i in 0..*n {
                    for j in 0..*n {
                        nd[i * n + j] = d[perm[i] * n + perm[j]];
                    }
                }
                Backend::Matrix { n: *n, d: Arc::new(nd) }
            }
            Backend::Coords { pts, metric } => Backend::Coords {
                pts: Arc::new(perm.iter().map(|&old| pts[old]).collect()),
                metric: *metric,
            },
            Backend::Custom { n, f } => {
                let inner = f.clone();
                let map: Arc<Vec<usize>> = Arc::new(perm.to_vec());
                Backend::Custom { n: *n, f: Arc::new(move |i, j| inner(map[i], map[j])) }
            }
        };
        let buckets = match &backend {
            Backend::Coords { pts, metric: CoordMetric::Euclidean } if self.buckets.is_some() => {
                Some(BucketGrid::build(pts, self.connect_radius))
            }
            _ => None,
        };
        let mut inv = vec![0; self.n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut adjacency: Adjacency = vec![Vec::new(); self.n];
        for (new, &old) in perm.iter().enumerate() {
            adjacency[new] = self.adjacency[old]
                .iter()
                .map(|&(j, d)| (inv[j as usize] as u32, d))
                .collect();
            adjacency[new].sort_unstable_by_key(|a| a.0);
        }
        FiniteMetricSpace {
            backend,
            n: self.n,
            chart: self.chart.as_ref().map(|c| perm.iter().map(|&old| c[old]).collect()),
            weight2: self.weight2.as_ref().map(|w| perm.iter().map(|&old| w[old]).collect()),
            connect_radius: self.connect_radius,
            spacing: self.spacing,
            diameter: self.diameter,
            adjacency,
            buckets,
        }
    }

    /// Default scale window for estimator claims: [2 spacing, diam/4].
    pub fn default_window(&self) -> (f64, f64) {
        (2.0 * self.spacing, self.diameter / 4.0)
    }

    /// Sub-space on the given point ids (new id k is old `ids[k]`), keeping
    /// the metric, chart, weights, and connect radius. Used to analyze an
    /// extracted domain as a space in its own right.
    pub fn restricted(&self, ids: &[PointId]) -> FiniteMetricSpace {
        assert!(!ids.is_empty());
        let backend = match &self.backend {
            Backend::Matrix { n, d } => {
                let m = ids.len();
                let mut nd = vec![0.0; m * m];
                for i in 0..m {
                    for j in 0..m {
                        nd[i * m + j] = d[ids[i] * n + ids[j]];
                    }
                }
                Backend::Matrix { n: m, d: Arc::new(nd) }
            }
            Backend::Coords { pts, metric } => Backend::Coords {
                pts: Arc::new(ids.iter().map(|&old| pts[old]).collect()),
                metric: *metric,
            },
            Backend::Custom { f, .. } => {
                let inner = f.clone();
                let map: Arc<Vec<usize>> = Arc::new(ids.to_vec());
                Backend::Custom { n: ids.len(), f: Arc::new(move |i, j| inner(map[i], map[j])) }
            }
        };
        let n = ids.len();
        let mut nn = vec![f64::INFINITY; n];
        let mut diameter: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = backend.dist(i, j);
                if d < nn[i] {
                    nn[i] = d;
                }
                if d < nn[j] {
                    nn[j] = d;
                }
                if d > diameter {
                    diameter = d;
                }
            }
        }
        let spacing = if n > 1 {
            let mut s = nn;
            s.sort_by(f64::total_cmp);
            s[s.len() / 2]
        } else {
            0.0
        };
        let buckets = match &backend {
            Backend::Coords { pts, metric: CoordMetric::Euclidean } if n > 256 => {
                Some(BucketGrid::build(pts, self.connect_radius.max(spacing)))
            }
            _ => None,
        };
        let adjacency = build_adjacency(&backend, buckets.as_ref(), self.connect_radius);
        FiniteMetricSpace {
            backend,
            n,
            chart: self.chart.as_ref().map(|c| ids.iter().map(|&old| c[old]).collect()),
            weight2: self.weight2.as_ref().map(|w| ids.iter().map(|&old| w[old]).collect()),
            connect_radius: self.connect_radius,
            spacing,
            diameter,
            adjacency,
            buckets,
        }
    }
}

impl std::fmt::Debug for FiniteMetricSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteMetricSpace")
            .field("n", &self.n)
            .field("spacing", &self.spacing)
            .field("diameter", &self.diameter)
            .field("connect_radius", &self.connect_radius)
            .field("chart", &self.chart.is_some())
            .field("weight2", &self.weight2.is_some())
            .finish()
    }
}

/// Selection order for greedy nets.
#[derive(Debug, Clone, Copy)]
pub enum NetOrder {
    /// Input point order (the default).
    Input,
    /// Deterministic shuffle.
    Seeded(u64),
    /// Distance from an anchor, ties broken by chart coordinates. This order
    /// is invariant under point relabeling and is what the estimators use.
    FromAnchor(PointId),
}

/// A maximal epsilon-separated set with its nearest-member assignment.
#[derive(Debug, Clone)]
pub struct Net {
    pub epsilon: f64,
    pub members: Vec<PointId>,
    /// For every point, the member covering it.
    pub assignment: Vec<PointId>,
}

/// Greedy maximal epsilon-separated set over the whole space. Members are
/// pairwise at distance >= epsilon and every point lies strictly within
/// epsilon of some member.
pub fn maximal_net(space: &FiniteMetricSpace, eps: f64, order: NetOrder) -> Result<Net> {
    let all: Vec<PointId> = (0..space.len()).collect();
    maximal_net_of(space, &all, eps, order)
}

/// Greedy maximal epsilon-separated subset of `subset`.
pub fn maximal_net_of(
    space: &FiniteMetricSpace,
    subset: &[PointId],
    eps: f64,
    order: NetOrder,
) -> Result<Net> {
    if eps <= 0.0 {
        return Err(GeomError::InvalidParameter(format!("net scale must be positive, got {eps}")));
    }
    let scan = ordered_subset(space, subset, order);
    let mut members: Vec<PointId> = Vec::new();
    for &p in &scan {
        if members.iter().all(|&m| space.dist(p, m) >= eps) {
            members.push(p);
        }
    }
    let assignment = subset
        .iter()
        .map(|&p| {
            members
                .iter()
                .copied()
                .min_by(|&a, &b| space.dist(p, a).total_cmp(&space.dist(p, b)))
                .expect("net has at least one member")
        })
        .collect();
    Ok(Net { epsilon: eps, members, assignment })
}

fn ordered_subset(
    space: &FiniteMetricSpace,
    subset: &[PointId],
    order: NetOrder,
) -> Vec<PointId> {
    match order {
        NetOrder::Input => subset.to_vec(),
        NetOrder::Seeded(seed) => {
            let mut v = subset.to_vec();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            v.shuffle(&mut rng);
            v
        }
        NetOrder::FromAnchor(anchor) => {
            let mut v = subset.to_vec();
            v.sort_by(|&a, &b| {
                space
                    .dist(anchor, a)
                    .total_cmp(&space.dist(anchor, b))
                    .then_with(|| chart_key(space, a).cmp(&chart_key(space, b)))
                    .then_with(|| a.cmp(&b))
            });
            v
        }
    }
}

fn chart_key(space: &FiniteMetricSpace, p: PointId) -> (u64, u64) {
    match space.chart_point(p) {
        Some(c) => (ordered_bits(c[0]), ordered_bits(c[1])),
        None => (0, 0),
    }
}

/// Order-preserving bit mapping of a float (total order).
fn ordered_bits(x: f64) -> u64 {
    let b = x.to_bits();
    if b >> 63 == 0 {
        b | (1 << 63)
    } else {
        !b
    }
}

/// Anchor for permutation-invariant scans of a subset: the point with the
/// lexicographically smallest chart position, falling back to smallest id.
pub fn canonical_anchor(space: &FiniteMetricSpace, subset: &[PointId]) -> PointId {
    if space.chart().is_some() {
        subset
            .iter()
            .copied()
            .min_by_key(|&p| chart_key(space, p))
            .expect("nonempty subset")
    } else {
        *subset.iter().min().expect("nonempty subset")
    }
}

/// Number of balls of radius `eps` needed to cover `subset`: a greedy
/// maximal separated set scanned in chart-lexicographic order. The sweep
/// order keeps the packing density consistent across scales on structured
/// samples and does not depend on point labels.
pub fn covering_count(space: &FiniteMetricSpace, subset: &[PointId], eps: f64) -> usize {
    if subset.is_empty() {
        return 0;
    }
    let mut scan = subset.to_vec();
    scan.sort_by(|&a, &b| chart_key(space, a).cmp(&chart_key(space, b)).then(a.cmp(&b)));
    let mut members: Vec<PointId> = Vec::new();
    for &p in &scan {
        if members.iter().all(|&m| space.dist(p, m) >= eps) {
            members.push(p);
        }
    }
    members.len()
}

/// Box-counting proxy for the q-dimensional Hausdorff measure of a subset at
/// scale `eps`. For q=2 per-point area weights are used when present.
pub fn hausdorff_proxy(
    space: &FiniteMetricSpace,
    q: u8,
    subset: &[PointId],
    eps: f64,
) -> Result<f64> {
    if subset.is_empty() {
        return Ok(0.0);
    }
    if eps <= 0.0 {
        return Err(GeomError::InvalidParameter(format!("proxy scale must be positive, got {eps}")));
    }
    match q {
        1 => Ok(covering_count(space, subset, eps) as f64 * eps),
        2 => {
            if let Some(w) = space.weight2() {
                let mut vals: Vec<f64> = subset.iter().map(|&p| w[p]).collect();
                vals.sort_by(f64::total_cmp);
                Ok(vals.iter().sum())
            } else {
                Ok(covering_count(space, subset, eps) as f64 * eps * eps)
            }
        }
        _ => Err(GeomError::InvalidParameter(format!("proxy dimension must be 1 or 2, got {q}"))),
    }
}

/// Empirical quasiconvexity data produced by [`PathMetricSpace::quasiconvexity_factor`].
#[derive(Debug, Clone)]
pub struct QuasiconvexityEstimate {
    /// max d'(x,y)/d(x,y) over the sampled finite pairs.
    pub l_hat: f64,
    pub worst_pair: (PointId, PointId),
    /// Pairs disconnected in the h-graph.
    pub infinite_pairs: usize,
    pub sources_used: usize,
}

/// The path metric d' induced by shortest paths in the h-neighborhood graph.
pub struct PathMetricSpace {
    space: Arc<FiniteMetricSpace>,
    cache: Mutex<HashMap<PointId, Arc<Vec<f64>>>>,
}

/// Wrap a space in its induced path metric.
pub fn path_metric(space: Arc<FiniteMetricSpace>) -> PathMetricSpace {
    PathMetricSpace { space, cache: Mutex::new(HashMap::new()) }
}

impl PathMetricSpace {
    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn space_arc(&self) -> Arc<FiniteMetricSpace> {
        self.space.clone()
    }

    /// All d' distances from one source (cached).
    pub fn dist_from(&self, source: PointId) -> Arc<Vec<f64>> {
        if let Some(d) = self.cache.lock().unwrap().get(&source) {
            return d.clone();
        }
        let (dist, _) = graph::dijkstra(self.space.adjacency(), &[source as u32]);
        let arc = Arc::new(dist);
        self.cache.lock().unwrap().insert(source, arc.clone());
        arc
    }

    /// d'(i,j); infinite when the pair is disconnected in the h-graph.
    pub fn dprime(&self, i: PointId, j: PointId) -> f64 {
        self.dist_from(i)[j]
    }

    /// Shortest-path vertex sequence realizing d'(i,j).
    pub fn geodesic(&self, i: PointId, j: PointId) -> Result<Vec<PointId>> {
        let (dist, pred) = graph::dijkstra(self.space.adjacency(), &[i as u32]);
        if dist[j].is_infinite() {
            return Err(GeomError::DisconnectedPair { x: i, y: j });
        }
        Ok(graph::path_to(&pred, j as u32)
            .expect("reachable target has a path")
            .into_iter()
            .map(|v| v as usize)
            .collect())
    }

    /// Empirical quasiconvexity factor over sampled sources. Uses every
    /// point as a source when the space is small, otherwise a fixed stride.
    pub fn quasiconvexity_factor(&self, max_sources: usize) -> QuasiconvexityEstimate {
        let n = self.space.len();
        let stride = n.div_ceil(max_sources.max(1)).max(1);
        let sources: Vec<PointId> = (0..n).step_by(stride).collect();
        let mut l_hat: f64 = 1.0;
        let mut worst = (0, 0);
        let mut infinite = 0usize;
        for &s in &sources {
            let dp = self.dist_from(s);
            for j in 0..n {
                if j == s {
                    continue;
                }
                if dp[j].is_infinite() {
                    infinite += 1;
                    continue;
                }
                let d = self.space.dist(s, j);
                let ratio = dp[j] / d;
                if ratio > l_hat {
                    l_hat = ratio;
                    worst = (s, j);
                }
            }
        }
        QuasiconvexityEstimate { l_hat, worst_pair: worst, infinite_pairs: infinite, sources_used: sources.len() }
    }
}
