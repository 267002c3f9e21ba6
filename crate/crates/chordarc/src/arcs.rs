//! Arc extraction from concatenations, quasiarc construction and
//! certification, and the bounded-turning estimator.

use serde::Serialize;

use crate::chains::{self, ScoredChain};
use crate::error::{GeomError, Result};
use crate::graph::{self, UnionFind};
use crate::space::{FiniteMetricSpace, PointId};

/// An injective ordered point sequence with its accumulated edge length.
#[derive(Debug, Clone, Serialize)]
pub struct DiscreteArc {
    pub points: Vec<PointId>,
    pub length: f64,
}

impl DiscreteArc {
    /// Build from a vertex list, checking injectivity and summing gaps.
    pub fn new(space: &FiniteMetricSpace, points: Vec<PointId>) -> Result<Self> {
        if points.is_empty() {
            return Err(GeomError::EmptyInput("empty arc".into()));
        }
        let mut seen = std::collections::HashSet::with_capacity(points.len());
        for &p in &points {
            if !seen.insert(p) {
                return Err(GeomError::InvalidParameter(format!(
                    "arc revisits point {p}"
                )));
            }
        }
        let length = points.windows(2).map(|w| space.dist(w[0], w[1])).sum();
        Ok(DiscreteArc { points, length })
    }

    pub fn start(&self) -> PointId {
        self.points[0]
    }

    pub fn end(&self) -> PointId {
        *self.points.last().unwrap()
    }

    /// Position of a point on the arc, if present.
    pub fn position(&self, p: PointId) -> Option<usize> {
        self.points.iter().position(|&q| q == p)
    }

    /// Diameter of the subarc between positions `i <= j` (inclusive).
    pub fn segment_diameter(&self, space: &FiniteMetricSpace, i: usize, j: usize) -> f64 {
        let seg = &self.points[i..=j];
        let mut diam: f64 = 0.0;
        for a in 0..seg.len() {
            for b in (a + 1)..seg.len() {
                diam = diam.max(space.dist(seg[a], seg[b]));
            }
        }
        diam
    }
}

/// Certificate that an arc is an (epsilon, M)-quasiarc: every pair of arc
/// points within `epsilon` bounds a subarc of diameter at most `M * epsilon`.
#[derive(Debug, Clone, Serialize)]
pub struct QuasiarcCertificate {
    pub epsilon: f64,
    pub m: f64,
    /// The pair realizing the worst diameter/epsilon ratio, when any pair
    /// qualified.
    pub worst_pair: Option<(PointId, PointId)>,
    pub worst_ratio: f64,
}

/// Exact quasiarc certification by pair scan.
///
/// For every pair of arc points at distance <= epsilon, the diameter of the
/// enclosed subarc is measured; M is the worst ratio, floored at 1.
pub fn certify_quasiarc(
    space: &FiniteMetricSpace,
    arc: &DiscreteArc,
    eps: f64,
) -> Result<QuasiarcCertificate> {
    if arc.points.is_empty() {
        return Err(GeomError::EmptyInput("cannot certify an empty arc".into()));
    }
    if eps <= 0.0 {
        return Err(GeomError::InvalidParameter(format!("scale must be positive, got {eps}")));
    }
    let pts = &arc.points;
    let n = pts.len();
    let mut worst_ratio: f64 = 0.0;
    let mut worst_pair = None;
    for i in 0..n {
        // The subarc diameter grows with the far index, so only the farthest
        // qualifying partner of i matters.
        let mut far: Option<usize> = None;
        for j in (i + 1)..n {
            if space.dist(pts[i], pts[j]) <= eps {
                far = Some(j);
            }
        }
        if let Some(j) = far {
            let diam = arc.segment_diameter(space, i, j);
            let ratio = diam / eps;
            if ratio > worst_ratio {
                worst_ratio = ratio;
                worst_pair = Some((pts[i], pts[j]));
            }
        }
    }
    Ok(QuasiarcCertificate { epsilon: eps, m: worst_ratio.max(1.0), worst_pair, worst_ratio })
}

/// Extract an injective arc from end-to-start matched segments.
///
/// Implements the inductive farthest-reconnection procedure: from the
/// current segment, jump to the highest-indexed later segment that meets it,
/// entering at the meeting point that is latest in the later segment's
/// order. The result is injective and any subarc lies in the union of the
/// segments between its endpoints' segment indices.
pub fn extract_arc(
    space: &FiniteMetricSpace,
    segments: &[Vec<PointId>],
) -> Result<DiscreteArc> {
    if segments.is_empty() {
        return Err(GeomError::EmptyInput("no segments".into()));
    }
    for (idx, seg) in segments.iter().enumerate() {
        if seg.is_empty() {
            return Err(GeomError::EmptyInput(format!("segment {idx} is empty")));
        }
    }
    for (idx, w) in segments.windows(2).enumerate() {
        if w[0].last() != Some(&w[1][0]) {
            return Err(GeomError::MismatchedEndpoints { index: idx });
        }
    }
    let sets: Vec<std::collections::HashSet<PointId>> =
        segments.iter().map(|s| s.iter().copied().collect()).collect();

    let mut out: Vec<PointId> = Vec::new();
    let mut cur = 0usize;
    let mut entry = 0usize;
    loop {
        if cur == segments.len() - 1 {
            push_piece(&mut out, &segments[cur][entry..]);
            break;
        }
        let tail: std::collections::HashSet<PointId> =
            segments[cur][entry..].iter().copied().collect();
        let next = (cur + 1..segments.len())
            .rev()
            .find(|&i| sets[i].iter().any(|p| tail.contains(p)))
            .expect("consecutive segments share an endpoint");
        let junction = *segments[next]
            .iter()
            .rev()
            .find(|p| tail.contains(p))
            .expect("intersection is nonempty");
        let exit = segments[cur][entry..]
            .iter()
            .position(|&p| p == junction)
            .expect("junction lies in the tail")
            + entry;
        push_piece(&mut out, &segments[cur][entry..=exit]);
        entry = segments[next].iter().position(|&p| p == junction).unwrap();
        cur = next;
    }
    DiscreteArc::new(space, out)
}

fn push_piece(out: &mut Vec<PointId>, piece: &[PointId]) {
    for &p in piece {
        if out.last() != Some(&p) {
            out.push(p);
        }
    }
}

/// Result of the quasiarc construction.
#[derive(Debug, Clone, Serialize)]
pub struct QuasiarcBuild {
    pub arc: DiscreteArc,
    pub certificate: QuasiarcCertificate,
    pub scored: ScoredChain,
    /// Containment radius factor N = 2 lambda + (4D)^(1/2Q) sqrt(4 lambda).
    pub containment_factor: f64,
    /// max over arc points of d(x, p) / d(x, y).
    pub containment_worst: f64,
    /// Whether the arc stayed inside B(x, N d(x,y)); a falsified-hypothesis
    /// diagnostic when false.
    pub containment_ok: bool,
}

/// Build an (epsilon, M)-quasiarc from `x` to `y`.
///
/// Runs the score-minimizing chain against a bounded-turning reference arc,
/// bridges consecutive chain points with shortest paths, extracts an
/// injective arc from the concatenation, and certifies it. `lambda` is the
/// bounded-turning constant and `assouad` the covering constants (Q, D) the
/// deviation and containment ceilings are computed from.
pub fn build_quasiarc(
    space: &FiniteMetricSpace,
    x: PointId,
    y: PointId,
    eps: f64,
    q: f64,
    lambda: f64,
    assouad_d: f64,
) -> Result<QuasiarcBuild> {
    if x == y {
        return Err(GeomError::InvalidParameter("quasiarc endpoints coincide".into()));
    }
    let r = space.dist(x, y);
    let h = space.connect_radius();
    if r > h && eps >= r {
        return Err(GeomError::InvalidParameter(format!(
            "quasiarc scale eps={eps} must be below d(x,y)={r}"
        )));
    }

    let nfac = 2.0 * lambda + (4.0 * assouad_d).powf(1.0 / (2.0 * q).max(1e-9)) * (4.0 * lambda).sqrt();

    if r <= h {
        // Adjacent endpoints: the single edge is the arc.
        let arc = DiscreteArc::new(space, vec![x, y])?;
        let certificate = certify_quasiarc(space, &arc, eps)?;
        let scored = ScoredChain {
            chain: chains::DiscreteChain { epsilon: eps, points: vec![x, y] },
            reference: vec![x, y],
            score: 2.0,
            exponent: 2.0 * q,
            max_deviation: 0.0,
            deviation_bound: None,
            deviation_within_bound: true,
        };
        return Ok(QuasiarcBuild {
            arc,
            certificate,
            scored,
            containment_factor: nfac,
            containment_worst: 1.0,
            containment_ok: true,
        });
    }

    let reference = minimax_reference(space, x, y)?;
    let scored =
        chains::score_minimizing_chain(space, x, y, &reference, eps, q, Some((assouad_d, lambda)))?;

    // Bridge consecutive chain points with shortest h-graph paths.
    let mut segments: Vec<Vec<PointId>> = Vec::new();
    for w in scored.chain.points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if space.dist(a, b) <= h {
            segments.push(vec![a, b]);
        } else {
            let (dist, pred) = graph::dijkstra(space.adjacency(), &[a as u32]);
            if dist[b].is_infinite() {
                return Err(GeomError::DisconnectedPair { x: a, y: b });
            }
            let path: Vec<PointId> = graph::path_to(&pred, b as u32)
                .unwrap()
                .into_iter()
                .map(|v| v as usize)
                .collect();
            segments.push(path);
        }
    }
    let arc = extract_arc(space, &segments)?;
    let certificate = certify_quasiarc(space, &arc, eps)?;

    let containment_worst =
        arc.points.iter().map(|&p| space.dist(x, p) / r).fold(0.0, f64::max);
    let containment_ok = containment_worst <= nfac;
    Ok(QuasiarcBuild {
        arc,
        certificate,
        scored,
        containment_factor: nfac,
        containment_worst,
        containment_ok,
    })
}

/// A connecting path minimizing the ball radius that contains it: the
/// shortest path inside the intersection of balls around both endpoints at
/// the smallest radius where the endpoints connect. Plays the role of the
/// bounded-turning arc.
fn minimax_reference(
    space: &FiniteMetricSpace,
    x: PointId,
    y: PointId,
) -> Result<Vec<PointId>> {
    let t = minimax_radius(space, x, y).ok_or(GeomError::DisconnectedPair { x, y })?;
    let limit = t * (1.0 + 1e-12);
    let allow = |v: u32| {
        let p = v as usize;
        space.dist(x, p).max(space.dist(y, p)) <= limit
    };
    let (dist, pred) = graph::dijkstra_filtered(space.adjacency(), &[x as u32], allow);
    if dist[y].is_infinite() {
        return Err(GeomError::DisconnectedPair { x, y });
    }
    Ok(graph::path_to(&pred, y as u32)
        .unwrap()
        .into_iter()
        .map(|v| v as usize)
        .collect())
}

/// Smallest t such that x and y connect inside B(x,t) intersected with
/// B(y,t); a lower bound for the diameter of any connecting continuum.
fn minimax_radius(space: &FiniteMetricSpace, x: PointId, y: PointId) -> Option<f64> {
    let n = space.len();
    let mut order: Vec<PointId> = (0..n).collect();
    let key = |p: PointId| space.dist(x, p).max(space.dist(y, p));
    order.sort_by(|&a, &b| key(a).total_cmp(&key(b)).then_with(|| a.cmp(&b)));
    let mut uf = UnionFind::new(n);
    let mut added = vec![false; n];
    for &p in &order {
        added[p] = true;
        let kp = key(p);
        for &(v, _) in &space.adjacency()[p] {
            if added[v as usize] {
                uf.union(p as u32, v);
            }
        }
        if added[x] && added[y] && uf.same(x as u32, y as u32) {
            return Some(kp);
        }
    }
    None
}

/// Bounded-turning estimate over a scale window.
#[derive(Debug, Clone, Serialize)]
pub struct TurningReport {
    pub lambda: f64,
    pub worst_pair: Option<(PointId, PointId)>,
    /// Pairs that could not be connected at all.
    pub disconnected_pairs: Vec<(PointId, PointId)>,
    pub pairs_tested: usize,
    pub window: (f64, f64),
}

/// Estimate the bounded-turning constant of `subset` within the space:
/// the worst ratio (smallest connecting-continuum diameter) / d(x,y) over
/// sampled pairs with separation inside the window. The ball-restricted
/// search yields a lower bound for the true constant.
pub fn bounded_turning_constant(
    space: &FiniteMetricSpace,
    subset: &[PointId],
    window: (f64, f64),
    max_pairs: usize,
    seed: u64,
) -> Result<TurningReport> {
    if subset.len() < 2 {
        return Err(GeomError::EmptyInput("need at least two points".into()));
    }
    let pairs = sample_window_pairs(space, subset, window, max_pairs, seed);
    let mut lambda: f64 = 1.0;
    let mut worst_pair = None;
    let mut disconnected = Vec::new();
    let mut tested = 0usize;
    let mut probe = |x: PointId, y: PointId, lambda: &mut f64, worst: &mut Option<(PointId, PointId)>| {
        tested += 1;
        match minimax_radius(space, x, y) {
            Some(t) => {
                let ratio = t / space.dist(x, y);
                if ratio > *lambda {
                    *lambda = ratio;
                    *worst = Some((x, y));
                }
            }
            None => disconnected.push((x, y)),
        }
    };
    for &(x, y) in &pairs {
        probe(x, y, &mut lambda, &mut worst_pair);
    }
    // Refine around the sampled maximum: exhaust nearby pairs.
    if let Some((wx, wy)) = worst_pair {
        let h = space.connect_radius();
        let mut local = Vec::new();
        for &a in space.ball(wx, 1.5 * h).iter() {
            for &b in space.ball(wy, 1.5 * h).iter() {
                if a != b && (window.0..=window.1).contains(&space.dist(a, b)) {
                    local.push((a, b));
                }
            }
        }
        local.truncate(256);
        for (a, b) in local {
            probe(a, b, &mut lambda, &mut worst_pair);
        }
    }
    Ok(TurningReport {
        lambda,
        worst_pair,
        disconnected_pairs: disconnected,
        pairs_tested: tested,
        window,
    })
}

/// Pairs of subset points whose distance lies in the window. Below four
/// million candidate pairs the enumeration is exhaustive and truncated in a
/// label-free order (distance, then chart position), so the selection does
/// not move under relabeling; beyond that the pairs are sampled.
pub(crate) fn sample_window_pairs(
    space: &FiniteMetricSpace,
    subset: &[PointId],
    window: (f64, f64),
    max_pairs: usize,
    seed: u64,
) -> Vec<(PointId, PointId)> {
    use rand::Rng;
    use rand::SeedableRng;
    let m = subset.len();
    let total = m.saturating_mul(m.saturating_sub(1)) / 2;
    let in_window =
        |a: PointId, b: PointId| (window.0..=window.1).contains(&space.dist(a, b));
    if total <= 4_000_000 {
        let mut out = Vec::new();
        for i in 0..m {
            for j in (i + 1)..m {
                if in_window(subset[i], subset[j]) {
                    out.push((subset[i], subset[j]));
                }
            }
        }
        if out.len() > max_pairs {
            let key = |p: PointId| match space.chart_point(p) {
                Some(c) => (c[0], c[1]),
                None => (p as f64, 0.0),
            };
            out.sort_by(|&(a1, b1), &(a2, b2)| {
                space
                    .dist(a1, b1)
                    .total_cmp(&space.dist(a2, b2))
                    .then_with(|| key(a1).0.total_cmp(&key(a2).0))
                    .then_with(|| key(a1).1.total_cmp(&key(a2).1))
                    .then_with(|| key(b1).0.total_cmp(&key(b2).0))
                    .then_with(|| key(b1).1.total_cmp(&key(b2).1))
            });
            let stride = out.len() as f64 / max_pairs as f64;
            out = (0..max_pairs).map(|k| out[(k as f64 * stride) as usize]).collect();
        }
        out
    } else {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        let mut attempts = 0usize;
        while out.len() < max_pairs && attempts < max_pairs * 20 {
            attempts += 1;
            let i = rng.random_range(0..m);
            let j = rng.random_range(0..m);
            if i != j && in_window(subset[i], subset[j]) {
                out.push((subset[i].min(subset[j]), subset[i].max(subset[j])));
            }
        }
        out
    }
}
