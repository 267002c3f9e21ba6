//! Construction of certified chord-arc loops around a point at a chosen
//! scale, extraction of the enclosed Jordan domain, and verification of the
//! domain's regularity hypotheses.
//!
//! The construction has two stages. First a polygon of controlled length is
//! snapped around the center from a chart circle, netted at a vertex scale,
//! and bridged with path-metric geodesics. Then the weighted length
//! functional `sigma(loop) = integral of (R/dist'(z,.))^2 + 1` is minimized
//! exactly over h-graph cycles with nonzero winding about the center, via a
//! ray-cut covering graph. The minimizer is certified as a chord-arc loop
//! and the winding-positive region it encloses is extracted and re-analyzed.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GeomError, Result};

use crate::invariants::{
    self, EstimatorBudgets, LLCReport, PorosityReport, RegularityReport,
};
use crate::space::{FiniteMetricSpace, PathMetricSpace, PointId};

/// A cyclic injective vertex sequence with arclength parameters.
#[derive(Debug, Clone, Serialize)]
pub struct DiscreteLoop {
    pub points: Vec<PointId>,
    /// Cyclic parameters in [0, 2 pi), proportional to arclength.
    pub thetas: Vec<f64>,
    /// Edge i joins points[i] to points[(i+1) % n].
    pub edge_lengths: Vec<f64>,
    pub total_length: f64,
}

impl DiscreteLoop {
    pub fn new(space: &FiniteMetricSpace, points: Vec<PointId>) -> Result<Self> {
        if points.len() < 2 {
            return Err(GeomError::DegenerateLoop(points.len()));
        }
        let mut seen = std::collections::HashSet::with_capacity(points.len());
        for &p in &points {
            if !seen.insert(p) {
                return Err(GeomError::InvalidParameter(format!("loop revisits point {p}")));
            }
        }
        let n = points.len();
        let edge_lengths: Vec<f64> =
            (0..n).map(|i| space.dist(points[i], points[(i + 1) % n])).collect();
        let total_length: f64 = edge_lengths.iter().sum();
        let mut thetas = Vec::with_capacity(n);
        let mut acc = 0.0;
        for i in 0..n {
            thetas.push(std::f64::consts::TAU * acc / total_length);
            acc += edge_lengths[i];
        }
        Ok(DiscreteLoop { points, thetas, edge_lengths, total_length })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Orientation-reversed copy (same base point).
    pub fn reversed(&self) -> DiscreteLoop {
        let n = self.points.len();
        let mut pts = Vec::with_capacity(n);
        pts.push(self.points[0]);
        for i in (1..n).rev() {
            pts.push(self.points[i]);
        }
        let edge_lengths: Vec<f64> =
            (0..n).map(|i| self.edge_lengths[(n - 1 - i) % n]).collect();
        let mut thetas = Vec::with_capacity(n);
        let mut acc = 0.0;
        for i in 0..n {
            thetas.push(std::f64::consts::TAU * acc / self.total_length);
            acc += edge_lengths[i];
        }
        DiscreteLoop { points: pts, thetas, edge_lengths, total_length: self.total_length }
    }

    /// Chart polygon of the loop.
    pub fn chart_polygon(&self, space: &FiniteMetricSpace) -> Result<Vec<[f64; 2]>> {
        let chart = space.chart().ok_or(GeomError::MissingChart)?;
        Ok(self.points.iter().map(|&p| chart[p]).collect())
    }

    /// Metric diameter of the vertex set.
    pub fn diameter(&self, space: &FiniteMetricSpace) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.points.len() {
            for j in (i + 1)..self.points.len() {
                d = d.max(space.dist(self.points[i], self.points[j]));
            }
        }
        d
    }
}

/// The weight rho and edge costs for the loop functional around a center.
pub struct LoopCostModel {
    pub center: PointId,
    pub scale: f64,
    dist_from_center: Arc<Vec<f64>>,
}

impl LoopCostModel {
    pub fn new(pm: &PathMetricSpace, center: PointId, scale: f64) -> Self {
        LoopCostModel { center, scale, dist_from_center: pm.dist_from(center) }
    }

    /// rho(x) = (R / d'(z,x))^2 + 1; at least 1 everywhere, exactly 2 on the
    /// sphere of radius R.
    #[inline]
    pub fn rho(&self, p: PointId) -> f64 {
        let d = self.dist_from_center[p];
        (self.scale / d) * (self.scale / d) + 1.0
    }

    #[inline]
    pub fn dist_to_center(&self, p: PointId) -> f64 {
        self.dist_from_center[p]
    }

    /// Trapezoid edge cost d(u,v) (rho(u) + rho(v)) / 2.
    #[inline]
    pub fn edge_cost(&self, space: &FiniteMetricSpace, u: PointId, v: PointId) -> f64 {
        space.dist(u, v) * 0.5 * (self.rho(u) + self.rho(v))
    }
}

/// sigma(loop): trapezoid sum of edge costs. At least the loop length.
pub fn loop_cost(space: &FiniteMetricSpace, model: &LoopCostModel, lp: &DiscreteLoop) -> Result<f64> {
    let n = lp.points.len();
    let mut total = 0.0;
    for i in 0..n {
        let (u, v) = (lp.points[i], lp.points[(i + 1) % n]);
        if model.dist_to_center(u) == 0.0 || model.dist_to_center(v) == 0.0 {
            return Err(GeomError::InvalidParameter(format!(
                "loop passes through the weight singularity at point {}",
                if model.dist_to_center(u) == 0.0 { u } else { v }
            )));
        }
        total += model.edge_cost(space, u, v);
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Winding-preserving loop erasure
// ---------------------------------------------------------------------------

/// Turn a closed vertex walk (consecutive entries h-adjacent, possibly
/// repeating vertices) into an injective cycle that keeps nonzero winding
/// about `z`: repeated vertices split the walk into two cycles, and the one
/// whose winding about `z` survives is kept.
fn erase_to_simple_cycle(
    space: &FiniteMetricSpace,
    mut walk: Vec<PointId>,
    z_chart: [f64; 2],
) -> Result<Vec<PointId>> {
    let chart = space.chart().ok_or(GeomError::MissingChart)?;
    // Normalize: drop an explicit closing repeat.
    if walk.len() >= 2 && walk.first() == walk.last() {
        walk.pop();
    }
    loop {
        let mut first_pos = std::collections::HashMap::new();
        let mut dup: Option<(usize, usize)> = None;
        for (i, &p) in walk.iter().enumerate() {
            if let Some(&j) = first_pos.get(&p) {
                dup = Some((j, i));
                break;
            }
            first_pos.insert(p, i);
        }
        let Some((p0, p1)) = dup else {
            break;
        };
        let inner: Vec<PointId> = walk[p0..p1].to_vec();
        let mut outer: Vec<PointId> = walk[..p0].to_vec();
        outer.extend_from_slice(&walk[p1..]);
        let wind = |cycle: &[PointId]| -> Option<i32> {
            if cycle.len() < 3 {
                return Some(0);
            }
            let poly: Vec<[f64; 2]> = cycle.iter().map(|&p| chart[p]).collect();
            crossing_winding(&poly, z_chart)
        };
        let wi = wind(&inner);
        let wo = wind(&outer);
        walk = match (wo, wi) {
            (Some(a), _) if a != 0 => outer,
            (_, Some(b)) if b != 0 => inner,
            (Some(_), _) => outer, // both zero: keep the outer cycle
            (None, Some(_)) => inner,
            (None, None) => {
                return Err(GeomError::WindingResolution(
                    "loop erasure could not evaluate winding".into(),
                ))
            }
        };
    }
    if walk.len() < 3 {
        return Err(GeomError::DegenerateLoop(walk.len()));
    }
    Ok(walk)
}

/// Integer winding via signed horizontal-ray crossings; robust for points
/// away from the polygon edges, `None` when the query sits on an edge.
pub fn crossing_winding(polygon: &[[f64; 2]], z: [f64; 2]) -> Option<i32> {
    let n = polygon.len();
    let mut w = 0i32;
    for i in 0..n {
        let p = polygon[i];
        let q = polygon[(i + 1) % n];
        let (py, qy) = (p[1] - z[1], q[1] - z[1]);
        let upward = py <= 0.0 && qy > 0.0;
        let downward = py > 0.0 && qy <= 0.0;
        if upward || downward {
            let t = py / (py - qy);
            let x_cross = p[0] + t * (q[0] - p[0]) - z[0];
            if x_cross == 0.0 {
                return None;
            }
            if x_cross > 0.0 {
                w += if upward { 1 } else { -1 };
            }
        }
    }
    Some(w)
}

// ---------------------------------------------------------------------------
// Initial polygon
// ---------------------------------------------------------------------------

/// Constants consumed by the loop pipeline; measured upstream or supplied.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PipelineConstants {
    /// Contractibility surrogate Lambda (max of the LLC constants).
    pub big_lambda: f64,
    /// Quasiconvexity factor L.
    pub quasiconvexity_l: f64,
    /// Covering constants for diagnostics.
    pub assouad_q: f64,
    pub assouad_d: f64,
}

impl PipelineConstants {
    pub fn lambda_l(&self) -> f64 {
        self.big_lambda * self.quasiconvexity_l
    }
}

/// Result of the initial-polygon construction.
#[derive(Debug, Clone, Serialize)]
pub struct InitialPolygon {
    pub polygon: DiscreteLoop,
    /// Measured length over R.
    pub c0: f64,
    /// Vertex scale demanded by the constants, before the resolution floor.
    pub eps_requested: f64,
    /// Vertex scale actually used (floored at twice the connect radius).
    pub eps_used: f64,
    pub dist_to_center: f64,
    pub max_dist_to_center: f64,
    /// R/2 <= dist <= 3R held.
    pub dist_bounds_ok: bool,
    pub winding: i32,
    pub sigma: f64,
    /// sigma <= 5 length held (the polygon stays outside radius R/2).
    pub sigma_bound_ok: bool,
}

/// Build a short polygon with nonzero winding about `z` in the annulus
/// around radius 2R: a chart circle is snapped to samples, netted at the
/// vertex scale, walked by the farthest-advance rule, and bridged with
/// path-metric geodesics. The result is loop-erased to an injective cycle
/// that keeps its winding.
pub fn initial_polygon(
    space: &FiniteMetricSpace,
    pm: &PathMetricSpace,
    z: PointId,
    scale_r: f64,
    constants: &PipelineConstants,
) -> Result<InitialPolygon> {
    let chart = space.chart().ok_or(GeomError::MissingChart)?;
    if scale_r <= 0.0 {
        return Err(GeomError::InvalidParameter("scale must be positive".into()));
    }
    let dz = pm.dist_from(z);
    let reach = dz.iter().copied().filter(|d| d.is_finite()).fold(0.0, f64::max);
    if reach < 0.7 * scale_r {
        return Err(GeomError::ChartTooSmall {
            center: z,
            needed: 0.7 * scale_r,
            available: reach,
        });
    }
    let ll = constants.lambda_l();
    let eps_requested = scale_r / (128.0 * ll * (ll + 1.0));
    let eps = eps_requested.max(2.0 * space.connect_radius());
    let zc = chart[z];

    // Snap a chart circle at distance 2R from the center, pulled inward
    // when the sample does not extend that far; any radius in [R/2, 3R]
    // satisfies the distance conclusion.
    let target = (2.0 * scale_r).min(0.85 * reach);
    let annulus_lo = (0.55 * scale_r).max(0.5 * target);
    let annulus_hi = (2.5 * scale_r).min(reach * 1.000_001);
    let bins = (((std::f64::consts::TAU * target) / (0.5 * eps)).ceil() as usize).clamp(16, 4096);
    let mut best: Vec<Option<PointId>> = vec![None; bins];
    let mut best_key: Vec<f64> = vec![f64::INFINITY; bins];
    for p in 0..space.len() {
        if p == z || !dz[p].is_finite() {
            continue;
        }
        if dz[p] < annulus_lo || dz[p] > annulus_hi {
            continue;
        }
        let c = chart[p];
        let ang = (c[1] - zc[1]).atan2(c[0] - zc[0]).rem_euclid(std::f64::consts::TAU);
        let bin = ((ang / std::f64::consts::TAU * bins as f64) as usize).min(bins - 1);
        let key = (dz[p] - target).abs();
        if key < best_key[bin] {
            best_key[bin] = key;
            best[bin] = Some(p);
        }
    }
    let mut snapped: Vec<PointId> = Vec::new();
    for b in best.iter().flatten() {
        if snapped.last() != Some(b) {
            snapped.push(*b);
        }
    }
    snapped.dedup();
    if snapped.len() >= 2 && snapped.first() == snapped.last() {
        snapped.pop();
    }
    if snapped.len() < 8 {
        return Err(GeomError::WindingResolution(format!(
            "only {} annulus directions around point {z} are populated",
            snapped.len()
        )));
    }
    {
        let poly: Vec<[f64; 2]> = snapped.iter().map(|&p| chart[p]).collect();
        match crossing_winding(&poly, zc) {
            Some(w) if w != 0 => {}
            _ => {
                return Err(GeomError::WindingResolution(
                    "snapped chart circle does not wind around the center".into(),
                ))
            }
        }
    }

    // Maximal eps-separated net along the snapped circle, in cyclic order.
    let mut net: Vec<PointId> = Vec::new();
    for &p in &snapped {
        if net.iter().all(|&m| space.dist(p, m) >= eps) {
            net.push(p);
        }
    }

    // Farthest-advance vertex selection: walk the snapped circle, recording
    // a net vertex each time the walk escapes the previous vertex's ball.
    let nearest_net = |p: PointId| -> PointId {
        *net
            .iter()
            .min_by(|&&a, &&b| space.dist(p, a).total_cmp(&space.dist(p, b)))
            .expect("net is nonempty")
    };
    let mut vertices: Vec<PointId> = vec![nearest_net(snapped[0])];
    for &p in snapped.iter().skip(1) {
        let cur = *vertices.last().unwrap();
        if space.dist(p, cur) >= eps {
            let nxt = nearest_net(p);
            if nxt != cur {
                vertices.push(nxt);
            }
        }
    }
    if vertices.len() >= 2 && vertices.first() == vertices.last() {
        vertices.pop();
    }
    if vertices.len() < 3 {
        return Err(GeomError::WindingResolution(
            "net collapsed the polygon below three vertices".into(),
        ));
    }

    // Bridge consecutive vertices with d'-geodesics.
    let mut walk: Vec<PointId> = Vec::new();
    let m = vertices.len();
    for k in 0..m {
        let (a, b) = (vertices[k], vertices[(k + 1) % m]);
        let seg = pm.geodesic(a, b)?;
        for &p in &seg[..seg.len() - 1] {
            if walk.last() != Some(&p) {
                walk.push(p);
            }
        }
    }

    let cycle = erase_to_simple_cycle(space, walk, zc)?;
    let polygon = DiscreteLoop::new(space, cycle)?;
    let poly_chart = polygon.chart_polygon(space)?;
    let winding = crossing_winding(&poly_chart, zc).ok_or_else(|| {
        GeomError::WindingResolution("polygon touches the center's horizontal ray".into())
    })?;
    if winding == 0 {
        return Err(GeomError::WindingResolution(
            "polygon lost its winding during erasure".into(),
        ));
    }

    let dist_to_center =
        polygon.points.iter().map(|&p| dz[p]).fold(f64::INFINITY, f64::min);
    let max_dist_to_center = polygon.points.iter().map(|&p| dz[p]).fold(0.0, f64::max);
    let dist_bounds_ok =
        dist_to_center >= 0.5 * scale_r && dist_to_center <= 3.0 * scale_r;
    let model = LoopCostModel::new(pm, z, scale_r);
    let sigma = loop_cost(space, &model, &polygon)?;
    let sigma_bound_ok = sigma <= 5.0 * polygon.total_length * (1.0 + 1e-9);
    Ok(InitialPolygon {
        c0: polygon.total_length / scale_r,
        polygon,
        eps_requested,
        eps_used: eps,
        dist_to_center,
        max_dist_to_center,
        dist_bounds_ok,
        winding,
        sigma,
        sigma_bound_ok,
    })
}

// ---------------------------------------------------------------------------
// Exact sigma minimization over nonzero-winding cycles
// ---------------------------------------------------------------------------

/// Diagnostics from the minimizer: the a-priori bounds with measured
/// constants. Violations are reported, not raised.
#[derive(Debug, Clone, Serialize)]
pub struct MinimizeDiagnostics {
    pub sigma: f64,
    pub warm_sigma: f64,
    pub length: f64,
    /// min over loop vertices of d'(z, .).
    pub min_dist: f64,
    pub max_dist: f64,
    /// length <= sigma.
    pub length_le_sigma: bool,
    /// min_dist < 2 Lambda L length.
    pub dist_upper_ok: bool,
    /// min_dist >= R / (320 C0 Lambda L).
    pub dist_lower_ok: bool,
    pub winding: i32,
}

/// Exact minimizer of sigma over h-graph cycles with nonzero winding about
/// `z`, found on a ray-cut covering graph: the chart is cut along the
/// horizontal ray from the center, edges crossing the cut shift the level,
/// and the shortest path from a vertex to its level-shifted copy is a
/// minimal winding cycle. Higher winding classes cost strictly more, so
/// restricting to one level shift is recorded as an assumption and the
/// output's winding is checked to be +-1.
#[allow(clippy::too_many_arguments)]
pub fn minimize_loop(
    space: &FiniteMetricSpace,
    pm: &PathMetricSpace,
    z: PointId,
    scale_r: f64,
    warm: &DiscreteLoop,
    constants: &PipelineConstants,
    c0_measured: f64,
    region_radius: Option<f64>,
) -> Result<(DiscreteLoop, MinimizeDiagnostics)> {
    let chart = space.chart().ok_or(GeomError::MissingChart)?;
    let model = LoopCostModel::new(pm, z, scale_r);
    let warm_sigma = loop_cost(space, &model, warm)?;
    {
        let poly = warm.chart_polygon(space)?;
        match crossing_winding(&poly, chart[z]) {
            Some(w) if w != 0 => {}
            _ => {
                return Err(GeomError::InvalidParameter(
                    "warm start must wind around the center".into(),
                ))
            }
        }
    }
    let dz = pm.dist_from(z);
    let in_region = |p: PointId| -> bool {
        p != z
            && dz[p].is_finite()
            && region_radius.map(|r| dz[p] <= r).unwrap_or(true)
    };

    // Signed crossing of the horizontal ray x > z.x against each edge.
    let zc = chart[z];
    let crossing_sign = |u: PointId, v: PointId| -> i32 {
        let (p, q) = (chart[u], chart[v]);
        let (py, qy) = (p[1] - zc[1], q[1] - zc[1]);
        let upward = py <= 0.0 && qy > 0.0;
        let downward = py > 0.0 && qy <= 0.0;
        if !(upward || downward) {
            return 0;
        }
        let t = py / (py - qy);
        let x_cross = p[0] + t * (q[0] - p[0]) - zc[0];
        if x_cross <= 0.0 {
            return 0;
        }
        if upward {
            1
        } else {
            -1
        }
    };

    // Candidate cycle base points: heads of upward crossing edges.
    let mut candidates: Vec<PointId> = Vec::new();
    for u in 0..space.len() {
        if !in_region(u) {
            continue;
        }
        for &(v, _) in &space.adjacency()[u] {
            let v = v as usize;
            if in_region(v) && crossing_sign(u, v) == 1 && !candidates.contains(&v) {
                candidates.push(v);
            }
        }
    }
    if candidates.is_empty() {
        return Err(GeomError::NoWindingCycle { z });
    }
    candidates.sort_unstable();

    // Covering graph with levels -4..=5; a shortest path from (v, 0) to
    // (v, 1) projects to a cycle with net winding one.
    const LEVELS: i32 = 10;
    const LEVEL_LO: i32 = -4;
    let n = space.len();
    let node = |p: PointId, level: i32| -> usize {
        p * LEVELS as usize + (level - LEVEL_LO) as usize
    };

    let best = candidates
        .par_iter()
        .map(|&start| {
            let mut dist = vec![f64::INFINITY; n * LEVELS as usize];
            let mut pred: Vec<u32> = vec![u32::MAX; n * LEVELS as usize];
            let src = node(start, 0);
            let dst = node(start, 1);
            dist[src] = 0.0;
            let mut heap = std::collections::BinaryHeap::new();
            heap.push((std::cmp::Reverse(FloatOrd(0.0)), src as u32));
            while let Some((std::cmp::Reverse(FloatOrd(d)), un)) = heap.pop() {
                let un = un as usize;
                if d > dist[un] {
                    continue;
                }
                if un == dst {
                    break;
                }
                let p = un / LEVELS as usize;
                let level = un % LEVELS as usize;
                for &(q, _) in &space.adjacency()[p] {
                    let q = q as usize;
                    if !in_region(q) {
                        continue;
                    }
                    let nl = level as i32 + crossing_sign(p, q);
                    if !(0..LEVELS).contains(&nl) {
                        continue;
                    }
                    let vn = q * LEVELS as usize + nl as usize;
                    let nd = d + model.edge_cost(space, p, q);
                    if nd < dist[vn] {
                        dist[vn] = nd;
                        pred[vn] = un as u32;
                        heap.push((std::cmp::Reverse(FloatOrd(nd)), vn as u32));
                    }
                }
            }
            (FloatOrd(dist[dst]), start, pred)
        })
        .min_by(|a, b| a.0 .0.total_cmp(&b.0 .0).then_with(|| a.1.cmp(&b.1)))
        .expect("candidate list checked nonempty");

    let (FloatOrd(best_cost), start, pred) = best;
    if !best_cost.is_finite() {
        return Err(GeomError::NoWindingCycle { z });
    }
    // Project the covering path to a base walk.
    let mut walk: Vec<PointId> = Vec::new();
    let mut cur = node(start, 1);
    loop {
        walk.push(cur / LEVELS as usize);
        if cur == node(start, 0) {
            break;
        }
        cur = pred[cur] as usize;
        if walk.len() > n * LEVELS as usize {
            return Err(GeomError::NoWindingCycle { z });
        }
    }
    walk.reverse();

    let cycle = erase_to_simple_cycle(space, walk, zc)?;
    let lp = DiscreteLoop::new(space, cycle)?;
    let sigma = loop_cost(space, &model, &lp)?;
    debug_assert!(sigma <= best_cost * (1.0 + 1e-9));
    if sigma > warm_sigma * (1.0 + 1e-9) {
        return Err(GeomError::InvalidParameter(format!(
            "minimizer cost {sigma} exceeds warm start {warm_sigma}"
        )));
    }
    let poly = lp.chart_polygon(space)?;
    let winding = crossing_winding(&poly, zc)
        .ok_or_else(|| GeomError::WindingResolution("minimizer touches the cut ray".into()))?;
    if winding.abs() != 1 {
        return Err(GeomError::WindingResolution(format!(
            "minimizer winding {winding}, expected +-1"
        )));
    }

    let min_dist = lp.points.iter().map(|&p| dz[p]).fold(f64::INFINITY, f64::min);
    let max_dist = lp.points.iter().map(|&p| dz[p]).fold(0.0, f64::max);
    let ll = constants.lambda_l();
    let diags = MinimizeDiagnostics {
        sigma,
        warm_sigma,
        length: lp.total_length,
        min_dist,
        max_dist,
        length_le_sigma: lp.total_length <= sigma * (1.0 + 1e-9),
        dist_upper_ok: min_dist < 2.0 * ll * lp.total_length,
        dist_lower_ok: min_dist >= scale_r / (320.0 * c0_measured * ll),
        winding,
    };
    Ok((lp, diags))
}

#[derive(PartialEq, PartialOrd)]
struct FloatOrd(f64);
impl Eq for FloatOrd {}
#[allow(clippy::derive_ord_xor_partial_ord)]
impl Ord for FloatOrd {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

// ---------------------------------------------------------------------------
// Chord-arc certification
// ---------------------------------------------------------------------------

/// Chord-arc certificate: the shorter of the two loop arcs between any two
/// vertices has length at most lambda times their distance.
#[derive(Debug, Clone, Serialize)]
pub struct ChordArcCertificate {
    pub lambda: f64,
    pub worst_pair: (PointId, PointId),
    pub diameter: f64,
    /// Distance from the pipeline center to the loop, when certified in a
    /// pipeline context.
    pub dist_to_center: Option<f64>,
    pub winding: Option<i32>,
}

/// Exact chord-arc scan with prefix-summed cyclic lengths.
pub fn certify_chord_arc(
    space: &FiniteMetricSpace,
    lp: &DiscreteLoop,
) -> Result<ChordArcCertificate> {
    let n = lp.points.len();
    if n < 3 {
        return Err(GeomError::DegenerateLoop(n));
    }
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + lp.edge_lengths[i];
    }
    let total = lp.total_length;
    let mut lambda: f64 = 1.0;
    let mut worst = (lp.points[0], lp.points[1]);
    let mut diameter: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = space.dist(lp.points[i], lp.points[j]);
            diameter = diameter.max(d);
            let arc = prefix[j] - prefix[i];
            let ratio = arc.min(total - arc) / d;
            if ratio > lambda {
                lambda = ratio;
                worst = (lp.points[i], lp.points[j]);
            }
        }
    }
    Ok(ChordArcCertificate {
        lambda,
        worst_pair: worst,
        diameter,
        dist_to_center: None,
        winding: None,
    })
}

// ---------------------------------------------------------------------------
// Full pipeline
// ---------------------------------------------------------------------------

/// Everything the chord-arc pipeline measured, with the loop itself.
#[derive(Debug, Clone, Serialize)]
pub struct ChordArcOutcome {
    pub lp: DiscreteLoop,
    pub certificate: ChordArcCertificate,
    pub initial: InitialPolygon,
    pub minimize: MinimizeDiagnostics,
    /// Measured length-over-R of the initial polygon.
    pub c0: f64,
    /// Scale guard 320 C0 (Lambda L + 2) from the measured constants.
    pub c1: f64,
    /// Smallest constant satisfying both two-sided inclusions
    /// R/C2 <= dist(z, loop) <= C2 R and R/C2 <= diam(loop) <= C2 R.
    pub c2: f64,
    pub dist_to_center: f64,
    pub loop_diameter: f64,
    /// diam >= dist / (Lambda L), the distance-diameter consequence.
    pub dist_diam_ok: bool,
    /// Chord-arc constant against the closed-form ceiling
    /// (6400 C0^2 Lambda L (Lambda L + 1))^2; the ceiling is astronomically
    /// loose, so a violation marks a real defect.
    pub lambda_ceiling: f64,
    pub lambda_below_ceiling: bool,
    /// Guard evaluation: R <= R0 / C1 (R0 = reachable radius around z).
    pub guard_satisfied: bool,
}

/// Run initial polygon, sigma minimization, and chord-arc certification
/// around `z` at scale `R`. When `guard_off` is false the scale guard
/// R <= R0/C1 (with measured constants) is enforced.
pub fn chord_arc_pipeline(
    space: &FiniteMetricSpace,
    pm: &PathMetricSpace,
    z: PointId,
    scale_r: f64,
    constants: &PipelineConstants,
    guard_off: bool,
) -> Result<ChordArcOutcome> {
    let initial = initial_polygon(space, pm, z, scale_r, constants)?;
    let c0 = initial.c0;
    let c1 = 320.0 * c0 * (constants.lambda_l() + 2.0);
    let dz = pm.dist_from(z);
    let reach = dz.iter().copied().filter(|d| d.is_finite()).fold(0.0, f64::max);
    let guard_satisfied = scale_r <= reach / c1;
    if !guard_satisfied && !guard_off {
        return Err(GeomError::ScaleGuard { r: scale_r, limit: reach / c1 });
    }
    // Inside the guard regime the search stays in the ball the construction
    // assumes; with the guard waived that ball would not even contain the
    // loop, so the whole reachable component is searched.
    let region = if guard_satisfied {
        Some(reach / (16.0 * constants.lambda_l()))
    } else {
        None
    };
    let (lp, minimize) =
        minimize_loop(space, pm, z, scale_r, &initial.polygon, constants, c0, region)?;
    let mut certificate = certify_chord_arc(space, &lp)?;
    let dist_to_center = minimize.min_dist;
    certificate.dist_to_center = Some(dist_to_center);
    certificate.winding = Some(minimize.winding);
    let loop_diameter = certificate.diameter;
    let c2 = [
        dist_to_center / scale_r,
        scale_r / dist_to_center,
        loop_diameter / scale_r,
        scale_r / loop_diameter,
    ]
    .into_iter()
    .fold(1.0_f64, f64::max);
    let ll = constants.lambda_l();
    let dist_diam_ok = loop_diameter >= dist_to_center / ll;
    let lambda_ceiling = (6400.0 * c0 * c0 * ll * (ll + 1.0)).powi(2);
    let lambda_below_ceiling = certificate.lambda <= lambda_ceiling;
    Ok(ChordArcOutcome {
        certificate,
        initial,
        minimize,
        c0,
        c1,
        c2,
        dist_to_center,
        loop_diameter,
        dist_diam_ok,
        lambda_ceiling,
        lambda_below_ceiling,
        guard_satisfied,
        lp,
    })
}

// ---------------------------------------------------------------------------
// Domain extraction and verification
// ---------------------------------------------------------------------------

/// The Jordan domain enclosed by a loop: interior points (nonzero winding),
/// the loop itself as boundary, and the two-sided inclusion checks.
#[derive(Debug, Clone, Serialize)]
pub struct DomainExtraction {
    /// Interior points (loop vertices excluded).
    pub interior: Vec<PointId>,
    /// Interior plus boundary.
    pub closure: Vec<PointId>,
    /// B(z, R/(2 Lambda C2)) landed inside the domain.
    pub inner_inclusion_ok: bool,
    /// Closure stayed inside B(z, C2 (4 Lambda + 2) R).
    pub outer_inclusion_ok: bool,
    pub inner_radius: f64,
    pub outer_radius: f64,
}

/// Extract the domain enclosed by `lp` as the chart points of nonzero
/// crossing winding. Points on the loop are boundary. Fails loudly when the
/// center is not enclosed.
pub fn extract_domain(
    space: &FiniteMetricSpace,
    lp: &DiscreteLoop,
    z: PointId,
    scale_r: f64,
    big_lambda: f64,
    c2: f64,
) -> Result<DomainExtraction> {
    let chart = space.chart().ok_or(GeomError::MissingChart)?;
    let poly = lp.chart_polygon(space)?;
    let on_loop: std::collections::HashSet<PointId> = lp.points.iter().copied().collect();
    let mut interior = Vec::new();
    for p in 0..space.len() {
        if on_loop.contains(&p) {
            continue;
        }
        match crossing_winding(&poly, chart[p]) {
            Some(w) if w != 0 => interior.push(p),
            Some(_) => {}
            None => {} // chart-degenerate: on an edge line, treat as boundary
        }
    }
    if !interior.contains(&z) {
        return Err(GeomError::InvalidParameter(format!(
            "center {z} is not enclosed by the loop"
        )));
    }
    let mut closure = interior.clone();
    closure.extend(lp.points.iter().copied());
    closure.sort_unstable();

    let inner_radius = scale_r / (2.0 * big_lambda * c2);
    let outer_radius = c2 * (4.0 * big_lambda + 2.0) * scale_r;
    let inner_ball = space.ball(z, inner_radius);
    let in_closure: std::collections::HashSet<PointId> = closure.iter().copied().collect();
    let inner_inclusion_ok = inner_ball
        .iter()
        .all(|&p| interior.contains(&p) || on_loop.contains(&p));
    let outer_inclusion_ok =
        in_closure.iter().all(|&p| space.dist(z, p) <= outer_radius);
    Ok(DomainExtraction {
        interior,
        closure,
        inner_inclusion_ok,
        outer_inclusion_ok,
        inner_radius,
        outer_radius,
    })
}

/// Hypothesis report for an extracted domain: the closure re-analyzed as a
/// space of its ownumber against the bounds predicted from the upstream
/// constants.
#[derive(Debug, Clone, Serialize)]
pub struct DomainVerification {
    pub llc: LLCReport,
    pub regularity: RegularityReport,
    pub porosity: PorosityReport,
    /// Predicted LLC ceiling 4 Lambda (4 lambda + 1).
    pub llc_bound: f64,
    pub llc_ok: bool,
    /// Predicted regularity ceiling 64 C (C_por llc_bound)^2.
    pub ahlfors_bound: f64,
    pub ahlfors_ok: bool,
    /// True when the domain was empty and every check passed vacuously.
    pub vacuous: bool,
}

/// Verify that the closed domain satisfies the connectivity and regularity
/// bounds predicted by the upstream constants: Lambda (contractibility
/// surrogate), lambda (chord-arc constant of the boundary loop), and c_k
/// (ambient regularity constant).
pub fn verify_domain(
    space: &FiniteMetricSpace,
    extraction: &DomainExtraction,
    lp: &DiscreteLoop,
    big_lambda: f64,
    chord_arc_lambda: f64,
    c_k: f64,
    budgets: &EstimatorBudgets,
) -> Result<DomainVerification> {
    let llc_bound = 4.0 * big_lambda * (4.0 * chord_arc_lambda + 1.0);
    if extraction.closure.is_empty() {
        return Err(GeomError::EmptyInput("empty domain closure".into()));
    }
    let sub = space.restricted(&extraction.closure);
    let all: Vec<PointId> = (0..sub.len()).collect();
    let window = (2.0 * sub.spacing(), (sub.diameter() / 4.0).max(4.0 * sub.spacing()));
    let llc = invariants::llc_estimate(&sub, &all, window, budgets)?;
    let regularity = invariants::ahlfors_estimate(&sub, &all, window, None, budgets)?;
    // Boundary ids in the sub-space indexing.
    let index_of: std::collections::HashMap<PointId, usize> =
        extraction.closure.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let boundary: Vec<usize> =
        lp.points.iter().filter_map(|p| index_of.get(p).copied()).collect();
    let porosity = invariants::porosity_constant(&sub, &boundary, window, budgets)?;
    let measured_llc = llc.lambda1.max(llc.lambda2);
    let llc_ok = measured_llc <= llc_bound;
    let c_por = porosity.c_por.unwrap_or(f64::INFINITY);
    let ahlfors_bound = 64.0 * c_k * (c_por * llc_bound) * (c_por * llc_bound);
    let ahlfors_ok = regularity.c_ahlfors <= ahlfors_bound;
    Ok(DomainVerification {
        llc,
        regularity,
        porosity,
        llc_bound,
        llc_ok,
        ahlfors_bound,
        ahlfors_ok,
        vacuous: extraction.interior.is_empty(),
    })
}
