//! Estimators and certifiers for the geometric hypotheses: Assouad
//! dimension, Ahlfors 2-regularity, linear local connectivity, the
//! three-point condition, porosity, winding numbers, and loop-closeness
//! certification.
//!
//! All estimators sample centers, radii, and pairs under explicit budgets
//! that are echoed into their reports. Scan orders are keyed on distances
//! and chart coordinates, never on point ids, so reported constants do not
//! move when the space is relabeled. Every report carries the witness that
//! realized its worst ratio; witnesses reproduce the ratio on recheck.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::graph::UnionFind;
use crate::quasicircle::DiscreteLoop;
use crate::space::{canonical_anchor, covering_count, FiniteMetricSpace, PointId};

/// Sampling budgets shared by the estimators; all knobs are recorded in the
/// reports they produce.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EstimatorBudgets {
    /// Centers sampled per estimator.
    pub max_centers: usize,
    /// Radii per octave of the scale window.
    pub radii_per_octave: usize,
    /// Pair budget for pair scans.
    pub max_pairs: usize,
    /// Centers for the connectivity sweeps, which cost a sort per center.
    pub llc_centers: usize,
    pub seed: u64,
}

impl Default for EstimatorBudgets {
    fn default() -> Self {
        EstimatorBudgets {
            max_centers: 500,
            radii_per_octave: 8,
            max_pairs: 100_000,
            llc_centers: 64,
            seed: 0,
        }
    }
}

/// Geometric radius grid over a window.
pub fn radius_grid(window: (f64, f64), per_octave: usize) -> Vec<f64> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return vec![lo.max(hi)];
    }
    let octaves = (hi / lo).log2();
    let steps = ((octaves * per_octave as f64).ceil() as usize).max(1);
    (0..=steps)
        .map(|k| lo * (hi / lo).powf(k as f64 / steps as f64))
        .collect()
}

/// Deterministic, relabeling-stable center sample: subset sorted by chart
/// position (id order if chartless) and strided down to the budget.
fn sample_centers(
    space: &FiniteMetricSpace,
    subset: &[PointId],
    budget: usize,
) -> Vec<PointId> {
    let mut v = subset.to_vec();
    if space.chart().is_some() {
        v.sort_by(|&a, &b| {
            let (ca, cb) = (space.chart_point(a).unwrap(), space.chart_point(b).unwrap());
            ca[0].total_cmp(&cb[0]).then(ca[1].total_cmp(&cb[1])).then(a.cmp(&b))
        });
    } else {
        v.sort_unstable();
    }
    if v.len() <= budget {
        return v;
    }
    let stride = v.len() as f64 / budget as f64;
    (0..budget).map(|k| v[(k as f64 * stride) as usize]).collect()
}

// ---------------------------------------------------------------------------
// Assouad dimension and Ahlfors regularity
// ---------------------------------------------------------------------------

/// Covering-exponent fit: Q is the least-squares slope of log N against
/// log(1/eps), D the worst residual factor.
#[derive(Debug, Clone, Serialize)]
pub struct AssouadReport {
    pub q_hat: f64,
    pub d_hat: f64,
    pub samples: usize,
    pub window: (f64, f64),
    pub budgets: EstimatorBudgets,
}

/// Estimate the relative Assouad dimension of `subset` in the space.
///
/// Covering numbers N(x, r, eps) are measured by greedy nets at two fixed
/// inner scales eps just above the sample resolution, while the ball radius
/// r runs over the window. The exponent is the pooled within-cluster slope
/// of log N against log(r/eps), one cluster per (center, eps); holding eps
/// fixed inside a cluster cancels the resolution-dependent packing density
/// that would otherwise bias the exponent. The half-eps boundary annulus of
/// the net is folded into the outer scale.
pub fn assouad_estimate(
    space: &FiniteMetricSpace,
    subset: &[PointId],
    window: (f64, f64),
    budgets: &EstimatorBudgets,
) -> Result<AssouadReport> {
    if subset.is_empty() {
        return Err(GeomError::EmptyInput("assouad estimate needs a nonempty subset".into()));
    }
    let (lo, hi) = window;
    if space.len() > 1 && hi < 2.0 * lo {
        return Err(GeomError::WindowTooNarrow { lo, hi });
    }
    let centers = sample_centers(space, subset, budgets.max_centers.min(48));
    let radii = radius_grid(window, budgets.radii_per_octave.min(4));
    let spacing = space.spacing();
    // Off integer multiples of the spacing, where lattice-like samples sit
    // on packing-density knife edges.
    let inner_scales = [2.4 * spacing, 3.4 * spacing];

    // Per-cluster samples: (log effective ratio, log N), one least-squares
    // slope per cluster. The covering exponent is a sup over locations, and
    // balls spilling over the subset edge flatten their growth, so the
    // slope distribution is one-sidedly biased down; an upper quantile
    // recovers the unclipped clusters.
    let mut cluster_slopes: Vec<f64> = Vec::new();
    let mut flat: Vec<(f64, f64)> = Vec::new();
    for &x in &centers {
        for &eps in &inner_scales {
            let mut cluster: Vec<(f64, f64)> = Vec::new();
            for &r in &radii {
                if r < 2.5 * eps || eps <= 0.0 {
                    continue;
                }
                let ball = space.ball(x, r);
                let n_cover = covering_count(space, &ball, eps).max(1);
                let sample = (((r + 0.5 * eps) / eps).ln(), (n_cover as f64).ln());
                cluster.push(sample);
                flat.push(sample);
            }
            if cluster.len() < 2 {
                continue;
            }
            let m = cluster.len() as f64;
            let mx: f64 = cluster.iter().map(|p| p.0).sum::<f64>() / m;
            let my: f64 = cluster.iter().map(|p| p.1).sum::<f64>() / m;
            let sxx: f64 = cluster.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
            let sxy: f64 = cluster.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            if sxx > 1e-12 {
                cluster_slopes.push(sxy / sxx);
            }
        }
    }
    let samples = flat.len();
    let q_hat = if cluster_slopes.is_empty() {
        0.0
    } else {
        cluster_slopes.sort_by(f64::total_cmp);
        let idx = ((cluster_slopes.len() as f64 * 0.85).ceil() as usize)
            .saturating_sub(1)
            .min(cluster_slopes.len() - 1);
        cluster_slopes[idx].max(0.0)
    };
    let d_hat = flat
        .iter()
        .map(|&(lx, ly)| (ly - q_hat * lx).exp())
        .fold(1.0_f64, f64::max);
    Ok(AssouadReport { q_hat, d_hat, samples, window, budgets: *budgets })
}

/// One scale row of the regularity table.
#[derive(Debug, Clone, Serialize)]
pub struct ScaleRow {
    pub r: f64,
    /// Worst mass-over-r^2 ratio at this scale.
    pub max_ratio: f64,
    /// Smallest mass-over-r^2 ratio at this scale.
    pub min_ratio: f64,
    /// max(max_ratio, 1/min_ratio): the two-sided constant at this scale.
    pub c_at_scale: f64,
}

/// Two-sided Ahlfors 2-regularity report over a scale window, together with
/// the covering-dimension fit.
#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    pub window: (f64, f64),
    pub q_hat: f64,
    pub d_hat: f64,
    /// max over sampled (x, r) of max(mass/r^2, r^2/mass).
    pub c_ahlfors: f64,
    pub worst_witness: Option<(PointId, f64)>,
    pub per_scale: Vec<ScaleRow>,
    /// Balls with zero mass; the constant is infinite when nonempty.
    pub degenerate: Vec<(PointId, f64)>,
    /// True when the per-scale constants drift by more than a factor of 2
    /// across the window: regular at some scales but not others.
    pub scale_dependent_failure: bool,
    pub budgets: EstimatorBudgets,
}

/// Measure of a closed ball under the q=2 proxy.
pub(crate) fn ball_mass(space: &FiniteMetricSpace, x: PointId, r: f64, proxy_scale: f64) -> f64 {
    let ball = space.ball(x, r);
    if let Some(w) = space.weight2() {
        let mut vals: Vec<f64> = ball.iter().map(|&p| w[p]).collect();
        vals.sort_by(f64::total_cmp);
        vals.iter().sum()
    } else {
        covering_count(space, &ball, proxy_scale) as f64 * proxy_scale * proxy_scale
    }
}

/// Estimate the two-sided Ahlfors 2-regularity constant of `subset`.
///
/// Uses area weights when the space carries them, otherwise the covering
/// proxy at `proxy_scale` (defaults to the sample spacing).
pub fn ahlfors_estimate(
    space: &FiniteMetricSpace,
    subset: &[PointId],
    window: (f64, f64),
    proxy_scale: Option<f64>,
    budgets: &EstimatorBudgets,
) -> Result<RegularityReport> {
    if subset.is_empty() {
        return Err(GeomError::EmptyInput("ahlfors estimate needs a nonempty subset".into()));
    }
    let assouad = assouad_estimate(space, subset, window, budgets)?;
    let scale = proxy_scale.unwrap_or_else(|| space.spacing().max(f64::MIN_POSITIVE));
    let centers = sample_centers(space, subset, budgets.max_centers);
    let radii = radius_grid(window, budgets.radii_per_octave);

    let mut c_global: f64 = 1.0;
    let mut worst = None;
    let mut per_scale = Vec::new();
    let mut degenerate = Vec::new();
    for &r in &radii {
        let mut max_ratio = f64::NEG_INFINITY;
        let mut min_ratio = f64::INFINITY;
        for &x in &centers {
            let mass = ball_mass(space, x, r, scale);
            if mass <= 0.0 {
                degenerate.push((x, r));
                continue;
            }
            let ratio = mass / (r * r);
            if ratio > max_ratio {
                max_ratio = ratio;
            }
            if ratio < min_ratio {
                min_ratio = ratio;
            }
            let c_here = ratio.max(1.0 / ratio);
            if c_here > c_global {
                c_global = c_here;
                worst = Some((x, r));
            }
        }
        if max_ratio.is_finite() {
            per_scale.push(ScaleRow {
                r,
                max_ratio,
                min_ratio,
                c_at_scale: max_ratio.max(1.0 / min_ratio),
            });
        }
    }
    let (mut c_best, mut c_worst) = (f64::INFINITY, 0.0_f64);
    for row in &per_scale {
        c_best = c_best.min(row.c_at_scale);
        c_worst = c_worst.max(row.c_at_scale);
    }
    let scale_dependent_failure = per_scale.len() >= 2 && c_worst > 2.0 * c_best;
    Ok(RegularityReport {
        window,
        q_hat: assouad.q_hat,
        d_hat: assouad.d_hat,
        c_ahlfors: c_global,
        worst_witness: worst,
        per_scale,
        degenerate,
        scale_dependent_failure,
        budgets: *budgets,
    })
}

// ---------------------------------------------------------------------------
// Linear local connectivity
// ---------------------------------------------------------------------------

/// LLC constants with their worst witnesses.
#[derive(Debug, Clone, Serialize)]
pub struct LLCReport {
    pub lambda1: f64,
    pub lambda2: f64,
    pub worst1: Option<LLCWitness>,
    pub worst2: Option<LLCWitness>,
    /// (center, radius) combinations whose required connections do not exist
    /// at any inflation; the constant is infinite when nonempty.
    pub unreachable: Vec<(PointId, f64)>,
    pub window: (f64, f64),
    pub budgets: EstimatorBudgets,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LLCWitness {
    pub center: PointId,
    pub r: f64,
    /// Radius at which the required points finally connected.
    pub connect_radius: f64,
}

/// First-condition constant for one (center, radius): the smallest inflation
/// of the ball inside which all ball points connect in the h-graph. `order`
/// must list all points sorted by distance from `x`.
fn llc1_at(space: &FiniteMetricSpace, order: &[PointId], x: PointId, r: f64) -> Option<f64> {
    let mut is_member = vec![false; space.len()];
    let mut member_count = 0usize;
    for &p in order {
        if space.dist(x, p) < r {
            is_member[p] = true;
            member_count += 1;
        }
    }
    if member_count < 2 {
        return Some(1.0); // vacuous
    }
    let mut uf = UnionFind::new(space.len());
    let mut added = vec![false; space.len()];
    let mut added_members = 0usize;
    let mut member_roots = 0usize;
    let mut root_members = vec![0u32; space.len()];
    for &p in order {
        added[p] = true;
        if is_member[p] {
            added_members += 1;
            root_members[uf.find(p as u32) as usize] += 1;
            member_roots += 1;
        }
        for &(v, _) in &space.adjacency()[p] {
            if added[v as usize] {
                let (ra, rb) = (uf.find(p as u32), uf.find(v));
                if ra != rb {
                    let both = root_members[ra as usize] > 0 && root_members[rb as usize] > 0;
                    let merged = root_members[ra as usize] + root_members[rb as usize];
                    if let Some((big, _)) = uf.union(ra, rb) {
                        root_members[big as usize] = merged;
                        if both {
                            member_roots -= 1;
                        }
                    }
                }
            }
        }
        if added_members == member_count && member_roots == 1 {
            return Some(space.dist(x, p).max(r) / r);
        }
    }
    None
}

/// Second-condition constant for one (center, radius): the largest deflation
/// r/rho such that points of `domain` outside the ball connect without
/// entering B(x, rho). Points are added farthest-first.
fn llc2_at(space: &FiniteMetricSpace, domain: &[PointId], x: PointId, r: f64) -> Option<f64> {
    let mut order: Vec<PointId> = domain.to_vec();
    order.sort_by(|&a, &b| {
        space.dist(x, b).total_cmp(&space.dist(x, a)).then_with(|| a.cmp(&b))
    });
    let mut in_domain = vec![false; space.len()];
    for &p in domain {
        in_domain[p] = true;
    }
    let mut is_member = vec![false; space.len()];
    let mut member_count = 0usize;
    for &p in domain {
        if space.dist(x, p) >= r {
            is_member[p] = true;
            member_count += 1;
        }
    }
    if member_count < 2 {
        return Some(1.0);
    }
    let mut uf = UnionFind::new(space.len());
    let mut added = vec![false; space.len()];
    let mut added_members = 0usize;
    let mut member_roots = 0usize;
    let mut root_members = vec![0u32; space.len()];
    for &p in &order {
        added[p] = true;
        if is_member[p] {
            added_members += 1;
            root_members[uf.find(p as u32) as usize] += 1;
            member_roots += 1;
        }
        for &(v, _) in &space.adjacency()[p] {
            if added[v as usize] && in_domain[v as usize] {
                let (ra, rb) = (uf.find(p as u32), uf.find(v));
                if ra != rb {
                    let both = root_members[ra as usize] > 0 && root_members[rb as usize] > 0;
                    let merged = root_members[ra as usize] + root_members[rb as usize];
                    if let Some((big, _)) = uf.union(ra, rb) {
                        root_members[big as usize] = merged;
                        if both {
                            member_roots -= 1;
                        }
                    }
                }
            }
        }
        if added_members == member_count && member_roots == 1 {
            let rho = space.dist(x, p).min(r);
            if rho <= 0.0 {
                return None;
            }
            return Some(r / rho);
        }
    }
    None
}

/// Estimate the relative LLC constants of `subset` over a scale window.
///
/// Condition one connects pairs of space points inside inflated balls;
/// condition two connects subset points outside deflated balls and is only
/// evaluated where the ball is compactly inside the subset.
pub fn llc_estimate(
    space: &FiniteMetricSpace,
    subset: &[PointId],
    window: (f64, f64),
    budgets: &EstimatorBudgets,
) -> Result<LLCReport> {
    if subset.is_empty() {
        return Err(GeomError::EmptyInput("llc estimate needs a nonempty subset".into()));
    }
    let centers = sample_centers(space, subset, budgets.llc_centers);
    let radii = radius_grid(window, budgets.radii_per_octave.min(4));
    let mut in_subset = vec![false; space.len()];
    for &p in subset {
        in_subset[p] = true;
    }
    let whole = subset.len() == space.len();
    let h = space.connect_radius();

    let mut lambda1: f64 = 1.0;
    let mut lambda2: f64 = 1.0;
    let (mut worst1, mut worst2) = (None, None);
    let mut unreachable = Vec::new();
    for &x in &centers {
        let mut order: Vec<PointId> = (0..space.len()).collect();
        order.sort_by(|&a, &b| {
            space.dist(x, a).total_cmp(&space.dist(x, b)).then_with(|| a.cmp(&b))
        });
        for &r in &radii {
            match llc1_at(space, &order, x, r) {
                Some(l) => {
                    if l > lambda1 {
                        lambda1 = l;
                        worst1 = Some(LLCWitness { center: x, r, connect_radius: l * r });
                    }
                }
                None => unreachable.push((x, r)),
            }
            // Compact containment guard for the second condition.
            let compact = whole || space.ball(x, r + 2.0 * h).iter().all(|&p| in_subset[p]);
            if compact {
                match llc2_at(space, subset, x, r) {
                    Some(l) => {
                        if l > lambda2 {
                            lambda2 = l;
                            worst2 = Some(LLCWitness { center: x, r, connect_radius: r / l });
                        }
                    }
                    None => unreachable.push((x, r)),
                }
            }
        }
    }
    Ok(LLCReport { lambda1, lambda2, worst1, worst2, unreachable, window, budgets: *budgets })
}

// ---------------------------------------------------------------------------
// Three-point condition
// ---------------------------------------------------------------------------

/// Certificate for the three-point condition of a Jordan loop: the smaller
/// complementary-arc diameter between the worst pair is lambda times the
/// pair's distance.
#[derive(Debug, Clone, Serialize)]
pub struct ThreePointCertificate {
    pub lambda: f64,
    pub worst_pair: (PointId, PointId),
}

/// Exact scan over all vertex pairs of the loop: for each pair, the smaller
/// complementary-arc diameter against the pair distance.
pub fn three_point_constant(
    space: &FiniteMetricSpace,
    lp: &DiscreteLoop,
) -> Result<ThreePointCertificate> {
    let n = lp.points.len();
    if n < 4 {
        return Err(GeomError::DegenerateLoop(n));
    }
    let pts = &lp.points;
    // diam_fwd[a*n+b]: diameter of the cyclic arc a -> b (forward, inclusive).
    let mut diam_fwd = vec![0.0f64; n * n];
    for a in 0..n {
        let mut cur: f64 = 0.0;
        for step in 1..n {
            let b = (a + step) % n;
            let mut far: f64 = 0.0;
            for k in 0..step {
                far = far.max(space.dist(pts[(a + k) % n], pts[b]));
            }
            cur = cur.max(far);
            diam_fwd[a * n + b] = cur;
        }
    }
    let mut lambda: f64 = 1.0;
    let mut worst = (pts[0], pts[1]);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = space.dist(pts[i], pts[j]);
            let smaller = diam_fwd[i * n + j].min(diam_fwd[j * n + i]);
            let ratio = smaller / d;
            if ratio > lambda {
                lambda = ratio;
                worst = (pts[i], pts[j]);
            }
        }
    }
    Ok(ThreePointCertificate { lambda, worst_pair: worst })
}

// ---------------------------------------------------------------------------
// Porosity
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PorosityWitness {
    pub y: PointId,
    pub r: f64,
    /// Smallest grid constant that admitted a witness at this (y, r).
    pub c: f64,
    pub x: PointId,
}

/// Porosity certification for a subset Y: witness balls of radius r/C that
/// avoid Y while staying inside B(y, r).
#[derive(Debug, Clone, Serialize)]
pub struct PorosityReport {
    /// Smallest tested constant valid for every sampled (y, r); `None` when
    /// some sample failed even at the largest candidate.
    pub c_por: Option<f64>,
    pub witnesses: Vec<PorosityWitness>,
    pub failed: Vec<(PointId, f64)>,
    pub window: (f64, f64),
    pub budgets: EstimatorBudgets,
}

const POROSITY_GRID: [f64; 18] = [
    1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0, 8.0, 10.0, 12.0, 16.0, 24.0, 32.0,
    48.0, 64.0,
];

/// Check one porosity witness: the open ball B(x, rc) must avoid Y and sit
/// inside the open ball B(y, r); verified pointwise on the sample.
pub fn porosity_witness_valid(
    space: &FiniteMetricSpace,
    in_y: &[bool],
    y: PointId,
    r: f64,
    x: PointId,
    rc: f64,
) -> bool {
    if space.dist(x, y) >= r {
        return false;
    }
    let mut inner = space.neighbors_within(x, rc);
    inner.push(x as u32);
    for &p in &inner {
        let p = p as usize;
        if space.dist(x, p) < rc && (in_y[p] || space.dist(y, p) >= r) {
            return false;
        }
    }
    true
}

/// Estimate the porosity constant of Y over a scale window: the smallest
/// grid constant C such that every sampled (y in Y, r) admits a point x with
/// B(x, r/C) inside B(y, r) and disjoint from Y.
pub fn porosity_constant(
    space: &FiniteMetricSpace,
    y_subset: &[PointId],
    window: (f64, f64),
    budgets: &EstimatorBudgets,
) -> Result<PorosityReport> {
    if y_subset.is_empty() {
        return Err(GeomError::EmptyInput("porosity needs a nonempty subset".into()));
    }
    let mut in_y = vec![false; space.len()];
    for &p in y_subset {
        in_y[p] = true;
    }
    // Clearance from Y for every point.
    let dist_y: Vec<f64> = (0..space.len())
        .map(|p| y_subset.iter().map(|&q| space.dist(p, q)).fold(f64::INFINITY, f64::min))
        .collect();
    let centers = sample_centers(space, y_subset, budgets.llc_centers);
    let radii = radius_grid(window, budgets.radii_per_octave.min(4));

    let mut witnesses = Vec::new();
    let mut failed = Vec::new();
    for &y in &centers {
        for &r in &radii {
            let mut candidates: Vec<PointId> =
                space.ball(y, r).into_iter().filter(|&p| dist_y[p] > 0.0).collect();
            // The largest witness ball at x has radius bounded by both the
            // clearance from Y and the room left inside B(y, r).
            let margin = |p: PointId| dist_y[p].min(r - space.dist(y, p));
            candidates.sort_by(|&a, &b| {
                margin(b)
                    .total_cmp(&margin(a))
                    .then_with(|| space.dist(y, a).total_cmp(&space.dist(y, b)))
                    .then_with(|| a.cmp(&b))
            });
            let mut found = None;
            'grid: for &c in POROSITY_GRID.iter() {
                let rc = r / c;
                for &x in candidates.iter().take(16) {
                    if dist_y[x] >= rc && porosity_witness_valid(space, &in_y, y, r, x, rc) {
                        found = Some(PorosityWitness { y, r, c, x });
                        break 'grid;
                    }
                }
            }
            match found {
                Some(w) => witnesses.push(w),
                None => failed.push((y, r)),
            }
        }
    }
    let c_por = if failed.is_empty() && !witnesses.is_empty() {
        Some(witnesses.iter().map(|w| w.c).fold(0.0, f64::max))
    } else {
        None
    };
    Ok(PorosityReport { c_por, witnesses, failed, window, budgets: *budgets })
}

// ---------------------------------------------------------------------------
// Winding numbers
// ---------------------------------------------------------------------------

/// Winding number of a closed chart polygon about `z` by signed turn angles.
/// The polygon may repeat vertices. Errors when a vertex sits on `z`, when
/// some edge subtends an angle of pi or more (resolution too coarse), or
/// when the angle sum is not close to an integer multiple of 2 pi.
pub fn winding_of_polygon(polygon: &[[f64; 2]], z: [f64; 2]) -> Result<i32> {
    if polygon.len() < 2 {
        return Err(GeomError::DegenerateLoop(polygon.len()));
    }
    let mut total = 0.0;
    let n = polygon.len();
    for i in 0..n {
        let p = polygon[i];
        let q = polygon[(i + 1) % n];
        let a = [p[0] - z[0], p[1] - z[1]];
        let b = [q[0] - z[0], q[1] - z[1]];
        let na = (a[0] * a[0] + a[1] * a[1]).sqrt();
        let nb = (b[0] * b[0] + b[1] * b[1]).sqrt();
        if na == 0.0 || nb == 0.0 {
            return Err(GeomError::WindingResolution(format!(
                "polygon vertex {i} coincides with the query point"
            )));
        }
        let cross = a[0] * b[1] - a[1] * b[0];
        let dot = a[0] * b[0] + a[1] * b[1];
        let ang = cross.atan2(dot);
        if ang.abs() >= std::f64::consts::PI * (1.0 - 1e-9) {
            return Err(GeomError::WindingResolution(format!(
                "edge {i} subtends an angle of pi or more at the query point"
            )));
        }
        total += ang;
    }
    let turns = total / std::f64::consts::TAU;
    let rounded = turns.round();
    if (turns - rounded).abs() >= 0.01 {
        return Err(GeomError::WindingResolution(format!(
            "angle sum {turns:.4} turns is not close to an integer"
        )));
    }
    Ok(rounded as i32)
}

/// Winding number of a loop about a space point, through the chart.
pub fn winding_number(space: &FiniteMetricSpace, lp: &DiscreteLoop, z: PointId) -> Result<i32> {
    let chart = space.chart().ok_or(GeomError::MissingChart)?;
    if lp.points.contains(&z) {
        return Err(GeomError::WindingResolution(format!("query point {z} lies on the loop")));
    }
    let poly: Vec<[f64; 2]> = lp.points.iter().map(|&p| chart[p]).collect();
    winding_of_polygon(&poly, chart[z])
}

// ---------------------------------------------------------------------------
// Loop closeness (controlled homotopy hypotheses)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct QueryCheck {
    pub z: PointId,
    /// Inside the guard tube around the second loop; no assertion made.
    pub excluded: bool,
    pub ind_alpha: Option<i32>,
    pub ind_beta: Option<i32>,
    pub equal: bool,
}

/// Result of checking that two matched loops are pointwise and segmentwise
/// delta-close, and that winding numbers agree outside the guard tube.
#[derive(Debug, Clone, Serialize)]
pub struct ClosenessReport {
    pub hypotheses_pass: bool,
    /// Index and description of the first violated hypothesis.
    pub violation: Option<(usize, String)>,
    /// Radius 2 Lambda delta (Lambda + 1) of the tube around the second loop
    /// inside which winding equality is not asserted.
    pub tube_radius: f64,
    pub checks: Vec<QueryCheck>,
    pub windings_agree: bool,
}

/// Certify the closeness hypotheses for two loops with matched cyclic
/// parameters (equal vertex counts, index i on one loop corresponding to
/// index i on the other) and assert equal winding numbers for query points
/// clear of the guard tube.
pub fn certify_loop_closeness(
    space: &FiniteMetricSpace,
    alpha: &DiscreteLoop,
    beta: &DiscreteLoop,
    delta: f64,
    big_lambda: f64,
    queries: &[PointId],
) -> Result<ClosenessReport> {
    let n = alpha.points.len();
    if n != beta.points.len() {
        return Err(GeomError::InvalidParameter(format!(
            "loops have {n} and {} vertices; matched parameters required",
            beta.points.len()
        )));
    }
    let mut violation = None;
    for i in 0..n {
        let d = space.dist(alpha.points[i], beta.points[i]);
        if d > delta {
            violation = Some((i, format!("vertex distance {d} exceeds delta {delta}")));
            break;
        }
        let j = (i + 1) % n;
        let da = space.dist(alpha.points[i], alpha.points[j]);
        let db = space.dist(beta.points[i], beta.points[j]);
        if da > delta || db > delta {
            violation = Some((
                i,
                format!("segment diameter {max} exceeds delta {delta}", max = da.max(db)),
            ));
            break;
        }
    }
    let hypotheses_pass = violation.is_none();
    let tube_radius = 2.0 * big_lambda * delta * (big_lambda + 1.0);
    let mut checks = Vec::new();
    let mut windings_agree = true;
    if hypotheses_pass {
        for &z in queries {
            let dist_beta =
                beta.points.iter().map(|&p| space.dist(z, p)).fold(f64::INFINITY, f64::min);
            if dist_beta <= tube_radius {
                checks.push(QueryCheck {
                    z,
                    excluded: true,
                    ind_alpha: None,
                    ind_beta: None,
                    equal: true,
                });
                continue;
            }
            let ia = winding_number(space, alpha, z).ok();
            let ib = winding_number(space, beta, z).ok();
            let equal = ia.is_some() && ia == ib;
            if !equal {
                windings_agree = false;
            }
            checks.push(QueryCheck { z, excluded: false, ind_alpha: ia, ind_beta: ib, equal });
        }
    }
    Ok(ClosenessReport { hypotheses_pass, violation, tube_radius, checks, windings_agree })
}

/// Anchor-sorted copy of a subset, exposed for report determinism.
pub fn canonical_subset(space: &FiniteMetricSpace, subset: &[PointId]) -> Vec<PointId> {
    let mut v = subset.to_vec();
    if v.is_empty() {
        return v;
    }
    let anchor = canonical_anchor(space, &v);
    v.sort_by(|&a, &b| {
        space.dist(anchor, a).total_cmp(&space.dist(anchor, b)).then_with(|| a.cmp(&b))
    });
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{generate, FixtureSpec};
    use crate::quasicircle::DiscreteLoop;
    use crate::space::{build_space, CoordMetric, DistanceSource, SpaceBuilder};

    const TAU_F: f64 = std::f64::consts::TAU;

    fn budgets() -> EstimatorBudgets {
        EstimatorBudgets { max_centers: 60, llc_centers: 24, ..Default::default() }
    }

    #[test]
    fn assouad_grid_near_two() {
        let f =
            generate(&FixtureSpec::Grid { nx: 40, ny: 40, spacing: 0.025, jitter: 0.0, seed: 0 })
                .unwrap();
        let all: Vec<usize> = (0..f.space.len()).collect();
        let rep = assouad_estimate(&f.space, &all, (0.05, 0.4), &budgets()).unwrap();
        assert!((1.8..=2.2).contains(&rep.q_hat), "Q = {}", rep.q_hat);
    }

    #[test]
    fn assouad_segment_near_one() {
        let pts: Vec<[f64; 3]> = (0..400).map(|i| [i as f64, 0.0, 0.0]).collect();
        let s =
            build_space(DistanceSource::Coords(pts, CoordMetric::Euclidean), None, None, None)
                .unwrap();
        let all: Vec<usize> = (0..400).collect();
        let rep = assouad_estimate(&s, &all, (4.0, 99.0), &budgets()).unwrap();
        assert!((0.8..=1.2).contains(&rep.q_hat), "Q = {}", rep.q_hat);
    }

    #[test]
    fn assouad_single_point_zero() {
        let s = build_space(
            DistanceSource::Coords(vec![[0.0, 0.0, 0.0]], CoordMetric::Euclidean),
            None,
            None,
            None,
        )
        .unwrap();
        let rep = assouad_estimate(&s, &[0], (0.1, 1.0), &budgets()).unwrap();
        assert_eq!(rep.q_hat, 0.0);
    }

    #[test]
    fn assouad_narrow_window_refused() {
        let f = generate(&FixtureSpec::Grid { nx: 8, ny: 8, spacing: 1.0, jitter: 0.0, seed: 0 })
            .unwrap();
        let all: Vec<usize> = (0..64).collect();
        let err = assouad_estimate(&f.space, &all, (2.0, 3.0), &budgets()).unwrap_err();
        assert!(matches!(err, GeomError::WindowTooNarrow { .. }));
    }

    #[test]
    fn snowflake_dimension_doubles() {
        let f = generate(&FixtureSpec::Snowflake { alpha: 0.5, n: 2049 }).unwrap();
        let all: Vec<usize> = (0..f.space.len()).collect();
        let (lo, hi) = f.space.default_window();
        let rep = assouad_estimate(&f.space, &all, (lo, hi), &budgets()).unwrap();
        assert!((1.7..=2.3).contains(&rep.q_hat), "Q = {}", rep.q_hat);
    }

    #[test]
    fn ahlfors_grid_constant_small() {
        let f =
            generate(&FixtureSpec::Grid { nx: 41, ny: 41, spacing: 0.025, jitter: 0.0, seed: 0 })
                .unwrap();
        let all: Vec<usize> = (0..f.space.len()).collect();
        let rep = ahlfors_estimate(&f.space, &all, (0.1, 0.25), None, &budgets()).unwrap();
        assert!(rep.c_ahlfors <= 4.0, "C = {}", rep.c_ahlfors);
        assert!(!rep.scale_dependent_failure);
        // Worst witness reproduces its ratio.
        if let Some((x, r)) = rep.worst_witness {
            let mass = ball_mass(&f.space, x, r, f.space.spacing());
            let c = (mass / (r * r)).max(r * r / mass);
            assert!((c - rep.c_ahlfors).abs() < 1e-12);
        }
    }

    #[test]
    fn ahlfors_sphere_within_window() {
        // Spherical caps: area over r^2 stays within a factor 4 for radii
        // up to a quarter of the sphere radius.
        let f = generate(&FixtureSpec::Sphere { n: 3000, radius: 1.0 }).unwrap();
        let all: Vec<usize> = (0..f.space.len()).collect();
        let rep = ahlfors_estimate(&f.space, &all, (0.12, 0.25), None, &budgets()).unwrap();
        assert!(rep.c_ahlfors <= 4.0, "C = {}", rep.c_ahlfors);
        assert!(!rep.scale_dependent_failure);
    }

    #[test]
    fn ahlfors_strip_flags_scale_failure() {
        let f = generate(&FixtureSpec::Strip { nx: 120, ny: 7, spacing: 1.0 }).unwrap();
        let all: Vec<usize> = (0..f.space.len()).collect();
        let rep = ahlfors_estimate(&f.space, &all, (2.0, 29.0), None, &budgets()).unwrap();
        assert!(rep.scale_dependent_failure, "per-scale: {:?}", rep.per_scale);
    }

    #[test]
    fn ahlfors_segment_degenerates() {
        // A 1-dimensional set fails 2-regularity: the constant blows up and
        // the failure is scale dependent.
        let pts: Vec<[f64; 3]> = (0..300).map(|i| [i as f64, 0.0, 0.0]).collect();
        let s =
            build_space(DistanceSource::Coords(pts, CoordMetric::Euclidean), None, None, None)
                .unwrap();
        let all: Vec<usize> = (0..300).collect();
        let rep = ahlfors_estimate(&s, &all, (4.0, 70.0), None, &budgets()).unwrap();
        assert!(rep.c_ahlfors > 10.0, "C = {}", rep.c_ahlfors);
        assert!(rep.scale_dependent_failure);
    }

    #[test]
    fn llc_flat_disk_near_one() {
        let f = generate(&FixtureSpec::FlatDisk { rings: 16, spacing: 0.0625 }).unwrap();
        let all: Vec<usize> = (0..f.space.len()).collect();
        let rep = llc_estimate(&f.space, &all, (0.2, 0.45), &budgets()).unwrap();
        assert!(rep.lambda1 <= 1.3, "lambda1 = {}", rep.lambda1);
        assert!(rep.lambda2 <= 1.6, "lambda2 = {}", rep.lambda2);
        assert!(rep.unreachable.is_empty());
    }

    #[test]
    fn llc_dumbbell_blows_up_at_neck() {
        let f = generate(&FixtureSpec::Dumbbell {
            lobe_radius: 2.0,
            neck_halflength: 5.0,
            neck_halfwidth: 0.25,
            spacing: 0.125,
        })
        .unwrap();
        let all: Vec<usize> = (0..f.space.len()).collect();
        let rep = llc_estimate(&f.space, &all, (0.4, 1.0), &budgets()).unwrap();
        assert!(rep.lambda1 > 4.0, "lambda1 = {}", rep.lambda1);
        // Witness replay: connect radius over r reproduces the constant.
        let w = rep.worst1.unwrap();
        assert!((w.connect_radius / w.r - rep.lambda1).abs() < 1e-9);
    }

    #[test]
    fn llc_two_points_vacuous() {
        let s = build_space(
            DistanceSource::Coords(
                vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
                CoordMetric::Euclidean,
            ),
            None,
            None,
            Some(1.5),
        )
        .unwrap();
        let rep = llc_estimate(&s, &[0, 1], (0.1, 0.4), &budgets()).unwrap();
        assert_eq!(rep.lambda1, 1.0);
    }

    #[test]
    fn three_point_circle_is_one() {
        let f = generate(&FixtureSpec::CircleLoop { n: 256, radius: 1.0 }).unwrap();
        let lp = DiscreteLoop::new(&f.space, (0..256).collect()).unwrap();
        let cert = three_point_constant(&f.space, &lp).unwrap();
        assert!((cert.lambda - 1.0).abs() <= 0.02, "lambda' = {}", cert.lambda);
    }

    #[test]
    fn three_point_square_matches_scan() {
        let mut pts = Vec::new();
        let m = 8;
        for i in 0..m {
            pts.push([i as f64 / m as f64, 0.0, 0.0]);
        }
        for i in 0..m {
            pts.push([1.0, i as f64 / m as f64, 0.0]);
        }
        for i in 0..m {
            pts.push([1.0 - i as f64 / m as f64, 1.0, 0.0]);
        }
        for i in 0..m {
            pts.push([0.0, 1.0 - i as f64 / m as f64, 0.0]);
        }
        let s = build_space(
            DistanceSource::Coords(pts, CoordMetric::Euclidean),
            None,
            None,
            Some(0.2),
        )
        .unwrap();
        let lp = DiscreteLoop::new(&s, (0..4 * m).collect()).unwrap();
        let cert = three_point_constant(&s, &lp).unwrap();
        // The scan is its own oracle: replay the worst pair by brute force.
        let (u, v) = cert.worst_pair;
        let iu = lp.points.iter().position(|&p| p == u).unwrap();
        let iv = lp.points.iter().position(|&p| p == v).unwrap();
        let (a, b) = (iu.min(iv), iu.max(iv));
        let arc1: Vec<usize> = lp.points[a..=b].to_vec();
        let arc2: Vec<usize> =
            lp.points[b..].iter().chain(lp.points[..=a].iter()).copied().collect();
        let diam = |arc: &[usize]| {
            let mut d: f64 = 0.0;
            for i in 0..arc.len() {
                for j in (i + 1)..arc.len() {
                    d = d.max(s.dist(arc[i], arc[j]));
                }
            }
            d
        };
        let expect = diam(&arc1).min(diam(&arc2)) / s.dist(u, v);
        assert!((cert.lambda - expect).abs() < 1e-12);
    }

    #[test]
    fn three_point_pinched_loop_blows_up() {
        // An ellipse squeezed to a pinch in the middle: the pinch pair is
        // close but both complementary arcs run the full lobes.
        let n = 64;
        let delta = 0.001;
        let mut pts: Vec<[f64; 3]> = Vec::new();
        for i in 0..n {
            let t = TAU_F * i as f64 / n as f64;
            let x = t.cos();
            let squeeze = delta + (1.0 - delta) * x.abs();
            pts.push([x, 0.3 * t.sin() * squeeze, 0.0]);
        }
        let s = build_space(
            DistanceSource::Coords(pts, CoordMetric::Euclidean),
            None,
            None,
            Some(0.4),
        )
        .unwrap();
        let lp = DiscreteLoop::new(&s, (0..n).collect()).unwrap();
        let cert = three_point_constant(&s, &lp).unwrap();
        assert!(cert.lambda > 100.0, "lambda' = {}", cert.lambda);
    }

    #[test]
    fn three_point_degenerate_rejected() {
        let f = generate(&FixtureSpec::CircleLoop { n: 8, radius: 1.0 }).unwrap();
        let lp = DiscreteLoop::new(&f.space, vec![0, 1, 2]).unwrap();
        assert!(matches!(
            three_point_constant(&f.space, &lp),
            Err(GeomError::DegenerateLoop(3))
        ));
    }

    #[test]
    fn flat_disk_hypothesis_bundle() {
        // The full hypothesis set the loop construction consumes, on one
        // fixture: plane-like covering exponent, small regularity constant,
        // near-convex connectivity, and a round boundary.
        let f = generate(&FixtureSpec::FlatDisk { rings: 24, spacing: 1.0 / 24.0 }).unwrap();
        let s = &f.space;
        let all: Vec<usize> = (0..s.len()).collect();
        let window = s.default_window();
        let b = budgets();
        let reg = ahlfors_estimate(s, &all, window, None, &b).unwrap();
        assert!((1.8..=2.2).contains(&reg.q_hat), "Q = {}", reg.q_hat);
        assert!(reg.c_ahlfors <= 4.0, "C = {}", reg.c_ahlfors);
        let llc = llc_estimate(s, &all, window, &b).unwrap();
        assert!(llc.lambda1 <= 1.3, "lambda1 = {}", llc.lambda1);
        // Boundary ring as a loop: three-point constant close to one.
        let mut rim: Vec<usize> = (0..s.len())
            .filter(|&p| {
                let c = s.chart_point(p).unwrap();
                (c[0].hypot(c[1]) - 1.0).abs() < 1e-9
            })
            .collect();
        rim.sort_by(|&a, &b| {
            let (ca, cb) = (s.chart_point(a).unwrap(), s.chart_point(b).unwrap());
            ca[1].atan2(ca[0]).total_cmp(&cb[1].atan2(cb[0]))
        });
        let lp = DiscreteLoop::new(s, rim).unwrap();
        let cert = three_point_constant(s, &lp).unwrap();
        assert!(cert.lambda <= 1.1, "boundary lambda' = {}", cert.lambda);
    }

    #[test]
    fn closeness_identical_loops_pass() {
        let f = generate(&FixtureSpec::CircleLoop { n: 32, radius: 1.0 }).unwrap();
        let lp = DiscreteLoop::new(&f.space, (0..32).collect()).unwrap();
        // Any delta above the segment diameters works.
        let delta = 1.1 * lp.edge_lengths.iter().cloned().fold(0.0, f64::max);
        let rep = certify_loop_closeness(&f.space, &lp, &lp.clone(), delta, 1.0, &[]).unwrap();
        assert!(rep.hypotheses_pass);
    }

    #[test]
    fn porosity_single_point() {
        let f = generate(&FixtureSpec::Grid { nx: 41, ny: 41, spacing: 1.0, jitter: 0.0, seed: 0 })
            .unwrap();
        let y = 20 * 41 + 20; // center
        // Radii at lattice-even multiples of the spacing so the ideal
        // witness at distance r/2 exists exactly.
        let b = EstimatorBudgets { radii_per_octave: 1, ..budgets() };
        let rep = porosity_constant(&f.space, &[y], (4.0, 16.0), &b).unwrap();
        let c = rep.c_por.expect("porous");
        assert!(c <= 2.0, "C = {c}");
        // Witness recheck.
        let mut in_y = vec![false; f.space.len()];
        in_y[y] = true;
        for w in &rep.witnesses {
            assert!(porosity_witness_valid(&f.space, &in_y, w.y, w.r, w.x, w.r / w.c));
        }
    }

    #[test]
    fn porosity_whole_space_fails() {
        let f = generate(&FixtureSpec::Grid { nx: 12, ny: 12, spacing: 1.0, jitter: 0.0, seed: 0 })
            .unwrap();
        let all: Vec<usize> = (0..f.space.len()).collect();
        let rep = porosity_constant(&f.space, &all, (2.0, 5.0), &budgets()).unwrap();
        assert!(rep.c_por.is_none());
        assert!(!rep.failed.is_empty());
    }

    #[test]
    fn porosity_boundary_circle_in_disk() {
        let f = generate(&FixtureSpec::FlatDisk { rings: 20, spacing: 0.05 }).unwrap();
        let s = &f.space;
        let boundary: Vec<usize> = (0..s.len())
            .filter(|&p| {
                let c = s.chart_point(p).unwrap();
                (c[0].hypot(c[1]) - 1.0).abs() < 1e-9
            })
            .collect();
        assert!(!boundary.is_empty());
        let rep = porosity_constant(s, &boundary, (0.2, 0.5), &budgets()).unwrap();
        let c = rep.c_por.expect("boundary is porous in the disk");
        assert!(c <= 4.0, "C = {c}");
    }

    #[test]
    fn winding_circle_orientation() {
        let mut pts: Vec<[f64; 3]> = vec![[0.0, 0.0, 0.0]];
        for i in 0..64 {
            let t = TAU_F * i as f64 / 64.0;
            pts.push([t.cos(), t.sin(), 0.0]);
        }
        let chart: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], p[1]]).collect();
        let s = SpaceBuilder::new(DistanceSource::Coords(pts, CoordMetric::Euclidean))
            .chart(chart)
            .connect_radius(0.2)
            .build()
            .unwrap();
        let lp = DiscreteLoop::new(&s, (1..=64).collect()).unwrap();
        assert_eq!(winding_number(&s, &lp, 0).unwrap(), 1);
        assert_eq!(winding_number(&s, &lp.reversed(), 0).unwrap(), -1);
    }

    #[test]
    fn winding_outside_is_zero() {
        let poly: Vec<[f64; 2]> = (0..32)
            .map(|i| {
                let t = TAU_F * i as f64 / 32.0;
                [t.cos(), t.sin()]
            })
            .collect();
        assert_eq!(winding_of_polygon(&poly, [3.0, 0.0]).unwrap(), 0);
    }

    #[test]
    fn winding_back_and_forth_arc_is_zero() {
        let mut poly: Vec<[f64; 2]> = (0..10).map(|i| [i as f64 * 0.1, 0.3]).collect();
        let back: Vec<[f64; 2]> = poly.iter().rev().copied().collect();
        poly.extend_from_slice(&back[1..back.len() - 1]);
        assert_eq!(winding_of_polygon(&poly, [0.45, 0.0]).unwrap(), 0);
    }

    #[test]
    fn winding_concatenation_additive() {
        // Two based loops about the origin traversed in sequence: indices add.
        let mut seq: Vec<[f64; 2]> = Vec::new();
        let base = [1.0, 0.0];
        seq.push(base);
        for i in 1..24 {
            let t = TAU_F * i as f64 / 24.0;
            seq.push([t.cos(), t.sin()]);
        }
        seq.push(base);
        for i in 1..24 {
            let t = TAU_F * i as f64 / 24.0;
            seq.push([1.2 * t.cos(), 1.2 * t.sin()]);
        }
        let ind = winding_of_polygon(&seq, [0.0, 0.0]).unwrap();
        assert_eq!(ind, 2);
    }

    #[test]
    fn closeness_circle_vs_rotated() {
        let n = 64;
        let mut pts: Vec<[f64; 3]> = vec![[0.0, 0.0, 0.0]];
        for i in 0..n {
            let t = TAU_F * i as f64 / n as f64;
            pts.push([t.cos(), t.sin(), 0.0]);
        }
        for i in 0..n {
            let t = TAU_F * (i as f64 + 0.3) / n as f64;
            pts.push([1.0001 * t.cos(), 1.0001 * t.sin(), 0.0]);
        }
        let chart: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], p[1]]).collect();
        let s = SpaceBuilder::new(DistanceSource::Coords(pts, CoordMetric::Euclidean))
            .chart(chart)
            .connect_radius(0.25)
            .build()
            .unwrap();
        let alpha = DiscreteLoop::new(&s, (1..=n).collect()).unwrap();
        let beta = DiscreteLoop::new(&s, (n + 1..=2 * n).collect()).unwrap();
        let rep = certify_loop_closeness(&s, &alpha, &beta, 0.2, 0.25, &[0]).unwrap();
        assert!(rep.hypotheses_pass);
        // Tube radius 2*0.25*0.2*1.25 = 0.125 < 1, so the center is checked.
        assert!(!rep.checks[0].excluded);
        assert!(rep.windings_agree);
    }

    #[test]
    fn closeness_guard_tube_excludes_near_queries() {
        // With a large contractibility constant the guard tube swallows the
        // query point; no winding assertion is made there.
        let n = 32;
        let mut pts: Vec<[f64; 3]> = vec![[0.9, 0.0, 0.0]];
        for i in 0..n {
            let t = TAU_F * i as f64 / n as f64;
            pts.push([t.cos(), t.sin(), 0.0]);
        }
        let chart: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], p[1]]).collect();
        let s = SpaceBuilder::new(DistanceSource::Coords(pts, CoordMetric::Euclidean))
            .chart(chart)
            .connect_radius(0.5)
            .build()
            .unwrap();
        let lp = DiscreteLoop::new(&s, (1..=n).collect()).unwrap();
        let rep = certify_loop_closeness(&s, &lp, &lp.clone(), 0.25, 4.0, &[0]).unwrap();
        assert!(rep.hypotheses_pass);
        // Tube radius 2 * 4 * 0.25 * 5 = 10 covers everything.
        assert!(rep.checks[0].excluded);
    }

    #[test]
    fn closeness_violation_reported() {
        let n = 16;
        let mut pts: Vec<[f64; 3]> = Vec::new();
        for i in 0..n {
            let t = TAU_F * i as f64 / n as f64;
            pts.push([t.cos(), t.sin(), 0.0]);
        }
        for i in 0..n {
            let t = TAU_F * i as f64 / n as f64;
            pts.push([5.0 + t.cos(), t.sin(), 0.0]);
        }
        let s = build_space(
            DistanceSource::Coords(pts, CoordMetric::Euclidean),
            None,
            None,
            Some(1.0),
        )
        .unwrap();
        let alpha = DiscreteLoop::new(&s, (0..n).collect()).unwrap();
        let beta = DiscreteLoop::new(&s, (n..2 * n).collect()).unwrap();
        let rep = certify_loop_closeness(&s, &alpha, &beta, 0.5, 1.0, &[]).unwrap();
        assert!(!rep.hypotheses_pass);
        assert!(rep.violation.is_some());
    }
}
