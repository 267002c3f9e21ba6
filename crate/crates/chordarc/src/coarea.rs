//! Level-set decompositions of distance functions, the co-area inequality
//! check, quasiconvex path construction through good level bands, and the
//! discrete modulus lower bound.
//!
//! Levels are bands of width `w` around grid values of the distance to a
//! base continuum, since exact distance levels are measure zero on samples.
//! The quasiconvex path construction connects two points by routing through
//! a low-measure band around a quasiarc between them and recursing on the
//! remaining gaps.

use serde::Serialize;

use crate::arcs::{self, DiscreteArc};
use crate::error::{GeomError, Result};
use crate::graph;
use crate::space::{hausdorff_proxy, FiniteMetricSpace, PathMetricSpace, PointId};

/// Banded level sets of the distance function to a base continuum.
#[derive(Debug, Clone, Serialize)]
pub struct LevelSetDecomposition {
    pub base: Vec<PointId>,
    pub band_width: f64,
    pub t_max: f64,
    /// Band centers (k + 1/2) w for k = 0..bands.len().
    pub t_grid: Vec<f64>,
    /// Per point: graph distance to the base.
    pub dist: Vec<f64>,
    /// Band k holds points with dist in [k w, (k+1) w), excluding the base
    /// itself.
    pub bands: Vec<Vec<PointId>>,
    /// Number of h-graph components of {dist > t} per band center t.
    pub outer_components: Vec<usize>,
}

impl LevelSetDecomposition {
    /// Points with dist <= t.
    pub fn sublevel(&self, t: f64) -> Vec<PointId> {
        (0..self.dist.len()).filter(|&p| self.dist[p] <= t).collect()
    }

    /// One-dimensional measure proxy of band k at the band-width scale.
    pub fn band_measure(&self, space: &FiniteMetricSpace, k: usize) -> f64 {
        hausdorff_proxy(space, 1, &self.bands[k], self.band_width).unwrap_or(0.0)
    }
}

/// Decompose distances from a base continuum into bands of width `w` up to
/// `t_max`. Distances are multi-source shortest paths in the h-graph.
pub fn level_sets(
    space: &FiniteMetricSpace,
    base: &[PointId],
    t_max: f64,
    w: f64,
) -> Result<LevelSetDecomposition> {
    if base.is_empty() {
        return Err(GeomError::EmptyInput("level sets need a nonempty base".into()));
    }
    if w < space.spacing() * (1.0 - 1e-9) {
        return Err(GeomError::InvalidParameter(format!(
            "band width {w} below sample spacing {}",
            space.spacing()
        )));
    }
    let sources: Vec<u32> = base.iter().map(|&p| p as u32).collect();
    let (dist, _) = graph::dijkstra(space.adjacency(), &sources);
    let nbands = if t_max <= 0.0 { 0 } else { (t_max / w).ceil() as usize };
    // Band boundaries carry a fractional offset so they do not coincide
    // with lattice distances, where a rounding flip would move whole point
    // shells between bands.
    const BAND_OFFSET: f64 = 0.37;
    let mut bands: Vec<Vec<PointId>> = vec![Vec::new(); nbands];
    for p in 0..space.len() {
        let d = dist[p];
        if d <= 0.0 || !d.is_finite() {
            continue;
        }
        let k = (d / w + BAND_OFFSET).floor() as usize;
        if k < nbands {
            bands[k].push(p);
        }
    }
    let t_grid: Vec<f64> =
        (0..nbands).map(|k| (k as f64 + 0.5 - BAND_OFFSET) * w).collect();
    let mut outer_components = Vec::with_capacity(nbands);
    for &t in &t_grid {
        let mut uf = graph::UnionFind::new(space.len());
        let outside: Vec<PointId> = (0..space.len()).filter(|&p| dist[p] > t).collect();
        let in_out: Vec<bool> = (0..space.len()).map(|p| dist[p] > t).collect();
        for &p in &outside {
            for &(q, _) in &space.adjacency()[p] {
                if in_out[q as usize] {
                    uf.union(p as u32, q);
                }
            }
        }
        let mut roots = std::collections::HashSet::new();
        for &p in &outside {
            roots.insert(uf.find(p as u32));
        }
        outer_components.push(roots.len());
    }
    Ok(LevelSetDecomposition {
        base: base.to_vec(),
        band_width: w,
        t_max,
        t_grid,
        dist,
        bands,
        outer_components,
    })
}

/// Both sides of the co-area comparison and their ratio, the empirical
/// constant of the space.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoareaCheck {
    /// Sum over bands of band-length times band width.
    pub lhs: f64,
    /// Area proxy of the filled region up to the last band.
    pub rhs: f64,
    pub ratio: f64,
}

/// Compare the integrated band lengths against the area they sweep.
pub fn coarea_check(
    space: &FiniteMetricSpace,
    decomp: &LevelSetDecomposition,
) -> Result<CoareaCheck> {
    let w = decomp.band_width;
    let mut lhs = 0.0;
    for k in 0..decomp.bands.len() {
        lhs += decomp.band_measure(space, k) * w;
    }
    let region = decomp.sublevel(decomp.t_max.max(
        decomp.t_grid.last().copied().unwrap_or(0.0) + 0.5 * w,
    ));
    let rhs = hausdorff_proxy(space, 2, &region, w)?;
    if rhs <= 0.0 {
        return Err(GeomError::InvalidParameter("swept region has zero measure".into()));
    }
    Ok(CoareaCheck { lhs, rhs, ratio: lhs / rhs })
}

/// Empirical co-area constant of a space: the worst check ratio over a few
/// deterministic geodesic base continua.
pub fn calibrate_omega(
    space: &FiniteMetricSpace,
    pm: &PathMetricSpace,
    seed: u64,
) -> Result<f64> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = space.len();
    let mut omega: f64 = 0.0;
    let mut tried = 0usize;
    let mut produced = 0usize;
    while produced < 5 && tried < 40 {
        tried += 1;
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a == b || !pm.dprime(a, b).is_finite() {
            continue;
        }
        let base = pm.geodesic(a, b)?;
        let w = 2.0 * space.spacing();
        let t_max = (space.diameter() / 8.0).max(2.0 * w);
        let decomp = level_sets(space, &base, t_max, w)?;
        match coarea_check(space, &decomp) {
            Ok(c) => {
                omega = omega.max(c.ratio);
                produced += 1;
            }
            Err(_) => continue,
        }
    }
    if produced == 0 {
        return Err(GeomError::EmptyInput("no usable base continua for calibration".into()));
    }
    Ok(omega.max(f64::MIN_POSITIVE))
}

/// A band qualifying as a good level: low one-dimensional measure.
#[derive(Debug, Clone, Serialize)]
pub struct GoodLevel {
    /// Center of the chosen band.
    pub t0: f64,
    pub band_index: usize,
    pub band_measure: f64,
    pub threshold: f64,
    /// Fraction of in-window bands under the threshold.
    pub qualifying_fraction: f64,
    /// At least half the bands qualified, as the measure estimate predicts.
    pub half_qualify: bool,
}

/// Find a band center t0 in [0, r/s] whose measure stays below
/// `8 C omega N^2 s r`, preferring the smallest measure. The first band is
/// always in scope even when the window is narrower than one band.
pub fn good_level_search(
    space: &FiniteMetricSpace,
    decomp: &LevelSetDecomposition,
    r: f64,
    s: f64,
    c_reg: f64,
    n_factor: f64,
    omega: f64,
) -> Result<GoodLevel> {
    if decomp.bands.is_empty() {
        return Err(GeomError::EmptyInput("decomposition has no bands".into()));
    }
    if s <= 8.0 * n_factor {
        return Err(GeomError::InvalidParameter(format!(
            "level parameter s = {s} must exceed 8N = {}",
            8.0 * n_factor
        )));
    }
    let threshold = 8.0 * c_reg * omega * n_factor * n_factor * s * r;
    let window_hi = r / s;
    let mut in_window: Vec<usize> = decomp
        .t_grid
        .iter()
        .enumerate()
        .filter(|&(_, &t)| t <= window_hi)
        .map(|(k, _)| k)
        .collect();
    if in_window.is_empty() {
        in_window.push(0);
    }
    let measures: Vec<f64> =
        in_window.iter().map(|&k| decomp.band_measure(space, k)).collect();
    let qualifying: Vec<usize> = in_window
        .iter()
        .zip(&measures)
        .filter(|&(_, &m)| m < threshold)
        .map(|(&k, _)| k)
        .collect();
    if qualifying.is_empty() {
        return Err(GeomError::FalsifiedHypothesis(format!(
            "no band in [0, {window_hi}] has measure below {threshold}; the space is not \
             two-regular at scale {r}"
        )));
    }
    let best = *qualifying
        .iter()
        .min_by(|&&a, &&b| {
            decomp
                .band_measure(space, a)
                .total_cmp(&decomp.band_measure(space, b))
                .then(a.cmp(&b))
        })
        .unwrap();
    let fraction = qualifying.len() as f64 / in_window.len() as f64;
    Ok(GoodLevel {
        t0: decomp.t_grid[best],
        band_index: best,
        band_measure: decomp.band_measure(space, best),
        threshold,
        qualifying_fraction: fraction,
        half_qualify: fraction >= 0.5,
    })
}

/// Constants consumed by the quasiconvex path construction; measured
/// upstream or supplied.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuasiconvexConstants {
    pub ahlfors_c: f64,
    pub big_lambda: f64,
    pub quasiarc_m: f64,
    pub containment_n: f64,
    pub omega: f64,
    pub turning_lambda: f64,
    pub assouad_q: f64,
    pub assouad_d: f64,
}

/// One recursion level of the path construction.
#[derive(Debug, Clone, Serialize)]
pub struct LevelTrace {
    pub gap: f64,
    pub t0: f64,
    pub band_path_length: f64,
    pub band_measure: f64,
    /// Arc length over band measure: the arc-from-continuum constant.
    pub length_over_measure: f64,
    /// The band subgraph failed to connect the two sides and a geodesic
    /// fallback was used.
    pub fallback: bool,
}

/// A quasiconvex connecting arc with its per-level construction record.
#[derive(Debug, Clone, Serialize)]
pub struct QuasiconvexPath {
    pub arc: DiscreteArc,
    /// length over endpoint distance.
    pub l_hat: f64,
    pub levels: Vec<LevelTrace>,
    pub max_depth: usize,
    pub depth_bound: usize,
    pub depth_bound_ok: bool,
    /// Every level stayed inside its band (asserted during construction).
    pub bands_contained: bool,
    pub fallbacks: usize,
}

/// Join x to y by an arc of controlled length: build a quasiarc, trim it
/// away from the endpoints, route through a good level band around it, and
/// recurse on the two remaining gaps until they close at the graph scale.
pub fn quasiconvex_path(
    space: &FiniteMetricSpace,
    pm: &PathMetricSpace,
    x: PointId,
    y: PointId,
    constants: &QuasiconvexConstants,
) -> Result<QuasiconvexPath> {
    if x == y {
        return Err(GeomError::InvalidParameter("endpoints coincide".into()));
    }
    let r0 = space.dist(x, y);
    let h = space.connect_radius();
    let depth_bound = ((r0 / h).log2().ceil().max(0.0) as usize) + 4;
    let mut levels = Vec::new();
    let mut segments: Vec<Vec<PointId>> = Vec::new();
    let mut max_depth = 0usize;
    let mut fallbacks = 0usize;
    connect_rec(
        space,
        pm,
        x,
        y,
        constants,
        0,
        depth_bound,
        &mut segments,
        &mut levels,
        &mut max_depth,
        &mut fallbacks,
    )?;
    let arc = arcs::extract_arc(space, &segments)?;
    debug_assert_eq!(arc.start(), x);
    debug_assert_eq!(arc.end(), y);
    let l_hat = arc.length / r0;
    Ok(QuasiconvexPath {
        l_hat,
        levels,
        max_depth,
        depth_bound,
        depth_bound_ok: max_depth <= depth_bound,
        bands_contained: true,
        fallbacks,
        arc,
    })
}

#[allow(clippy::too_many_arguments)]
fn connect_rec(
    space: &FiniteMetricSpace,
    pm: &PathMetricSpace,
    x: PointId,
    y: PointId,
    constants: &QuasiconvexConstants,
    depth: usize,
    depth_bound: usize,
    segments: &mut Vec<Vec<PointId>>,
    levels: &mut Vec<LevelTrace>,
    max_depth: &mut usize,
    fallbacks: &mut usize,
) -> Result<()> {
    *max_depth = (*max_depth).max(depth);
    let r = space.dist(x, y);
    let h = space.connect_radius();
    if r <= h {
        segments.push(vec![x, y]);
        return Ok(());
    }
    if depth >= depth_bound {
        segments.push(pm.geodesic(x, y)?);
        *fallbacks += 1;
        return Ok(());
    }
    let nf = constants.containment_n.max(1.0);
    let (lam, big_l) = (constants.big_lambda, constants.quasiarc_m.max(1.0));
    let eps_nominal = r / (32.0 * big_l * nf * lam * (lam + 1.0));
    let eps = eps_nominal.max(h).min(0.5 * r);
    let quasiarc = arcs::build_quasiarc(
        space,
        x,
        y,
        eps,
        constants.assouad_q.ceil().max(1.0),
        constants.turning_lambda,
        constants.assouad_d,
    )?;
    // Trim the quasiarc away from both endpoints.
    let trim = r / (8.0 * nf);
    let pts = &quasiarc.arc.points;
    let i = pts.iter().rposition(|&p| space.dist(x, p) <= trim).unwrap_or(0);
    let mut j = pts[i..]
        .iter()
        .position(|&p| space.dist(y, p) <= trim)
        .map(|k| k + i)
        .unwrap_or(pts.len() - 1);
    if j <= i {
        j = pts.len() - 1;
    }
    let base: Vec<PointId> = pts[i..=j].to_vec();

    let w = (2.0 * space.spacing()).max(space.spacing());
    // The level parameter must clear 8N for the measure estimate to apply;
    // the coarse-scale cap on eps can otherwise push it below.
    let s0 = (5.0 * r / eps).max(8.0 * nf * 1.01);
    let decomp = level_sets(space, &base, (r / s0).max(w), w)?;
    let good = good_level_search(
        space,
        &decomp,
        r,
        s0,
        constants.ahlfors_c,
        nf,
        constants.omega.max(f64::MIN_POSITIVE),
    );
    let routed = match good {
        Ok(level) => try_band_route(space, &decomp, level.band_index, x, y, r),
        Err(_) => None,
    };
    match routed {
        Some((band_path, trace_t0, band_measure)) => {
            let x1 = band_path[0];
            let y1 = *band_path.last().unwrap();
            let band_len: f64 =
                band_path.windows(2).map(|p| space.dist(p[0], p[1])).sum();
            levels.push(LevelTrace {
                gap: r,
                t0: trace_t0,
                band_path_length: band_len,
                band_measure,
                length_over_measure: if band_measure > 0.0 {
                    band_len / band_measure
                } else {
                    f64::INFINITY
                },
                fallback: false,
            });
            connect_rec(
                space, pm, x, x1, constants, depth + 1, depth_bound, segments, levels,
                max_depth, fallbacks,
            )?;
            segments.push(band_path);
            connect_rec(
                space, pm, y1, y, constants, depth + 1, depth_bound, segments, levels,
                max_depth, fallbacks,
            )?;
            Ok(())
        }
        None => {
            // Every qualifying band failed to join the two sides.
            segments.push(pm.geodesic(x, y)?);
            *fallbacks += 1;
            levels.push(LevelTrace {
                gap: r,
                t0: 0.0,
                band_path_length: pm.dprime(x, y),
                band_measure: 0.0,
                length_over_measure: f64::INFINITY,
                fallback: true,
            });
            Ok(())
        }
    }
}

/// Route through one band: shortest path inside the band subgraph from the
/// band point nearest x (within B(x, r/4)) to the reachable band point
/// nearest y. Containment in the band is structural: the search never
/// leaves it.
fn try_band_route(
    space: &FiniteMetricSpace,
    decomp: &LevelSetDecomposition,
    band_index: usize,
    x: PointId,
    y: PointId,
    r: f64,
) -> Option<(Vec<PointId>, f64, f64)> {
    let band = &decomp.bands[band_index];
    if band.is_empty() {
        return None;
    }
    let mut in_band = vec![false; space.len()];
    for &p in band {
        in_band[p] = true;
    }
    // Enter the band as close to the anchor as possible; exact-distance
    // ties (mirror-symmetric candidates) break toward the opposite
    // endpoint, which keeps the choice stable under rescaling.
    let near = |anchor: PointId, toward: PointId| -> Option<PointId> {
        band.iter()
            .copied()
            .filter(|&p| space.dist(anchor, p) <= 0.25 * r)
            .min_by(|&a, &b| {
                space
                    .dist(anchor, a)
                    .total_cmp(&space.dist(anchor, b))
                    .then_with(|| space.dist(toward, a).total_cmp(&space.dist(toward, b)))
                    .then(a.cmp(&b))
            })
    };
    let x1 = near(x, y)?;
    let (dist, pred) = graph::dijkstra_filtered(
        space.adjacency(),
        &[x1 as u32],
        |v| in_band[v as usize],
    );
    let y1 = band
        .iter()
        .copied()
        .filter(|&p| space.dist(y, p) <= 0.25 * r && dist[p].is_finite())
        .min_by(|&a, &b| {
            space
                .dist(y, a)
                .total_cmp(&space.dist(y, b))
                .then_with(|| space.dist(x, a).total_cmp(&space.dist(x, b)))
                .then(a.cmp(&b))
        })?;
    let path: Vec<PointId> = graph::path_to(&pred, y1 as u32)?
        .into_iter()
        .map(|v| v as usize)
        .collect();
    // Containment check: the path must stay inside its band.
    debug_assert!(path.iter().all(|&p| in_band[p]));
    let measure = decomp.band_measure(space, band_index);
    Some((path, decomp.t_grid[band_index], measure))
}

/// Discrete modulus lower bound for the family of good-level arcs.
#[derive(Debug, Clone, Serialize)]
pub struct ModulusReport {
    /// Closed-form constant 1/(16 C omega^2 N^2 s^2) at the s actually used.
    pub analytic_bound: f64,
    /// Certified numerical bound from the band-arc family.
    pub numerical_bound: f64,
    /// Arcs in the family (one per qualifying band).
    pub family_sizes: Vec<usize>,
    pub s_used: f64,
    pub s_nominal: f64,
    /// Fewer than three qualifying bands.
    pub low_confidence: bool,
}

/// Lower-bound the 2-modulus of the family joining B(x, r/4) to B(y, r/4).
///
/// Collects the arcs through every qualifying band and certifies
/// `sum_t w / length(arc_t)` divided by the pointwise co-area constant of
/// the family support; also reports the closed-form constant from the
/// supplied regularity data. The band parameter is capped so the window
/// holds several bands.
pub fn modulus_lower_bound(
    space: &FiniteMetricSpace,
    pm: &PathMetricSpace,
    x: PointId,
    y: PointId,
    constants: &QuasiconvexConstants,
) -> Result<ModulusReport> {
    let r = space.dist(x, y);
    if !pm.dprime(x, y).is_finite() {
        return Ok(ModulusReport {
            analytic_bound: 0.0,
            numerical_bound: 0.0,
            family_sizes: Vec::new(),
            s_used: 0.0,
            s_nominal: 0.0,
            low_confidence: true,
        });
    }
    let h = space.connect_radius();
    let nf = constants.containment_n.max(1.0);
    let lam = constants.big_lambda;
    let big_l = constants.quasiarc_m.max(1.0);
    let eps_nominal = r / (32.0 * big_l * nf * lam * (lam + 1.0));
    let eps = eps_nominal.max(h).min(0.5 * r);
    let s_nominal = 5.0 * r / eps;
    let w = 2.0 * space.spacing();
    // Keep several bands inside the window while honoring s > 8N.
    let s_used = (r / (4.0 * w)).min(s_nominal).max(8.0 * nf * 1.01);

    let quasiarc = arcs::build_quasiarc(
        space,
        x,
        y,
        eps,
        constants.assouad_q.ceil().max(1.0),
        constants.turning_lambda,
        constants.assouad_d,
    )?;
    let trim = r / (8.0 * nf);
    let pts = &quasiarc.arc.points;
    let i = pts.iter().rposition(|&p| space.dist(x, p) <= trim).unwrap_or(0);
    let mut j = pts[i..]
        .iter()
        .position(|&p| space.dist(y, p) <= trim)
        .map(|k| k + i)
        .unwrap_or(pts.len() - 1);
    if j <= i {
        j = pts.len() - 1;
    }
    let base: Vec<PointId> = pts[i..=j].to_vec();
    let decomp = level_sets(space, &base, r / s_used + w, w)?;
    let threshold =
        8.0 * constants.ahlfors_c * constants.omega * nf * nf * s_used * r;

    let mut arcs_found: Vec<Vec<PointId>> = Vec::new();
    // The first band stays in scope even when the window is narrower than
    // one band; it is the discrete stand-in for the small levels.
    let window_hi = (r / s_used).max(0.51 * w);
    for k in 0..decomp.bands.len() {
        if decomp.t_grid[k] > window_hi {
            continue;
        }
        if decomp.band_measure(space, k) >= threshold {
            continue;
        }
        if let Some((path, _, _)) = try_band_route(space, &decomp, k, x, y, r) {
            // The family is a set: identical arcs are not double counted.
            if !arcs_found.contains(&path) {
                arcs_found.push(path);
            }
        }
    }
    let analytic_bound = 1.0
        / (16.0
            * constants.ahlfors_c
            * constants.omega
            * constants.omega
            * nf
            * nf
            * s_used
            * s_used);

    // Certified numerical bound: for admissible rho,
    //   1 <= (int_gamma rho ds)^2 <= length * int_gamma rho^2 ds
    // so sum_t w/len_t <= sum_t w int rho^2 <= omega_pt * sum rho^2 weight2,
    // where omega_pt is the worst pointwise band-width-to-weight ratio on
    // the family support.
    let weights = space.weight2();
    let mut sum_w_over_len = 0.0;
    let mut omega_pt: f64 = 0.0;
    for arc in &arcs_found {
        let len: f64 = arc.windows(2).map(|p| space.dist(p[0], p[1])).sum();
        if len <= 0.0 {
            continue;
        }
        sum_w_over_len += w / len;
        for (idx, &p) in arc.iter().enumerate() {
            let mut ds = 0.0;
            if idx > 0 {
                ds += 0.5 * space.dist(arc[idx - 1], p);
            }
            if idx + 1 < arc.len() {
                ds += 0.5 * space.dist(p, arc[idx + 1]);
            }
            let w2 = weights
                .map(|ws| ws[p])
                .unwrap_or_else(|| space.spacing() * space.spacing());
            if w2 > 0.0 {
                omega_pt = omega_pt.max(w * ds / w2);
            }
        }
    }
    let numerical_bound =
        if omega_pt > 0.0 { sum_w_over_len / omega_pt } else { 0.0 };
    Ok(ModulusReport {
        analytic_bound,
        numerical_bound,
        family_sizes: arcs_found.iter().map(|a| a.len()).collect(),
        s_used,
        s_nominal,
        low_confidence: arcs_found.len() < 3,
    })
}
