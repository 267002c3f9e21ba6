//! End-to-end orchestration: estimate the hypothesis constants, spot-check
//! quasiconvexity, build and certify the chord-arc loop, extract the
//! enclosed domain, and verify its regularity, emitting one JSON report.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arcs::{self, TurningReport};
use crate::coarea::{self, QuasiconvexConstants};
use crate::error::{GeomError, Result};
use crate::invariants::{self, EstimatorBudgets, LLCReport, RegularityReport};
use crate::quasicircle::{self, ChordArcOutcome, DomainVerification, PipelineConstants};
use crate::report::SCHEMA_VERSION;
use crate::space::{path_metric, FiniteMetricSpace, PointId};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Center point id.
    pub center: PointId,
    /// Loop scale R.
    pub scale_r: f64,
    /// Waive the scale guard R <= R0/C1 (most desk-scale fixtures need it).
    pub guard_off: bool,
    pub seed: u64,
    /// Scale window for the estimators; default [2 spacing, diam/4].
    pub window: Option<(f64, f64)>,
    pub budgets: EstimatorBudgets,
    /// Number of quasiconvexity spot-check pairs.
    pub quasiconvex_pairs: usize,
    /// Recorded inflation multiplier for the search-region radius.
    pub b0_multiplier: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            center: 0,
            scale_r: 0.0,
            guard_off: false,
            seed: 0,
            window: None,
            budgets: EstimatorBudgets::default(),
            quasiconvex_pairs: 8,
            b0_multiplier: 16.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpaceSummary {
    pub points: usize,
    pub spacing: f64,
    pub diameter: f64,
    pub connect_radius: f64,
    pub has_chart: bool,
    pub has_weights: bool,
}

/// The measured constants the loop stages consume.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantsRecord {
    pub assouad_q: f64,
    pub assouad_d: f64,
    pub ahlfors_c: f64,
    pub llc_lambda1: f64,
    pub llc_lambda2: f64,
    /// Contractibility surrogate: max of the two LLC constants. Downstream
    /// formulas consume it in place of the contractibility constant, an
    /// unquantified substitution in general topological spaces.
    pub big_lambda: f64,
    pub turning_lambda: f64,
    /// Graph quasiconvexity factor max d'/d over sampled sources.
    pub quasiconvexity_l: f64,
    /// Empirical co-area constant.
    pub omega: f64,
    /// Quasiarc constant M measured on the spot-check arcs.
    pub quasiarc_m: f64,
    /// Containment factor N = 2 lambda + (4D)^(1/2Q) sqrt(4 lambda).
    pub containment_n: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuasiconvexSpot {
    pub x: PointId,
    pub y: PointId,
    pub l_hat: f64,
    pub fallbacks: usize,
}

/// Result of quasiconvexity spot checks over seeded random pairs.
#[derive(Debug, Clone, Serialize)]
pub struct SpotChecks {
    pub spots: Vec<QuasiconvexSpot>,
    /// Worst quasiarc constant measured on the produced arcs.
    pub quasiarc_m: f64,
    /// Fallbacks and failures worth surfacing.
    pub notes: Vec<String>,
}

/// Run quasiconvex path constructions between seeded random pairs whose
/// separation is well inside the window, recording realized factors and the
/// quasiarc constants of the arcs.
pub fn quasiconvex_spot_checks(
    space: &FiniteMetricSpace,
    pm: &crate::space::PathMetricSpace,
    constants: &QuasiconvexConstants,
    pairs: usize,
    seed: u64,
) -> SpotChecks {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x7163);
    let mut spots = Vec::new();
    let mut notes = Vec::new();
    let mut quasiarc_m: f64 = 1.0;
    let mut tried = 0usize;
    while spots.len() < pairs && tried < pairs.max(1) * 10 {
        tried += 1;
        let x = rng.random_range(0..space.len());
        let y = rng.random_range(0..space.len());
        let d = space.dist(x, y);
        if x == y || d < 4.0 * space.connect_radius() || d > space.diameter() / 2.0 {
            continue;
        }
        match coarea::quasiconvex_path(space, pm, x, y, constants) {
            Ok(qp) => {
                if qp.fallbacks > 0 {
                    notes.push(format!(
                        "quasiconvex path ({x},{y}) used {} fallbacks",
                        qp.fallbacks
                    ));
                }
                let eps = (d / 8.0).max(space.connect_radius());
                if let Ok(cert) = arcs::certify_quasiarc(space, &qp.arc, eps) {
                    quasiarc_m = quasiarc_m.max(cert.m);
                }
                spots.push(QuasiconvexSpot { x, y, l_hat: qp.l_hat, fallbacks: qp.fallbacks });
            }
            Err(e) => notes.push(format!("quasiconvex path ({x},{y}) failed: {e}")),
        }
    }
    SpotChecks { spots, quasiarc_m, notes }
}

#[derive(Debug, Clone, Serialize)]
pub struct DomainSummary {
    pub interior_points: usize,
    pub closure_points: usize,
    pub inner_inclusion_ok: bool,
    pub outer_inclusion_ok: bool,
    pub inner_radius: f64,
    pub outer_radius: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub schema_version: u32,
    pub config: PipelineConfig,
    pub space: SpaceSummary,
    pub constants: ConstantsRecord,
    pub regularity: RegularityReport,
    pub llc: LLCReport,
    pub turning: TurningReport,
    pub quasiconvex: Vec<QuasiconvexSpot>,
    pub quasiconvex_max_l: f64,
    pub chord_arc: Option<ChordArcOutcome>,
    pub domain: Option<DomainSummary>,
    pub verification: Option<DomainVerification>,
    /// Stages skipped and why.
    pub skipped: Vec<String>,
    /// Failed soft checks; empty means a clean pass.
    pub diagnostics: Vec<String>,
    pub pass: bool,
}

/// Run the whole certification pipeline around one center and scale.
pub fn run_pipeline(space: Arc<FiniteMetricSpace>, config: &PipelineConfig) -> Result<PipelineReport> {
    if config.center >= space.len() {
        return Err(GeomError::InvalidParameter(format!(
            "center {} out of range ({} points)",
            config.center,
            space.len()
        )));
    }
    if config.scale_r <= 0.0 {
        return Err(GeomError::InvalidParameter("scale must be positive".into()));
    }
    let budgets = config.budgets;
    let window = config.window.unwrap_or_else(|| space.default_window());
    let all: Vec<PointId> = (0..space.len()).collect();
    let pm = path_metric(space.clone());

    let mut skipped = Vec::new();
    let mut diagnostics = Vec::new();

    // Stage 1: hypothesis constants.
    let regularity = invariants::ahlfors_estimate(&space, &all, window, None, &budgets)?;
    let llc = invariants::llc_estimate(&space, &all, window, &budgets)?;
    let turning = arcs::bounded_turning_constant(
        &space,
        &all,
        window,
        budgets.max_pairs.min(192),
        config.seed,
    )?;
    let l_graph = pm.quasiconvexity_factor(64);
    if l_graph.infinite_pairs > 0 {
        diagnostics.push(format!(
            "h-graph disconnected for {} sampled pairs",
            l_graph.infinite_pairs
        ));
    }
    let omega = coarea::calibrate_omega(&space, &pm, config.seed)?;
    let big_lambda = llc.lambda1.max(llc.lambda2);
    let q = regularity.q_hat.max(1.0);
    let containment_n = 2.0 * turning.lambda
        + (4.0 * regularity.d_hat).powf(1.0 / (2.0 * q)) * (4.0 * turning.lambda).sqrt();

    // Stage 2: quasiconvexity spot checks.
    let qc_constants = QuasiconvexConstants {
        ahlfors_c: regularity.c_ahlfors,
        big_lambda,
        quasiarc_m: 1.5,
        containment_n,
        omega,
        turning_lambda: turning.lambda,
        assouad_q: regularity.q_hat,
        assouad_d: regularity.d_hat,
    };
    let spot =
        quasiconvex_spot_checks(&space, &pm, &qc_constants, config.quasiconvex_pairs, config.seed);
    diagnostics.extend(spot.notes);
    let (quasiconvex, quasiarc_m) = (spot.spots, spot.quasiarc_m);
    let quasiconvex_max_l =
        quasiconvex.iter().map(|s| s.l_hat).fold(1.0_f64, f64::max);

    let constants = ConstantsRecord {
        assouad_q: regularity.q_hat,
        assouad_d: regularity.d_hat,
        ahlfors_c: regularity.c_ahlfors,
        llc_lambda1: llc.lambda1,
        llc_lambda2: llc.lambda2,
        big_lambda,
        turning_lambda: turning.lambda,
        quasiconvexity_l: l_graph.l_hat,
        omega,
        quasiarc_m,
        containment_n,
    };

    // Stage 3: chord-arc loop; needs a chart.
    let mut chord_arc = None;
    let mut domain = None;
    let mut verification = None;
    if space.chart().is_none() {
        skipped.push("chord-arc loop and domain stages need a planar chart".into());
    } else {
        let loop_constants = PipelineConstants {
            big_lambda,
            quasiconvexity_l: l_graph.l_hat,
            assouad_q: regularity.q_hat,
            assouad_d: regularity.d_hat,
        };
        let outcome = quasicircle::chord_arc_pipeline(
            &space,
            &pm,
            config.center,
            config.scale_r,
            &loop_constants,
            config.guard_off,
        )?;
        if !outcome.guard_satisfied {
            diagnostics.push(format!(
                "scale guard waived: R = {} exceeds R0/C1 with measured C1 = {}",
                config.scale_r, outcome.c1
            ));
        }
        for (flag, name) in [
            (outcome.initial.dist_bounds_ok, "initial polygon distance bounds"),
            (outcome.initial.sigma_bound_ok, "initial polygon weighted-length bound"),
            (outcome.minimize.length_le_sigma, "length below sigma"),
            (outcome.minimize.dist_upper_ok, "minimizer distance upper bound"),
            (outcome.minimize.dist_lower_ok, "minimizer distance lower bound"),
            (outcome.dist_diam_ok, "distance-diameter bound"),
            (outcome.lambda_below_ceiling, "chord-arc ceiling"),
        ] {
            if !flag {
                diagnostics.push(format!("loop check failed: {name}"));
            }
        }
        let extraction = quasicircle::extract_domain(
            &space,
            &outcome.lp,
            config.center,
            config.scale_r,
            big_lambda,
            outcome.c2,
        )?;
        if !extraction.inner_inclusion_ok {
            diagnostics.push("inner ball not contained in the domain".into());
        }
        if !extraction.outer_inclusion_ok {
            diagnostics.push("domain closure leaks the outer ball".into());
        }
        let ver = quasicircle::verify_domain(
            &space,
            &extraction,
            &outcome.lp,
            big_lambda,
            outcome.certificate.lambda,
            regularity.c_ahlfors,
            &budgets,
        )?;
        if !ver.llc_ok {
            diagnostics.push(format!(
                "domain LLC constant {} exceeds bound {}",
                ver.llc.lambda1.max(ver.llc.lambda2),
                ver.llc_bound
            ));
        }
        if !ver.ahlfors_ok {
            diagnostics.push(format!(
                "domain regularity constant {} exceeds bound {}",
                ver.regularity.c_ahlfors, ver.ahlfors_bound
            ));
        }
        if ver.porosity.c_por.is_none() {
            diagnostics.push("boundary not porous at tested resolution".into());
        }
        if ver.vacuous {
            diagnostics.push("domain verification passed vacuously (empty interior)".into());
        }
        domain = Some(DomainSummary {
            interior_points: extraction.interior.len(),
            closure_points: extraction.closure.len(),
            inner_inclusion_ok: extraction.inner_inclusion_ok,
            outer_inclusion_ok: extraction.outer_inclusion_ok,
            inner_radius: extraction.inner_radius,
            outer_radius: extraction.outer_radius,
        });
        verification = Some(ver);
        chord_arc = Some(outcome);
    }

    let pass = diagnostics.is_empty();
    Ok(PipelineReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        space: SpaceSummary {
            points: space.len(),
            spacing: space.spacing(),
            diameter: space.diameter(),
            connect_radius: space.connect_radius(),
            has_chart: space.chart().is_some(),
            has_weights: space.weight2().is_some(),
        },
        constants,
        regularity,
        llc,
        turning,
        quasiconvex,
        quasiconvex_max_l,
        chord_arc,
        domain,
        verification,
        skipped,
        diagnostics,
        pass,
    })
}
