//! Deterministic sample-space generators.
//!
//! Each fixture documents the constants it is expected to exhibit, with a
//! note on how the expectation was derived, so tests and reports can cite
//! them. Output is deterministic for a fixed spec.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::space::{CoordMetric, DistanceSource, FiniteMetricSpace, SpaceBuilder, TriangleAudit};

/// Fixture descriptions accepted by [`generate`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FixtureSpec {
    /// Concentric rings filling a disk: `rings * spacing` is the radius.
    /// The outermost ring is a clean circle, which keeps boundary-hugging
    /// constructions well conditioned.
    FlatDisk { rings: usize, spacing: f64 },
    /// Rectangular grid with optional deterministic jitter.
    Grid {
        nx: usize,
        ny: usize,
        spacing: f64,
        #[serde(default)]
        jitter: f64,
        #[serde(default)]
        seed: u64,
    },
    /// Fibonacci sphere with the chordal (ambient Euclidean) metric.
    Sphere { n: usize, radius: f64 },
    /// Flat cone of total angle `angle` (< 2 pi), apex included; intrinsic
    /// metric, chart by angle rescaling.
    Cone { angle: f64, rings: usize, spacing: f64 },
    /// Outline curve of a dumbbell: two circular lobes joined by a straight
    /// corridor of half-width `neck_halfwidth`.
    Dumbbell {
        lobe_radius: f64,
        neck_halflength: f64,
        neck_halfwidth: f64,
        spacing: f64,
    },
    /// Segment [0,1] with the snowflaked metric |x - y|^alpha.
    Snowflake { alpha: f64, n: usize },
    /// n points on a round circle.
    CircleLoop { n: usize, radius: f64 },
    /// Long thin grid; two-regular at small scales only.
    Strip { nx: usize, ny: usize, spacing: f64 },
    /// Rings between two radii plus a center point and a connecting spoke,
    /// so distances from the center stay finite.
    Annulus { inner: f64, outer: f64, spacing: f64 },
}

/// An expected constant for a fixture, with the reasoning behind the value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpectedConstant {
    pub name: String,
    pub low: f64,
    pub high: f64,
    pub rationale: String,
}

#[derive(Debug)]
pub struct Fixture {
    pub space: FiniteMetricSpace,
    pub kind: String,
    pub expected: Vec<ExpectedConstant>,
}

fn expect(name: &str, low: f64, high: f64, rationale: &str) -> ExpectedConstant {
    ExpectedConstant { name: name.into(), low, high, rationale: rationale.into() }
}

/// Build the sample space described by `spec`.
pub fn generate(spec: &FixtureSpec) -> Result<Fixture> {
    match *spec {
        FixtureSpec::FlatDisk { rings, spacing } => flat_disk(rings, spacing),
        FixtureSpec::Grid { nx, ny, spacing, jitter, seed } => grid(nx, ny, spacing, jitter, seed),
        FixtureSpec::Sphere { n, radius } => sphere(n, radius),
        FixtureSpec::Cone { angle, rings, spacing } => cone(angle, rings, spacing),
        FixtureSpec::Dumbbell { lobe_radius, neck_halflength, neck_halfwidth, spacing } => {
            dumbbell(lobe_radius, neck_halflength, neck_halfwidth, spacing)
        }
        FixtureSpec::Snowflake { alpha, n } => snowflake(alpha, n),
        FixtureSpec::CircleLoop { n, radius } => circle_loop(n, radius),
        FixtureSpec::Strip { nx, ny, spacing } => {
            let mut f = grid(nx, ny, spacing, 0.0, 0)?;
            f.kind = "strip".into();
            f.expected = vec![expect(
                "ahlfors_scale_dependent",
                1.0,
                1.0,
                "ball mass over r^2 collapses once r exceeds the strip width",
            )];
            Ok(f)
        }
        FixtureSpec::Annulus { inner, outer, spacing } => annulus(inner, outer, spacing),
    }
}

fn param_check(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(crate::error::GeomError::InvalidParameter(msg.into()))
    }
}

fn flat_disk(rings: usize, spacing: f64) -> Result<Fixture> {
    param_check(rings >= 1 && spacing > 0.0, "flat disk needs rings >= 1 and spacing > 0")?;
    let mut pts = Vec::new();
    let mut w2 = Vec::new();
    pts.push([0.0, 0.0, 0.0]);
    w2.push(PI * (0.5 * spacing) * (0.5 * spacing));
    for k in 1..=rings {
        let r = k as f64 * spacing;
        let m = (TAU * k as f64).round() as usize;
        let stagger = if k % 2 == 0 { 0.5 } else { 0.0 };
        let cell = TAU * r * spacing / m as f64;
        for j in 0..m {
            let t = TAU * (j as f64 + stagger) / m as f64;
            pts.push([r * t.cos(), r * t.sin(), 0.0]);
            w2.push(cell);
        }
    }
    let chart: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], p[1]]).collect();
    let space = SpaceBuilder::new(DistanceSource::Coords(pts, CoordMetric::Euclidean))
        .chart(chart)
        .weight2(w2)
        .connect_radius(3.0 * spacing)
        .audit(TriangleAudit::Skip)
        .build()?;
    Ok(Fixture {
        space,
        kind: "flat-disk".into(),
        expected: vec![
            expect("assouad_q", 1.8, 2.2, "plane covering numbers scale as (r/eps)^2"),
            expect("ahlfors_c", 1.0, 4.0, "ball mass is pi r^2 inside, about half that at the rim"),
            expect("llc1", 1.0, 1.3, "convexity: pairs connect inside the same ball"),
            expect("turning_lambda", 1.0, 1.3, "straight chains have diameter d(x,y)"),
        ],
    })
}

fn grid(nx: usize, ny: usize, spacing: f64, jitter: f64, seed: u64) -> Result<Fixture> {
    param_check(nx >= 1 && ny >= 1 && spacing > 0.0, "grid needs nx, ny >= 1 and spacing > 0")?;
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let (dx, dy) = if jitter > 0.0 {
                (
                    rng.random_range(-jitter..jitter) * spacing,
                    rng.random_range(-jitter..jitter) * spacing,
                )
            } else {
                (0.0, 0.0)
            };
            pts.push([i as f64 * spacing + dx, j as f64 * spacing + dy, 0.0]);
        }
    }
    let chart: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], p[1]]).collect();
    let w2 = vec![spacing * spacing; nx * ny];
    let space = SpaceBuilder::new(DistanceSource::Coords(pts, CoordMetric::Euclidean))
        .chart(chart)
        .weight2(w2)
        .connect_radius(3.0 * spacing)
        .audit(TriangleAudit::Skip)
        .build()?;
    Ok(Fixture {
        space,
        kind: "grid".into(),
        expected: vec![
            expect("assouad_q", 1.8, 2.2, "plane covering numbers scale as (r/eps)^2"),
            expect("ahlfors_c", 1.0, 4.0, "Riemann sums of disk areas against r^2"),
        ],
    })
}

fn sphere(n: usize, radius: f64) -> Result<Fixture> {
    param_check(n >= 16 && radius > 0.0, "sphere needs n >= 16 and radius > 0")?;
    let golden = PI * (3.0 - 5.0_f64.sqrt());
    let mut pts = Vec::new();
    for i in 0..n {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
        let rho = (1.0 - z * z).sqrt();
        let t = golden * i as f64;
        pts.push([radius * rho * t.cos(), radius * rho * t.sin(), radius * z]);
    }
    let w2 = vec![4.0 * PI * radius * radius / n as f64; n];
    let spacing_est = radius * (4.0 * PI / n as f64).sqrt();
    let space = SpaceBuilder::new(DistanceSource::Coords(pts, CoordMetric::Euclidean))
        .weight2(w2)
        .connect_radius(2.6 * spacing_est)
        .audit(TriangleAudit::Skip)
        .build()?;
    Ok(Fixture {
        space,
        kind: "sphere".into(),
        expected: vec![expect(
            "quasiconvexity_l",
            1.0,
            PI / 2.0 + 0.2,
            "great-circle over chord ratio peaks at pi/2 near antipodes",
        )],
    })
}

fn cone(angle: f64, rings: usize, spacing: f64) -> Result<Fixture> {
    param_check(
        angle > 0.2 && angle < TAU && rings >= 1 && spacing > 0.0,
        "cone needs 0.2 < angle < 2 pi, rings >= 1, spacing > 0",
    )?;
    // Points stored as (slant radius, intrinsic angle in [0, angle)).
    let mut polar: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    let mut w2 = vec![angle * (0.5 * spacing) * (0.5 * spacing) / 2.0];
    for k in 1..=rings {
        let r = k as f64 * spacing;
        let m = ((angle * k as f64).round() as usize).max(3);
        let cell = angle * r * spacing / m as f64;
        for j in 0..m {
            polar.push((r, angle * j as f64 / m as f64));
            w2.push(cell);
        }
    }
    let n = polar.len();
    let polar = Arc::new(polar);
    let chart: Vec<[f64; 2]> = polar
        .iter()
        .map(|&(r, phi)| {
            let t = phi * TAU / angle;
            [r * t.cos(), r * t.sin()]
        })
        .collect();
    let metric = {
        let polar = polar.clone();
        move |i: usize, j: usize| {
            let (r1, p1) = polar[i];
            let (r2, p2) = polar[j];
            let raw = (p1 - p2).abs();
            let dphi = raw.min(angle - raw);
            if dphi <= PI {
                (r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * dphi.cos()).max(0.0).sqrt()
            } else {
                r1 + r2
            }
        }
    };
    let space = SpaceBuilder::new(DistanceSource::Custom(n, Arc::new(metric)))
        .chart(chart)
        .weight2(w2)
        .connect_radius(3.0 * spacing)
        .build()?;
    Ok(Fixture {
        space,
        kind: "cone".into(),
        expected: vec![expect(
            "loop_cost_optimum_over_r",
            2.0 * angle,
            2.0 * angle,
            "circumference angle*r times weight (R/r)^2+1 is minimized at r = R",
        )],
    })
}

fn dumbbell(
    lobe_radius: f64,
    neck_halflength: f64,
    neck_halfwidth: f64,
    spacing: f64,
) -> Result<Fixture> {
    param_check(
        lobe_radius > neck_halfwidth && neck_halfwidth > 0.0 && spacing > 0.0,
        "dumbbell needs lobe_radius > neck_halfwidth > 0 and spacing > 0",
    )?;
    let (rho, ll, w) = (lobe_radius, neck_halflength, neck_halfwidth);
    let c = (rho * rho - w * w).sqrt();
    let beta = w.atan2(-c); // angle of the neck junction on the lobe circle
    let mut outline: Vec<[f64; 2]> = Vec::new();

    // Top wall, left to right.
    let wall_steps = ((2.0 * ll) / spacing).ceil() as usize;
    for i in 0..=wall_steps {
        outline.push([-ll + 2.0 * ll * i as f64 / wall_steps as f64, w]);
    }
    // Right lobe, clockwise from beta to -beta around (ll + c, 0).
    let arc_span = 2.0 * beta;
    let arc_steps = ((arc_span * rho) / spacing).ceil() as usize;
    for i in 1..arc_steps {
        let t = beta - arc_span * i as f64 / arc_steps as f64;
        outline.push([ll + c + rho * t.cos(), rho * t.sin()]);
    }
    // Bottom wall, right to left.
    for i in 0..=wall_steps {
        outline.push([ll - 2.0 * ll * i as f64 / wall_steps as f64, -w]);
    }
    // Left lobe, clockwise from pi + beta to pi - beta around (-ll - c, 0).
    for i in 1..arc_steps {
        let t = PI + beta - arc_span * i as f64 / arc_steps as f64;
        outline.push([-ll - c + rho * t.cos(), rho * t.sin()]);
    }
    // Drop points that collide with their cyclic successor.
    let mut pts: Vec<[f64; 3]> = Vec::new();
    for p in &outline {
        let dup = pts.iter().any(|q| (q[0] - p[0]).hypot(q[1] - p[1]) < 0.25 * spacing);
        if !dup {
            pts.push([p[0], p[1], 0.0]);
        }
    }
    let chart: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], p[1]]).collect();
    let space = SpaceBuilder::new(DistanceSource::Coords(pts, CoordMetric::Euclidean))
        .chart(chart)
        .connect_radius(2.0 * spacing)
        .audit(TriangleAudit::Skip)
        .build()?;
    let lam = (ll + c + rho) / (2.0 * w);
    Ok(Fixture {
        space,
        kind: "dumbbell".into(),
        expected: vec![expect(
            "turning_lambda_at_neck",
            0.4 * lam,
            2.0 * lam,
            "pairs across the corridor detour around a lobe",
        )],
    })
}

fn snowflake(alpha: f64, n: usize) -> Result<Fixture> {
    param_check(
        alpha > 0.0 && alpha <= 1.0 && n >= 2,
        "snowflake needs 0 < alpha <= 1 and n >= 2",
    )?;
    let xs: Arc<Vec<f64>> = Arc::new((0..n).map(|i| i as f64 / (n - 1) as f64).collect());
    let chart: Vec<[f64; 2]> = xs.iter().map(|&x| [x, 0.0]).collect();
    let metric = {
        let xs = xs.clone();
        move |i: usize, j: usize| (xs[i] - xs[j]).abs().powf(alpha)
    };
    let spacing = (1.0 / (n - 1) as f64).powf(alpha);
    let space = SpaceBuilder::new(DistanceSource::Custom(n, Arc::new(metric)))
        .chart(chart)
        .connect_radius(3.0 * spacing)
        .build()?;
    Ok(Fixture {
        space,
        kind: "snowflake".into(),
        expected: vec![expect(
            "assouad_q",
            1.0 / alpha - 0.3,
            1.0 / alpha + 0.3,
            "snowflaking by alpha divides covering exponents by alpha",
        )],
    })
}

fn circle_loop(n: usize, radius: f64) -> Result<Fixture> {
    param_check(n >= 4 && radius > 0.0, "circle loop needs n >= 4 and radius > 0")?;
    let mut pts = Vec::new();
    for i in 0..n {
        let t = TAU * i as f64 / n as f64;
        pts.push([radius * t.cos(), radius * t.sin(), 0.0]);
    }
    let chart: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], p[1]]).collect();
    let chord = 2.0 * radius * (PI / n as f64).sin();
    let space = SpaceBuilder::new(DistanceSource::Coords(pts, CoordMetric::Euclidean))
        .chart(chart)
        .connect_radius(1.5 * chord)
        .audit(TriangleAudit::Skip)
        .build()?;
    Ok(Fixture {
        space,
        kind: "circle-loop".into(),
        expected: vec![
            expect("three_point", 0.98, 1.02, "minor-arc diameter equals the chord"),
            expect(
                "chord_arc",
                PI / 2.0 - 0.05,
                PI / 2.0 + 0.05,
                "half circumference over diameter at antipodes",
            ),
        ],
    })
}

fn annulus(inner: f64, outer: f64, spacing: f64) -> Result<Fixture> {
    param_check(
        0.0 < inner && inner < outer && spacing > 0.0,
        "annulus needs 0 < inner < outer and spacing > 0",
    )?;
    let mut pts: Vec<[f64; 3]> = vec![[0.0, 0.0, 0.0]];
    let k0 = (inner / spacing).round() as usize;
    let k1 = (outer / spacing).round() as usize;
    // Eight spokes keep center distances close to the physical radius in
    // every direction.
    for s in 0..8 {
        let t = TAU * (s as f64 + 0.37) / 8.0;
        for k in 1..k0 {
            let r = k as f64 * spacing;
            pts.push([r * t.cos(), r * t.sin(), 0.0]);
        }
    }
    for k in k0..=k1 {
        let r = k as f64 * spacing;
        let m = (TAU * k as f64).round() as usize;
        let stagger = if k % 2 == 0 { 0.5 } else { 0.0 };
        for j in 0..m {
            let t = TAU * (j as f64 + stagger) / m as f64;
            pts.push([r * t.cos(), r * t.sin(), 0.0]);
        }
    }
    let chart: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], p[1]]).collect();
    let w2 = vec![spacing * spacing; pts.len()];
    let space = SpaceBuilder::new(DistanceSource::Coords(pts, CoordMetric::Euclidean))
        .chart(chart)
        .weight2(w2)
        .connect_radius(3.0 * spacing)
        .audit(TriangleAudit::Skip)
        .build()?;
    Ok(Fixture {
        space,
        kind: "annulus".into(),
        expected: vec![expect(
            "loop_radius",
            inner,
            outer,
            "the weighted length optimum clamps to the available radii",
        )],
    })
}
