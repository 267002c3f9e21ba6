//! Command-line driver: fixture generation, ingestion, invariant reports,
//! quasiconvex spot checks, chord-arc loops, the full pipeline, and SVG
//! rendering.
//!
//! Exit codes: 0 all checks passed, 2 the run completed with diagnostic
//! failures, 1 hard error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use chordarc::arcs;
use chordarc::coarea::{self, QuasiconvexConstants};
use chordarc::fixtures::{self, FixtureSpec};
use chordarc::ingest::{self, InputFormat};
use chordarc::invariants::{self, EstimatorBudgets};
use chordarc::pipeline::{self, PipelineConfig};
use chordarc::quasicircle::{self, PipelineConstants};
use chordarc::render::{render_svg_file, Overlay};
use chordarc::report::{self, SCHEMA_VERSION};
use chordarc::space::{path_metric, FiniteMetricSpace, PointId};

#[derive(Parser)]
#[command(name = "chordarc", version, about = "Certified chord-arc loops and geometric regularity estimators on finite metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Point cloud (.csv), distance matrix (.txt/.mat), or mesh (.off/.obj).
    #[arg(long, conflicts_with = "fixture")]
    input: Option<PathBuf>,
    /// Inline fixture spec as JSON, e.g.
    /// '{"kind":"flat-disk","rings":40,"spacing":0.02}'.
    #[arg(long)]
    fixture: Option<String>,
    /// Input format override (csv | matrix | off | obj).
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args, Clone)]
struct WindowArgs {
    /// Scale window as lo:hi; defaults to [2 spacing, diam/4].
    #[arg(long)]
    window: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a fixture and write it as a point cloud or distance matrix.
    Generate {
        /// Fixture spec as JSON.
        #[arg(long)]
        spec: String,
        /// Output path: .csv for coordinates, .txt for a distance matrix.
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate an input file and print a summary.
    Ingest {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regularity, connectivity, and turning estimates.
    Invariants {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quasiconvex path spot checks between random pairs.
    Quasiconvex {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value_t = 8)]
        pairs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build and certify a chord-arc loop around a center at a scale.
    Quasicircle {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        center: PointId,
        /// Loop scale R.
        #[arg(long)]
        scale: f64,
        /// Waive the scale guard R <= R0/C1.
        #[arg(long)]
        guard_off: bool,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Full certification pipeline around a center at a scale.
    Pipeline {
        #[command(flatten)]
        input: InputArgs,
        /// TOML or JSON file with a pipeline configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        center: Option<PointId>,
        #[arg(long)]
        scale: Option<f64>,
        #[arg(long)]
        guard_off: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Render the chart to SVG.
    Render {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_format(s: &str) -> Result<InputFormat> {
    match s {
        "csv" => Ok(InputFormat::Csv),
        "matrix" => Ok(InputFormat::Matrix),
        "off" => Ok(InputFormat::Off),
        "obj" => Ok(InputFormat::Obj),
        other => bail!("unknown format {other:?}"),
    }
}

fn load_space(args: &InputArgs) -> Result<FiniteMetricSpace> {
    match (&args.input, &args.fixture) {
        (Some(path), None) => {
            let format = args.format.as_deref().map(parse_format).transpose()?;
            Ok(ingest::ingest(path, format)?)
        }
        (None, Some(spec)) => {
            let spec: FixtureSpec =
                serde_json::from_str(spec).context("parsing fixture spec")?;
            Ok(fixtures::generate(&spec)?.space)
        }
        _ => bail!("exactly one of --input or --fixture is required"),
    }
}

fn parse_window(w: &Option<String>, space: &FiniteMetricSpace) -> Result<(f64, f64)> {
    match w {
        None => Ok(space.default_window()),
        Some(s) => {
            let (lo, hi) = s
                .split_once(':')
                .with_context(|| format!("window must be lo:hi, got {s:?}"))?;
            Ok((lo.trim().parse()?, hi.trim().parse()?))
        }
    }
}

#[derive(Serialize)]
struct SpaceSummaryOut {
    schema_version: u32,
    points: usize,
    spacing: f64,
    diameter: f64,
    connect_radius: f64,
    has_chart: bool,
    has_weights: bool,
}

fn summarize(space: &FiniteMetricSpace) -> SpaceSummaryOut {
    SpaceSummaryOut {
        schema_version: SCHEMA_VERSION,
        points: space.len(),
        spacing: space.spacing(),
        diameter: space.diameter(),
        connect_radius: space.connect_radius(),
        has_chart: space.chart().is_some(),
        has_weights: space.weight2().is_some(),
    }
}

fn emit<T: Serialize>(value: &T, out: &Option<PathBuf>) -> Result<()> {
    let text = report::to_json_string(value)?;
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn write_fixture(space: &FiniteMetricSpace, out: &Path) -> Result<()> {
    match out.extension().and_then(|e| e.to_str()) {
        Some("csv") => {
            let chart = space
                .chart()
                .context("this fixture has a custom metric; write a .txt distance matrix instead")?;
            let mut text = String::from("id,x,y,z,w\n");
            for i in 0..space.len() {
                let c = chart[i];
                let w = space.weight2().map(|ws| ws[i]).unwrap_or(0.0);
                text.push_str(&format!("{i},{},{},0,{}\n", c[0], c[1], w));
            }
            std::fs::write(out, text)?;
        }
        Some("txt") | Some("mat") | Some("dist") => {
            if space.len() > 2048 {
                bail!("distance matrix output capped at 2048 points, fixture has {}", space.len());
            }
            let mut text = String::new();
            for i in 0..space.len() {
                for j in 0..space.len() {
                    if j > 0 {
                        text.push(' ');
                    }
                    text.push_str(&format!("{}", space.dist(i, j)));
                }
                text.push('\n');
            }
            std::fs::write(out, text)?;
        }
        other => bail!("unsupported fixture output extension {other:?} (use .csv or .txt)"),
    }
    Ok(())
}

#[derive(Serialize)]
struct InvariantsOut {
    schema_version: u32,
    window: (f64, f64),
    seed: u64,
    budgets: EstimatorBudgets,
    regularity: invariants::RegularityReport,
    llc: invariants::LLCReport,
    turning: arcs::TurningReport,
}

#[derive(Serialize)]
struct QuasiconvexOut {
    schema_version: u32,
    seed: u64,
    constants: QuasiconvexConstants,
    spots: Vec<pipeline::QuasiconvexSpot>,
    max_l_hat: f64,
}

#[derive(Serialize)]
struct QuasicircleOut {
    schema_version: u32,
    center: PointId,
    scale: f64,
    constants: PipelineConstants,
    outcome: quasicircle::ChordArcOutcome,
}

fn estimate_core_constants(
    space: &FiniteMetricSpace,
    window: (f64, f64),
    seed: u64,
) -> Result<(invariants::RegularityReport, invariants::LLCReport, arcs::TurningReport)> {
    let budgets = EstimatorBudgets { seed, ..Default::default() };
    let all: Vec<PointId> = (0..space.len()).collect();
    let regularity = invariants::ahlfors_estimate(space, &all, window, None, &budgets)?;
    let llc = invariants::llc_estimate(space, &all, window, &budgets)?;
    let turning = arcs::bounded_turning_constant(space, &all, window, 192, seed)?;
    Ok((regularity, llc, turning))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Generate { spec, out } => {
            let spec: FixtureSpec = serde_json::from_str(&spec).context("parsing fixture spec")?;
            let fixture = fixtures::generate(&spec)?;
            write_fixture(&fixture.space, &out)?;
            #[derive(Serialize)]
            struct GenerateOut {
                schema_version: u32,
                kind: String,
                expected: Vec<fixtures::ExpectedConstant>,
                summary: SpaceSummaryOut,
            }
            emit(
                &GenerateOut {
                    schema_version: SCHEMA_VERSION,
                    kind: fixture.kind.clone(),
                    expected: fixture.expected.clone(),
                    summary: summarize(&fixture.space),
                },
                &None,
            )?;
            Ok(0)
        }
        Command::Ingest { input, out } => {
            let space = load_space(&input)?;
            emit(&summarize(&space), &out)?;
            Ok(0)
        }
        Command::Invariants { input, window, out } => {
            let space = load_space(&input)?;
            let win = parse_window(&window.window, &space)?;
            let (regularity, llc, turning) = estimate_core_constants(&space, win, window.seed)?;
            emit(
                &InvariantsOut {
                    schema_version: SCHEMA_VERSION,
                    window: win,
                    seed: window.seed,
                    budgets: EstimatorBudgets { seed: window.seed, ..Default::default() },
                    regularity,
                    llc,
                    turning,
                },
                &out,
            )?;
            Ok(0)
        }
        Command::Quasiconvex { input, window, pairs, out } => {
            let space = Arc::new(load_space(&input)?);
            let win = parse_window(&window.window, &space)?;
            let (regularity, llc, turning) = estimate_core_constants(&space, win, window.seed)?;
            let pm = path_metric(space.clone());
            let omega = coarea::calibrate_omega(&space, &pm, window.seed)?;
            let big_lambda = llc.lambda1.max(llc.lambda2);
            let q = regularity.q_hat.max(1.0);
            let constants = QuasiconvexConstants {
                ahlfors_c: regularity.c_ahlfors,
                big_lambda,
                quasiarc_m: 1.5,
                containment_n: 2.0 * turning.lambda
                    + (4.0 * regularity.d_hat).powf(1.0 / (2.0 * q))
                        * (4.0 * turning.lambda).sqrt(),
                omega,
                turning_lambda: turning.lambda,
                assouad_q: regularity.q_hat,
                assouad_d: regularity.d_hat,
            };
            let checks =
                pipeline::quasiconvex_spot_checks(&space, &pm, &constants, pairs, window.seed);
            let max_l_hat = checks.spots.iter().map(|s| s.l_hat).fold(1.0_f64, f64::max);
            emit(
                &QuasiconvexOut {
                    schema_version: SCHEMA_VERSION,
                    seed: window.seed,
                    constants,
                    spots: checks.spots,
                    max_l_hat,
                },
                &out,
            )?;
            Ok(0)
        }
        Command::Quasicircle { input, center, scale, guard_off, window, out, svg } => {
            let space = Arc::new(load_space(&input)?);
            let win = parse_window(&window.window, &space)?;
            let (regularity, llc, _turning) = estimate_core_constants(&space, win, window.seed)?;
            let pm = path_metric(space.clone());
            let l_graph = pm.quasiconvexity_factor(64);
            let constants = PipelineConstants {
                big_lambda: llc.lambda1.max(llc.lambda2),
                quasiconvexity_l: l_graph.l_hat,
                assouad_q: regularity.q_hat,
                assouad_d: regularity.d_hat,
            };
            let outcome =
                quasicircle::chord_arc_pipeline(&space, &pm, center, scale, &constants, guard_off)?;
            if let Some(svg) = svg {
                render_svg_file(
                    &space,
                    &[Overlay::Loop { points: &outcome.lp.points, color: "#c03030" }],
                    &svg,
                )?;
            }
            let clean = outcome.initial.dist_bounds_ok
                && outcome.minimize.length_le_sigma
                && outcome.dist_diam_ok
                && outcome.lambda_below_ceiling
                && outcome.guard_satisfied;
            emit(
                &QuasicircleOut {
                    schema_version: SCHEMA_VERSION,
                    center,
                    scale,
                    constants,
                    outcome,
                },
                &out,
            )?;
            Ok(if clean { 0 } else { 2 })
        }
        Command::Pipeline { input, config, center, scale, guard_off, seed, out, svg } => {
            let space = Arc::new(load_space(&input)?);
            let mut cfg: PipelineConfig = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)?;
                    match path.extension().and_then(|e| e.to_str()) {
                        Some("toml") => toml::from_str(&text).context("parsing TOML config")?,
                        _ => serde_json::from_str(&text).context("parsing JSON config")?,
                    }
                }
                None => PipelineConfig::default(),
            };
            if let Some(c) = center {
                cfg.center = c;
            }
            if let Some(r) = scale {
                cfg.scale_r = r;
            }
            if guard_off {
                cfg.guard_off = true;
            }
            if let Some(s) = seed {
                cfg.seed = s;
                cfg.budgets.seed = s;
            }
            let report = pipeline::run_pipeline(space.clone(), &cfg)?;
            if let Some(svg) = svg {
                let mut overlays = Vec::new();
                if let Some(outcome) = &report.chord_arc {
                    overlays.push(Overlay::Loop { points: &outcome.lp.points, color: "#c03030" });
                }
                render_svg_file(&space, &overlays, &svg)?;
            }
            let code = if report.pass { 0 } else { 2 };
            emit(&report, &out)?;
            Ok(code)
        }
        Command::Render { input, out } => {
            let space = load_space(&input)?;
            render_svg_file(&space, &[], &out)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
