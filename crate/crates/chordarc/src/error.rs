//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by space construction, chain search, and the loop pipeline.
///
/// Hypothesis violations that the theory predicts should not happen on a
/// space satisfying the estimated constants are *not* errors; they are
/// reported as diagnostics inside the relevant report types. Errors are
/// reserved for contract violations and genuinely impossible requests.
#[derive(Debug, Error)]
pub enum GeomError {
    #[error("distance matrix is not square: {rows} rows, {cols} entries in row {row}")]
    RaggedMatrix { rows: usize, cols: usize, row: usize },

    #[error("asymmetric distances: d({i},{j})={dij} but d({j},{i})={dji}")]
    Asymmetric { i: usize, j: usize, dij: f64, dji: f64 },

    #[error("negative or non-finite distance d({i},{j})={d}")]
    BadDistance { i: usize, j: usize, d: f64 },

    #[error("nonzero diagonal: d({i},{i})={d}")]
    NonzeroDiagonal { i: usize, d: f64 },

    #[error("distinct points at zero distance: d({i},{j})=0")]
    ZeroDistance { i: usize, j: usize },

    #[error("triangle inequality violated on ({i},{j},{k}): d(i,k)={dik} > d(i,j)+d(j,k)={sum}")]
    TriangleViolation { i: usize, j: usize, k: usize, dik: f64, sum: f64 },

    #[error("chart is not injective: points {i} and {j} share coordinates")]
    ChartNotInjective { i: usize, j: usize },

    #[error("edge list is disconnected ({components} components) but a full metric was requested")]
    DisconnectedEdges { components: usize },

    #[error("points {x} and {y} are disconnected at scale {eps}")]
    DisconnectedAtScale { x: usize, y: usize, eps: f64 },

    #[error("pair ({x},{y}) is disconnected in the h-neighborhood graph")]
    DisconnectedPair { x: usize, y: usize },

    #[error("empty space or empty input: {0}")]
    EmptyInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("scale window too narrow: [{lo}, {hi}] spans less than one octave")]
    WindowTooNarrow { lo: f64, hi: f64 },

    #[error("operation requires a planar chart but the space has none")]
    MissingChart,

    #[error("chart region too small: needs radius {needed} around point {center}, has {available}")]
    ChartTooSmall { center: usize, needed: f64, available: f64 },

    #[error("loop is degenerate: {0} vertices")]
    DegenerateLoop(usize),

    #[error("winding-number resolution failure: {0}")]
    WindingResolution(String),

    #[error("no cycle with nonzero winding about point {z} exists in the search region")]
    NoWindingCycle { z: usize },

    #[error("scale guard violated: R={r} exceeds R0/C1={limit}; pass guard_off to proceed")]
    ScaleGuard { r: f64, limit: f64 },

    #[error("mismatched segment endpoints at junction {index}")]
    MismatchedEndpoints { index: usize },

    #[error("hypothesis falsified by the data: {0}")]
    FalsifiedHypothesis(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at {path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
