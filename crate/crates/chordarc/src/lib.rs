//! Geometric certification toolkit for finite metric spaces.
//!
//! The crate builds discrete quasiarcs and chord-arc loops around a chosen
//! point at a chosen scale, and estimates or certifies the geometric
//! hypotheses those constructions rely on: Ahlfors regularity, linear local
//! connectivity, bounded turning, Assouad dimension, porosity, and the
//! three-point condition.
//!
//! The main entry points are:
//! - [`space`]: finite metric spaces, nets, neighborhood graphs, the induced
//!   path metric, and Hausdorff-measure proxies,
//! - [`chains`]: minimal and score-minimizing epsilon-chains,
//! - [`arcs`]: quasiarc construction and certification, bounded turning,
//! - [`invariants`]: regularity/connectivity estimators and winding numbers,
//! - [`coarea`]: level-set decompositions and quasiconvex path construction,
//! - [`quasicircle`]: the sigma-minimizing chord-arc loop pipeline and
//!   Jordan-domain verification,
//! - [`fixtures`], [`ingest`], [`pipeline`], [`render`]: sample generators,
//!   file ingestion, end-to-end orchestration, and SVG output.

pub mod arcs;
pub mod chains;
pub mod coarea;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod ingest;
pub mod invariants;
pub mod pipeline;
pub mod quasicircle;
pub mod render;
pub mod report;
pub mod space;

pub use error::GeomError;
pub use space::{FiniteMetricSpace, Net, PathMetricSpace, PointId};
