//! SVG rendering of spaces, arcs, loops, and level bands.
//!
//! Presentation only: golden comparisons should count elements, not bytes.

use std::io::Write;
use std::path::Path;

use crate::error::{GeomError, Result};
use crate::space::{FiniteMetricSpace, PointId};

/// Things that can be drawn over the point cloud.
pub enum Overlay<'a> {
    /// Closed polyline through the loop vertices.
    Loop { points: &'a [PointId], color: &'a str },
    /// Open polyline.
    Arc { points: &'a [PointId], color: &'a str },
    /// Point class rendered as filled dots (level bands, domains).
    Points { points: &'a [PointId], color: &'a str },
}

/// Render the chart with overlays into an SVG document.
pub fn render_svg(
    space: &FiniteMetricSpace,
    overlays: &[Overlay<'_>],
    out: &mut dyn Write,
) -> Result<usize> {
    let chart = space.chart().ok_or(GeomError::MissingChart)?;
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for c in chart {
        x0 = x0.min(c[0]);
        y0 = y0.min(c[1]);
        x1 = x1.max(c[0]);
        y1 = y1.max(c[1]);
    }
    let pad = 0.05 * ((x1 - x0).max(y1 - y0)).max(1e-12);
    let (w, h) = (x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);
    let dot = 0.004 * w.max(h);
    let stroke = 0.006 * w.max(h);
    let mut elements = 0usize;
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        x0 - pad,
        y0 - pad,
        w,
        h
    )?;
    // Flip the y axis so the chart reads in math orientation.
    writeln!(out, r#"<g transform="translate(0,{}) scale(1,-1)">"#, y0 + y1)?;
    for c in chart {
        writeln!(
            out,
            r##"<circle cx="{:.6}" cy="{:.6}" r="{:.6}" fill="#b8b8b8"/>"##,
            c[0], c[1], dot
        )?;
        elements += 1;
    }
    for ov in overlays {
        match ov {
            Overlay::Points { points, color } => {
                for &p in *points {
                    let c = chart[p];
                    writeln!(
                        out,
                        r#"<circle cx="{:.6}" cy="{:.6}" r="{:.6}" fill="{}"/>"#,
                        c[0],
                        c[1],
                        1.5 * dot,
                        color
                    )?;
                    elements += 1;
                }
            }
            Overlay::Arc { points, color } | Overlay::Loop { points, color } => {
                let closed = matches!(ov, Overlay::Loop { .. });
                let mut d = String::new();
                for (i, &p) in points.iter().enumerate() {
                    let c = chart[p];
                    d.push_str(if i == 0 { "M" } else { "L" });
                    d.push_str(&format!("{:.6},{:.6} ", c[0], c[1]));
                }
                if closed {
                    d.push('Z');
                }
                writeln!(
                    out,
                    r#"<path d="{}" fill="none" stroke="{}" stroke-width="{:.6}"/>"#,
                    d.trim(),
                    color,
                    stroke
                )?;
                elements += 1;
            }
        }
    }
    writeln!(out, "</g>")?;
    writeln!(out, "</svg>")?;
    Ok(elements)
}

/// Render directly to a file, returning the element count.
pub fn render_svg_file(
    space: &FiniteMetricSpace,
    overlays: &[Overlay<'_>],
    path: &Path,
) -> Result<usize> {
    let mut buf = Vec::new();
    let count = render_svg(space, overlays, &mut buf)?;
    std::fs::write(path, buf)?;
    Ok(count)
}
