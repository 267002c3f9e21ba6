//! Point-cloud and mesh ingestion.
//!
//! Supported inputs: CSV point clouds (`id,x,y[,z][,w]`), square distance
//! matrices (whitespace or comma separated text), and OFF/OBJ meshes, which
//! become edge-weighted graphs with Euclidean edge lengths completed to a
//! full metric by shortest paths.

use std::path::Path;

use crate::error::{GeomError, Result};
use crate::space::{build_space, CoordMetric, DistanceSource, FiniteMetricSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Csv,
    Matrix,
    Off,
    Obj,
}

/// Pick a format from the file extension.
pub fn detect_format(path: &Path) -> Result<InputFormat> {
    match path.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()) {
        Some(ext) if ext == "csv" => Ok(InputFormat::Csv),
        Some(ext) if ext == "txt" || ext == "mat" || ext == "dist" => Ok(InputFormat::Matrix),
        Some(ext) if ext == "off" => Ok(InputFormat::Off),
        Some(ext) if ext == "obj" => Ok(InputFormat::Obj),
        other => Err(GeomError::Unsupported(format!(
            "cannot infer input format from extension {other:?}; pass it explicitly"
        ))),
    }
}

/// Read a metric space from a file.
pub fn ingest(path: &Path, format: Option<InputFormat>) -> Result<FiniteMetricSpace> {
    let format = match format {
        Some(f) => f,
        None => detect_format(path)?,
    };
    let text = std::fs::read_to_string(path)?;
    if text.trim().is_empty() {
        return Err(GeomError::EmptyInput(format!("{} is empty", path.display())));
    }
    let name = path.display().to_string();
    match format {
        InputFormat::Csv => ingest_csv(&name, &text),
        InputFormat::Matrix => ingest_matrix(&name, &text),
        InputFormat::Off => ingest_off(&name, &text),
        InputFormat::Obj => ingest_obj(&name, &text),
    }
}

fn parse_err(path: &str, line: usize, message: impl Into<String>) -> GeomError {
    GeomError::Parse { path: path.into(), line, message: message.into() }
}

fn ingest_csv(name: &str, text: &str) -> Result<FiniteMetricSpace> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<(u64, f64, f64, f64, Option<f64>)> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 1;
        let record = record.map_err(|e| parse_err(name, line, e.to_string()))?;
        if record.is_empty() || (record.len() == 1 && record[0].is_empty()) {
            continue;
        }
        // A leading non-numeric row is a header.
        if idx == 0 && record[0].parse::<u64>().is_err() {
            continue;
        }
        if record.len() < 3 {
            return Err(parse_err(name, line, format!("expected id,x,y[,z][,w], got {} fields", record.len())));
        }
        let id: u64 = record[0]
            .parse()
            .map_err(|_| parse_err(name, line, format!("bad id {:?}", &record[0])))?;
        let mut nums = Vec::new();
        for field in record.iter().skip(1) {
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(name, line, format!("bad number {field:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(name, line, "non-finite coordinate"));
            }
            nums.push(v);
        }
        let (x, y) = (nums[0], nums[1]);
        let (z, w) = match nums.len() {
            2 => (0.0, None),
            3 => (nums[2], None),
            4 => (nums[2], Some(nums[3])),
            n => return Err(parse_err(name, line, format!("too many fields ({})", n + 1))),
        };
        rows.push((id, x, y, z, w));
    }
    if rows.is_empty() {
        return Err(GeomError::EmptyInput(format!("{name} has no data rows")));
    }
    rows.sort_by_key(|r| r.0);
    for pair in rows.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(GeomError::InvalidParameter(format!("duplicate id {}", pair[0].0)));
        }
    }
    let pts: Vec<[f64; 3]> = rows.iter().map(|r| [r.1, r.2, r.3]).collect();
    let planar = rows.iter().all(|r| r.3 == 0.0);
    let chart: Option<Vec<[f64; 2]>> =
        if planar { Some(rows.iter().map(|r| [r.1, r.2]).collect()) } else { None };
    let weights: Option<Vec<f64>> = if rows.iter().all(|r| r.4.is_some()) {
        Some(rows.iter().map(|r| r.4.unwrap()).collect())
    } else {
        None
    };
    build_space(DistanceSource::Coords(pts, CoordMetric::Euclidean), chart, weights, None)
}

fn ingest_matrix(name: &str, text: &str) -> Result<FiniteMetricSpace> {
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for tok in line.split(|c: char| c == ',' || c.is_whitespace()) {
            if tok.is_empty() {
                continue;
            }
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(name, idx + 1, format!("bad number {tok:?}")))?;
            values.push(v);
        }
    }
    build_space(DistanceSource::Matrix(values), None, None, None)
}

fn mesh_space(vertices: Vec<[f64; 3]>, faces: Vec<Vec<usize>>, name: &str) -> Result<FiniteMetricSpace> {
    let n = vertices.len();
    if n == 0 {
        return Err(GeomError::EmptyInput(format!("{name} has no vertices")));
    }
    let mut edges = std::collections::BTreeSet::new();
    for face in &faces {
        for k in 0..face.len() {
            let (a, b) = (face[k], face[(k + 1) % face.len()]);
            if a >= n || b >= n {
                return Err(GeomError::InvalidParameter(format!(
                    "face references vertex {} of {n}",
                    a.max(b)
                )));
            }
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let weighted: Vec<(usize, usize, f64)> = edges
        .into_iter()
        .map(|(a, b)| {
            let (p, q) = (vertices[a], vertices[b]);
            let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt();
            (a, b, d)
        })
        .collect();
    build_space(DistanceSource::Edges { n, edges: weighted }, None, None, None)
}

fn ingest_off(name: &str, text: &str) -> Result<FiniteMetricSpace> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (l1, header) = lines.next().ok_or_else(|| GeomError::EmptyInput(name.into()))?;
    if !header.eq_ignore_ascii_case("OFF") {
        return Err(parse_err(name, l1, "missing OFF header"));
    }
    let (l2, counts) = lines.next().ok_or_else(|| parse_err(name, l1, "missing counts"))?;
    let counts: Vec<usize> = counts
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(name, l2, "bad count")))
        .collect::<Result<_>>()?;
    if counts.len() < 2 {
        return Err(parse_err(name, l2, "expected vertex and face counts"));
    }
    let (nv, nf) = (counts[0], counts[1]);
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(name, l2, "truncated vertices"))?;
        let nums: Vec<f64> = l
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(name, ln, "bad coordinate")))
            .collect::<Result<_>>()?;
        if nums.len() < 3 {
            return Err(parse_err(name, ln, "vertex needs three coordinates"));
        }
        vertices.push([nums[0], nums[1], nums[2]]);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(name, l2, "truncated faces"))?;
        let nums: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(name, ln, "bad face index")))
            .collect::<Result<_>>()?;
        if nums.is_empty() || nums.len() != nums[0] + 1 {
            return Err(parse_err(name, ln, "face count mismatch"));
        }
        faces.push(nums[1..].to_vec());
    }
    mesh_space(vertices, faces, name)
}

fn ingest_obj(name: &str, text: &str) -> Result<FiniteMetricSpace> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let ln = idx + 1;
        let line = line.trim();
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("v") => {
                let nums: Vec<f64> = toks
                    .take(3)
                    .map(|t| t.parse().map_err(|_| parse_err(name, ln, "bad coordinate")))
                    .collect::<Result<_>>()?;
                if nums.len() < 3 {
                    return Err(parse_err(name, ln, "vertex needs three coordinates"));
                }
                vertices.push([nums[0], nums[1], nums[2]]);
            }
            Some("f") => {
                let mut face = Vec::new();
                for tok in toks {
                    let head = tok.split('/').next().unwrap_or("");
                    let i: i64 =
                        head.parse().map_err(|_| parse_err(name, ln, "bad face index"))?;
                    if i == 0 {
                        return Err(parse_err(name, ln, "obj indices are 1-based"));
                    }
                    let idx = if i > 0 {
                        (i - 1) as usize
                    } else {
                        // Negative indices count from the end.
                        let back = (-i) as usize;
                        if back > vertices.len() {
                            return Err(parse_err(name, ln, "negative index out of range"));
                        }
                        vertices.len() - back
                    };
                    face.push(idx);
                }
                if face.len() < 2 {
                    return Err(parse_err(name, ln, "face needs at least two vertices"));
                }
                faces.push(face);
            }
            _ => continue,
        }
    }
    mesh_space(vertices, faces, name)
}
