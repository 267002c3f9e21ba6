//! Report schema version and JSON helpers.
//!
//! Every externally visible report embeds [`SCHEMA_VERSION`], the
//! configuration that produced it, and the sampling budgets, so results can
//! be replayed. Serialization is byte-stable for a fixed input: struct field
//! order is fixed and floats render shortest-roundtrip.

use serde::Serialize;
use std::io::Write;
use std::path::Path;

use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| crate::error::GeomError::Unsupported(format!("serialize: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let s = to_json_string(value)?;
    let mut f = std::fs::File::create(path)?;
    f.write_all(s.as_bytes())?;
    Ok(())
}
