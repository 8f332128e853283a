//! Text formats: field snapshots, contour grids and JSON sidecars.
//!
//! All CSV output uses `.` as the decimal separator, LF line endings and the
//! shortest round-trip representation of each `f64`.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::{Mode, SamplerKind};
use crate::error::Result;
use crate::lattice::{on_lattice, FieldSet, FIELDS};

/// Writes `t,z,phi1,phi2,phi3,phi4`, one row per on-parity site with
/// `|z| <= t`, ordered by `t` then ascending `z`.
pub fn write_fields_csv<W: Write>(mut w: W, fields: &FieldSet) -> Result<()> {
    writeln!(w, "t,z,phi1,phi2,phi3,phi4")?;
    for t in 0..=fields.t_max() {
        let r = t as i64;
        for z in (-r..=r).filter(|&z| on_lattice(t, z)) {
            write!(w, "{t},{z}")?;
            for i in 1..=FIELDS {
                write!(w, ",{}", fields.get(i, t, z))?;
            }
            writeln!(w)?;
        }
    }
    Ok(())
}

/// Parses the output of [`write_fields_csv`].
pub fn read_fields_csv(text: &str) -> Result<FieldSet> {
    let bad = |msg: String| crate::Error::Config(format!("field csv: {msg}"));
    let mut rows = Vec::new();
    let mut lines = text.lines();
    match lines.next() {
        Some("t,z,phi1,phi2,phi3,phi4") => {}
        other => return Err(bad(format!("unexpected header {other:?}"))),
    }
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 2 + FIELDS {
            return Err(bad(format!("line {} has {} columns", n + 2, cols.len())));
        }
        let t: usize = cols[0].parse().map_err(|e| bad(format!("line {}: {e}", n + 2)))?;
        let z: i64 = cols[1].parse().map_err(|e| bad(format!("line {}: {e}", n + 2)))?;
        let mut v = [0.0; FIELDS];
        for (k, c) in cols[2..].iter().enumerate() {
            v[k] = c.parse().map_err(|e| bad(format!("line {}: {e}", n + 2)))?;
        }
        rows.push((t, z, v));
    }
    let t_max = rows.iter().map(|r| r.0).max().unwrap_or(0);
    let mut f = FieldSet::new(t_max);
    for (t, z, v) in rows {
        if !on_lattice(t, z) {
            return Err(bad(format!("site (t={t}, z={z}) is off the lattice")));
        }
        for (k, &x) in v.iter().enumerate() {
            f.set(k + 1, t, z, x);
        }
    }
    Ok(f)
}

/// One grid point of a contour export.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub t: usize,
    pub z: i64,
    pub value: f64,
}

/// Writes `t,z,value` rows.
pub fn write_grid_csv<W: Write>(mut w: W, grid: &[GridPoint]) -> Result<()> {
    writeln!(w, "t,z,value")?;
    for p in grid {
        writeln!(w, "{},{},{}", p.t, p.z, p.value)?;
    }
    Ok(())
}

/// Sidecar describing how a field snapshot was produced.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SnapshotMeta {
    pub kind: &'static str,
    pub alpha: f64,
    pub t_ret: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_pairs: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn write_fields_file(path: &Path, fields: &FieldSet) -> Result<()> {
    let mut buf = Vec::new();
    write_fields_csv(&mut buf, fields)?;
    fs::write(path, buf)?;
    Ok(())
}
