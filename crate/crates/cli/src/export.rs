//! Deterministic GeoJSON and CSV writers.
//!
//! GeoJSON keys are sorted (serde_json's default map), floats in CSV use a
//! fixed number of decimals, and every file ends with a newline.

use std::fs;
use std::path::{Path, PathBuf};

use d2d_core::aggregation::{seconds_to_f64, Seconds};
use d2d_core::ingestion::ZoneSet;
use d2d_core::Zone;
use serde_json::{json, Map, Value};

use crate::error::{output_err, CliError};

/// Collects the paths written by a command, in order.
#[derive(Debug, Default)]
pub struct Written(pub Vec<PathBuf>);

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(output_err(dir))
}

fn write_bytes(path: &Path, bytes: &[u8], written: &mut Written) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        ensure_dir(parent)?;
    }
    fs::write(path, bytes).map_err(output_err(path))?;
    written.0.push(path.to_path_buf());
    Ok(())
}

pub fn write_csv(
    path: &Path,
    header: &[String],
    rows: &[Vec<String>],
    written: &mut Written,
) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let to_err = |e: csv::Error| CliError::Output {
        path: path.to_path_buf(),
        source: std::io::Error::other(e.to_string()),
    };
    w.write_record(header).map_err(to_err)?;
    for r in rows {
        w.write_record(r).map_err(to_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Output {
        path: path.to_path_buf(),
        source: std::io::Error::other(e.to_string()),
    })?;
    write_bytes(path, &bytes, written)
}

/// A feature for `zone` with the given properties; the input geometry is
/// kept, else the internal point, else null.
pub fn zone_feature(zone: &Zone, mut props: Map<String, Value>) -> Value {
    props.insert("zone_id".into(), json!(zone.zone_id));
    let geometry = match (&zone.geometry, zone.internal_point) {
        (Some(g), _) => g.clone(),
        (None, Some(p)) => json!({"type": "Point", "coordinates": [p.lon(), p.lat()]}),
        (None, None) => Value::Null,
    };
    json!({"type": "Feature", "properties": props, "geometry": geometry})
}

/// Write one feature per zone of `zones`, in input order.
pub fn write_zone_layer<F>(
    path: &Path,
    zones: &ZoneSet,
    mut props: F,
    written: &mut Written,
) -> Result<(), CliError>
where
    F: FnMut(&Zone) -> Map<String, Value>,
{
    let features: Vec<Value> = zones.iter().map(|z| zone_feature(z, props(z))).collect();
    let doc = json!({"type": "FeatureCollection", "features": features});
    let mut text = serde_json::to_string_pretty(&doc).expect("json values serialize");
    text.push('\n');
    write_bytes(path, text.as_bytes(), written)
}

pub fn fixed(x: f64, decimals: usize) -> String {
    let s = format!("{x:.decimals$}");
    // avoid "-0.0000"
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

/// Rounded value for JSON output.
pub fn rounded(x: f64, decimals: i32) -> Value {
    let f = 10f64.powi(decimals);
    let r = (x * f).round() / f;
    json!(if r == 0.0 { 0.0 } else { r })
}

pub fn minutes(s: &Seconds) -> f64 {
    seconds_to_f64(s) / 60.0
}

pub fn opt_str(v: Option<&str>) -> String {
    v.unwrap_or("").to_string()
}
