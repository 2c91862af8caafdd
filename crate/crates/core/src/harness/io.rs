use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{Experiment, HarnessError};
use crate::graphs::{PlaneTriangulation, TriangleGenealogy};
use crate::packing::{Circle, CirclePacking};

/// Wrapper written around every JSON report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope<T> {
    pub experiment: Experiment,
    pub seed: u64,
    pub config_hash: String,
    pub report: T,
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    fs::write(path, s).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
}

/// Reads JSON, reporting schema errors with the JSON path of the
/// offending field.
pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
    parse_json(&path.display().to_string(), &text)
}

pub(crate) fn parse_json<T: DeserializeOwned>(name: &str, text: &str) -> Result<T, HarnessError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| HarnessError::Schema {
        path: name.to_string(),
        pointer: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

pub fn save_triangulation(path: &Path, g: &PlaneTriangulation) -> Result<(), HarnessError> {
    save_json(path, g)
}

/// Loads and re-validates a triangulation.
pub fn load_triangulation(path: &Path) -> Result<PlaneTriangulation, HarnessError> {
    load_json(path)
}

pub fn save_genealogy(path: &Path, g: &TriangleGenealogy) -> Result<(), HarnessError> {
    save_json(path, g)
}

pub fn load_genealogy(path: &Path) -> Result<TriangleGenealogy, HarnessError> {
    load_json(path)
}

pub fn save_report<T: Serialize>(path: &Path, env: &ReportEnvelope<T>) -> Result<(), HarnessError> {
    save_json(path, env)
}

pub fn load_report<T: DeserializeOwned>(path: &Path) -> Result<ReportEnvelope<T>, HarnessError> {
    load_json(path)
}

/// `v,x,y,r` rows; `{}` formatting of `f64` round-trips exactly.
pub fn packing_to_csv(p: &CirclePacking) -> Vec<String> {
    p.circles.iter().enumerate().map(|(v, c)| format!("{v},{},{},{}", c.cx, c.cy, c.r)).collect()
}

/// Parses the CSV written by the harness. Lines starting with `#` and the
/// header are skipped; vertex ids must be `0, 1, 2, ...` in order.
pub fn packing_from_csv(text: &str, tolerance: f64) -> Result<CirclePacking, HarnessError> {
    let bad = |line: usize, message: String| HarnessError::Schema { path: "packing.csv".into(), pointer: format!("line {line}"), message };
    let mut circles = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("v,") {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(bad(i + 1, format!("expected 4 fields, found {}", f.len())));
        }
        let v: usize = f[0].parse().map_err(|e| bad(i + 1, format!("vertex id: {e}")))?;
        if v != circles.len() {
            return Err(bad(i + 1, format!("vertex id {v} out of order")));
        }
        let num = |k: usize, what: &str| f[k].parse::<f64>().map_err(|e| bad(i + 1, format!("{what}: {e}")));
        circles.push(Circle { cx: num(1, "x")?, cy: num(2, "y")?, r: num(3, "r")? });
    }
    Ok(CirclePacking::new(circles, tolerance))
}
