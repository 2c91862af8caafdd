use std::collections::BTreeMap;
use std::str::FromStr;

use super::{Experiment, HarnessError};

/// A named experiment flag with its default, as shown by `--help`.
#[derive(Clone, Copy, Debug)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

macro_rules! p {
    ($name:expr, $default:expr, $help:expr) => {
        ParamSpec { name: $name, default: $default, help: $help }
    };
}

impl Experiment {
    pub fn params(self) -> &'static [ParamSpec] {
        match self {
            Experiment::PackDyadic => &[
                p!("levels", "3", "number of dyadic arc levels N"),
                p!("window", "8", "half-width W of the integer window"),
                p!("bits", "", "comma-separated bits u_0,u_1,...; random when empty"),
                p!("plane", "true", "reflect to a full-plane triangulation before packing"),
                p!("tol", "1e-12", "solver angle-sum tolerance"),
                p!("max-sweeps", "1000000", "solver sweep cap"),
                p!("geometry-tol", "1e-6", "relative tangency tolerance for validation"),
            ],
            Experiment::PackEgw => &[
                p!("ancestors", "6", "ancestor depth above the root triangle"),
                p!("max-gen", "8", "descendant generations grown below each hanging triangle"),
                p!("max-triangles", "1000000", "triangle cap"),
                p!("mode", "float", "log, float or exact"),
            ],
            Experiment::Canopy => &[
                p!("max-level", "6", "top level N of the canopy tree"),
                p!("window", "0", "top-level half-width; 0 means 2^N"),
                p!("stationarize", "false", "translate a random spine vertex to the origin"),
            ],
            Experiment::Symmetry => &[
                p!("levels", "4", "number of dyadic arc levels N"),
                p!("window", "16", "half-width W of the integer window"),
                p!("bits", "", "comma-separated bits; random when empty"),
                p!("tol", "1e-6", "match-error threshold"),
                p!("randomize", "true", "apply a random rotation/reflection before detection"),
            ],
            Experiment::QuantileTightness => &[
                p!("source", "z1", "z1, ziid, constant or binary-tower[:leaves]"),
                p!("n", "20..100:10", "depths: list a,b,c or range a..b[:step]"),
                p!("epsilon", "0.25", "quantile level in (0, 1/2)"),
                p!("m-grid", "", "thresholds M; default 2^0, 2^4, ..., 2^64"),
                p!("samples", "200", "Monte Carlo samples per depth"),
            ],
            Experiment::Clt => &[
                p!("n", "500,1000,2000", "depths (each at least 100)"),
                p!("samples", "10000", "samples per depth"),
            ],
            Experiment::FoilAverage => &[
                p!("seeds", "200", "number of sampled line packings"),
                p!("m", "5000", "window half-width M"),
                p!("max-ancestors", "50000000", "ancestor cap per packing"),
            ],
            Experiment::Mtp => &[
                p!("k", "10..40:5", "descendant generation caps K"),
                p!("samples", "10000", "genealogies per K"),
            ],
            Experiment::FixturesZ => &[
                p!("kind", "ziid", "z1 or ziid"),
                p!("n", "400", "path length n"),
                p!("samples", "10000", "number of windows"),
            ],
        }
    }
}

/// Experiment flags with defaults filled in.
#[derive(Clone, Debug)]
pub struct Params {
    values: BTreeMap<String, String>,
}

impl Params {
    pub fn resolve(experiment: Experiment, given: &BTreeMap<String, String>) -> Result<Params, HarnessError> {
        let specs = experiment.params();
        if let Some(k) = given.keys().find(|k| !specs.iter().any(|s| s.name == k.as_str())) {
            return Err(HarnessError::Config { key: k.clone(), message: format!("not a flag of {experiment}") });
        }
        let values =
            specs.iter().map(|s| (s.name.to_string(), given.get(s.name).cloned().unwrap_or_else(|| s.default.to_string()))).collect();
        Ok(Params { values })
    }

    pub fn all(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    pub fn str(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or("")
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T, HarnessError>
    where
        T::Err: std::fmt::Display,
    {
        self.str(key).parse().map_err(|e: T::Err| HarnessError::Config { key: key.into(), message: e.to_string() })
    }

    /// `a,b,c` or `a..b` or `a..b:step` (inclusive).
    pub fn list_u32(&self, key: &str) -> Result<Vec<u32>, HarnessError> {
        parse_list(self.str(key)).map_err(|message| HarnessError::Config { key: key.into(), message })
    }

    pub fn list_f64(&self, key: &str) -> Result<Vec<f64>, HarnessError> {
        self.str(key)
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse::<f64>().map_err(|e| HarnessError::Config { key: key.into(), message: e.to_string() }))
            .collect()
    }
}

pub fn parse_list(s: &str) -> Result<Vec<u32>, String> {
    let s = s.trim();
    if let Some((a, rest)) = s.split_once("..") {
        let (b, step) = match rest.split_once(':') {
            Some((b, st)) => (b, st.trim().parse::<u32>().map_err(|e| e.to_string())?),
            None => (rest, 1),
        };
        let a: u32 = a.trim().parse().map_err(|e: std::num::ParseIntError| e.to_string())?;
        let b: u32 = b.trim().parse().map_err(|e: std::num::ParseIntError| e.to_string())?;
        if step == 0 || b < a {
            return Err(format!("bad range {s:?}"));
        }
        return Ok((a..=b).step_by(step as usize).collect());
    }
    let v: Result<Vec<u32>, String> =
        s.split(',').filter(|x| !x.trim().is_empty()).map(|x| x.trim().parse().map_err(|e: std::num::ParseIntError| e.to_string())).collect();
    let v = v?;
    if v.is_empty() {
        return Err("empty list".into());
    }
    Ok(v)
}
