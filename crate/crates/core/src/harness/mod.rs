//! Named experiments that write reports, figures and a checksummed
//! manifest to an output directory.

mod experiments;
mod figures;
mod io;
mod params;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use figures::{emit_figure, FigureData, FigureKind};
pub use io::{
    load_genealogy, load_json, load_report, load_triangulation, packing_from_csv, packing_to_csv, save_genealogy, save_json,
    save_report, save_triangulation, ReportEnvelope,
};
pub use params::{parse_list, ParamSpec, Params};

use crate::graphs::GraphError;
use crate::packing::PackingError;
use crate::stats::StatsError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    PackDyadic,
    PackEgw,
    Canopy,
    Symmetry,
    QuantileTightness,
    Clt,
    FoilAverage,
    Mtp,
    FixturesZ,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::PackDyadic,
        Experiment::PackEgw,
        Experiment::Canopy,
        Experiment::Symmetry,
        Experiment::QuantileTightness,
        Experiment::Clt,
        Experiment::FoilAverage,
        Experiment::Mtp,
        Experiment::FixturesZ,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::PackDyadic => "pack-dyadic",
            Experiment::PackEgw => "pack-egw",
            Experiment::Canopy => "canopy",
            Experiment::Symmetry => "symmetry",
            Experiment::QuantileTightness => "quantile-tightness",
            Experiment::Clt => "clt",
            Experiment::FoilAverage => "foil-average",
            Experiment::Mtp => "mtp",
            Experiment::FixturesZ => "fixtures-z",
        }
    }

    pub fn about(self) -> &'static str {
        match self {
            Experiment::PackDyadic => "pack a dyadic half-plane window (optionally reflected to the plane)",
            Experiment::PackEgw => "line packing of an eternal Galton-Watson truncation",
            Experiment::Canopy => "explicit packing of a canopy tree",
            Experiment::Symmetry => "detect the reflection symmetry of a packed full-plane window",
            Experiment::QuantileTightness => "tail curves of quantile ratios",
            Experiment::Clt => "drift and spread of random B/Bt matrix products",
            Experiment::FoilAverage => "windowed foil averages of phi(r) on L0 and L1",
            Experiment::Mtp => "mass transport sums and foil-ancestor incoming mass",
            Experiment::FixturesZ => "cocycles on path windows of the integers",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| HarnessError::UnknownExperiment(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(HarnessError::Config { key: "format".into(), message: format!("unknown format {other:?}") }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub out: PathBuf,
    pub formats: Vec<Format>,
    /// Experiment flags by name, as given (defaults are filled in on run).
    #[serde(default)]
    pub params: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, seed: u64, out: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            experiment,
            seed,
            out: out.into(),
            formats: vec![Format::Csv, Format::Json, Format::Svg],
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    /// SHA-256 of the canonical JSON of everything but the output
    /// directory, with defaults filled in.
    pub fn hash(&self) -> Result<String, HarnessError> {
        let params = Params::resolve(self.experiment, &self.params)?;
        let mut formats = self.formats.clone();
        formats.sort();
        formats.dedup();
        let canonical = serde_json::json!({
            "experiment": self.experiment,
            "seed": self.seed,
            "formats": formats,
            "params": params.all(),
        });
        Ok(sha256_hex(canonical.to_string().as_bytes()))
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown experiment {0:?}")]
    UnknownExperiment(String),
    #[error("flag --{key}: {message}")]
    Config { key: String, message: String },
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: schema error at {pointer}: {message}")]
    Schema { path: String, pointer: String, message: String },
    #[error("figure kind {expected} does not match the supplied data")]
    FigureMismatch { expected: String },
    #[error("{context}: {source}")]
    Packing { context: String, source: PackingError },
    #[error("{context}: {source}")]
    Graph { context: String, source: GraphError },
    #[error("{context}: {source}")]
    Stats { context: String, source: StatsError },
}

impl HarnessError {
    /// Process exit status: 3 for solver non-convergence, 2 for invalid
    /// input or validation problems, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Packing { source: PackingError::NoConvergence { .. }, .. } => 3,
            HarnessError::Io { .. } => 1,
            _ => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Status {
    Ok,
    ValidationFailed { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub experiment: Experiment,
    pub seed: u64,
    pub config_hash: String,
    pub config: ExperimentConfig,
    /// Every flag with defaults filled in.
    pub flags: BTreeMap<String, String>,
    pub artifacts: Vec<Artifact>,
    pub status: Status,
}

impl Manifest {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Ok => 0,
            Status::ValidationFailed { .. } => 2,
        }
    }
}

pub const MANIFEST_FILE: &str = "manifest.json";

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects the artifacts of one run; each file is written once.
pub(crate) struct Writer<'a> {
    pub config: &'a ExperimentConfig,
    pub hash: String,
    artifacts: Vec<Artifact>,
}

impl<'a> Writer<'a> {
    fn write(&mut self, name: &str, contents: &[u8]) -> Result<(), HarnessError> {
        let path = self.config.out.join(name);
        fs::write(&path, contents).map_err(|source| HarnessError::Io { path, source })?;
        self.artifacts.push(Artifact { path: name.to_string(), sha256: sha256_hex(contents), bytes: contents.len() as u64 });
        Ok(())
    }

    /// JSON report wrapped in an envelope carrying the config hash.
    pub fn json<T: Serialize>(&mut self, name: &str, report: &T) -> Result<(), HarnessError> {
        if !self.config.wants(Format::Json) {
            return Ok(());
        }
        let env = ReportEnvelope {
            experiment: self.config.experiment,
            seed: self.config.seed,
            config_hash: self.hash.clone(),
            report,
        };
        let mut s = serde_json::to_string_pretty(&env).expect("reports serialize");
        s.push('\n');
        self.write(name, s.as_bytes())
    }

    pub fn csv(&mut self, name: &str, header: &str, rows: &[String]) -> Result<(), HarnessError> {
        if !self.config.wants(Format::Csv) {
            return Ok(());
        }
        let mut s = format!("# experiment={} seed={} config_hash={}\n{header}\n", self.config.experiment, self.config.seed, self.hash);
        for r in rows {
            s.push_str(r);
            s.push('\n');
        }
        self.write(name, s.as_bytes())
    }

    pub fn svg(&mut self, name: &str, data: &FigureData, kind: FigureKind) -> Result<(), HarnessError> {
        if !self.config.wants(Format::Svg) {
            return Ok(());
        }
        let body = emit_figure(data, kind)?;
        let stamped = body.replacen(
            "<svg ",
            &format!("<!-- experiment={} seed={} config_hash={} -->\n<svg ", self.config.experiment, self.config.seed, self.hash),
            1,
        );
        self.write(name, stamped.as_bytes())
    }
}

/// Runs one experiment and writes its artifacts and `manifest.json`.
///
/// Monte Carlo work runs on the current rayon pool; results do not depend
/// on its size.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Manifest, HarnessError> {
    let params = Params::resolve(config.experiment, &config.params)?;
    if config.formats.is_empty() {
        return Err(HarnessError::Config { key: "format".into(), message: "no output formats".into() });
    }
    fs::create_dir_all(&config.out).map_err(|source| HarnessError::Io { path: config.out.clone(), source })?;
    let hash = config.hash()?;
    let mut w = Writer { config, hash: hash.clone(), artifacts: Vec::new() };
    let status = experiments::run(config, &params, &mut w)?;
    let mut artifacts = w.artifacts;
    artifacts.sort_by(|a, b| a.path.cmp(&b.path));
    let manifest = Manifest {
        tool: "cplab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        experiment: config.experiment,
        seed: config.seed,
        config_hash: hash,
        config: config.clone(),
        flags: params.all().clone(),
        artifacts,
        status,
    };
    let mut s = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    s.push('\n');
    let path = config.out.join(MANIFEST_FILE);
    fs::write(&path, s).map_err(|source| HarnessError::Io { path, source })?;
    Ok(manifest)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub original: Manifest,
    pub replayed: Manifest,
    /// Artifacts whose checksum differs or that exist in only one run.
    pub mismatched: Vec<String>,
}

impl ReplayReport {
    pub fn identical(&self) -> bool {
        self.mismatched.is_empty()
    }
}

pub fn load_manifest(path: &Path) -> Result<Manifest, HarnessError> {
    load_json(path)
}

/// Re-runs the config recorded in a manifest into `out` and compares
/// artifact checksums.
pub fn replay(manifest_path: &Path, out: &Path) -> Result<ReplayReport, HarnessError> {
    let original = load_manifest(manifest_path)?;
    let mut config = original.config.clone();
    config.out = out.to_path_buf();
    let replayed = run_experiment(&config)?;
    let a: BTreeMap<&str, &str> = original.artifacts.iter().map(|x| (x.path.as_str(), x.sha256.as_str())).collect();
    let b: BTreeMap<&str, &str> = replayed.artifacts.iter().map(|x| (x.path.as_str(), x.sha256.as_str())).collect();
    let mut mismatched: Vec<String> =
        a.iter().filter(|(k, v)| b.get(*k) != Some(*v)).map(|(k, _)| k.to_string()).collect();
    mismatched.extend(b.keys().filter(|k| !a.contains_key(*k)).map(|k| k.to_string()));
    Ok(ReplayReport { original, replayed, mismatched })
}

/// Runs `f` on a rayon pool with `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build().expect("thread pool").install(f)
}

/// Worker count from `CPLAB_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("CPLAB_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}
