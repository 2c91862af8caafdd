//! Cocycles, quantiles and Monte Carlo statistics of packings.

mod clt;
mod cocycle;
mod foil;
mod quantile;

use thiserror::Error;

pub use clt::{estimate_clt_params, leaf_log_s_samples, CltReport};
pub use cocycle::{extract_cocycle, fixture_cocycles, Cocycle, CocycleKind};
pub use foil::{foil_average, phi, sample_foil_windows, survival_probabilities, FoilAverageReport, FoilSample};
pub use quantile::{
    log_quantile_ratio, quantile, quantile_index, quantile_ratio_experiment, QuantileReport, QuantileSource, TailRow,
    TightnessReport, Verdict,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("empty sample")]
    Empty,
    #[error("epsilon must lie in (0, 1), got {0}")]
    BadEpsilon(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate sample at n = {n}: zero variance")]
    Degenerate { n: u32 },
    #[error("level {level} needs {need} members on each side of the center, found {left} left and {right} right")]
    InsufficientWindow { level: i32, need: usize, left: usize, right: usize },
    #[error(transparent)]
    Graph(#[from] crate::graphs::GraphError),
}

/// Kolmogorov–Smirnov distance between the empirical CDF of `sample` and
/// a continuous reference CDF.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64, StatsError> {
    if sample.is_empty() {
        return Err(StatsError::Empty);
    }
    if sample.iter().any(|x| x.is_nan()) {
        return Err(StatsError::InvalidParameter("sample contains NaN".into()));
    }
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        // Step over a run of tied values at once.
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == xs[i] {
            j += 1;
        }
        let f = cdf(xs[i]);
        d = d.max((f - i as f64 / n).abs()).max(((j + 1) as f64 / n - f).abs());
        i = j + 1;
    }
    Ok(d)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    Normal::new(0.0, 1.0).expect("unit normal").cdf(x)
}
