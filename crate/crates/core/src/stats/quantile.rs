use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::clt::leaf_log_s_samples;
use super::cocycle::{fixture_cocycles, CocycleKind};
use super::StatsError;
use crate::rng::RandomSource;

fn check_epsilon(eps: f64) -> Result<(), StatsError> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(StatsError::BadEpsilon(eps))
    }
}

/// Index of the `⌈εn⌉`-th smallest value (1-based rank), ties broken by
/// position in `values`.
pub fn quantile_index(values: &[f64], eps: f64) -> Result<usize, StatsError> {
    check_epsilon(eps)?;
    if values.is_empty() {
        return Err(StatsError::Empty);
    }
    let n = values.len();
    // Guard against εn landing a rounding error above an integer.
    let rank = ((eps * n as f64 - 1e-9).ceil() as usize).clamp(1, n);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    Ok(idx[rank - 1])
}

pub fn quantile(values: &[f64], eps: f64) -> Result<f64, StatsError> {
    Ok(values[quantile_index(values, eps)?])
}

/// `log(q(1-ε)/q(ε))` computed from log values.
pub fn log_quantile_ratio(log_values: &[f64], eps: f64) -> Result<f64, StatsError> {
    Ok(quantile(log_values, 1.0 - eps)? - quantile(log_values, eps)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantileReport {
    pub epsilon: f64,
    pub q: f64,
    pub n: usize,
    /// `q(1-ε)/q(ε)`; may be infinite when only the log fits.
    pub ratio: f64,
    pub log_ratio: f64,
}

impl QuantileReport {
    /// Report on radii given as logs.
    pub fn from_log_radii(log_r: &[f64], eps: f64) -> Result<Self, StatsError> {
        let log_ratio = log_quantile_ratio(log_r, eps)?;
        Ok(QuantileReport { epsilon: eps, q: quantile(log_r, eps)?.exp(), n: log_r.len(), ratio: log_ratio.exp(), log_ratio })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum QuantileSource {
    Z1,
    Ziid,
    Constant,
    /// Radii of `leaves` uniform leaves in the line packing of the binary
    /// tower with unit top circles.
    BinaryTower { leaves: usize },
}

impl std::str::FromStr for QuantileSource {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "z1" => Ok(QuantileSource::Z1),
            "ziid" => Ok(QuantileSource::Ziid),
            "constant" => Ok(QuantileSource::Constant),
            _ => match s.strip_prefix("binary-tower") {
                Some("") => Ok(QuantileSource::BinaryTower { leaves: 100_000 }),
                Some(rest) => rest
                    .strip_prefix(':')
                    .and_then(|k| k.parse().ok())
                    .map(|leaves| QuantileSource::BinaryTower { leaves })
                    .ok_or_else(|| StatsError::InvalidParameter(format!("bad source {s:?}"))),
                None => Err(StatsError::InvalidParameter(format!("unknown source {s:?}"))),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub n: u32,
    pub m: f64,
    pub epsilon: f64,
    pub tail_prob: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Some `n` keeps tail mass at least one half at the largest `M`.
    EvidenceAgainstTightness,
    /// Every tail is at most 0.05 at the largest `M`.
    ConsistentWithTightness,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TightnessReport {
    pub source: QuantileSource,
    pub epsilon: f64,
    pub ns: Vec<u32>,
    pub m_grid: Vec<f64>,
    pub samples: usize,
    pub rows: Vec<TailRow>,
    /// Median over samples of `log(q(1-ε)/q(ε))`, per `n`.
    pub median_log_ratio: Vec<f64>,
    pub verdict: Verdict,
}

fn sample_log_ratio(source: QuantileSource, n: u32, eps: f64, src: &RandomSource) -> Result<f64, StatsError> {
    let n_i = n as i64;
    match source {
        QuantileSource::Z1 | QuantileSource::Ziid | QuantileSource::Constant => {
            let kind = match source {
                QuantileSource::Z1 => CocycleKind::Z1 { n: n_i },
                QuantileSource::Ziid => CocycleKind::Ziid { n: n_i },
                _ => CocycleKind::Constant { n: n_i },
            };
            let (_, c) = fixture_cocycles(kind, src)?;
            log_quantile_ratio(&c.log_r, eps)
        }
        QuantileSource::BinaryTower { leaves } => {
            let log_s = leaf_log_s_samples(n, leaves, src, (1.0, 1.0))?;
            let log_r: Vec<f64> = log_s.iter().map(|x| -2.0 * x).collect();
            log_quantile_ratio(&log_r, eps)
        }
    }
}

/// Monte Carlo tail curves `P[q(1-ε)/q(ε) > M]` over an `(n, M)` grid.
pub fn quantile_ratio_experiment(
    source: QuantileSource,
    ns: &[u32],
    eps: f64,
    m_grid: &[f64],
    samples: usize,
    rng: &RandomSource,
) -> Result<TightnessReport, StatsError> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(StatsError::BadEpsilon(eps));
    }
    if samples == 0 {
        return Err(StatsError::InvalidParameter("samples must be at least 1".into()));
    }
    let mut rows = Vec::new();
    let mut medians = Vec::new();
    for &n in ns {
        let base = rng.labeled("quantile").substream(n as u64);
        let mut logs = (0..samples as u64)
            .into_par_iter()
            .map(|i| sample_log_ratio(source, n, eps, &base.substream(i)))
            .collect::<Result<Vec<f64>, _>>()?;
        for &m in m_grid {
            let lm = m.ln();
            let hits = logs.iter().filter(|&&l| l > lm).count();
            rows.push(TailRow { n, m, epsilon: eps, tail_prob: hits as f64 / samples as f64 });
        }
        logs.sort_by(f64::total_cmp);
        medians.push(logs[(samples - 1) / 2]);
    }
    let verdict = match m_grid.iter().copied().fold(None, |a: Option<f64>, m| Some(a.map_or(m, |a| a.max(m)))) {
        None => Verdict::Inconclusive,
        Some(top) => {
            let sup = rows.iter().filter(|r| r.m == top).map(|r| r.tail_prob).fold(0.0, f64::max);
            if sup >= 0.5 {
                Verdict::EvidenceAgainstTightness
            } else if sup <= 0.05 {
                Verdict::ConsistentWithTightness
            } else {
                Verdict::Inconclusive
            }
        }
    };
    Ok(TightnessReport {
        source,
        epsilon: eps,
        ns: ns.to_vec(),
        m_grid: m_grid.to_vec(),
        samples,
        rows,
        median_log_ratio: medians,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_examples() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5).unwrap(), 2.0);
        assert_eq!(quantile(&v, 0.25).unwrap(), 1.0);
        assert_eq!(quantile(&[], 0.5), Err(StatsError::Empty));
        assert!(matches!(quantile(&v, 1.0), Err(StatsError::BadEpsilon(_))));
        // Ties resolve to the earliest position.
        assert_eq!(quantile_index(&[5.0, 1.0, 1.0, 1.0], 0.5).unwrap(), 2);
    }

    #[test]
    fn thirds_of_twelve() {
        // 12 * (k/12) must not round up past k.
        let v: Vec<f64> = (1..=12).map(|k| k as f64).collect();
        for k in 1..12 {
            assert_eq!(quantile(&v, k as f64 / 12.0).unwrap(), k as f64);
        }
    }

    #[test]
    fn z1_tail_jumps() {
        let n = 40u32;
        let half = 2f64.powi(n as i32 / 2);
        let rep = quantile_ratio_experiment(QuantileSource::Z1, &[n], 0.25, &[half / 8.0, half * 8.0], 50, &RandomSource::new(2)).unwrap();
        assert_eq!(rep.rows[0].tail_prob, 1.0);
        assert_eq!(rep.rows[1].tail_prob, 0.0);
        let c = quantile_ratio_experiment(QuantileSource::Constant, &[10, 20], 0.25, &[1.5], 10, &RandomSource::new(2)).unwrap();
        assert!(c.rows.iter().all(|r| r.tail_prob == 0.0));
        assert_eq!(c.verdict, Verdict::ConsistentWithTightness);
    }

    proptest! {
        #[test]
        fn matches_sort_and_index(v in prop::collection::vec(0u8..6, 1..=12)) {
            let vals: Vec<f64> = v.iter().map(|&x| x as f64).collect();
            let n = vals.len();
            let mut sorted = vals.clone();
            sorted.sort_by(f64::total_cmp);
            for k in 1..12u32 {
                let eps = k as f64 / 12.0;
                // Exact rational rank ⌈k n / 12⌉.
                let rank = ((k as usize * n) + 11) / 12;
                prop_assert_eq!(quantile(&vals, eps).unwrap(), sorted[rank.max(1) - 1]);
            }
        }
    }
}
