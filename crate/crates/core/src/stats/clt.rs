//! Products of the random matrices `B = [[1,1],[0,1]]` and `Bᵗ`.
//!
//! In a line packing of the binary tower, `s` at a uniform leaf of depth
//! `n` is `[1 1]·Bₙ⋯B₁·x0` for i.i.d. uniform choices, where `x0` holds the
//! `s` values of the two top circles.

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quantile::log_quantile_ratio;
use super::{ks_statistic, normal_cdf, StatsError};
use crate::rng::RandomSource;

const RESCALE: f64 = 1e150;

/// `log([1 1]·M·x0)` for the word given by `bits` (bit set = `B`, clear =
/// `Bᵗ`), the first bit being the leftmost factor.
pub(crate) fn word_log_s(bits: impl Iterator<Item = bool>, x0: (f64, f64)) -> f64 {
    // Row vector w·M, kept as (a, b)·e^scale.
    let (mut a, mut b, mut scale) = (1.0f64, 1.0f64, 0.0f64);
    for bit in bits {
        if bit {
            b += a;
        } else {
            a += b;
        }
        if a > RESCALE || b > RESCALE {
            a /= RESCALE;
            b /= RESCALE;
            scale += RESCALE.ln();
        }
    }
    (a * x0.0 + b * x0.1).ln() + scale
}

fn random_word_log_s(n: u32, src: &RandomSource, x0: (f64, f64)) -> f64 {
    let mut rng = src.rng();
    let mut left = n;
    let mut word = 0u64;
    let mut avail = 0u32;
    let bits = std::iter::from_fn(|| {
        if left == 0 {
            return None;
        }
        if avail == 0 {
            word = rng.next_u64();
            avail = 64;
        }
        let bit = word & 1 == 1;
        word >>= 1;
        avail -= 1;
        left -= 1;
        Some(bit)
    });
    word_log_s(bits, x0)
}

/// `samples` draws of `log s` at a uniform depth-`n` leaf. Sample `i`
/// uses substream `i` of `rng`.
pub fn leaf_log_s_samples(n: u32, samples: usize, rng: &RandomSource, x0: (f64, f64)) -> Result<Vec<f64>, StatsError> {
    if !(x0.0 > 0.0 && x0.1 > 0.0 && x0.0.is_finite() && x0.1.is_finite()) {
        return Err(StatsError::InvalidParameter(format!("x0 must be strictly positive, got {x0:?}")));
    }
    if n < 1 {
        return Err(StatsError::InvalidParameter("depth must be at least 1".into()));
    }
    Ok((0..samples as u64).into_par_iter().map(|i| random_word_log_s(n, &rng.substream(i), x0)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub n: u32,
    pub samples: usize,
    /// `mean(log s) / n`.
    pub gamma_hat: f64,
    /// 95% normal-approximation half-width for `gamma_hat`.
    pub gamma_ci: f64,
    /// `stddev(log s) / √n`.
    pub sigma_hat: f64,
    pub sigma_ci: f64,
    /// KS distance of the standardized sample to the unit normal.
    pub ks_statistic: f64,
    pub epsilon: f64,
    /// `(1/√n)·log(q(1-ε)/q(ε))` over the sampled leaf radii `s⁻²`.
    pub quantile_slope: f64,
}

pub fn estimate_clt_params(ns: &[u32], samples: usize, rng: &RandomSource) -> Result<Vec<CltReport>, StatsError> {
    if samples < 1000 {
        return Err(StatsError::InvalidParameter(format!("need at least 1000 samples, got {samples}")));
    }
    let epsilon = 0.25;
    ns.iter()
        .map(|&n| {
            if n < 100 {
                return Err(StatsError::InvalidParameter(format!("depth {n} is below 100")));
            }
            let xs = leaf_log_s_samples(n, samples, &rng.labeled("clt").substream(n as u64), (1.0, 1.0))?;
            let m = samples as f64;
            let mean = xs.iter().sum::<f64>() / m;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
            let sd = var.sqrt();
            if !(sd > 0.0) {
                return Err(StatsError::Degenerate { n });
            }
            let z: Vec<f64> = xs.iter().map(|x| (x - mean) / sd).collect();
            let log_r: Vec<f64> = xs.iter().map(|x| -2.0 * x).collect();
            let rootn = (n as f64).sqrt();
            Ok(CltReport {
                n,
                samples,
                gamma_hat: mean / n as f64,
                gamma_ci: 1.96 * sd / (n as f64 * m.sqrt()),
                sigma_hat: sd / rootn,
                sigma_ci: 1.96 * sd / rootn / (2.0 * (m - 1.0)).sqrt(),
                ks_statistic: ks_statistic(&z, normal_cdf)?,
                epsilon,
                quantile_slope: log_quantile_ratio(&log_r, epsilon)? / rootn,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_one_and_two() {
        let xs = leaf_log_s_samples(1, 20, &RandomSource::new(1), (1.0, 1.0)).unwrap();
        assert!(xs.iter().all(|&x| (x - 3f64.ln()).abs() < 1e-15));
        let xs = leaf_log_s_samples(2, 200, &RandomSource::new(1), (1.0, 1.0)).unwrap();
        let fours = xs.iter().filter(|&&x| (x - 4f64.ln()).abs() < 1e-12).count();
        let fives = xs.iter().filter(|&&x| (x - 5f64.ln()).abs() < 1e-12).count();
        assert_eq!(fours + fives, 200);
        assert!(fours > 60 && fives > 60);
    }

    #[test]
    fn rescaling_matches_log_domain() {
        let bits: Vec<bool> = (0..5000).map(|i| (i * 7 + i / 3) % 5 < 2).collect();
        let fast = word_log_s(bits.iter().copied(), (0.5, 2.0));
        let (mut a, mut b) = (0.0f64, 0.0f64);
        let add = |x: f64, y: f64| x.max(y) + (-(x - y).abs()).exp().ln_1p();
        for &bit in &bits {
            if bit {
                b = add(a, b);
            } else {
                a = add(a, b);
            }
        }
        let slow = add(a + 0.5f64.ln(), b + 2f64.ln());
        assert!((fast - slow).abs() < 1e-9 * slow);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(leaf_log_s_samples(3, 1, &RandomSource::new(0), (0.0, 1.0)).is_err());
        assert!(estimate_clt_params(&[50], 1000, &RandomSource::new(0)).is_err());
        assert!(estimate_clt_params(&[100], 10, &RandomSource::new(0)).is_err());
    }
}
