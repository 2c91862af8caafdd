//! Windowed averages of `φ(r) = r/(1+r)` along foils of line packings.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::graphs::TriangleGenealogy;
use crate::packing::{log_add, LineTangentPacking};
use crate::rng::RandomSource;

/// `φ(r) = r/(1+r)` evaluated from `log s`, where `r = s⁻²`.
pub fn phi(log_s: f64) -> f64 {
    1.0 / (1.0 + (2.0 * log_s).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoilAverageReport {
    pub level: i32,
    pub window_half_width: usize,
    pub ave_value: f64,
    /// Position of the window center within the foil.
    pub center: usize,
    pub foil_len: usize,
}

fn window_mean(level: i32, log_s: &[f64], center: usize, m: usize) -> Result<FoilAverageReport, StatsError> {
    let right = log_s.len().saturating_sub(center + 1);
    if center < m || right < m {
        return Err(StatsError::InsufficientWindow { level, need: m, left: center, right });
    }
    let sum: f64 = log_s[center - m..=center + m].iter().map(|&l| phi(l)).sum();
    Ok(FoilAverageReport { level, window_half_width: m, ave_value: sum / (2 * m + 1) as f64, center, foil_len: log_s.len() })
}

/// Mean of `φ(r(v))` over the `2M+1` consecutive members of foil `level`
/// centered on the first member at or right of the root vertex.
pub fn foil_average(lt: &LineTangentPacking, gen: &TriangleGenealogy, level: i32, m: usize) -> Result<FoilAverageReport, StatsError> {
    let foil = gen.foil(level);
    let x0 = gen.x(gen.root_vertex());
    let center = foil.iter().position(|&v| gen.x(v) >= x0).unwrap_or(foil.len());
    let log_s: Vec<f64> = foil.iter().map(|&v| lt.log_s[v as usize]).collect();
    window_mean(level, &log_s, center, m)
}

/// `q_k`: probability that a critical binary Galton–Watson tree survives
/// `k` generations. `q_0 = 1`, `q_{k+1} = q_k - q_k²/2`.
pub fn survival_probabilities(k: usize) -> Vec<f64> {
    let mut q = Vec::with_capacity(k + 1);
    q.push(1.0);
    for i in 0..k {
        let p: f64 = q[i];
        q.push(p - p * p / 2.0);
    }
    q
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoilSample {
    /// Ancestors generated above the root triangle.
    pub ancestors: usize,
    /// `L_0` members plus ancestors generated in the first pass.
    pub nodes: usize,
    pub l0: FoilAverageReport,
    pub l1: FoilAverageReport,
}

struct Survival(Vec<f64>);

impl Survival {
    fn get(&mut self, k: u32) -> f64 {
        while self.0.len() <= k as usize {
            let p = *self.0.last().unwrap();
            self.0.push(p - p * p / 2.0);
        }
        self.0[k as usize]
    }
}

/// Walks a Galton–Watson triangle `depth` generations above `L_0`,
/// visiting only lineages that reach it, left to right. With endpoint
/// values, `log s` of the `L_0` and `L_1` members is appended to `out`.
/// Returns the numbers of `L_0` and `L_1` members. The sequence of draws
/// does not depend on `ends`.
fn hanging(
    depth: u32,
    rng: &mut impl Rng,
    q: &mut Survival,
    ends: Option<(f64, f64)>,
    out: &mut (Vec<f64>, Vec<f64>),
) -> (usize, usize) {
    if depth > 0 && !rng.gen_bool(q.get(depth)) {
        return (0, 0);
    }
    let (mut c0, mut c1) = (0, 0);
    let (l, r) = ends.unwrap_or((0.0, 0.0));
    let mut stack = vec![(depth, l, r)];
    while let Some((d, l, r)) = stack.pop() {
        let mid = if ends.is_some() { log_add(l, r) } else { 0.0 };
        if d == 0 {
            let eps = rng.gen_bool(0.5);
            c0 += 1;
            if eps {
                c1 += 2;
            }
            if ends.is_some() {
                if eps {
                    out.1.push(log_add(l, mid));
                }
                out.0.push(mid);
                if eps {
                    out.1.push(log_add(mid, r));
                }
            }
            continue;
        }
        // Given survival both children exist and at least one survives.
        let p = q.get(d - 1);
        let u: f64 = rng.gen();
        let both = p / (2.0 - p);
        let alive = if u < both {
            [true, true]
        } else if u < both + (1.0 - p) / (2.0 - p) {
            [true, false]
        } else {
            [false, true]
        };
        if alive[1] {
            stack.push((d - 1, mid, r));
        }
        if alive[0] {
            stack.push((d - 1, l, mid));
        }
    }
    (c0, c1)
}

/// Samples the two foils `L_0`, `L_1` of an EGW line packing around the
/// root vertex `o_0` and averages `φ∘r` over windows of half-width `m`.
///
/// Only triangles with a descendant in `L_0` are generated: hanging trees
/// are drawn conditioned on survival, which leaves the law of the foils
/// unchanged. Ancestors are added until both windows fit, then `log s` is
/// propagated from unit top circles and shifted so that `r(o_0) = 1`.
/// Hanging trees outside both windows are skipped in that second pass.
pub fn sample_foil_windows(rng: &RandomSource, m: usize, max_ancestors: usize) -> Result<FoilSample, StatsError> {
    let mut q = Survival(survival_probabilities(64));
    let mut side_rng = rng.labeled("ancestors").rng();
    let offspring = rng.labeled("offspring");
    let mut scratch = (Vec::new(), Vec::new());

    // Pass 1: sides and foil counts of each hanging tree; index 0 is the
    // root triangle itself.
    let root = hanging(0, &mut offspring.substream(0).rng(), &mut q, None, &mut scratch);
    let mut left_side = vec![false];
    let mut counts = vec![root];
    let (mut left0, mut right0) = (0usize, 0usize);
    let (mut left1, mut right1) = (root.1 / 2, root.1 / 2);
    let mut nodes = 1usize;
    while left0 < m || right0 < m || left1 < m || right1 < m + 1 {
        let j = counts.len();
        if j > max_ancestors {
            let level = if left0 < m || right0 < m { 0 } else { 1 };
            let (left, right) = if level == 0 { (left0, right0) } else { (left1, right1.saturating_sub(1)) };
            return Err(StatsError::InsufficientWindow { level, need: m, left, right });
        }
        let is_left = side_rng.gen_bool(0.5);
        let c = hanging(j as u32 - 1, &mut offspring.substream(j as u64).rng(), &mut q, None, &mut scratch);
        if is_left {
            left0 += c.0;
            left1 += c.1;
        } else {
            right0 += c.0;
            right1 += c.1;
        }
        nodes += c.0 + 1;
        left_side.push(is_left);
        counts.push(c);
    }
    let k = counts.len() - 1;

    // A hanging tree matters if some foil member in it is within `m` of
    // the center on its side.
    let mut needed = vec![false; k + 1];
    let (mut seen_l, mut seen_r) = ((0usize, 0usize), (0usize, 0usize));
    for j in 1..=k {
        let seen = if left_side[j] { &mut seen_l } else { &mut seen_r };
        needed[j] = seen.0 < m + 1 || seen.1 < m + 1;
        seen.0 += counts[j].0;
        seen.1 += counts[j].1;
    }

    // Pass 2: down the ancestor line from A_k with unit top circles. Left
    // hanging trees come out outermost first, right ones innermost first.
    let (mut left_out, mut right_parts): ((Vec<f64>, Vec<f64>), Vec<(Vec<f64>, Vec<f64>)>) = ((Vec::new(), Vec::new()), Vec::new());
    let (mut l, mut r) = (0.0f64, 0.0f64);
    for j in (1..=k).rev() {
        let mid = log_add(l, r);
        let (sib, next) = if left_side[j] { ((l, mid), (mid, r)) } else { ((mid, r), (l, mid)) };
        if needed[j] {
            let mut src = offspring.substream(j as u64).rng();
            if left_side[j] {
                hanging(j as u32 - 1, &mut src, &mut q, Some(sib), &mut left_out);
            } else {
                let mut part = (Vec::new(), Vec::new());
                hanging(j as u32 - 1, &mut src, &mut q, Some(sib), &mut part);
                right_parts.push(part);
            }
        } else if left_side[j] {
            // Placeholders keep positions; they are outside the window.
            left_out.0.extend(std::iter::repeat(f64::NAN).take(counts[j].0));
            left_out.1.extend(std::iter::repeat(f64::NAN).take(counts[j].1));
        }
        l = next.0;
        r = next.1;
    }
    let (mut l0, mut l1) = left_out;
    let mut center = (Vec::new(), Vec::new());
    hanging(0, &mut offspring.substream(0).rng(), &mut q, Some((l, r)), &mut center);
    let c0 = l0.len();
    let rep1 = l1.len() + center.1.len() / 2;
    let o_log_s = center.0[0];
    l0.extend(center.0);
    l1.extend(center.1);
    for part in right_parts.into_iter().rev() {
        l0.extend(part.0);
        l1.extend(part.1);
    }
    for x in l0.iter_mut().chain(l1.iter_mut()) {
        *x -= o_log_s;
    }
    let l0 = window_mean(0, &l0, c0, m)?;
    let l1 = window_mean(1, &l1, rep1, m)?;
    debug_assert!(l0.ave_value.is_finite() && l1.ave_value.is_finite());
    Ok(FoilSample { ancestors: k, nodes, l0, l1 })
}
