//! Packings in which every circle is tangent to one horizontal line.
//!
//! With `s = 1/√r`, a circle tangent to the line and to two tangent
//! circles `l`, `r` on the same side has `s = s_l + s_r`, and its point of
//! contact with the line is `(s_l x_l + s_r x_r) / (s_l + s_r)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::PackingError;
use crate::graphs::{TriangleGenealogy, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineMode {
    /// `log s` only; safe at any depth.
    Log,
    /// `log s` plus `f64` contact abscissae.
    Float,
    /// Exact rational `s` and abscissae.
    Exact,
}

impl std::str::FromStr for LineMode {
    type Err = PackingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "log" => Ok(LineMode::Log),
            "float" => Ok(LineMode::Float),
            "exact" | "exact-rational" => Ok(LineMode::Exact),
            _ => Err(PackingError::InvalidInput(format!("unknown line mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineTangentPacking {
    pub mode: LineMode,
    /// `log s(v)` per genealogy vertex.
    pub log_s: Vec<f64>,
    /// Contact abscissae, when computed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[serde(skip)]
    pub exact_s: Option<Vec<BigRational>>,
    #[serde(skip)]
    pub exact_x: Option<Vec<BigRational>>,
}

/// `log(e^a + e^b)`.
pub fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

impl LineTangentPacking {
    pub fn radius(&self, v: VertexId) -> f64 {
        (-2.0 * self.log_s[v as usize]).exp()
    }

    pub fn log_radius(&self, v: VertexId) -> f64 {
        -2.0 * self.log_s[v as usize]
    }

    /// Max relative gap between `log s(v)` and `log(s(l) + s(r))` over
    /// middle vertices.
    pub fn additivity_residual(&self, gen: &TriangleGenealogy) -> f64 {
        gen.triangles()
            .iter()
            .map(|t| {
                let want = log_add(self.log_s[t.left as usize], self.log_s[t.right as usize]);
                let got = self.log_s[t.middle as usize];
                (got - want).abs() / want.abs().max(1.0)
            })
            .fold(0.0, f64::max)
    }

    /// Whether `s(m) == s(l) + s(r)` holds exactly for every triangle.
    pub fn exact_additivity(&self, gen: &TriangleGenealogy) -> Option<bool> {
        let s = self.exact_s.as_ref()?;
        Some(gen.triangles().iter().all(|t| {
            s[t.middle as usize] == &s[t.left as usize] + &s[t.right as usize]
        }))
    }

    /// Max over tangent pairs of `|(x_u - x_v)² - 4 r_u r_v| / (4 r_u r_v)`,
    /// evaluated in `f64` from whichever abscissae are available.
    pub fn tangency_residual(&self, gen: &TriangleGenealogy) -> Option<f64> {
        let x = self.x.as_ref()?;
        let mut worst: f64 = 0.0;
        for (u, v) in tangent_pairs(gen) {
            let dx = x[u as usize] - x[v as usize];
            let lhs = dx * dx;
            let rhs = 4.0 * (self.log_radius(u) + self.log_radius(v)).exp();
            worst = worst.max((lhs - rhs).abs() / rhs);
        }
        Some(worst)
    }

    /// Exact tangency check on rationals: `(x_u - x_v)² s_u² s_v² == 4`.
    pub fn exact_tangency(&self, gen: &TriangleGenealogy) -> Option<bool> {
        let (s, x) = (self.exact_s.as_ref()?, self.exact_x.as_ref()?);
        let four = BigRational::from_integer(BigInt::from(4));
        Some(tangent_pairs(gen).into_iter().all(|(u, v)| {
            let dx = &x[u as usize] - &x[v as usize];
            let ss = &s[u as usize] * &s[v as usize];
            &dx * &dx * &ss * &ss == four
        }))
    }
}

/// Edges of the genealogy's triangles, `u < v`.
pub fn tangent_pairs(gen: &TriangleGenealogy) -> Vec<(VertexId, VertexId)> {
    let mut e: Vec<(VertexId, VertexId)> = gen
        .triangles()
        .iter()
        .flat_map(|t| [(t.left, t.right), (t.left, t.middle), (t.middle, t.right)])
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    e.sort_unstable();
    e.dedup();
    e
}

/// Propagates `s` from the two endpoints of the top triangle down the
/// genealogy. The top endpoints touch the line at `0` and `2/(s_l s_r)`.
pub fn line_pack(gen: &TriangleGenealogy, top_log_s: (f64, f64), mode: LineMode) -> Result<LineTangentPacking, PackingError> {
    if !top_log_s.0.is_finite() || !top_log_s.1.is_finite() {
        return Err(PackingError::InvalidInput("top log s must be finite".into()));
    }
    let n = gen.num_vertices();
    let top = gen.triangle(gen.top_triangle());
    let order = top_down(gen);
    let mut log_s = vec![f64::NAN; n];
    log_s[top.left as usize] = top_log_s.0;
    log_s[top.right as usize] = top_log_s.1;
    for &t in &order {
        let t = gen.triangle(t);
        log_s[t.middle as usize] = log_add(log_s[t.left as usize], log_s[t.right as usize]);
    }
    let mut out = LineTangentPacking { mode, log_s, x: None, exact_s: None, exact_x: None };
    match mode {
        LineMode::Log => {}
        LineMode::Float => {
            let mut s = vec![f64::NAN; n];
            let mut x = vec![f64::NAN; n];
            s[top.left as usize] = top_log_s.0.exp();
            s[top.right as usize] = top_log_s.1.exp();
            x[top.left as usize] = 0.0;
            x[top.right as usize] = 2.0 / (s[top.left as usize] * s[top.right as usize]);
            for &ti in &order {
                let t = gen.triangle(ti);
                let (l, r, m) = (t.left as usize, t.right as usize, t.middle as usize);
                s[m] = s[l] + s[r];
                x[m] = (s[l] * x[l] + s[r] * x[r]) / s[m];
                let gap = 2.0 / (s[l] * s[m]);
                let scale = x[l].abs().max(x[r].abs()).max(f64::MIN_POSITIVE);
                if !s[m].is_finite() || !(gap > scale * 1e-6) || !(x[m] > x[l] && x[m] < x[r]) {
                    return Err(PackingError::PrecisionExhausted { depth: t.generation - gen.triangle(gen.top_triangle()).generation });
                }
            }
            out.x = Some(x);
        }
        LineMode::Exact => {
            let zero = BigRational::zero();
            let mut s = vec![zero.clone(); n];
            let mut x = vec![zero.clone(); n];
            let sl = BigRational::from_float(top_log_s.0.exp()).ok_or_else(|| PackingError::InvalidInput("top s".into()))?;
            let sr = BigRational::from_float(top_log_s.1.exp()).ok_or_else(|| PackingError::InvalidInput("top s".into()))?;
            x[top.right as usize] = BigRational::from_integer(BigInt::from(2)) / (&sl * &sr);
            s[top.left as usize] = sl;
            s[top.right as usize] = sr;
            for &ti in &order {
                let t = gen.triangle(ti);
                let (l, r, m) = (t.left as usize, t.right as usize, t.middle as usize);
                s[m] = &s[l] + &s[r];
                x[m] = (&s[l] * &x[l] + &s[r] * &x[r]) / &s[m];
            }
            out.x = Some(x.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect());
            // Keep log s consistent with the rational values where they are representable.
            for (v, sv) in s.iter().enumerate() {
                if let Some(f) = sv.to_f64() {
                    if f > 0.0 && f.is_finite() {
                        out.log_s[v] = f.ln();
                    }
                }
            }
            out.exact_s = Some(s);
            out.exact_x = Some(x);
        }
    }
    Ok(out)
}

/// Triangles ordered so that each comes after its parent, starting at the
/// top of the truncation.
fn top_down(gen: &TriangleGenealogy) -> Vec<u32> {
    let mut order = Vec::with_capacity(gen.num_triangles());
    let mut stack = vec![gen.top_triangle()];
    while let Some(t) = stack.pop() {
        order.push(t);
        if let Some([a, b]) = gen.triangle(t).children {
            stack.push(b);
            stack.push(a);
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::gen_binary_tower;
    use num_traits::One;

    #[test]
    fn symmetric_child() {
        let g = gen_binary_tower(0);
        let p = line_pack(&g, (0.0, 0.0), LineMode::Exact).unwrap();
        let m = g.triangle(0).middle;
        assert_eq!(p.exact_s.as_ref().unwrap()[m as usize], BigRational::from_integer(2.into()));
        assert_eq!(p.radius(m), 0.25);
        assert_eq!(p.exact_x.as_ref().unwrap()[m as usize], BigRational::one());
        assert_eq!(p.exact_tangency(&g), Some(true));
    }

    #[test]
    fn depth_two_leaves() {
        let g = gen_binary_tower(2);
        let p = line_pack(&g, (0.0, 0.0), LineMode::Exact).unwrap();
        let s = p.exact_s.as_ref().unwrap();
        let leaves: Vec<i64> = g.foil(2).iter().map(|&v| s[v as usize].to_integer().try_into().unwrap()).collect();
        assert_eq!(leaves, vec![4, 5, 5, 4]);
        assert_eq!(p.exact_additivity(&g), Some(true));
        assert_eq!(p.exact_tangency(&g), Some(true));
    }

    #[test]
    fn float_mode_matches_exact_and_fails_deep() {
        let g = gen_binary_tower(8);
        let e = line_pack(&g, (0.3, -0.2), LineMode::Exact).unwrap();
        let f = line_pack(&g, (0.3, -0.2), LineMode::Float).unwrap();
        assert!(f.tangency_residual(&g).unwrap() < 1e-9);
        for (a, b) in e.log_s.iter().zip(&f.log_s) {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
        let deep = gen_binary_tower(18);
        assert!(matches!(line_pack(&deep, (0.0, 0.0), LineMode::Float), Err(PackingError::PrecisionExhausted { .. })));
        let log = line_pack(&deep, (0.0, 0.0), LineMode::Log).unwrap();
        assert!(log.additivity_residual(&deep) < 1e-12);
    }
}
