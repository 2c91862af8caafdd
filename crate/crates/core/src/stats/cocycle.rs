use std::f64::consts::LN_2;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graphs::{PathWindow, SimpleGraph, VertexId};
use crate::packing::CirclePacking;
use crate::rng::RandomSource;

/// Radius and distance ratios `c(u, v) = (r(v)/r(u), d(u, v)/r(u))`,
/// stored as a log-radius potential so that `log_ratio` is exactly
/// antisymmetric and additive up to rounding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cocycle {
    /// External label of each vertex (vertex id, or position on a path).
    pub labels: Vec<i64>,
    pub log_r: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centers: Option<Vec<(f64, f64)>>,
    /// Directed edges are both orientations of these pairs.
    pub edges: Vec<(VertexId, VertexId)>,
}

impl Cocycle {
    pub fn from_potential(labels: Vec<i64>, log_r: Vec<f64>) -> Self {
        let edges = (1..log_r.len() as VertexId).map(|v| (v - 1, v)).collect();
        Cocycle { labels, log_r, centers: None, edges }
    }

    pub fn len(&self) -> usize {
        self.log_r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_r.is_empty()
    }

    /// `log(r(v) / r(u))`.
    pub fn log_ratio(&self, u: VertexId, v: VertexId) -> f64 {
        self.log_r[v as usize] - self.log_r[u as usize]
    }

    /// `d(u, v) / r(u)`, when centers are known.
    pub fn dist_ratio(&self, u: VertexId, v: VertexId) -> Option<f64> {
        let c = self.centers.as_ref()?;
        let (a, b) = (c[u as usize], c[v as usize]);
        Some((a.0 - b.0).hypot(a.1 - b.1) / self.log_r[u as usize].exp())
    }

    pub fn index_of(&self, label: i64) -> Option<VertexId> {
        self.labels.iter().position(|&l| l == label).map(|i| i as VertexId)
    }

    /// Radii relative to vertex 0.
    pub fn radii(&self) -> Vec<f64> {
        let base = self.log_r.first().copied().unwrap_or(0.0);
        self.log_r.iter().map(|l| (l - base).exp()).collect()
    }
}

pub fn extract_cocycle(p: &CirclePacking, nerve: &SimpleGraph) -> Cocycle {
    Cocycle {
        labels: (0..p.len() as i64).collect(),
        log_r: p.circles.iter().map(|c| c.r.ln()).collect(),
        centers: Some(p.circles.iter().map(|c| (c.cx, c.cy)).collect()),
        edges: nerve.edges.iter().copied().collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CocycleKind {
    /// `c(k, m) = 2^{m-k}` on `{0, ..., n}` minus one uniform vertex.
    Z1 { n: i64 },
    /// i.i.d. `c(k, k+1) = 2^{±1}` on the two-point window `{0, ±n}`.
    Ziid { n: i64 },
    /// All radii equal on `{0, ..., n}`.
    Constant { n: i64 },
}

/// Draws the window and the cocycle on it.
pub fn fixture_cocycles(kind: CocycleKind, rng: &RandomSource) -> Result<(PathWindow, Cocycle), super::StatsError> {
    let mut r = rng.rng();
    let n = match kind {
        CocycleKind::Z1 { n } | CocycleKind::Ziid { n } | CocycleKind::Constant { n } => n,
    };
    if n < 1 {
        return Err(super::StatsError::InvalidParameter(format!("path window needs n >= 1, got {n}")));
    }
    Ok(match kind {
        CocycleKind::Z1 { n } => {
            let w = PathWindow::remove(n, r.gen_range(0..=n));
            let log_r = w.vertices.iter().map(|&k| k as f64 * LN_2).collect();
            let c = Cocycle::from_potential(w.vertices.clone(), log_r);
            (w, c)
        }
        CocycleKind::Ziid { n } => {
            let w = PathWindow::two_point(n, r.gen_bool(0.5));
            let mut sum: i64 = 0;
            for _ in 0..n {
                sum += if r.gen_bool(0.5) { 1 } else { -1 };
            }
            // Walking from 0 to -n traverses the edges backwards.
            let k = if w.vertices[1] > 0 { sum } else { -sum };
            let c = Cocycle::from_potential(w.vertices.clone(), vec![0.0, k as f64 * LN_2]);
            (w, c)
        }
        CocycleKind::Constant { n } => {
            let w = PathWindow::remove(n, r.gen_range(0..=n));
            let c = Cocycle::from_potential(w.vertices.clone(), vec![0.0; w.vertices.len()]);
            (w, c)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packing::Circle;
    use proptest::prelude::*;

    #[test]
    fn tangent_pair() {
        let p = CirclePacking::new(vec![Circle { cx: 0.0, cy: 0.0, r: 1.0 }, Circle { cx: 5.0, cy: 0.0, r: 4.0 }], 1e-8);
        let c = extract_cocycle(&p, &SimpleGraph::from_edges(2, [(0, 1)]));
        assert!((c.log_ratio(0, 1) - 4f64.ln()).abs() < 1e-15);
        assert_eq!(c.dist_ratio(0, 1), Some(5.0));
        assert_eq!(c.log_ratio(1, 0), -c.log_ratio(0, 1));
    }

    #[test]
    fn z1_and_ziid() {
        let (w, c) = fixture_cocycles(CocycleKind::Z1 { n: 10 }, &RandomSource::new(3)).unwrap();
        assert_eq!(w.vertices.len(), 10);
        for (i, &k) in w.vertices.iter().enumerate() {
            assert_eq!(c.log_r[i], k as f64 * LN_2);
        }
        let (w, c) = fixture_cocycles(CocycleKind::Ziid { n: 9 }, &RandomSource::new(3)).unwrap();
        assert_eq!(w.vertices[1].abs(), 9);
        // Nine ±1 steps: odd multiple of log 2.
        let k = (c.log_ratio(0, 1) / LN_2).round() as i64;
        assert_eq!(k.rem_euclid(2), 1);
        assert!(k.abs() <= 9);
    }

    proptest! {
        #[test]
        fn potential_identities(log_r in prop::collection::vec(-30.0f64..30.0, 3..12), idx in prop::collection::vec(0usize..1000, 3)) {
            let n = log_r.len();
            let c = Cocycle::from_potential((0..n as i64).collect(), log_r);
            let (u, v, w) = ((idx[0] % n) as u32, (idx[1] % n) as u32, (idx[2] % n) as u32);
            prop_assert_eq!(c.log_ratio(u, v), -c.log_ratio(v, u));
            prop_assert!((c.log_ratio(u, v) + c.log_ratio(v, w) - c.log_ratio(u, w)).abs() <= 1e-12);
        }
    }
}
