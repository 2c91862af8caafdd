use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Circle, CirclePacking, GEOMETRY_TOL};
use crate::graphs::{CanopyTree, VertexId};
use crate::rng::RandomSource;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanopyPacking {
    pub packing: CirclePacking,
    /// `y_n` for `n = 0..=max_level`, with `y_0 = 0`.
    pub heights: Vec<f64>,
    /// Translation applied to every center (zero when not stationarized).
    pub shift: (f64, f64),
    /// Level of the spine vertex moved to the origin, if stationarized.
    pub shift_level: Option<u32>,
}

/// `R_n = 2^{n-1} - 0.01`.
pub fn canopy_radius(n: u32) -> f64 {
    2f64.powi(n as i32 - 1) - 0.01
}

/// `y_0 = 0` and `y_{n+1} - y_n = sqrt((R_n + R_{n+1})² - 4^{n-1})`.
pub fn canopy_heights(max_level: u32) -> Vec<f64> {
    let mut y = vec![0.0];
    for n in 0..max_level {
        let s = canopy_radius(n) + canopy_radius(n + 1);
        let dx = 2f64.powi(n as i32 - 1);
        let prev = y[n as usize];
        y.push(prev + (s * s - dx * dx).sqrt());
    }
    y
}

/// Places the level-`n` circles of radius `R_n` at `(x, y_n)`. With a
/// random source, translates by `-(a_n/2, y_n)` where level `n` is drawn
/// with probability `2^{-n-1}` (the remaining mass `2^{-N}` goes to the top
/// level `N`).
pub fn canopy_pack(tree: &CanopyTree, stationarize: Option<&RandomSource>) -> CanopyPacking {
    let heights = canopy_heights(tree.max_level);
    let spine = tree.spine();
    let (shift, shift_level) = match stationarize {
        None => ((0.0, 0.0), None),
        Some(rng) => {
            let mut r = rng.rng();
            let mut level = 0u32;
            while level < tree.max_level && r.gen_bool(0.5) {
                level += 1;
            }
            let n = level as usize;
            ((-spine[n].to_f64(), -heights[n]), Some(level))
        }
    };
    let circles = (0..tree.len())
        .map(|v| {
            let n = tree.level[v];
            Circle { cx: tree.x[v].to_f64() + shift.0, cy: heights[n as usize] + shift.1, r: canopy_radius(n) }
        })
        .collect();
    CanopyPacking { packing: CirclePacking::new(circles, GEOMETRY_TOL), heights, shift, shift_level }
}

impl CanopyPacking {
    /// Max relative tangency residual over tree edges.
    pub fn tangency_residual(&self, tree: &CanopyTree) -> f64 {
        tree.tree
            .edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (self.packing.circle(u), self.packing.circle(v));
                (a.distance(b) - (a.r + b.r)).abs() / (a.r + b.r)
            })
            .fold(0.0, f64::max)
    }

    pub fn circle_at_origin(&self) -> Option<VertexId> {
        self.packing
            .circles
            .iter()
            .position(|c| c.cx.abs() < 1e-9 && c.cy.abs() < 1e-9)
            .map(|v| v as VertexId)
    }
}
