use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::PackingError;
use crate::graphs::{PlaneTriangulation, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Stop when every interior angle sum is within `tol` of `2π`.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-12, max_sweeps: 1_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub radii: Vec<f64>,
    pub sweeps: usize,
    /// Max interior `|angle sum - 2π|` at exit.
    pub residual: f64,
}

/// Angle at a circle of radius `rv` in the triangle of mutually tangent
/// circles `rv`, `ru`, `rw`. Same as the law of cosines on the center
/// triangle, written as `sin²(θ/2) = ru rw / ((rv+ru)(rv+rw))`.
pub fn angle_at(rv: f64, ru: f64, rw: f64) -> f64 {
    let s = (ru * rw / ((rv + ru) * (rv + rw))).sqrt();
    2.0 * s.min(1.0).asin()
}

/// Angle sum at `v` over its inner faces.
pub fn angle_sum(tri: &PlaneTriangulation, radii: &[f64], v: VertexId) -> f64 {
    let rot = tri.rotation(v);
    let k = rot.len();
    let interior = !tri.is_boundary(v);
    let mut sum = 0.0;
    for i in 0..k {
        let (u, w) = (rot[i], rot[(i + 1) % k]);
        if interior || is_inner_face(tri, v, u, w) {
            sum += angle_at(radii[v as usize], radii[u as usize], radii[w as usize]);
        }
    }
    sum
}

fn is_inner_face(tri: &PlaneTriangulation, v: VertexId, _u: VertexId, w: VertexId) -> bool {
    // With w following u around v, the corner belongs to the face left of (w, v).
    let b = tri.boundary();
    let outer = (0..b.len()).any(|i| b[i] == w && b[(i + 1) % b.len()] == v);
    !outer && tri.trace_face(w, v).len() == 3
}

pub fn uniform_boundary(tri: &PlaneTriangulation, r: f64) -> BTreeMap<VertexId, f64> {
    tri.boundary().iter().map(|&v| (v, r)).collect()
}

/// Interior radii for prescribed boundary radii, by repeated per-vertex
/// updates that use the uniform-neighbour model to solve each local
/// angle-sum equation.
pub fn solve_radii(
    tri: &PlaneTriangulation,
    boundary: &BTreeMap<VertexId, f64>,
    opts: SolverOptions,
) -> Result<SolveResult, PackingError> {
    if !tri.is_disk() {
        return Err(PackingError::NotDisk);
    }
    if !(opts.tol > 0.0) {
        return Err(PackingError::InvalidInput(format!("tolerance {} must be positive", opts.tol)));
    }
    let bset: std::collections::BTreeSet<VertexId> = tri.boundary().iter().copied().collect();
    let given: std::collections::BTreeSet<VertexId> = boundary.keys().copied().collect();
    if bset != given {
        return Err(PackingError::BoundaryMismatch(format!(
            "expected radii for the {} boundary vertices, got {} entries",
            bset.len(),
            given.len()
        )));
    }
    if let Some((v, r)) = boundary.iter().find(|(_, &r)| !(r > 0.0 && r.is_finite())) {
        return Err(PackingError::BoundaryMismatch(format!("radius {r} at vertex {v} is not positive")));
    }
    let mut radii = vec![1.0; tri.num_vertices()];
    for (&v, &r) in boundary {
        radii[v as usize] = r;
    }
    let interior = tri.interior_vertices();
    if interior.is_empty() {
        return Ok(SolveResult { radii, sweeps: 0, residual: 0.0 });
    }
    let rings: Vec<(usize, Vec<(usize, usize)>)> = interior
        .iter()
        .map(|&v| {
            let rot = tri.rotation(v);
            let k = rot.len();
            let pairs = (0..k).map(|i| (rot[i] as usize, rot[(i + 1) % k] as usize)).collect();
            (v as usize, pairs)
        })
        .collect();
    let sum_at = |radii: &[f64], v: usize, pairs: &[(usize, usize)]| -> f64 {
        pairs.iter().map(|&(u, w)| angle_at(radii[v], radii[u], radii[w])).sum()
    };
    let mut history = Vec::new();
    let mut residual = f64::INFINITY;
    for sweep in 0..opts.max_sweeps {
        residual = 0.0;
        for (v, pairs) in &rings {
            let theta = sum_at(&radii, *v, pairs);
            residual = f64::max(residual, (theta - 2.0 * PI).abs());
            let k = pairs.len() as f64;
            let beta = (theta / (2.0 * k)).sin();
            let delta = (PI / k).sin();
            let rhat = radii[*v] * beta / (1.0 - beta);
            radii[*v] = rhat * (1.0 - delta) / delta;
        }
        if sweep % 1000 == 0 {
            history.push(residual);
        }
        if residual < opts.tol {
            // Measure after the last update.
            let exit = rings.iter().map(|(v, p)| (sum_at(&radii, *v, p) - 2.0 * PI).abs()).fold(0.0, f64::max);
            return Ok(SolveResult { radii, sweeps: sweep + 1, residual: exit });
        }
        if !residual.is_finite() {
            break;
        }
    }
    history.truncate(20);
    Err(PackingError::NoConvergence { iterations: opts.max_sweeps, residual, history })
}
