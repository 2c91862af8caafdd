use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Circle, CirclePacking, PackingError};
use crate::graphs::VertexId;
use crate::rng::RandomSource;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IsometryKind {
    /// Reflection in the line through `point` with unit `direction`.
    ReflectionLine { point: (f64, f64), direction: (f64, f64) },
    PointReflection { point: (f64, f64) },
    Identity,
}

impl IsometryKind {
    pub fn apply(&self, (x, y): (f64, f64)) -> (f64, f64) {
        match *self {
            IsometryKind::ReflectionLine { point: (px, py), direction: (dx, dy) } => {
                let (vx, vy) = (x - px, y - py);
                let t = vx * dx + vy * dy;
                let (fx, fy) = (2.0 * t * dx - vx, 2.0 * t * dy - vy);
                (px + fx, py + fy)
            }
            IsometryKind::PointReflection { point: (px, py) } => (2.0 * px - x, 2.0 * py - y),
            IsometryKind::Identity => (x, y),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometrySpec {
    pub kind: IsometryKind,
    /// Max over circles of `(|T c_i - c_j| + |r_i - r_j|) / r_i` for the
    /// matched circle `j`. For [`IsometryKind::Identity`] this is the error
    /// of the best rejected candidate (infinite if there was none).
    pub match_error: f64,
    /// `permutation[i]` is the circle matched to the image of circle `i`.
    pub permutation: Vec<VertexId>,
}

/// Searches reflections in lines and points that permute the circles.
///
/// Candidates are the perpendicular bisectors and midpoints of pairs made
/// of a reference circle (one of the few largest) and an equal-radius
/// partner, plus lines through two reference centers.
pub fn detect_reflection(p: &CirclePacking, tol: f64) -> IsometrySpec {
    let n = p.len();
    let ident = |err: f64| IsometrySpec { kind: IsometryKind::Identity, match_error: err, permutation: (0..n as VertexId).collect() };
    if n < 2 {
        return ident(f64::INFINITY);
    }
    let mut by_radius: Vec<usize> = (0..n).collect();
    by_radius.sort_by(|&a, &b| p.circles[a].r.total_cmp(&p.circles[b].r).then(a.cmp(&b)));
    let radius_sorted: Vec<f64> = by_radius.iter().map(|&i| p.circles[i].r).collect();
    let window = |r: f64, w: f64| -> &[usize] {
        let lo = radius_sorted.partition_point(|&x| x < r * (1.0 - w));
        let hi = radius_sorted.partition_point(|&x| x <= r * (1.0 + w));
        &by_radius[lo..hi]
    };
    let refs: Vec<usize> = by_radius.iter().rev().take(4).copied().collect();

    let mut lines = Vec::new();
    let mut points = Vec::new();
    for &i in &refs {
        let a = p.circles[i];
        for &j in window(a.r, tol) {
            if j == i {
                continue;
            }
            let b = p.circles[j];
            let mid = ((a.cx + b.cx) / 2.0, (a.cy + b.cy) / 2.0);
            let (dx, dy) = (b.cx - a.cx, b.cy - a.cy);
            let len = dx.hypot(dy);
            if len == 0.0 {
                continue;
            }
            lines.push(IsometryKind::ReflectionLine { point: mid, direction: (-dy / len, dx / len) });
            points.push(IsometryKind::PointReflection { point: mid });
        }
    }
    for (k, &i) in refs.iter().enumerate() {
        for &j in &refs[k + 1..] {
            let (a, b) = (p.circles[i], p.circles[j]);
            let (dx, dy) = (b.cx - a.cx, b.cy - a.cy);
            let len = dx.hypot(dy);
            if len > 0.0 {
                lines.push(IsometryKind::ReflectionLine { point: (a.cx, a.cy), direction: (dx / len, dy / len) });
            }
        }
    }

    let match_window = (tol * 1e3).max(1e-3);
    // Any line within tolerance beats any point reflection.
    let pick = |cands: Vec<IsometryKind>| {
        let mut best: Option<(f64, IsometryKind, Vec<VertexId>)> = None;
        for kind in cands {
            let bound = best.as_ref().map(|b| b.0).unwrap_or(f64::INFINITY);
            if let Some((err, perm)) = evaluate(p, kind, &window, match_window, bound) {
                if best.as_ref().map_or(true, |b| err < b.0) {
                    best = Some((err, kind, perm));
                }
            }
        }
        best
    };
    let line = pick(lines);
    if let Some((err, kind, permutation)) = line.clone().filter(|b| b.0 <= tol) {
        return IsometrySpec { kind, match_error: err, permutation };
    }
    let point = pick(points);
    if let Some((err, kind, permutation)) = point.clone().filter(|b| b.0 <= tol) {
        return IsometrySpec { kind, match_error: err, permutation };
    }
    let err = [line, point].into_iter().flatten().map(|b| b.0).fold(f64::INFINITY, f64::min);
    ident(err)
}

/// Match error and permutation of a given isometry, with circles paired
/// to the nearest image of similar radius.
pub fn match_isometry(p: &CirclePacking, kind: IsometryKind) -> (f64, Vec<VertexId>) {
    let mut by_radius: Vec<usize> = (0..p.len()).collect();
    by_radius.sort_by(|&a, &b| p.circles[a].r.total_cmp(&p.circles[b].r).then(a.cmp(&b)));
    let radius_sorted: Vec<f64> = by_radius.iter().map(|&i| p.circles[i].r).collect();
    let window = |r: f64, w: f64| -> &[usize] {
        let lo = radius_sorted.partition_point(|&x| x < r * (1.0 - w));
        let hi = radius_sorted.partition_point(|&x| x <= r * (1.0 + w));
        &by_radius[lo..hi]
    };
    evaluate(p, kind, &window, 1e-3, f64::INFINITY).unwrap_or((f64::INFINITY, Vec::new()))
}

/// The line bisecting the centers of circles `u` and `v`.
pub fn bisector(p: &CirclePacking, u: VertexId, v: VertexId) -> IsometryKind {
    let (a, b) = (p.circle(u), p.circle(v));
    let (dx, dy) = (b.cx - a.cx, b.cy - a.cy);
    let len = dx.hypot(dy);
    IsometryKind::ReflectionLine { point: ((a.cx + b.cx) / 2.0, (a.cy + b.cy) / 2.0), direction: (-dy / len, dx / len) }
}

fn evaluate<'a>(
    p: &CirclePacking,
    kind: IsometryKind,
    window: &impl Fn(f64, f64) -> &'a [usize],
    w: f64,
    bound: f64,
) -> Option<(f64, Vec<VertexId>)> {
    let mut err: f64 = 0.0;
    let mut perm = Vec::with_capacity(p.len());
    for c in &p.circles {
        let (tx, ty) = kind.apply((c.cx, c.cy));
        // Circles with no partner of similar radius count as error 1.
        let mut local = 1.0;
        let mut arg = None;
        for &j in window(c.r, w) {
            let d: &Circle = &p.circles[j];
            let e = ((tx - d.cx).hypot(ty - d.cy) + (c.r - d.r).abs()) / c.r;
            if arg.is_none() || e < local {
                local = e;
                arg = Some(j);
            }
        }
        err = err.max(local);
        // A rejected candidate only needs to lose to the current best.
        if err > bound {
            return None;
        }
        perm.push(arg.unwrap_or(0) as VertexId);
    }
    Some((err, perm))
}

/// Rotation by `theta` after an optional reflection in the x-axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub theta: f64,
    pub reflect: bool,
}

impl Pose {
    pub fn apply_point(&self, (x, y): (f64, f64)) -> (f64, f64) {
        let y = if self.reflect { -y } else { y };
        let (s, c) = self.theta.sin_cos();
        (c * x - s * y, s * x + c * y)
    }

    pub fn inverse_point(&self, (x, y): (f64, f64)) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        let (u, v) = (c * x + s * y, -s * x + c * y);
        (u, if self.reflect { -v } else { v })
    }

    pub fn apply(&self, p: &CirclePacking) -> CirclePacking {
        self.map(p, |q| self.apply_point(q))
    }

    pub fn invert(&self, p: &CirclePacking) -> CirclePacking {
        self.map(p, |q| self.inverse_point(q))
    }

    fn map(&self, p: &CirclePacking, f: impl Fn((f64, f64)) -> (f64, f64)) -> CirclePacking {
        let circles = p
            .circles
            .iter()
            .map(|c| {
                let (cx, cy) = f((c.cx, c.cy));
                Circle { cx, cy, r: c.r }
            })
            .collect();
        let line = if self.theta == 0.0 { p.line.map(|y| if self.reflect { -y } else { y }) } else { None };
        CirclePacking { circles, tolerance: p.tolerance, line }
    }
}

/// Uniform rotation about the origin and a fair-coin reflection. Requires
/// a circle centered at the origin.
pub fn randomize_pose(p: &CirclePacking, rng: &RandomSource) -> Result<(CirclePacking, Pose), PackingError> {
    if !p.circles.iter().any(|c| c.cx.hypot(c.cy) <= 1e-9 * c.r.max(1.0)) {
        return Err(PackingError::NoOriginCircle);
    }
    let mut r = rng.rng();
    let pose = Pose { theta: r.gen_range(0.0..2.0 * PI), reflect: r.gen_bool(0.5) };
    Ok((pose.apply(p), pose))
}
