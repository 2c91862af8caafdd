use std::collections::{HashMap, VecDeque};

use super::solver::angle_at;
use super::{Circle, CirclePacking, PackingError, GEOMETRY_TOL};
use crate::graphs::{PlaneTriangulation, VertexId};

/// Places circles of the given radii: root at the origin, the first
/// neighbour in the root's rotation on the positive x-axis, then every
/// inner face counterclockwise in breadth-first order.
pub fn layout(tri: &PlaneTriangulation, radii: &[f64]) -> Result<CirclePacking, PackingError> {
    layout_with_tol(tri, radii, GEOMETRY_TOL)
}

pub fn layout_with_tol(tri: &PlaneTriangulation, radii: &[f64], tol: f64) -> Result<CirclePacking, PackingError> {
    let n = tri.num_vertices();
    if radii.len() != n {
        return Err(PackingError::InvalidInput(format!("{} radii for {n} vertices", radii.len())));
    }
    if let Some(v) = radii.iter().position(|&r| !(r > 0.0 && r.is_finite())) {
        return Err(PackingError::InvalidInput(format!("radius at vertex {v} is not positive")));
    }
    let root = tri.root();
    let mut pos: Vec<Option<(f64, f64)>> = vec![None; n];
    pos[root as usize] = Some((0.0, 0.0));
    let Some(&first) = tri.rotation(root).first() else {
        let circles = vec![Circle { cx: 0.0, cy: 0.0, r: radii[root as usize] }];
        return Ok(CirclePacking::new(circles, tol));
    };
    pos[first as usize] = Some((radii[root as usize] + radii[first as usize], 0.0));

    let faces = tri.inner_faces();
    let mut by_edge: HashMap<(VertexId, VertexId), Vec<usize>> = HashMap::new();
    for (i, f) in faces.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            by_edge.entry((a.min(b), a.max(b))).or_default().push(i);
        }
    }
    let mut done = vec![false; faces.len()];
    let mut queue: VecDeque<usize> = by_edge.get(&(root.min(first), root.max(first))).cloned().unwrap_or_default().into();
    while let Some(i) = queue.pop_front() {
        if done[i] {
            continue;
        }
        let f = faces[i];
        let placed: Vec<bool> = f.iter().map(|&v| pos[v as usize].is_some()).collect();
        match placed.iter().filter(|&&p| p).count() {
            3 => {
                check_face(f, &pos, radii, tol)?;
            }
            2 => {
                let k = (0..3).find(|&k| !placed[k]).unwrap();
                let (a, b, c) = (f[(k + 1) % 3], f[(k + 2) % 3], f[k]);
                pos[c as usize] = Some(third_center(&pos, radii, a, b, c));
                check_face(f, &pos, radii, tol)?;
            }
            _ => continue,
        }
        done[i] = true;
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            for &j in &by_edge[&(a.min(b), a.max(b))] {
                if !done[j] {
                    queue.push_back(j);
                }
            }
        }
    }
    let mut circles = Vec::with_capacity(n);
    for (v, p) in pos.iter().enumerate() {
        let (cx, cy) = p.ok_or_else(|| PackingError::InvalidInput(format!("vertex {v} is not reached by the face walk")))?;
        circles.push(Circle { cx, cy, r: radii[v] });
    }
    Ok(CirclePacking::new(circles, tol))
}

/// Center of `c` tangent to `a` and `b`, with `(a, b, c)` counterclockwise.
fn third_center(pos: &[Option<(f64, f64)>], radii: &[f64], a: VertexId, b: VertexId, c: VertexId) -> (f64, f64) {
    let pa = pos[a as usize].unwrap();
    let pb = pos[b as usize].unwrap();
    let (ra, rb, rc) = (radii[a as usize], radii[b as usize], radii[c as usize]);
    let alpha = angle_at(ra, rb, rc);
    let base = (pb.1 - pa.1).atan2(pb.0 - pa.0);
    let d = ra + rc;
    (pa.0 + d * (base + alpha).cos(), pa.1 + d * (base + alpha).sin())
}

fn check_face(f: [VertexId; 3], pos: &[Option<(f64, f64)>], radii: &[f64], tol: f64) -> Result<(), PackingError> {
    let mut worst: f64 = 0.0;
    for k in 0..3 {
        let (u, v) = (f[k], f[(k + 1) % 3]);
        let (pu, pv) = (pos[u as usize].unwrap(), pos[v as usize].unwrap());
        let want = radii[u as usize] + radii[v as usize];
        let err = ((pu.0 - pv.0).hypot(pu.1 - pv.1) - want).abs() / want;
        worst = worst.max(err);
    }
    // Orientation must stay counterclockwise.
    let p: Vec<(f64, f64)> = f.iter().map(|&v| pos[v as usize].unwrap()).collect();
    let cross = (p[1].0 - p[0].0) * (p[2].1 - p[0].1) - (p[1].1 - p[0].1) * (p[2].0 - p[0].0);
    if worst > tol || cross <= 0.0 {
        return Err(PackingError::LayoutInconsistent { face: f, error: worst });
    }
    Ok(())
}
