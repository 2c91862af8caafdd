//! Nested-semicircle triangulations of the upper half plane and their
//! completion to whole-plane triangulations.

use rand::Rng;

use super::triangulation::{Builder, Marks, PlaneTriangulation, ROW_AXIS, ROW_BAND_CENTER, ROW_LOWER_CENTER, ROW_MIRROR, ROW_UPPER_CENTER};
use super::{GraphError, VertexId};
use crate::dyadic::Dyadic;
use crate::rng::RandomSource;

/// Truncation of a half-plane construction: arcs of levels `0..=levels`
/// whose endpoints lie in `[-window, window]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DyadicParams {
    pub levels: u32,
    pub window: i64,
}

impl DyadicParams {
    fn check(&self) -> Result<(), GraphError> {
        if self.levels > 60 {
            return Err(GraphError::InvalidParameter(format!("levels {} > 60", self.levels)));
        }
        let required = 1i64 << self.levels;
        if self.window < required {
            return Err(GraphError::WindowTooSmall { window: self.window, required });
        }
        Ok(())
    }
}

fn draw_bits(rng: &RandomSource, n: u32) -> Vec<u8> {
    let mut r = rng.rng();
    (0..n).map(|_| r.gen_range(0..2u8)).collect()
}

/// `a_n = sum_{i<n} 2^i u_i` for `n = 0..=bits.len()`.
fn offsets(bits: &[u8]) -> Vec<i64> {
    let mut a = vec![0i64];
    for (i, &u) in bits.iter().enumerate() {
        a.push(a[i] + ((u as i64) << i));
    }
    a
}

/// Left endpoints `p` of the level-`n` arcs `[p, p + 2^n]` inside the window.
fn arc_starts(a_n: i64, n: u32, window: i64) -> impl Iterator<Item = i64> {
    let step = 1i64 << n;
    let first = -window + (a_n + window).rem_euclid(step);
    (0..).map(move |m| first + m * step).take_while(move |p| p + step <= window)
}

fn outer_dart(b: &Builder, leftmost: VertexId, neighbours: &[VertexId]) -> (VertexId, VertexId) {
    let far = neighbours.iter().copied().max_by(|&u, &v| b.x(u).cmp(&b.x(v))).expect("leftmost vertex has neighbours");
    (leftmost, far)
}

/// Upper half-plane triangulation: integer vertices on the axis, unit
/// segments at level 0, and for each level `1 <= n <= levels` semicircles
/// from `m 2^n + a_n` to `(m+1) 2^n + a_n`, with `a_n` built from i.i.d.
/// fair bits drawn from `rng`.
pub fn gen_dyadic_halfplane(rng: &RandomSource, params: DyadicParams) -> Result<PlaneTriangulation, GraphError> {
    params.check()?;
    let bits = draw_bits(rng, params.levels);
    gen_dyadic_with_bits(&bits, params)
}

/// [`gen_dyadic_halfplane`] with the bit sequence supplied directly.
/// Only the first `levels` bits are used.
pub fn gen_dyadic_with_bits(bits: &[u8], params: DyadicParams) -> Result<PlaneTriangulation, GraphError> {
    params.check()?;
    if bits.len() < params.levels as usize {
        return Err(GraphError::InvalidParameter(format!(
            "{} bits supplied for {} levels",
            bits.len(),
            params.levels
        )));
    }
    let bits = &bits[..params.levels as usize];
    let a = offsets(bits);
    let w = params.window;
    let mut b = Builder::new();
    let ids: Vec<VertexId> = (-w..=w).map(|k| b.vertex(Dyadic::from_int(k), ROW_AXIS)).collect();
    let id = |k: i64| ids[(k + w) as usize];
    let mut level = std::collections::BTreeMap::new();
    for k in -w..w {
        b.arc(id(k), id(k + 1), true);
    }
    for k in -w..=w {
        level.insert(id(k), 0);
    }
    for n in 1..=params.levels {
        for p in arc_starts(a[n as usize], n, w) {
            let q = p + (1i64 << n);
            b.arc(id(p), id(q), true);
            level.insert(id(p), n as i32);
            level.insert(id(q), n as i32);
        }
    }
    let left = id(-w);
    let nbrs: Vec<VertexId> = (-w + 1..=w).map(id).filter(|&v| b.has_edge(left, v)).collect();
    let outer = outer_dart(&b, left, &nbrs);
    let mut marks = Marks { generator: "dyadic-halfplane".into(), ..Default::default() };
    marks.params.insert("levels".into(), params.levels as i64);
    marks.params.insert("window".into(), w);
    marks.bits = bits.iter().map(|&u| u as i8).collect();
    marks.level = level;
    let mut g = b.finish(id(0), outer, marks);
    g.marks.max_degree = Some(g.max_degree());
    Ok(g)
}

/// Bounded-degree variant. Every level-`n` arc of the integer construction
/// is shortened to run from `p + 2^{-n-2}` to `p + 2^n - 2^{-n-2}`,
/// consecutive axis vertices are joined, and each resulting hexagon gets a
/// center vertex of degree 6. Level-0 arcs coincide with axis segments.
pub fn gen_bounded_dyadic(rng: &RandomSource, params: DyadicParams) -> Result<PlaneTriangulation, GraphError> {
    params.check()?;
    let bits = draw_bits(rng, params.levels);
    let a = offsets(&bits);
    let w = params.window;
    let delta = |n: u32| Dyadic::pow2(-(n as i32) - 2);
    let int = Dyadic::from_int;

    let mut b = Builder::new();
    let mut level = std::collections::BTreeMap::new();
    let mut arcs: Vec<(u32, i64)> = Vec::new();
    for n in 0..=params.levels {
        for p in arc_starts(a[n as usize], n, w) {
            let q = p + (1i64 << n);
            let l = b.vertex(int(p).checked_add(delta(n)?)?, ROW_AXIS);
            let r = b.vertex(int(q).checked_sub(delta(n)?)?, ROW_AXIS);
            level.insert(l, n as i32);
            level.insert(r, n as i32);
            arcs.push((n, p));
        }
    }
    let mut axis: Vec<VertexId> = (0..b.len() as VertexId).collect();
    axis.sort_by(|&u, &v| b.x(u).cmp(&b.x(v)));
    for &(n, p) in &arcs {
        let q = p + (1i64 << n);
        let l = b.get(int(p).checked_add(delta(n)?)?, ROW_AXIS).expect("arc endpoint");
        let r = b.get(int(q).checked_sub(delta(n)?)?, ROW_AXIS).expect("arc endpoint");
        b.arc(l, r, true);
    }
    for pair in axis.windows(2) {
        b.arc(pair[0], pair[1], true);
    }
    let left = axis[0];
    let nbrs: Vec<VertexId> = axis.iter().copied().filter(|&v| b.has_edge(left, v)).collect();
    let outer = outer_dart(&b, left, &nbrs);

    let mut hexagons = Vec::new();
    for &(n, p) in arcs.iter().filter(|(n, _)| *n >= 1) {
        let h = 1i64 << (n - 1);
        let (dn, dc) = (delta(n)?, delta(n - 1)?);
        let pts = [
            int(p).checked_add(dn)?,
            int(p).checked_add(dc)?,
            int(p + h).checked_sub(dc)?,
            int(p + h).checked_add(dc)?,
            int(p + 2 * h).checked_sub(dc)?,
            int(p + 2 * h).checked_sub(dn)?,
        ];
        let face: Vec<VertexId> = pts.iter().map(|&x| b.get(x, ROW_AXIS).expect("hexagon corner")).collect();
        hexagons.push((n, int(p + h), face));
    }

    let mut marks = Marks { generator: "bounded-dyadic".into(), ..Default::default() };
    marks.params.insert("levels".into(), params.levels as i64);
    marks.params.insert("window".into(), w);
    marks.bits = bits.iter().map(|&u| u as i8).collect();
    marks.level = level;
    let root = b.get(int(0).checked_add(delta(0)?)?, ROW_AXIS).unwrap_or(axis[axis.len() / 2]);
    let mut g = b.finish(root, outer, marks);
    for (n, mid, face) in hexagons {
        let z = g.insert_face_center(&face, mid, ROW_UPPER_CENTER);
        g.marks.level.insert(z, n as i32);
    }
    g.refresh_boundary();
    g.marks.max_degree = Some(g.max_degree());
    Ok(g)
}

/// Reflects a half-plane truncation about `y = -1/2`, joins every axis
/// vertex `(a, 0)` to its mirror `(a, -1)`, and stars each band
/// quadrilateral from a new center vertex at `((a+b)/2, -1/2)`.
///
/// Upper vertices keep their ids; the mirror of vertex `v` is `v + n`
/// where `n` is the upper vertex count; band centers follow.
pub fn complete_to_plane(upper: &PlaneTriangulation) -> Result<PlaneTriangulation, GraphError> {
    if upper.vertices.iter().any(|v| v.row != ROW_AXIS && v.row != ROW_UPPER_CENTER) {
        return Err(GraphError::Malformed("complete_to_plane expects an upper half-plane truncation".into()));
    }
    let n = upper.num_vertices() as VertexId;
    let mut g = upper.clone();
    for v in 0..n {
        let src = upper.vertex(v);
        let row = if src.row == ROW_AXIS { ROW_MIRROR } else { ROW_LOWER_CENTER };
        let m = g.push_vertex(src.x, row);
        debug_assert_eq!(m, v + n);
        g.rotation[m as usize] = upper.rotation(v).iter().rev().map(|&u| u + n).collect();
    }
    let mut axis: Vec<VertexId> = (0..n).filter(|&v| upper.vertex(v).row == ROW_AXIS).collect();
    axis.sort_by(|&u, &v| upper.vertex(u).x.cmp(&upper.vertex(v).x));
    if axis.len() < 2 {
        return Err(GraphError::Malformed("need at least two axis vertices".into()));
    }
    for w in axis.windows(2) {
        if !upper.has_edge(w[0], w[1]) {
            return Err(GraphError::Malformed(format!(
                "consecutive axis vertices {} and {} are not adjacent",
                w[0], w[1]
            )));
        }
    }
    for (i, &a) in axis.iter().enumerate() {
        let left = i.checked_sub(1).map(|j| axis[j]);
        let right = axis.get(i + 1).copied();
        if let (Some(l), Some(r)) = (left, right) {
            let rot = upper.rotation(a);
            let pos = rot.iter().position(|&u| u == l).expect("adjacent");
            if rot[(pos + 1) % rot.len()] != r {
                return Err(GraphError::Malformed(format!("axis vertex {a} has arcs below the axis")));
            }
        }
        let m = a + n;
        match (left, right) {
            (_, Some(r)) => g.insert_before(a, r, m),
            (Some(l), None) => g.insert_after(a, l, m),
            (None, None) => unreachable!(),
        }
        match (left, right) {
            (_, Some(r)) => g.insert_after(m, r + n, a),
            (Some(l), None) => g.insert_before(m, l + n, a),
            (None, None) => unreachable!(),
        }
    }
    for w in axis.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = upper.vertex(a).x.midpoint(upper.vertex(b).x)?;
        let z = g.insert_face_center(&[a + n, b + n, b, a], mid, ROW_BAND_CENTER);
        if let Some(&lvl) = upper.marks.level.get(&a) {
            let _ = lvl;
        }
        let _ = z;
    }
    let mirrored: Vec<(VertexId, i32)> = upper.marks.level.iter().map(|(&v, &l)| (v + n, l)).collect();
    g.marks.level.extend(mirrored);
    g.marks.generator = format!("{}+plane", upper.marks.generator);
    let left = axis[0];
    let far = upper
        .rotation(left)
        .iter()
        .copied()
        .filter(|&u| upper.vertex(u).row == ROW_AXIS)
        .max_by(|&u, &v| upper.vertex(u).x.cmp(&upper.vertex(v).x))
        .expect("leftmost axis vertex has an axis neighbour");
    g.set_outer((left, far));
    g.marks.max_degree = Some(g.max_degree());
    g.validate()?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge_at(g: &PlaneTriangulation, x: i64, y: i64) -> bool {
        let idx = g.position_index();
        let u = idx[&(Dyadic::from_int(x), ROW_AXIS)];
        let v = idx[&(Dyadic::from_int(y), ROW_AXIS)];
        g.has_edge(u, v)
    }

    #[test]
    fn bits_101_arcs() {
        let g = gen_dyadic_with_bits(&[1, 0, 1], DyadicParams { levels: 2, window: 8 }).unwrap();
        g.validate().unwrap();
        assert!(edge_at(&g, 1, 3));
        assert!(edge_at(&g, 3, 5));
        assert!(edge_at(&g, 1, 5));
        assert!(edge_at(&g, -3, 1));
        assert!(!edge_at(&g, 0, 2));
        assert_eq!(g.marks.bits, vec![1, 0]);
    }

    #[test]
    fn zero_levels_is_a_path() {
        let g = gen_dyadic_with_bits(&[], DyadicParams { levels: 0, window: 3 }).unwrap();
        assert_eq!(g.num_vertices(), 7);
        assert_eq!(g.num_edges(), 6);
        g.validate().unwrap();
    }

    #[test]
    fn window_must_cover_top_arcs() {
        let err = gen_dyadic_with_bits(&[0, 0, 0], DyadicParams { levels: 3, window: 7 }).unwrap_err();
        assert_eq!(err, GraphError::WindowTooSmall { window: 7, required: 8 });
    }

    #[test]
    fn degree_of_origin_with_zero_bits() {
        // Brute force: count, level by level, the arcs [m 2^n, (m+1) 2^n]
        // inside the window that end at 0.
        for levels in 0..6u32 {
            let window = 1i64 << levels;
            let mut expected = 0;
            for n in 0..=levels {
                let step = 1i64 << n;
                for m in -64..64i64 {
                    let (p, q) = (m * step, (m + 1) * step);
                    if p >= -window && q <= window && (p == 0 || q == 0) {
                        expected += 1;
                    }
                }
            }
            let g = gen_dyadic_with_bits(&vec![0; levels as usize], DyadicParams { levels, window }).unwrap();
            let o = g.vertex_at(Dyadic::ZERO, ROW_AXIS).unwrap();
            assert_eq!(g.degree(o), expected);
            assert_eq!(expected, 2 * levels as usize + 2);
        }
    }

    #[test]
    fn completion_counts() {
        let upper = gen_dyadic_with_bits(&[], DyadicParams { levels: 0, window: 1 }).unwrap();
        let g = complete_to_plane(&upper).unwrap();
        assert_eq!(g.num_vertices(), 3 * 2 + 2);
        for v in g.vertices() {
            if v.row == ROW_BAND_CENTER {
                assert_eq!(g.degree(v.id), 4);
            }
        }
        assert!(g.is_disk());
        for bits in [[0u8, 1, 1, 0], [1, 1, 0, 1]] {
            let upper = gen_dyadic_with_bits(&bits, DyadicParams { levels: 3, window: 9 }).unwrap();
            let g = complete_to_plane(&upper).unwrap();
            let n = upper.num_vertices();
            assert_eq!(g.num_vertices(), 2 * n + (n - 1));
            assert!(g.is_disk());
        }
    }

    #[test]
    fn bounded_variant_is_a_triangulation() {
        for seed in 0..10 {
            let g = gen_bounded_dyadic(&RandomSource::new(seed), DyadicParams { levels: 1, window: 2 }).unwrap();
            g.validate().unwrap();
            for v in g.vertices() {
                if v.row == ROW_UPPER_CENTER {
                    assert_eq!(g.degree(v.id), 6);
                }
                assert!(v.x.exponent() <= 1 + 2);
            }
            let full = complete_to_plane(&g).unwrap();
            assert!(full.is_disk());
        }
    }
}
