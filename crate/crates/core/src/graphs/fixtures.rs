//! Small deterministic triangulations for solver tests, and path windows of
//! the integer line.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::triangulation::{Builder, Marks, PlaneTriangulation};
use super::GraphError;
use crate::dyadic::Dyadic;
use crate::rng::RandomSource;

const SQRT3_2: f64 = 0.866_025_403_784_438_6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathMode {
    /// `{0, ..., n}` with one uniform vertex `U` deleted.
    RemoveUniform,
    /// `{0, ..., n} - U`, the translate that contains the origin.
    ShiftUniform,
    /// `{0, z}` with `z = ±n`.
    TwoPoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixtureKind {
    HexPatch { rings: u32 },
    Triangle,
    TriangleWithCenter,
    PathWindow { n: i64, mode: PathMode },
}

/// A finite subset of the integer line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathWindow {
    pub n: i64,
    pub mode: PathMode,
    pub vertices: Vec<i64>,
}

impl PathWindow {
    pub fn remove(n: i64, u: i64) -> Self {
        PathWindow { n, mode: PathMode::RemoveUniform, vertices: (0..=n).filter(|&k| k != u).collect() }
    }

    pub fn shift(n: i64, u: i64) -> Self {
        PathWindow { n, mode: PathMode::ShiftUniform, vertices: (0..=n).map(|k| k - u).collect() }
    }

    pub fn two_point(n: i64, positive: bool) -> Self {
        PathWindow { n, mode: PathMode::TwoPoint, vertices: vec![0, if positive { n } else { -n }] }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Fixture {
    Triangulation(PlaneTriangulation),
    Path(PathWindow),
}

impl Fixture {
    pub fn triangulation(self) -> Option<PlaneTriangulation> {
        match self {
            Fixture::Triangulation(t) => Some(t),
            Fixture::Path(_) => None,
        }
    }

    pub fn path(self) -> Option<PathWindow> {
        match self {
            Fixture::Path(p) => Some(p),
            Fixture::Triangulation(_) => None,
        }
    }
}

pub fn gen_fixture(kind: FixtureKind, rng: &RandomSource) -> Result<Fixture, GraphError> {
    Ok(match kind {
        FixtureKind::HexPatch { rings } => Fixture::Triangulation(hex_patch(rings)?),
        FixtureKind::Triangle => Fixture::Triangulation(triangle(false)),
        FixtureKind::TriangleWithCenter => Fixture::Triangulation(triangle(true)),
        FixtureKind::PathWindow { n, mode } => {
            if n < 1 {
                return Err(GraphError::InvalidParameter(format!("path window needs n >= 1, got {n}")));
            }
            let mut r = rng.rng();
            Fixture::Path(match mode {
                PathMode::RemoveUniform => PathWindow::remove(n, r.gen_range(0..=n)),
                PathMode::ShiftUniform => PathWindow::shift(n, r.gen_range(0..=n)),
                PathMode::TwoPoint => PathWindow::two_point(n, r.gen_bool(0.5)),
            })
        }
    })
}

/// Triangular-lattice disk of the given ring count, unit spacing. Vertex
/// `(q, r)` in axial coordinates sits at `(q + r/2, r √3/2)` and carries
/// `row = r`.
pub fn hex_patch(rings: u32) -> Result<PlaneTriangulation, GraphError> {
    if rings < 1 {
        return Err(GraphError::InvalidParameter("hex patch needs at least one ring".into()));
    }
    let k = rings as i64;
    let mut b = Builder::new();
    let mut cells = Vec::new();
    for r in -k..=k {
        for q in -k..=k {
            if (q + r).abs() <= k {
                let x = Dyadic::new((2 * q + r) as i128, 1)?;
                let id = b.vertex(x, r as i32);
                cells.push((q, r, id));
            }
        }
    }
    let pos = |q: i64, r: i64| (q as f64 + r as f64 / 2.0, r as f64 * SQRT3_2);
    let lookup: std::collections::HashMap<(i64, i64), u32> = cells.iter().map(|&(q, r, id)| ((q, r), id)).collect();
    for &(q, r, id) in &cells {
        for (dq, dr) in [(1, 0), (0, 1), (-1, 1)] {
            if let Some(&other) = lookup.get(&(q + dq, r + dr)) {
                b.segment(id, pos(q, r), other, pos(q + dq, r + dr));
            }
        }
    }
    let left = lookup[&(-k, 0)];
    let up = lookup[&(-k, 1)];
    let center = lookup[&(0, 0)];
    let mut marks = Marks { generator: "hex-patch".into(), ..Default::default() };
    marks.params.insert("rings".into(), k);
    let mut g = b.finish(center, (left, up), marks);
    g.marks.max_degree = Some(g.max_degree());
    g.validate()?;
    Ok(g)
}

/// Equilateral triangle with side 2, optionally with a center vertex joined
/// to all three corners.
pub fn triangle(with_center: bool) -> PlaneTriangulation {
    let mut b = Builder::new();
    let p = [(0.0, 0.0), (2.0, 0.0), (1.0, 2.0 * SQRT3_2)];
    let a = b.vertex(Dyadic::ZERO, 0);
    let c = b.vertex(Dyadic::from_int(2), 0);
    let d = b.vertex(Dyadic::from_int(1), 2);
    b.segment(a, p[0], c, p[1]);
    b.segment(c, p[1], d, p[2]);
    b.segment(d, p[2], a, p[0]);
    let mut marks = Marks { generator: if with_center { "triangle-with-center" } else { "triangle" }.into(), ..Default::default() };
    marks.params.insert("center".into(), with_center as i64);
    let mut g = b.finish(a, (a, d), marks);
    if with_center {
        let z = g.insert_face_center(&[a, c, d], Dyadic::from_int(1), 1);
        g.root = z;
        g.refresh_boundary();
    }
    g.marks.max_degree = Some(g.max_degree());
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_patch_one() {
        let g = hex_patch(1).unwrap();
        assert_eq!(g.num_vertices(), 7);
        assert_eq!(g.degree(g.root()), 6);
        assert_eq!(g.boundary().len(), 6);
        assert!(g.is_disk());
    }

    #[test]
    fn hex_patch_boundary_is_six_rings() {
        for rings in 1..=5u32 {
            let g = hex_patch(rings).unwrap();
            assert_eq!(g.num_vertices() as u32, 1 + 3 * rings * (rings + 1));
            // Walk the boundary and count distinct vertices.
            let b = g.boundary();
            let set: std::collections::BTreeSet<_> = b.iter().collect();
            assert_eq!(set.len() as u32, 6 * rings);
            assert_eq!(b.len() as u32, 6 * rings);
        }
    }

    #[test]
    fn path_windows() {
        assert_eq!(PathWindow::remove(4, 2).vertices, vec![0, 1, 3, 4]);
        assert_eq!(PathWindow::shift(4, 2).vertices, vec![-2, -1, 0, 1, 2]);
        assert_eq!(PathWindow::two_point(5, false).vertices, vec![0, -5]);
        let f = gen_fixture(FixtureKind::PathWindow { n: 10, mode: PathMode::RemoveUniform }, &RandomSource::new(1))
            .unwrap()
            .path()
            .unwrap();
        assert_eq!(f.vertices.len(), 10);
    }

    #[test]
    fn triangles() {
        let t = triangle(false);
        t.validate().unwrap();
        assert!(t.interior_vertices().is_empty());
        let c = triangle(true);
        c.validate().unwrap();
        assert_eq!(c.interior_vertices(), vec![3]);
        assert_eq!(c.root(), 3);
    }
}
