use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{GraphError, SimpleGraph, VertexId};
use crate::dyadic::Dyadic;

/// Vertices on the line `y = 0`.
pub const ROW_AXIS: i32 = 0;
/// Mirror copy of the axis, on `y = -1`.
pub const ROW_MIRROR: i32 = -1;
/// Centers of the quadrilaterals in the band `-1 < y < 0`.
pub const ROW_BAND_CENTER: i32 = -2;
/// Face-center vertices added above the axis (hexagon centers).
pub const ROW_UPPER_CENTER: i32 = 1;
/// Mirror images of [`ROW_UPPER_CENTER`] vertices.
pub const ROW_LOWER_CENTER: i32 = -3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    pub x: Dyadic,
    pub row: i32,
}

/// Generator metadata carried along with a graph.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Marks {
    #[serde(default)]
    pub generator: String,
    #[serde(default)]
    pub params: BTreeMap<String, i64>,
    /// Random bits (or signs) consumed by the generator, in draw order.
    #[serde(default)]
    pub bits: Vec<i8>,
    /// Per-vertex level tag (arc level, tree level, ...).
    #[serde(default)]
    pub level: BTreeMap<VertexId, i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<usize>,
}

/// A finite plane graph given by a rotation system.
///
/// `rotation[v]` lists the neighbours of `v` in counterclockwise order.
/// Faces are traced with the face on the left: the dart `(u, v)` is followed
/// by `(v, w)` where `w` precedes `u` in the rotation at `v`. With that rule
/// bounded faces come out counterclockwise and the outer face clockwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTriangulation", into = "RawTriangulation")]
pub struct PlaneTriangulation {
    pub(crate) vertices: Vec<Vertex>,
    pub(crate) rotation: Vec<Vec<VertexId>>,
    pub(crate) root: VertexId,
    pub(crate) outer: (VertexId, VertexId),
    pub(crate) boundary: Vec<VertexId>,
    pub marks: Marks,
}

/// Serialized form; loading re-runs [`PlaneTriangulation::from_parts`].
#[derive(Serialize, Deserialize)]
struct RawTriangulation {
    vertices: Vec<Vertex>,
    rotation: Vec<Vec<VertexId>>,
    root: VertexId,
    boundary: Vec<VertexId>,
    #[serde(default)]
    marks: Marks,
}

impl From<PlaneTriangulation> for RawTriangulation {
    fn from(g: PlaneTriangulation) -> Self {
        RawTriangulation { vertices: g.vertices, rotation: g.rotation, root: g.root, boundary: g.boundary, marks: g.marks }
    }
}

impl TryFrom<RawTriangulation> for PlaneTriangulation {
    type Error = GraphError;

    fn try_from(raw: RawTriangulation) -> Result<Self, Self::Error> {
        PlaneTriangulation::from_parts(raw.vertices, raw.rotation, raw.root, raw.boundary, raw.marks)
    }
}

impl PlaneTriangulation {
    pub fn from_parts(
        vertices: Vec<Vertex>,
        rotation: Vec<Vec<VertexId>>,
        root: VertexId,
        boundary: Vec<VertexId>,
        marks: Marks,
    ) -> Result<Self, GraphError> {
        if boundary.len() < 2 {
            return Err(GraphError::Malformed("boundary needs at least two vertices".into()));
        }
        if vertices.len() != rotation.len() {
            return Err(GraphError::Malformed(format!(
                "{} vertices but {} rotation entries",
                vertices.len(),
                rotation.len()
            )));
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.id as usize != i {
                return Err(GraphError::Malformed(format!("vertex at index {i} has id {}", v.id)));
            }
        }
        let n = vertices.len() as VertexId;
        for (v, nbrs) in rotation.iter().enumerate() {
            if let Some(bad) = nbrs.iter().find(|&&u| u >= n) {
                return Err(GraphError::Malformed(format!("rotation of {v} names unknown vertex {bad}")));
            }
        }
        if root >= n || boundary.iter().any(|&b| b >= n) {
            return Err(GraphError::Malformed("root or boundary names an unknown vertex".into()));
        }
        let outer = (boundary[0], boundary[1]);
        let mut g = PlaneTriangulation { vertices, rotation, root, outer, boundary: Vec::new(), marks };
        // Face tracing assumes every dart has a reverse.
        g.check_adjacency()?;
        if !g.rotation[outer.0 as usize].contains(&outer.1) {
            return Err(GraphError::Malformed("boundary does not start with an edge".into()));
        }
        g.boundary = g.trace_face(outer.0, outer.1);
        if g.boundary != boundary {
            return Err(GraphError::Validation("boundary does not match the traced outer face".into()));
        }
        g.validate()?;
        Ok(g)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.rotation.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v as usize]
    }

    pub fn rotation(&self, v: VertexId) -> &[VertexId] {
        &self.rotation[v as usize]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.rotation[v as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        self.rotation.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    /// Outer face walk, clockwise around the graph.
    pub fn boundary(&self) -> &[VertexId] {
        &self.boundary
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.rotation[u as usize].contains(&v)
    }

    pub fn vertex_at(&self, x: Dyadic, row: i32) -> Option<VertexId> {
        self.vertices.iter().find(|v| v.x == x && v.row == row).map(|v| v.id)
    }

    pub fn position_index(&self) -> HashMap<(Dyadic, i32), VertexId> {
        self.vertices.iter().map(|v| ((v.x, v.row), v.id)).collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.rotation.iter().enumerate().flat_map(|(u, nbrs)| {
            nbrs.iter().filter(move |&&v| (u as VertexId) < v).map(move |&v| (u as VertexId, v))
        })
    }

    pub fn to_simple_graph(&self) -> SimpleGraph {
        SimpleGraph::from_edges(self.num_vertices(), self.edges())
    }

    fn index_in_rotation(&self, v: VertexId, u: VertexId) -> Option<usize> {
        self.rotation[v as usize].iter().position(|&w| w == u)
    }

    /// The dart following `(u, v)` around the face on its left.
    pub fn next_dart(&self, u: VertexId, v: VertexId) -> (VertexId, VertexId) {
        let rot = &self.rotation[v as usize];
        let i = self.index_in_rotation(v, u).expect("dart must be an edge");
        let w = rot[(i + rot.len() - 1) % rot.len()];
        (v, w)
    }

    /// Vertices of the face to the left of dart `(u, v)`, starting at `u`.
    pub fn trace_face(&self, u: VertexId, v: VertexId) -> Vec<VertexId> {
        let start = (u, v);
        let mut walk = vec![u];
        let mut d = self.next_dart(u, v);
        let limit = 2 * self.num_edges() + 2;
        while d != start {
            walk.push(d.0);
            d = self.next_dart(d.0, d.1);
            if walk.len() > limit {
                break;
            }
        }
        walk
    }

    /// All faces, each traced once, in order of their smallest starting dart.
    pub fn faces(&self) -> Vec<Vec<VertexId>> {
        let mut seen: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
        let mut faces = Vec::new();
        for u in 0..self.num_vertices() as VertexId {
            for &v in &self.rotation[u as usize] {
                if seen.contains(&(u, v)) {
                    continue;
                }
                let face = self.trace_face(u, v);
                for i in 0..face.len() {
                    seen.insert((face[i], face[(i + 1) % face.len()]));
                }
                faces.push(face);
            }
        }
        faces
    }

    /// Bounded triangular faces, as counterclockwise vertex triples.
    pub fn inner_faces(&self) -> Vec<[VertexId; 3]> {
        let outer = self.outer_dart_set();
        self.faces()
            .into_iter()
            .filter(|f| f.len() == 3 && !outer.contains(&(f[0], f[1])))
            .map(|f| [f[0], f[1], f[2]])
            .collect()
    }

    fn outer_dart_set(&self) -> BTreeSet<(VertexId, VertexId)> {
        let b = &self.boundary;
        (0..b.len()).map(|i| (b[i], b[(i + 1) % b.len()])).collect()
    }

    /// True when the outer face walk is a simple cycle.
    pub fn is_disk(&self) -> bool {
        let set: BTreeSet<_> = self.boundary.iter().collect();
        set.len() == self.boundary.len() && self.boundary.len() >= 3
    }

    pub fn is_boundary(&self, v: VertexId) -> bool {
        self.boundary.contains(&v)
    }

    pub fn interior_vertices(&self) -> Vec<VertexId> {
        let b: BTreeSet<_> = self.boundary.iter().copied().collect();
        (0..self.num_vertices() as VertexId).filter(|v| !b.contains(v)).collect()
    }

    fn check_adjacency(&self) -> Result<(), GraphError> {
        for (v, nbrs) in self.rotation.iter().enumerate() {
            let v = v as VertexId;
            let set: BTreeSet<_> = nbrs.iter().collect();
            if set.len() != nbrs.len() {
                return Err(GraphError::Validation(format!("vertex {v} has a repeated neighbour")));
            }
            if nbrs.contains(&v) {
                return Err(GraphError::Validation(format!("vertex {v} has a loop")));
            }
            for &u in nbrs {
                if !self.rotation[u as usize].contains(&v) {
                    return Err(GraphError::Validation(format!("edge {v}->{u} is not symmetric")));
                }
            }
        }
        Ok(())
    }

    /// Checks symmetric adjacency, simplicity, triangular inner faces,
    /// planarity via Euler's formula, and the outer face walk.
    pub fn validate(&self) -> Result<(), GraphError> {
        self.check_adjacency()?;
        if self.trace_face(self.outer.0, self.outer.1) != self.boundary {
            return Err(GraphError::Validation("stored boundary is stale".into()));
        }
        let faces = self.faces();
        let outer = self.outer_dart_set();
        for f in &faces {
            let is_outer = outer.contains(&(f[0], f[1]));
            if !is_outer && f.len() != 3 {
                return Err(GraphError::Validation(format!(
                    "inner face {:?} has {} sides",
                    &f[..f.len().min(8)],
                    f.len()
                )));
            }
        }
        let v = self.num_vertices() as i64;
        let e = self.num_edges() as i64;
        let f = faces.len() as i64;
        if v - e + f != 2 {
            return Err(GraphError::Validation(format!(
                "Euler characteristic V-E+F = {} (expected 2)",
                v - e + f
            )));
        }
        Ok(())
    }

    /// Adds a vertex inside the face whose counterclockwise boundary is
    /// `face`, joined to every corner.
    pub(crate) fn insert_face_center(&mut self, face: &[VertexId], x: Dyadic, row: i32) -> VertexId {
        let z = self.vertices.len() as VertexId;
        self.vertices.push(Vertex { id: z, x, row });
        let k = face.len();
        for i in 0..k {
            let v = face[i];
            let next = face[(i + 1) % k];
            let pos = self.index_in_rotation(v, next).expect("face edge");
            self.rotation[v as usize].insert(pos + 1, z);
        }
        self.rotation.push(face.to_vec());
        z
    }

    /// Inserts `u` into the rotation of `v` immediately after `after`.
    pub(crate) fn insert_after(&mut self, v: VertexId, after: VertexId, u: VertexId) {
        let pos = self.index_in_rotation(v, after).expect("anchor neighbour");
        self.rotation[v as usize].insert(pos + 1, u);
    }

    /// Inserts `u` into the rotation of `v` immediately before `before`.
    pub(crate) fn insert_before(&mut self, v: VertexId, before: VertexId, u: VertexId) {
        let pos = self.index_in_rotation(v, before).expect("anchor neighbour");
        self.rotation[v as usize].insert(pos, u);
    }

    pub(crate) fn push_vertex(&mut self, x: Dyadic, row: i32) -> VertexId {
        let id = self.vertices.len() as VertexId;
        self.vertices.push(Vertex { id, x, row });
        self.rotation.push(Vec::new());
        id
    }

    pub(crate) fn refresh_boundary(&mut self) {
        self.boundary = self.trace_face(self.outer.0, self.outer.1);
    }

    pub(crate) fn set_outer(&mut self, outer: (VertexId, VertexId)) {
        self.outer = outer;
        self.refresh_boundary();
    }
}

/// How an edge leaves a vertex, used to sort rotations.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Departure {
    /// Semicircle above the axis toward a vertex `span` away.
    UpperArc { rightward: bool, span: f64 },
    /// Semicircle below the mirror axis.
    LowerArc { rightward: bool, span: f64 },
    Segment { dx: f64, dy: f64 },
}

impl Departure {
    /// `(angle, tie)` sort key. Semicircles leave vertically; among arcs
    /// with the same tangent, tighter arcs lie closer to the axis.
    fn key(self) -> (f64, f64) {
        match self {
            Departure::UpperArc { rightward: true, span } => (PI / 2.0, -1.0 / span),
            Departure::UpperArc { rightward: false, span } => (PI / 2.0, 1.0 / span),
            Departure::LowerArc { rightward: false, span } => (1.5 * PI, -1.0 / span),
            Departure::LowerArc { rightward: true, span } => (1.5 * PI, 1.0 / span),
            Departure::Segment { dx, dy } => {
                let mut a = dy.atan2(dx);
                if a < 0.0 {
                    a += 2.0 * PI;
                }
                (a, 0.0)
            }
        }
    }
}

/// Collects vertices and geometrically described edges, then sorts every
/// rotation counterclockwise.
#[derive(Default)]
pub(crate) struct Builder {
    vertices: Vec<Vertex>,
    darts: Vec<Vec<(VertexId, Departure)>>,
    index: HashMap<(Dyadic, i32), VertexId>,
}

impl Builder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, x: Dyadic, row: i32) -> VertexId {
        if let Some(&id) = self.index.get(&(x, row)) {
            return id;
        }
        let id = self.vertices.len() as VertexId;
        self.vertices.push(Vertex { id, x, row });
        self.darts.push(Vec::new());
        self.index.insert((x, row), id);
        id
    }

    pub fn get(&self, x: Dyadic, row: i32) -> Option<VertexId> {
        self.index.get(&(x, row)).copied()
    }

    pub fn x(&self, v: VertexId) -> Dyadic {
        self.vertices[v as usize].x
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.darts[u as usize].iter().any(|&(w, _)| w == v)
    }

    pub fn edge(&mut self, u: VertexId, du: Departure, v: VertexId, dv: Departure) {
        if u == v || self.has_edge(u, v) {
            return;
        }
        self.darts[u as usize].push((v, du));
        self.darts[v as usize].push((u, dv));
    }

    /// Semicircle between two vertices of the same row.
    pub fn arc(&mut self, u: VertexId, v: VertexId, upper: bool) {
        let (xu, xv) = (self.x(u).to_f64(), self.x(v).to_f64());
        let span = (xv - xu).abs();
        let mk = |rightward: bool| {
            if upper {
                Departure::UpperArc { rightward, span }
            } else {
                Departure::LowerArc { rightward, span }
            }
        };
        self.edge(u, mk(xv > xu), v, mk(xu > xv));
    }

    pub fn segment(&mut self, u: VertexId, pu: (f64, f64), v: VertexId, pv: (f64, f64)) {
        let d = (pv.0 - pu.0, pv.1 - pu.1);
        self.edge(u, Departure::Segment { dx: d.0, dy: d.1 }, v, Departure::Segment { dx: -d.0, dy: -d.1 });
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn finish(self, root: VertexId, outer: (VertexId, VertexId), marks: Marks) -> PlaneTriangulation {
        let rotation = self
            .darts
            .into_iter()
            .map(|mut ds| {
                ds.sort_by(|a, b| {
                    let (ka, kb) = (a.1.key(), b.1.key());
                    ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1)).then(a.0.cmp(&b.0))
                });
                ds.into_iter().map(|(v, _)| v).collect()
            })
            .collect();
        let mut g = PlaneTriangulation {
            vertices: self.vertices,
            rotation,
            root,
            outer,
            boundary: Vec::new(),
            marks,
        };
        g.refresh_boundary();
        g
    }
}
