//! Exact constructions of the random planar triangulations, their triangle
//! genealogies, and combinatorial queries on them.

mod automorphism;
mod canopy;
mod fixtures;
mod genealogy;
mod halfplane;
mod mtp;
mod triangulation;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use automorphism::{automorphisms, is_automorphism};
pub use canopy::{canopy_with_signs, gen_canopy_tree, CanopyTree};
pub use fixtures::{gen_fixture, hex_patch, triangle, Fixture, FixtureKind, PathMode, PathWindow};
pub use genealogy::{
    foil_index, gen_binary_tower, gen_egw_halfplane, gen_egw_with, BranchChoices, EgwParams, FoilIndex,
    RandomBranching, ScriptedBranching, Triangle, TriangleGenealogy, TriangleId,
};
pub use halfplane::{complete_to_plane, gen_bounded_dyadic, gen_dyadic_halfplane, gen_dyadic_with_bits, DyadicParams};
pub use mtp::{foil_ancestor, mtp_check, mtp_check_with, MtpReport, Transport, TransportGraph};
pub use triangulation::{
    Marks, PlaneTriangulation, Vertex, ROW_AXIS, ROW_BAND_CENTER, ROW_LOWER_CENTER, ROW_MIRROR, ROW_UPPER_CENTER,
};

pub type VertexId = u32;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("window {window} is smaller than 2^levels = {required}")]
    WindowTooSmall { window: i64, required: i64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Overflow(#[from] crate::dyadic::DyadicOverflow),
    #[error("triangle cap {cap} exceeded; first uncompleted triangle is t[{first_uncompleted}]")]
    CapExceeded { cap: usize, first_uncompleted: String },
    #[error("vertex {0} is not the middle vertex of any triangle")]
    NotMiddleVertex(VertexId),
    #[error("unknown transport {0:?}; expected constant, to-parent, uniform-neighbor or foil-ancestor:<k>")]
    UnknownTransport(String),
    #[error("transport {0} needs a triangle genealogy")]
    NeedsGenealogy(String),
    #[error("malformed graph: {0}")]
    Malformed(String),
    #[error("graph validation failed: {0}")]
    Validation(String),
}

/// Undirected simple graph on `0..n`, edges stored as ordered pairs `u < v`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleGraph {
    pub n: usize,
    pub edges: BTreeSet<(VertexId, VertexId)>,
}

impl SimpleGraph {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (VertexId, VertexId)>) -> Self {
        let edges = edges.into_iter().filter(|(u, v)| u != v).map(|(u, v)| (u.min(v), u.max(v))).collect();
        SimpleGraph { n, edges }
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn adjacency(&self) -> Vec<Vec<VertexId>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        adj
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.adjacency().iter().map(Vec::len).collect();
        d.sort_unstable();
        d
    }
}
