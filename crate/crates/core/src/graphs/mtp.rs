//! Mass transport sums on finite graphs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::genealogy::TriangleGenealogy;
use super::triangulation::PlaneTriangulation;
use super::{GraphError, SimpleGraph, VertexId};

/// Transport functions available by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Transport {
    /// `g(u, v) = 1` for every ordered pair, including `u = v`.
    Constant,
    /// `g(u, p(u)) = 1`.
    ToParent,
    /// `g(u, v) = 1/deg(u)` for neighbours `v`.
    UniformNeighbor,
    /// `g(u, v) = 1` when `v` is the ancestor (or `u` itself) lying in
    /// generation `k`.
    FoilAncestor(i32),
}

impl fmt::Display for Transport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transport::Constant => write!(f, "constant"),
            Transport::ToParent => write!(f, "to-parent"),
            Transport::UniformNeighbor => write!(f, "uniform-neighbor"),
            Transport::FoilAncestor(k) => write!(f, "foil-ancestor:{k}"),
        }
    }
}

impl FromStr for Transport {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "constant" => Ok(Transport::Constant),
            "to-parent" => Ok(Transport::ToParent),
            "uniform-neighbor" => Ok(Transport::UniformNeighbor),
            _ => s
                .strip_prefix("foil-ancestor:")
                .and_then(|k| k.parse().ok())
                .map(Transport::FoilAncestor)
                .ok_or_else(|| GraphError::UnknownTransport(s.to_string())),
        }
    }
}

impl From<Transport> for String {
    fn from(t: Transport) -> String {
        t.to_string()
    }
}

impl TryFrom<String> for Transport {
    type Error = GraphError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// A finite graph, optionally with the genealogy its vertices belong to.
pub struct TransportGraph<'a> {
    pub graph: SimpleGraph,
    pub genealogy: Option<&'a TriangleGenealogy>,
}

impl<'a> TransportGraph<'a> {
    pub fn plain(graph: SimpleGraph) -> Self {
        TransportGraph { graph, genealogy: None }
    }

    pub fn from_triangulation(g: &PlaneTriangulation) -> Self {
        TransportGraph::plain(g.to_simple_graph())
    }

    pub fn from_genealogy(gen: &'a TriangleGenealogy) -> Self {
        TransportGraph { graph: gen.to_triangulation().to_simple_graph(), genealogy: Some(gen) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MtpReport {
    /// `sum_{u,v} g(u, v)`, accumulated by source vertex.
    pub lhs: f64,
    /// `sum_{u,v} g(v, u)`, accumulated by target vertex.
    pub rhs: f64,
    pub outgoing: Vec<f64>,
    pub incoming: Vec<f64>,
}

impl MtpReport {
    fn from_flows(n: usize, flows: impl Iterator<Item = (VertexId, VertexId, f64)>) -> Self {
        let mut outgoing = vec![0.0; n];
        let mut incoming = vec![0.0; n];
        for (u, v, m) in flows {
            outgoing[u as usize] += m;
            incoming[v as usize] += m;
        }
        MtpReport { lhs: outgoing.iter().sum(), rhs: incoming.iter().sum(), outgoing, incoming }
    }
}

/// Evaluates a catalog transport on every vertex.
pub fn mtp_check(g: &TransportGraph<'_>, transport: Transport) -> Result<MtpReport, GraphError> {
    let n = g.graph.n;
    match transport {
        Transport::Constant => {
            let m = n as f64;
            Ok(MtpReport { lhs: m * m, rhs: m * m, outgoing: vec![m; n], incoming: vec![m; n] })
        }
        Transport::UniformNeighbor => {
            let adj = g.graph.adjacency();
            let flows = adj.iter().enumerate().flat_map(|(u, nbrs)| {
                let w = 1.0 / nbrs.len() as f64;
                nbrs.iter().map(move |&v| (u as VertexId, v, w))
            });
            Ok(MtpReport::from_flows(n, flows))
        }
        Transport::ToParent => {
            let gen = g.genealogy.ok_or_else(|| GraphError::NeedsGenealogy(transport.to_string()))?;
            let flows = (0..n as VertexId).filter_map(|u| gen.parent_vertex(u).map(|p| (u, p, 1.0)));
            Ok(MtpReport::from_flows(n, flows))
        }
        Transport::FoilAncestor(k) => {
            let gen = g.genealogy.ok_or_else(|| GraphError::NeedsGenealogy(transport.to_string()))?;
            let flows = (0..n as VertexId).filter_map(|u| foil_ancestor(gen, u, k).map(|a| (u, a, 1.0)));
            Ok(MtpReport::from_flows(n, flows))
        }
    }
}

/// The ancestor-or-self of `u` in generation `k`, if `u` is a middle vertex
/// at generation at least `k`.
pub fn foil_ancestor(gen: &TriangleGenealogy, u: VertexId, k: i32) -> Option<VertexId> {
    let mut t = gen.triangle_of(u)?;
    loop {
        let tri = gen.triangle(t);
        if tri.generation == k {
            return Some(tri.middle);
        }
        if tri.generation < k {
            return None;
        }
        t = tri.parent?;
    }
}

/// Evaluates an arbitrary transport over all ordered pairs.
pub fn mtp_check_with(n: usize, f: impl Fn(VertexId, VertexId) -> f64) -> MtpReport {
    let mut outgoing = vec![0.0; n];
    let mut incoming = vec![0.0; n];
    for u in 0..n as VertexId {
        for v in 0..n as VertexId {
            outgoing[u as usize] += f(u, v);
        }
    }
    for v in 0..n as VertexId {
        for u in 0..n as VertexId {
            incoming[v as usize] += f(u, v);
        }
    }
    MtpReport { lhs: outgoing.iter().sum(), rhs: incoming.iter().sum(), outgoing, incoming }
}
