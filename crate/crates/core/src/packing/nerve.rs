use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CirclePacking, PackingError};
use crate::graphs::{SimpleGraph, VertexId};

/// Tangency graph: `u ~ v` when `|d - (r_u + r_v)| <= tol (r_u + r_v)`.
/// Fails if two interiors overlap by more than the tolerance.
pub fn nerve(p: &CirclePacking, tol: f64) -> Result<SimpleGraph, PackingError> {
    let n = p.len();
    let mut edges = Vec::new();
    let mut overlaps = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let (a, b) = (&p.circles[u], &p.circles[v]);
            let s = a.r + b.r;
            let d = a.distance(b);
            if (d - s).abs() <= tol * s {
                edges.push((u as VertexId, v as VertexId));
            } else if d < s * (1.0 - tol) {
                overlaps.push((u as VertexId, v as VertexId, (s - d) / s));
            }
        }
    }
    if !overlaps.is_empty() {
        return Err(PackingError::Overlap { pairs: overlaps });
    }
    Ok(SimpleGraph::from_edges(n, edges))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Max `|d - (r_u + r_v)| / (r_u + r_v)` over expected edges.
    pub max_edge_residual: f64,
    pub worst_edge: Option<(VertexId, VertexId)>,
    /// Min `d / (r_u + r_v) - 1` over non-adjacent pairs.
    pub min_separation_slack: f64,
    pub worst_pair: Option<(VertexId, VertexId)>,
    pub tolerance: f64,
    pub pass: bool,
    /// Vertices incident to a failing edge or pair, ascending.
    pub offending: Vec<VertexId>,
    /// The vertex involved in the most failures.
    pub suspect: Option<VertexId>,
}

pub fn validate_packing(p: &CirclePacking, expected: &SimpleGraph, tol: f64) -> ValidationReport {
    let n = p.len().min(expected.n);
    let mut rep = ValidationReport {
        max_edge_residual: 0.0,
        worst_edge: None,
        min_separation_slack: f64::INFINITY,
        worst_pair: None,
        tolerance: tol,
        pass: true,
        offending: Vec::new(),
        suspect: None,
    };
    let mut bad: BTreeMap<VertexId, usize> = BTreeMap::new();
    for u in 0..n {
        for v in u + 1..n {
            let (a, b) = (&p.circles[u], &p.circles[v]);
            let s = a.r + b.r;
            let d = a.distance(b);
            let (u, v) = (u as VertexId, v as VertexId);
            if expected.has_edge(u, v) {
                let res = (d - s).abs() / s;
                if rep.worst_edge.is_none() || res > rep.max_edge_residual {
                    rep.max_edge_residual = res;
                    rep.worst_edge = Some((u, v));
                }
                if res > tol {
                    *bad.entry(u).or_insert(0usize) += 1;
                    *bad.entry(v).or_insert(0usize) += 1;
                }
            } else {
                let slack = d / s - 1.0;
                if slack < rep.min_separation_slack {
                    rep.min_separation_slack = slack;
                    rep.worst_pair = Some((u, v));
                }
                if slack < -tol {
                    *bad.entry(u).or_insert(0usize) += 1;
                    *bad.entry(v).or_insert(0usize) += 1;
                }
            }
        }
    }
    rep.pass = rep.max_edge_residual <= tol && rep.min_separation_slack >= -tol && p.len() == expected.n;
    rep.suspect = bad.iter().max_by_key(|(v, c)| (**c, std::cmp::Reverse(**v))).map(|(v, _)| *v);
    rep.offending = bad.into_keys().collect();
    rep
}
