//! Finite windows of the canopy tree with its level structure.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{GraphError, SimpleGraph, VertexId};
use crate::dyadic::Dyadic;
use crate::rng::RandomSource;

/// Vertices at levels `0..=max_level`; the level-`n` vertices sit at
/// `a_n / 2 + m 2^n` with `a_n = sum_{i<n} 2^i U_i` and `U_i = ±1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanopyTree {
    pub tree: SimpleGraph,
    pub level: Vec<u32>,
    pub x: Vec<Dyadic>,
    /// Level-`(n+1)` neighbour of each vertex, `None` at the top level.
    pub parent: Vec<Option<VertexId>>,
    pub signs: Vec<i8>,
    pub max_level: u32,
    /// The level-0 vertex at the origin.
    pub origin: VertexId,
}

impl CanopyTree {
    pub fn len(&self) -> usize {
        self.level.len()
    }

    pub fn is_empty(&self) -> bool {
        self.level.is_empty()
    }

    /// `a_n / 2` for `n = 0..=max_level`.
    pub fn spine(&self) -> Vec<Dyadic> {
        half_offsets(&self.signs)
    }

    pub fn children(&self, v: VertexId) -> Vec<VertexId> {
        let mut c: Vec<VertexId> = self.tree.adjacency()[v as usize]
            .iter()
            .copied()
            .filter(|&u| self.parent[u as usize] == Some(v))
            .collect();
        c.sort_by(|&a, &b| self.x[a as usize].cmp(&self.x[b as usize]));
        c
    }
}

fn half_offsets(signs: &[i8]) -> Vec<Dyadic> {
    let mut a = vec![0i64];
    for (i, &u) in signs.iter().enumerate() {
        a.push(a[i] + (u as i64) * (1i64 << i));
    }
    a.into_iter().map(|v| Dyadic::new(v as i128, 1).expect("small")).collect()
}

/// Level-`max_level` vertices with `|x| <= window`, always including the
/// ancestor of the origin, together with all of their descendants.
pub fn gen_canopy_tree(rng: &RandomSource, max_level: u32, window: i64) -> Result<CanopyTree, GraphError> {
    let mut r = rng.rng();
    let signs: Vec<i8> = (0..max_level).map(|_| if r.gen_bool(0.5) { 1 } else { -1 }).collect();
    canopy_with_signs(&signs, window)
}

pub fn canopy_with_signs(signs: &[i8], window: i64) -> Result<CanopyTree, GraphError> {
    let max_level = signs.len() as u32;
    if max_level < 1 {
        return Err(GraphError::InvalidParameter("canopy tree needs max_level >= 1".into()));
    }
    if max_level > 24 {
        return Err(GraphError::InvalidParameter(format!("max_level {max_level} > 24")));
    }
    if signs.iter().any(|&s| s != 1 && s != -1) {
        return Err(GraphError::InvalidParameter("signs must be +1 or -1".into()));
    }
    let half = half_offsets(signs);
    let step = Dyadic::from_int(1i64 << max_level);
    let w = Dyadic::from_int(window.abs());
    let mut tops = vec![half[max_level as usize]];
    let mut x = half[max_level as usize];
    loop {
        let nx = x.checked_sub(step)?;
        if nx.neg() > w {
            break;
        }
        tops.insert(0, nx);
        x = nx;
    }
    x = half[max_level as usize];
    loop {
        let nx = x.checked_add(step)?;
        if nx > w {
            break;
        }
        tops.push(nx);
        x = nx;
    }
    let mut level = Vec::new();
    let mut xs = Vec::new();
    let mut parent = Vec::new();
    let mut edges = Vec::new();
    let mut frontier: Vec<VertexId> = Vec::new();
    for t in tops {
        frontier.push(xs.len() as VertexId);
        xs.push(t);
        level.push(max_level);
        parent.push(None);
    }
    for n in (0..max_level).rev() {
        let off = Dyadic::pow2(n as i32 - 1)?;
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for &p in &frontier {
            let px = xs[p as usize];
            for cx in [px.checked_sub(off)?, px.checked_add(off)?] {
                let c = xs.len() as VertexId;
                xs.push(cx);
                level.push(n);
                parent.push(Some(p));
                edges.push((p, c));
                next.push(c);
            }
        }
        frontier = next;
    }
    let origin = (0..xs.len()).find(|&v| level[v] == 0 && xs[v] == Dyadic::ZERO).expect("spine reaches the origin") as VertexId;
    Ok(CanopyTree {
        tree: SimpleGraph::from_edges(xs.len(), edges),
        level,
        x: xs,
        parent,
        signs: signs.to_vec(),
        max_level,
        origin,
    })
}
