//! Brute-force automorphism search for small graphs.

use super::{SimpleGraph, VertexId};

pub fn is_automorphism(g: &SimpleGraph, perm: &[VertexId]) -> bool {
    if perm.len() != g.n {
        return false;
    }
    let mut seen = vec![false; g.n];
    for &p in perm {
        if p as usize >= g.n || std::mem::replace(&mut seen[p as usize], true) {
            return false;
        }
    }
    g.edges.iter().all(|&(u, v)| g.has_edge(perm[u as usize], perm[v as usize]))
}

/// All automorphisms of `g`, up to `limit` of them, by backtracking over a
/// breadth-first vertex order with degree and adjacency pruning. The
/// identity is always first.
pub fn automorphisms(g: &SimpleGraph, limit: usize) -> Vec<Vec<VertexId>> {
    let adj = g.adjacency();
    let n = g.n;
    if n == 0 {
        return vec![Vec::new()];
    }
    let deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while order.len() < n {
        let start = (0..n).filter(|&v| !placed[v]).max_by_key(|&v| (deg[v], std::cmp::Reverse(v))).unwrap();
        placed[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut next: Vec<usize> = adj[u].iter().map(|&w| w as usize).filter(|&w| !placed[w]).collect();
            next.sort_unstable();
            for w in next {
                placed[w] = true;
                queue.push_back(w);
            }
        }
    }
    let mut image = vec![u32::MAX; n];
    let mut used = vec![false; n];
    let mut out = Vec::new();
    search(0, &order, &adj, &deg, &mut image, &mut used, &mut out, limit);
    out
}

#[allow(clippy::too_many_arguments)]
fn search(
    k: usize,
    order: &[usize],
    adj: &[Vec<VertexId>],
    deg: &[usize],
    image: &mut [u32],
    used: &mut [bool],
    out: &mut Vec<Vec<VertexId>>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    if k == order.len() {
        out.push(image.to_vec());
        return;
    }
    let v = order[k];
    let mapped_nbr = adj[v].iter().find(|&&u| image[u as usize] != u32::MAX).copied();
    let candidates: Vec<usize> = match mapped_nbr {
        Some(u) => adj[image[u as usize] as usize].iter().map(|&w| w as usize).collect(),
        None => (0..order.len()).collect(),
    };
    let mut candidates = candidates;
    candidates.sort_unstable();
    // Try the identity image first so the identity permutation comes out first.
    if let Some(pos) = candidates.iter().position(|&c| c == v) {
        candidates.remove(pos);
        candidates.insert(0, v);
    }
    for c in candidates {
        if used[c] || deg[c] != deg[v] {
            continue;
        }
        let ok = adj[v].iter().all(|&u| {
            let iu = image[u as usize];
            iu == u32::MAX || adj[c].contains(&iu)
        }) && (0..order.len()).all(|w| {
            // Non-edges must map to non-edges among already mapped vertices.
            let iw = image[w];
            iw == u32::MAX || adj[v].contains(&(w as VertexId)) || !adj[c].contains(&iw)
        });
        if !ok {
            continue;
        }
        image[v] = c as u32;
        used[c] = true;
        search(k + 1, order, adj, deg, image, used, out, limit);
        image[v] = u32::MAX;
        used[c] = false;
        if out.len() >= limit {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_has_dihedral_group() {
        let g = SimpleGraph::from_edges(5, (0..5).map(|i| (i, (i + 1) % 5)));
        let autos = automorphisms(&g, 100);
        assert_eq!(autos.len(), 10);
        assert_eq!(autos[0], vec![0, 1, 2, 3, 4]);
        assert!(autos.iter().all(|p| is_automorphism(&g, p)));
    }

    #[test]
    fn path_has_two() {
        let g = SimpleGraph::from_edges(4, [(0, 1), (1, 2), (2, 3)]);
        assert_eq!(automorphisms(&g, 100).len(), 2);
        assert!(!is_automorphism(&g, &[1, 0, 2, 3]));
    }
}
