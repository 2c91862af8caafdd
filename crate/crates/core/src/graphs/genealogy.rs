//! Genealogies of triangles `t_{a,b}` with vertices `a`, `(a+b)/2`, `b` on
//! the axis: the eternal Galton-Watson half-plane construction and the
//! deterministic binary tower.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::triangulation::{Builder, Marks, PlaneTriangulation, ROW_AXIS};
use super::{GraphError, VertexId};
use crate::dyadic::Dyadic;
use crate::rng::RandomSource;

pub type TriangleId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triangle {
    pub left: VertexId,
    pub middle: VertexId,
    pub right: VertexId,
    pub parent: Option<TriangleId>,
    /// `[t_{a,m}, t_{m,b}]` when the offspring were drawn.
    pub children: Option<[TriangleId; 2]>,
    /// Offspring flag as drawn. A censored triangle has `epsilon == 1` but
    /// no children because it sits at the generation cap.
    pub epsilon: u8,
    pub censored: bool,
    pub generation: i32,
}

impl Triangle {
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }
}

/// A finite genealogy. Vertex ids are assigned in ascending `x` order, so
/// sorting vertices by id sorts them left to right.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleGenealogy {
    xs: Vec<Dyadic>,
    triangles: Vec<Triangle>,
    root: TriangleId,
    top: TriangleId,
    by_middle: Vec<Option<TriangleId>>,
    foils: BTreeMap<i32, Vec<TriangleId>>,
    foil_pos: Vec<u32>,
    /// Root triangles of the subtrees hanging off the ancestor line, starting
    /// with the root triangle itself.
    hanging: Vec<TriangleId>,
}

struct Draft {
    a: Dyadic,
    b: Dyadic,
    parent: Option<usize>,
    children: Option<[usize; 2]>,
    epsilon: u8,
    censored: bool,
    generation: i32,
}

impl Draft {
    fn new(a: Dyadic, b: Dyadic, generation: i32) -> Self {
        Draft { a, b, parent: None, children: None, epsilon: 0, censored: false, generation }
    }
}

fn assemble(drafts: Vec<Draft>, root: usize, top: usize, hanging: Vec<usize>) -> Result<TriangleGenealogy, GraphError> {
    let mut xs: Vec<Dyadic> = Vec::with_capacity(drafts.len() + 2);
    for d in &drafts {
        xs.push(d.a);
        xs.push(d.b);
        xs.push(d.a.midpoint(d.b)?);
    }
    xs.sort();
    xs.dedup();
    let id = |x: Dyadic| xs.binary_search(&x).expect("collected") as VertexId;
    let mut triangles = Vec::with_capacity(drafts.len());
    let mut by_middle = vec![None; xs.len()];
    for (i, d) in drafts.iter().enumerate() {
        let m = d.a.midpoint(d.b)?;
        let t = Triangle {
            left: id(d.a),
            middle: id(m),
            right: id(d.b),
            parent: d.parent.map(|p| p as TriangleId),
            children: d.children.map(|[l, r]| [l as TriangleId, r as TriangleId]),
            epsilon: d.epsilon,
            censored: d.censored,
            generation: d.generation,
        };
        by_middle[t.middle as usize] = Some(i as TriangleId);
        triangles.push(t);
    }
    let mut foils: BTreeMap<i32, Vec<TriangleId>> = BTreeMap::new();
    for (i, t) in triangles.iter().enumerate() {
        foils.entry(t.generation).or_default().push(i as TriangleId);
    }
    let mut foil_pos = vec![0u32; triangles.len()];
    for members in foils.values_mut() {
        members.sort_by_key(|&t| triangles[t as usize].middle);
        for (k, &t) in members.iter().enumerate() {
            foil_pos[t as usize] = k as u32;
        }
    }
    Ok(TriangleGenealogy {
        xs,
        triangles,
        root: root as TriangleId,
        top: top as TriangleId,
        by_middle,
        foils,
        foil_pos,
        hanging: hanging.into_iter().map(|h| h as TriangleId).collect(),
    })
}

impl TriangleGenealogy {
    pub fn num_vertices(&self) -> usize {
        self.xs.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn x(&self, v: VertexId) -> Dyadic {
        self.xs[v as usize]
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn triangle(&self, t: TriangleId) -> &Triangle {
        &self.triangles[t as usize]
    }

    pub fn root_triangle(&self) -> TriangleId {
        self.root
    }

    /// Topmost triangle of the truncation; its endpoints are the only
    /// vertices that are not middle vertices.
    pub fn top_triangle(&self) -> TriangleId {
        self.top
    }

    pub fn root_vertex(&self) -> VertexId {
        self.triangles[self.root as usize].middle
    }

    pub fn hanging_roots(&self) -> &[TriangleId] {
        &self.hanging
    }

    pub fn interval(&self, t: TriangleId) -> (Dyadic, Dyadic) {
        let t = &self.triangles[t as usize];
        (self.xs[t.left as usize], self.xs[t.right as usize])
    }

    /// `t(v)`, the triangle whose middle vertex is `v`.
    pub fn triangle_of(&self, v: VertexId) -> Option<TriangleId> {
        self.by_middle.get(v as usize).copied().flatten()
    }

    pub fn vertex_generation(&self, v: VertexId) -> Option<i32> {
        self.triangle_of(v).map(|t| self.triangles[t as usize].generation)
    }

    /// Generations present, from the top down.
    pub fn generations(&self) -> impl Iterator<Item = i32> + '_ {
        self.foils.keys().copied()
    }

    /// Middle vertices of generation `n` in left-to-right order.
    pub fn foil(&self, n: i32) -> Vec<VertexId> {
        self.foils
            .get(&n)
            .map(|ts| ts.iter().map(|&t| self.triangles[t as usize].middle).collect())
            .unwrap_or_default()
    }

    pub fn foil_triangles(&self, n: i32) -> &[TriangleId] {
        self.foils.get(&n).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `p(v)`: middle vertex of the parent triangle of `t(v)`.
    pub fn parent_vertex(&self, v: VertexId) -> Option<VertexId> {
        let t = self.triangle_of(v)?;
        let p = self.triangles[t as usize].parent?;
        Some(self.triangles[p as usize].middle)
    }

    /// `p'(v)`: the endpoint of `t(v)` other than `p(v)`.
    pub fn other_vertex(&self, v: VertexId) -> Option<VertexId> {
        let t = &self.triangles[self.triangle_of(v)? as usize];
        let p = self.parent_vertex(v)?;
        Some(if t.left == p { t.right } else { t.left })
    }

    /// Middle vertices of all strict descendants of `t(v)`, left to right.
    pub fn descendants(&self, v: VertexId) -> Vec<VertexId> {
        let Some(t) = self.triangle_of(v) else { return Vec::new() };
        let mut out = Vec::new();
        let mut stack = vec![t];
        while let Some(t) = stack.pop() {
            if let Some(ch) = self.triangles[t as usize].children {
                for c in ch {
                    out.push(self.triangles[c as usize].middle);
                    stack.push(c);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn leaves(&self) -> Vec<VertexId> {
        let mut v: Vec<VertexId> = self.triangles.iter().filter(|t| t.is_leaf()).map(|t| t.middle).collect();
        v.sort_unstable();
        v
    }

    /// The half-plane triangulation drawn by the genealogy: semicircles
    /// joining the three vertices of every triangle. Vertex ids coincide
    /// with the genealogy's.
    pub fn to_triangulation(&self) -> PlaneTriangulation {
        let mut b = Builder::new();
        for &x in &self.xs {
            b.vertex(x, ROW_AXIS);
        }
        for t in &self.triangles {
            b.arc(t.left, t.right, true);
            b.arc(t.left, t.middle, true);
            b.arc(t.middle, t.right, true);
        }
        let top = &self.triangles[self.top as usize];
        let mut marks = Marks { generator: "genealogy".into(), ..Default::default() };
        for t in &self.triangles {
            marks.level.insert(t.middle, t.generation);
        }
        let mut g = b.finish(self.root_vertex(), (top.left, top.right), marks);
        g.marks.max_degree = Some(g.max_degree());
        g
    }
}

/// Parent and offspring decisions for the half-plane construction.
pub trait BranchChoices {
    /// `true` selects the parent `t_{2a-b,b}`, `false` selects `t_{a,2b-a}`.
    fn parent_is_left(&mut self, step: u32) -> bool;
    /// Offspring flag for triangle `t_{a,b}` at `depth` below the root of
    /// hanging subtree number `subtree` (0 is the root triangle's own).
    fn offspring(&mut self, subtree: usize, depth: u32, a: Dyadic, b: Dyadic) -> bool;
}

/// Fair coins. Every hanging subtree reads its own substream in
/// breadth-first order, so the first `K` generations of a subtree do not
/// depend on the cap `K`.
pub struct RandomBranching {
    ancestors: ChaCha8Rng,
    base: RandomSource,
    current: Option<(usize, ChaCha8Rng)>,
}

impl RandomBranching {
    pub fn new(rng: &RandomSource) -> Self {
        RandomBranching { ancestors: rng.labeled("ancestors").rng(), base: rng.labeled("offspring"), current: None }
    }
}

impl BranchChoices for RandomBranching {
    fn parent_is_left(&mut self, _step: u32) -> bool {
        self.ancestors.gen_bool(0.5)
    }

    fn offspring(&mut self, subtree: usize, _depth: u32, _a: Dyadic, _b: Dyadic) -> bool {
        if self.current.as_ref().map(|c| c.0) != Some(subtree) {
            self.current = Some((subtree, self.base.substream(subtree as u64).rng()));
        }
        self.current.as_mut().expect("set above").1.gen_bool(0.5)
    }
}

/// Fixed decisions: parent sides by step (missing steps choose right) and
/// the set of intervals whose offspring flag is 1.
#[derive(Clone, Debug, Default)]
pub struct ScriptedBranching {
    pub parents_left: Vec<bool>,
    pub with_offspring: BTreeSet<(Dyadic, Dyadic)>,
}

impl BranchChoices for ScriptedBranching {
    fn parent_is_left(&mut self, step: u32) -> bool {
        self.parents_left.get(step as usize).copied().unwrap_or(false)
    }

    fn offspring(&mut self, _subtree: usize, _depth: u32, a: Dyadic, b: Dyadic) -> bool {
        self.with_offspring.contains(&(a, b))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EgwParams {
    pub ancestor_depth: u32,
    pub max_desc_generations: u32,
    pub max_triangles: usize,
}

impl Default for EgwParams {
    fn default() -> Self {
        EgwParams { ancestor_depth: 8, max_desc_generations: 16, max_triangles: 1_000_000 }
    }
}

pub fn gen_egw_halfplane(rng: &RandomSource, params: EgwParams) -> Result<(PlaneTriangulation, TriangleGenealogy), GraphError> {
    gen_egw_with(&mut RandomBranching::new(rng), params)
}

/// Builds the ancestor line of `t_{-1,1}` for `ancestor_depth` steps, adds
/// the missing sibling of every ancestor's child, then grows each hanging
/// subtree by the critical 0/2 rule for at most `max_desc_generations`
/// generations. Triangles drawn with offspring at the cap are censored.
pub fn gen_egw_with(
    choices: &mut impl BranchChoices,
    params: EgwParams,
) -> Result<(PlaneTriangulation, TriangleGenealogy), GraphError> {
    if params.max_desc_generations < 1 || params.max_triangles < 1 {
        return Err(GraphError::InvalidParameter("max_desc_generations and max_triangles must be >= 1".into()));
    }
    if params.ancestor_depth > 100 {
        return Err(GraphError::InvalidParameter(format!("ancestor depth {} > 100", params.ancestor_depth)));
    }
    let cap = params.max_triangles;
    let mut d = vec![Draft::new(Dyadic::from_int(-1), Dyadic::from_int(1), 0)];
    let mut hanging = vec![0usize];
    let mut cur = 0usize;
    for step in 0..params.ancestor_depth {
        let (a, b) = (d[cur].a, d[cur].b);
        let w = b.checked_sub(a)?;
        let gen = d[cur].generation;
        if d.len() + 2 > cap {
            return Err(GraphError::CapExceeded { cap, first_uncompleted: format!("{a},{b}") });
        }
        let p = d.len();
        let s = p + 1;
        if choices.parent_is_left(step) {
            d.push(Draft::new(a.checked_sub(w)?, b, gen - 1));
            d.push(Draft::new(a.checked_sub(w)?, a, gen));
            d[p].children = Some([s, cur]);
        } else {
            d.push(Draft::new(a, b.checked_add(w)?, gen - 1));
            d.push(Draft::new(b, b.checked_add(w)?, gen));
            d[p].children = Some([cur, s]);
        }
        d[p].epsilon = 1;
        d[cur].parent = Some(p);
        d[s].parent = Some(p);
        hanging.push(s);
        cur = p;
    }
    let top = cur;
    let k = params.max_desc_generations;
    for (j, &h) in hanging.iter().enumerate() {
        let mut queue = VecDeque::from([(h, 0u32)]);
        while let Some((t, depth)) = queue.pop_front() {
            let (a, b) = (d[t].a, d[t].b);
            if !choices.offspring(j, depth, a, b) {
                continue;
            }
            d[t].epsilon = 1;
            if depth == k {
                d[t].censored = true;
                continue;
            }
            if d.len() + 2 > cap {
                return Err(GraphError::CapExceeded { cap, first_uncompleted: format!("{a},{b}") });
            }
            let m = a.midpoint(b)?;
            let gen = d[t].generation + 1;
            let l = d.len();
            d.push(Draft { parent: Some(t), ..Draft::new(a, m, gen) });
            d.push(Draft { parent: Some(t), ..Draft::new(m, b, gen) });
            d[t].children = Some([l, l + 1]);
            queue.push_back((l, depth + 1));
            queue.push_back((l + 1, depth + 1));
        }
    }
    let gen = assemble(d, 0, top, hanging)?;
    let mut g = gen.to_triangulation();
    g.marks.generator = "egw-halfplane".into();
    g.marks.params.insert("ancestor_depth".into(), params.ancestor_depth as i64);
    g.marks.params.insert("max_desc_generations".into(), k as i64);
    g.marks.params.insert("max_triangles".into(), cap as i64);
    g.marks.params.insert("censored".into(), gen.triangles.iter().filter(|t| t.censored).count() as i64);
    Ok((g, gen))
}

/// Full binary tree of triangles of depth `n` under `t_{0,2^{n+1}}`, so that
/// every vertex is an integer. Generation 0 is the top triangle and the
/// leaves form generation `n`.
pub fn gen_binary_tower(n: u32) -> TriangleGenealogy {
    assert!(n <= 40, "binary tower depth {n} is too large to materialize");
    let top = Dyadic::from_int(1i64 << (n + 1));
    let mut d = vec![Draft::new(Dyadic::ZERO, top, 0)];
    let mut start = 0;
    for level in 0..n {
        let end = d.len();
        for t in start..end {
            let (a, b) = (d[t].a, d[t].b);
            let m = a.midpoint(b).expect("integer midpoint");
            let l = d.len();
            d.push(Draft { parent: Some(t), ..Draft::new(a, m, level as i32 + 1) });
            d.push(Draft { parent: Some(t), ..Draft::new(m, b, level as i32 + 1) });
            d[t].children = Some([l, l + 1]);
            d[t].epsilon = 1;
        }
        start = end;
    }
    assemble(d, 0, 0, vec![0]).expect("tower coordinates are small integers")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoilIndex {
    /// Generation of `v` relative to the root vertex.
    pub generation: i32,
    pub tau_prev: Option<VertexId>,
    pub tau_next: Option<VertexId>,
    pub parent: Option<VertexId>,
    pub other: Option<VertexId>,
    pub descendants: Vec<VertexId>,
}

pub fn foil_index(g: &TriangleGenealogy, v: VertexId) -> Result<FoilIndex, GraphError> {
    let t = g.triangle_of(v).ok_or(GraphError::NotMiddleVertex(v))?;
    let tri = &g.triangles[t as usize];
    let members = &g.foils[&tri.generation];
    let pos = g.foil_pos[t as usize] as usize;
    let mid = |i: usize| g.triangles[members[i] as usize].middle;
    let base = g.triangles[g.root as usize].generation;
    Ok(FoilIndex {
        generation: tri.generation - base,
        tau_prev: pos.checked_sub(1).map(mid),
        tau_next: (pos + 1 < members.len()).then(|| mid(pos + 1)),
        parent: g.parent_vertex(v),
        other: g.other_vertex(v),
        descendants: g.descendants(v),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dy(n: i128, e: u32) -> Dyadic {
        Dyadic::new(n, e).unwrap()
    }

    fn at(g: &TriangleGenealogy, x: Dyadic) -> VertexId {
        (0..g.num_vertices() as VertexId).find(|&v| g.x(v) == x).expect("vertex present")
    }

    #[test]
    fn single_triangle() {
        let mut none = ScriptedBranching::default();
        let params = EgwParams { ancestor_depth: 0, max_desc_generations: 3, max_triangles: 10 };
        let (g, gen) = gen_egw_with(&mut none, params).unwrap();
        assert_eq!(gen.num_triangles(), 1);
        let xs: Vec<f64> = (0..3).map(|v| gen.x(v).to_f64()).collect();
        assert_eq!(xs, vec![-1.0, 0.0, 1.0]);
        g.validate().unwrap();
        assert!(g.is_disk());
        assert_eq!(foil_index(&gen, gen.root_vertex()).unwrap().generation, 0);
        assert_eq!(foil_index(&gen, 0), Err(GraphError::NotMiddleVertex(0)));
    }

    #[test]
    fn right_parent_adds_sibling() {
        let mut s = ScriptedBranching { parents_left: vec![false], ..Default::default() };
        let params = EgwParams { ancestor_depth: 1, max_desc_generations: 3, max_triangles: 10 };
        let (_, gen) = gen_egw_with(&mut s, params).unwrap();
        assert_eq!(gen.interval(gen.top_triangle()), (Dyadic::from_int(-1), Dyadic::from_int(3)));
        let sibling = gen.hanging_roots()[1];
        assert_eq!(gen.interval(sibling), (Dyadic::from_int(1), Dyadic::from_int(3)));
    }

    fn scripted_example() -> TriangleGenealogy {
        let mut s = ScriptedBranching { parents_left: vec![true, false], ..Default::default() };
        s.with_offspring.insert((Dyadic::from_int(-1), Dyadic::from_int(1)));
        s.with_offspring.insert((Dyadic::ZERO, Dyadic::from_int(1)));
        let params = EgwParams { ancestor_depth: 2, max_desc_generations: 4, max_triangles: 100 };
        gen_egw_with(&mut s, params).unwrap().1
    }

    #[test]
    fn scripted_parent_maps() {
        let g = scripted_example();
        let xs: Vec<Dyadic> = (0..g.num_vertices() as VertexId).map(|v| g.x(v)).collect();
        let expected = [
            dy(-3, 0), dy(-2, 0), dy(-1, 0), dy(-1, 1), dy(0, 0), dy(1, 2), dy(1, 1), dy(3, 2), dy(1, 0), dy(3, 0), dy(5, 0),
        ];
        assert_eq!(xs, expected);
        let p = |x: Dyadic| g.parent_vertex(at(&g, x)).map(|v| g.x(v));
        assert_eq!(p(dy(-2, 0)), Some(dy(-1, 0)));
        assert_eq!(p(dy(0, 0)), Some(dy(-1, 0)));
        assert_eq!(p(dy(-1, 0)), Some(dy(1, 0)));
        assert_eq!(p(dy(3, 0)), Some(dy(1, 0)));
        assert_eq!(p(dy(-1, 1)), Some(dy(0, 0)));
        assert_eq!(p(dy(1, 1)), Some(dy(0, 0)));
        assert_eq!(p(dy(1, 2)), Some(dy(1, 1)));
        assert_eq!(p(dy(3, 2)), Some(dy(1, 1)));
        let l = |x: Dyadic| foil_index(&g, at(&g, x)).unwrap().generation;
        assert_eq!(l(dy(1, 0)), -2);
        assert_eq!((l(dy(-1, 0)), l(dy(3, 0))), (-1, -1));
        assert_eq!((l(dy(-2, 0)), l(dy(0, 0))), (0, 0));
        assert_eq!((l(dy(-1, 1)), l(dy(1, 1))), (1, 1));
        assert_eq!((l(dy(1, 2)), l(dy(3, 2))), (2, 2));
        let o = foil_index(&g, at(&g, dy(0, 0))).unwrap();
        assert_eq!(o.tau_prev.map(|v| g.x(v)), Some(dy(-2, 0)));
        assert_eq!(o.other.map(|v| g.x(v)), Some(dy(1, 0)));
        assert_eq!(o.descendants.len(), 4);
        let leaf = foil_index(&g, at(&g, dy(3, 2))).unwrap();
        assert!(leaf.descendants.is_empty());
        let tri = g.to_triangulation();
        tri.validate().unwrap();
        assert!(tri.is_disk());
    }

    #[test]
    fn tau_order_is_ascending_x() {
        let (_, g) = gen_egw_halfplane(&RandomSource::new(3), EgwParams::default()).unwrap();
        for n in g.generations() {
            let f = g.foil(n);
            assert!(f.windows(2).all(|w| g.x(w[0]) < g.x(w[1])));
        }
    }

    #[test]
    fn generations_step_by_one() {
        let (_, g) = gen_egw_halfplane(&RandomSource::new(5), EgwParams::default()).unwrap();
        for t in g.triangles() {
            if let Some(ch) = t.children {
                assert_eq!(t.epsilon, 1);
                for c in ch {
                    assert_eq!(g.triangle(c).generation, t.generation + 1);
                }
            } else {
                assert!(t.epsilon == 0 || t.censored);
            }
        }
    }

    #[test]
    fn cap_names_first_uncompleted() {
        let mut s = ScriptedBranching::default();
        s.with_offspring.insert((Dyadic::from_int(-1), Dyadic::from_int(1)));
        let params = EgwParams { ancestor_depth: 0, max_desc_generations: 3, max_triangles: 2 };
        match gen_egw_with(&mut s, params) {
            Err(GraphError::CapExceeded { cap, first_uncompleted }) => {
                assert_eq!(cap, 2);
                assert_eq!(first_uncompleted, "-1,1");
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn critical_mean_offspring() {
        let mut drawn = 0usize;
        let mut children = 0usize;
        let mut seed = 0;
        while drawn < 10_000 {
            let params = EgwParams { ancestor_depth: 10, max_desc_generations: 12, max_triangles: 1_000_000 };
            let (_, g) = gen_egw_halfplane(&RandomSource::new(seed), params).unwrap();
            let ancestors: BTreeSet<TriangleId> = {
                let mut s = BTreeSet::new();
                let mut t = Some(g.root_triangle());
                while let Some(x) = t {
                    s.insert(x);
                    t = g.triangle(x).parent;
                }
                s
            };
            for (i, t) in g.triangles().iter().enumerate() {
                if !ancestors.contains(&(i as TriangleId)) {
                    drawn += 1;
                    children += 2 * t.epsilon as usize;
                }
            }
            seed += 1;
        }
        let mean = children as f64 / drawn as f64;
        assert!((0.94..=1.06).contains(&mean), "mean offspring {mean}");
    }

    #[test]
    fn common_random_numbers_across_caps() {
        let rng = RandomSource::new(11);
        let small = gen_egw_halfplane(&rng, EgwParams { max_desc_generations: 5, ..Default::default() }).unwrap().1;
        let large = gen_egw_halfplane(&rng, EgwParams { max_desc_generations: 9, ..Default::default() }).unwrap().1;
        let set = |g: &TriangleGenealogy| -> BTreeSet<(Dyadic, Dyadic)> {
            (0..g.num_triangles() as TriangleId).map(|t| g.interval(t)).collect()
        };
        assert!(set(&small).is_subset(&set(&large)));
    }

    #[test]
    fn tower_counts() {
        assert_eq!(gen_binary_tower(0).num_triangles(), 1);
        let t2 = gen_binary_tower(2);
        assert_eq!(t2.num_triangles(), 7);
        assert_eq!(t2.leaves().len(), 4);
        for n in [5u32, 10, 14] {
            let t = gen_binary_tower(n);
            let mut leaves = 0usize;
            let mut stack = vec![t.top_triangle()];
            while let Some(x) = stack.pop() {
                match t.triangle(x).children {
                    Some(ch) => stack.extend(ch),
                    None => leaves += 1,
                }
            }
            assert_eq!(leaves, 1 << n);
            assert_eq!(t.num_triangles(), (1 << (n + 1)) - 1);
        }
        gen_binary_tower(3).to_triangulation().validate().unwrap();
    }
}
