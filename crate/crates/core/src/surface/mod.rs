//! Weighted graphs embedded in closed surfaces.
//!
//! An embedding is a signed rotation system: every vertex carries the cyclic
//! order of its half-edges, and every edge a sign in `{+1, -1}`. Crossing an
//! edge of sign `-1` reverses the local orientation. Faces are recovered by
//! tracing, which works uniformly for orientable and non-orientable surfaces.
//!
//! Half-edge `2e` is the end of edge `e` at its stored endpoint `u`, and
//! `2e + 1` the end at `v`.

mod homology;

pub use homology::{
    cycle_class, for_each_simple_curve, fundamental_cycles, homology_basis, push_off,
    simple_cycles, Class, ClosedWalk, HomologyBasis,
};

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::scalar::Weight;
use num_traits::Signed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfEdge(pub usize);

impl HalfEdge {
    pub fn new(edge: usize, end: usize) -> Self {
        debug_assert!(end < 2);
        HalfEdge(2 * edge + end)
    }

    pub fn edge(self) -> usize {
        self.0 / 2
    }

    /// 0 at the stored endpoint `u`, 1 at `v`.
    pub fn end(self) -> usize {
        self.0 % 2
    }

    pub fn opposite(self) -> HalfEdge {
        HalfEdge(self.0 ^ 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: Weight,
    /// `+1` or `-1`.
    pub sign: i8,
}

/// Z2 indicator vector over the edges of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct EdgeSet {
    bits: Vec<bool>,
}

impl EdgeSet {
    pub fn empty(num_edges: usize) -> Self {
        EdgeSet {
            bits: vec![false; num_edges],
        }
    }

    pub fn from_ids(num_edges: usize, ids: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(num_edges);
        for e in ids {
            s.toggle(e);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn contains(&self, e: usize) -> bool {
        self.bits[e]
    }

    pub fn toggle(&mut self, e: usize) {
        self.bits[e] = !self.bits[e];
    }

    pub fn insert(&mut self, e: usize) {
        self.bits[e] = true;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn ids(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(e, _)| e)
    }

    pub fn symmetric_difference(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }

    /// `|self ∩ other| mod 2`.
    pub fn pairing(&self, other: &EdgeSet) -> u8 {
        (self
            .bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| **a && **b)
            .count()
            % 2) as u8
    }
}

/// A graph with a signed rotation system. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddedGraph {
    num_vertices: usize,
    edges: Vec<Edge>,
    rotation: Vec<Vec<HalfEdge>>,
    position: Vec<usize>,
    cuts: BTreeMap<String, EdgeSet>,
}

impl EmbeddedGraph {
    /// Builds a graph, checking that the rotation system is syntactically complete.
    pub fn new(
        num_vertices: usize,
        edges: Vec<Edge>,
        rotation: Vec<Vec<HalfEdge>>,
    ) -> Result<Self> {
        if rotation.len() != num_vertices {
            return Err(Error::MalformedRotation(format!(
                "{} rotations for {} vertices",
                rotation.len(),
                num_vertices
            )));
        }
        for (e, edge) in edges.iter().enumerate() {
            if edge.u >= num_vertices || edge.v >= num_vertices {
                return Err(Error::MalformedRotation(format!(
                    "edge {e} has an endpoint out of range"
                )));
            }
            if edge.u == edge.v {
                return Err(Error::LoopEdge(e));
            }
            if edge.sign != 1 && edge.sign != -1 {
                return Err(Error::MalformedRotation(format!(
                    "edge {e} has sign {}",
                    edge.sign
                )));
            }
            if !edge.weight.is_positive() {
                return Err(Error::MalformedRotation(format!(
                    "edge {e} has non-positive weight"
                )));
            }
        }
        let mut position = vec![usize::MAX; 2 * edges.len()];
        for (v, rot) in rotation.iter().enumerate() {
            for (i, &h) in rot.iter().enumerate() {
                if h.0 >= position.len() {
                    return Err(Error::MalformedRotation(format!(
                        "unknown half-edge {} at vertex {v}",
                        h.0
                    )));
                }
                if position[h.0] != usize::MAX {
                    return Err(Error::MalformedRotation(format!(
                        "half-edge {} listed twice",
                        h.0
                    )));
                }
                let edge = &edges[h.edge()];
                let owner = if h.end() == 0 { edge.u } else { edge.v };
                if owner != v {
                    return Err(Error::MalformedRotation(format!(
                        "half-edge {} listed at vertex {v} but belongs to {owner}",
                        h.0
                    )));
                }
                position[h.0] = i;
            }
        }
        if let Some(h) = position.iter().position(|&p| p == usize::MAX) {
            return Err(Error::MalformedRotation(format!(
                "half-edge {h} missing from rotations"
            )));
        }
        Ok(EmbeddedGraph {
            num_vertices,
            edges,
            rotation,
            position,
            cuts: BTreeMap::new(),
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn rotation(&self, v: usize) -> &[HalfEdge] {
        &self.rotation[v]
    }

    pub fn rotations(&self) -> &[Vec<HalfEdge>] {
        &self.rotation
    }

    /// Vertex at which a half-edge sits.
    pub fn tail(&self, h: HalfEdge) -> usize {
        let e = &self.edges[h.edge()];
        if h.end() == 0 {
            e.u
        } else {
            e.v
        }
    }

    /// Vertex at the other end of a half-edge's edge.
    pub fn head(&self, h: HalfEdge) -> usize {
        self.tail(h.opposite())
    }

    pub fn sign(&self, e: usize) -> i8 {
        self.edges[e].sign
    }

    pub fn weight(&self, e: usize) -> &Weight {
        &self.edges[e].weight
    }

    /// Next half-edge around the tail vertex in direction `orient` (`+1` forward).
    pub fn step(&self, h: HalfEdge, orient: i8) -> HalfEdge {
        let v = self.tail(h);
        let rot = &self.rotation[v];
        let n = rot.len();
        let p = self.position[h.0];
        if orient > 0 {
            rot[(p + 1) % n]
        } else {
            rot[(p + n - 1) % n]
        }
    }

    /// Half-edges strictly between `from` and `to` going around their common
    /// vertex in direction `orient`.
    pub fn between(&self, from: HalfEdge, to: HalfEdge, orient: i8) -> Vec<HalfEdge> {
        let mut out = Vec::new();
        let mut h = self.step(from, orient);
        while h != to {
            out.push(h);
            h = self.step(h, orient);
            if h == from {
                break;
            }
        }
        out
    }

    /// Incident edges of every vertex, sorted by edge id.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_vertices];
        for (e, edge) in self.edges.iter().enumerate() {
            adj[edge.u].push(e);
            adj[edge.v].push(e);
        }
        adj
    }

    pub fn other_end(&self, e: usize, v: usize) -> usize {
        let edge = &self.edges[e];
        if edge.u == v {
            edge.v
        } else {
            edge.u
        }
    }

    pub fn cuts(&self) -> &BTreeMap<String, EdgeSet> {
        &self.cuts
    }

    pub fn cut(&self, name: &str) -> Option<&EdgeSet> {
        self.cuts.get(name)
    }

    /// Attaches a named edge set. Whether it is a cocycle is checked by [`check_cuts`].
    pub fn with_cut(mut self, name: impl Into<String>, set: EdgeSet) -> Self {
        assert_eq!(set.len(), self.edges.len());
        self.cuts.insert(name.into(), set);
        self
    }

    pub fn without_cuts(mut self) -> Self {
        self.cuts.clear();
        self
    }

    pub fn with_weights(mut self, weights: Vec<Weight>) -> Result<Self> {
        if weights.len() != self.edges.len() {
            return Err(Error::PreconditionFailed(format!(
                "{} weights for {} edges",
                weights.len(),
                self.edges.len()
            )));
        }
        for (e, w) in weights.into_iter().enumerate() {
            if !w.is_positive() {
                return Err(Error::MalformedRotation(format!(
                    "edge {e} has non-positive weight"
                )));
            }
            self.edges[e].weight = w;
        }
        Ok(self)
    }

    /// Removes an edge; edge ids above it shift down by one. Cuts follow.
    pub fn remove_edge(&self, removed: usize) -> Result<EmbeddedGraph> {
        let remap = |h: HalfEdge| -> Option<HalfEdge> {
            match h.edge().cmp(&removed) {
                std::cmp::Ordering::Less => Some(h),
                std::cmp::Ordering::Equal => None,
                std::cmp::Ordering::Greater => Some(HalfEdge(h.0 - 2)),
            }
        };
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(e, _)| *e != removed)
            .map(|(_, edge)| edge.clone())
            .collect();
        let rotation = self
            .rotation
            .iter()
            .map(|rot| rot.iter().filter_map(|&h| remap(h)).collect())
            .collect();
        let mut g = EmbeddedGraph::new(self.num_vertices, edges, rotation)?;
        for (name, set) in &self.cuts {
            let ids = set
                .iter()
                .filter(|&e| e != removed)
                .map(|e| if e > removed { e - 1 } else { e });
            g.cuts
                .insert(name.clone(), EdgeSet::from_ids(g.num_edges(), ids));
        }
        Ok(g)
    }

    /// Adds a new edge from the tail of `at_u` to the tail of `at_v`, inserted in
    /// the rotations immediately after those half-edges (in direction `orient_u`
    /// / `orient_v`). Cuts listed in `cut_members` contain the new edge.
    pub fn insert_edge(
        &self,
        at_u: (HalfEdge, i8),
        at_v: (HalfEdge, i8),
        weight: Weight,
        sign: i8,
        cut_members: &[&str],
    ) -> Result<EmbeddedGraph> {
        let e = self.edges.len();
        let mut edges = self.edges.clone();
        let (u, v) = (self.tail(at_u.0), self.tail(at_v.0));
        edges.push(Edge { u, v, weight, sign });
        let mut rotation = self.rotation.clone();
        for (end, (h, orient)) in [(0, at_u), (1, at_v)] {
            let vertex = self.tail(h);
            let rot = &mut rotation[vertex];
            let p = rot
                .iter()
                .position(|&x| x == h)
                .expect("half-edge in rotation");
            let idx = if orient > 0 { p + 1 } else { p };
            rot.insert(idx, HalfEdge::new(e, end));
        }
        let mut g = EmbeddedGraph::new(self.num_vertices, edges, rotation)?;
        for (name, set) in &self.cuts {
            let mut ids = set.ids();
            if cut_members.contains(&name.as_str()) {
                ids.push(e);
            }
            g.cuts
                .insert(name.clone(), EdgeSet::from_ids(g.num_edges(), ids));
        }
        Ok(g)
    }

    /// Sum of weights over a set of edges, as a product `ν(D)`.
    pub fn weight_product(&self, edges: &[usize]) -> Weight {
        edges
            .iter()
            .fold(Weight::from_integer(1.into()), |acc, &e| {
                acc * &self.edges[e].weight
            })
    }
}

/// One step of a face boundary walk: leave the tail of `half` with local
/// orientation `orient`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceStep {
    pub half: HalfEdge,
    pub orient: i8,
}

pub type Face = Vec<FaceStep>;

/// Classification of a validated embedding.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceData {
    pub orientable: bool,
    pub euler_char: i64,
    /// Orientable genus `g` or non-orientable genus `h`.
    pub genus: u32,
    pub faces: Vec<Face>,
    /// `σ_v ∈ {±1}` with `σ_u σ_v sign(e) = +1` on every edge, when orientable.
    pub vertex_orientation: Option<Vec<i8>>,
    /// For every edge, the two `(face, position)` slots where it is traversed.
    pub edge_sides: Vec<[(usize, usize); 2]>,
}

impl SurfaceData {
    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    /// `dim H1(Σ; Z2)`.
    pub fn h1_dim(&self) -> usize {
        (2 - self.euler_char) as usize
    }

    /// Edges of a face boundary, with multiplicity.
    pub fn face_edges(&self, f: usize) -> impl Iterator<Item = usize> + '_ {
        self.faces[f].iter().map(|s| s.half.edge())
    }

    pub fn name(&self) -> String {
        match (self.orientable, self.genus) {
            (true, 0) => "sphere".into(),
            (true, 1) => "torus".into(),
            (true, g) => format!("orientable genus {g}"),
            (false, 1) => "projective plane".into(),
            (false, 2) => "Klein bottle".into(),
            (false, h) => format!("non-orientable genus {h}"),
        }
    }
}

/// Walks the face orbit starting at `start`; returns the steps.
fn trace_face(g: &EmbeddedGraph, start: FaceStep) -> Face {
    let mut face = Vec::new();
    let mut cur = start;
    loop {
        face.push(cur);
        let e = cur.half.edge();
        let arrive = cur.half.opposite();
        let orient = cur.orient * g.sign(e);
        cur = FaceStep {
            half: g.step(arrive, orient),
            orient,
        };
        if cur == start {
            return face;
        }
        debug_assert!(face.len() <= 4 * g.num_edges());
    }
}

fn state_index(s: FaceStep) -> usize {
    2 * s.half.0 + usize::from(s.orient < 0)
}

/// The same edge side traversed in the opposite direction.
fn reverse_state(g: &EmbeddedGraph, s: FaceStep) -> FaceStep {
    FaceStep {
        half: s.half.opposite(),
        orient: -s.orient * g.sign(s.half.edge()),
    }
}

pub fn trace_faces(g: &EmbeddedGraph) -> Result<Vec<Face>> {
    let m = g.num_edges();
    let mut used = vec![false; 4 * m];
    let mut faces = Vec::new();
    for h in 0..2 * m {
        for orient in [1i8, -1] {
            let start = FaceStep {
                half: HalfEdge(h),
                orient,
            };
            if used[state_index(start)] {
                continue;
            }
            let face = trace_face(g, start);
            for &s in &face {
                used[state_index(s)] = true;
            }
            for &s in &face {
                let r = state_index(reverse_state(g, s));
                if used[r] && face.iter().any(|x| state_index(*x) == r) {
                    return Err(Error::MalformedRotation(
                        "face walk is its own reverse".into(),
                    ));
                }
                used[r] = true;
            }
            faces.push(face);
        }
    }
    if m == 0 && g.num_vertices() == 1 {
        faces.push(Vec::new());
    }
    Ok(faces)
}

/// Connected components by BFS; returns a component id per vertex.
pub fn components(g: &EmbeddedGraph) -> (usize, Vec<usize>) {
    let adj = g.adjacency();
    let mut comp = vec![usize::MAX; g.num_vertices()];
    let mut count = 0;
    for s in 0..g.num_vertices() {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = count;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in &adj[v] {
                let w = g.other_end(e, v);
                if comp[w] == usize::MAX {
                    comp[w] = count;
                    queue.push_back(w);
                }
            }
        }
        count += 1;
    }
    (count, comp)
}

/// Solves `σ_u σ_v = twist(e) · sign(e)` for vertex signs; `twist` is `±1` per edge.
pub(crate) fn solve_vertex_signs(
    g: &EmbeddedGraph,
    twist: impl Fn(usize) -> i8,
) -> Option<Vec<i8>> {
    let adj = g.adjacency();
    let mut sigma = vec![0i8; g.num_vertices()];
    for s in 0..g.num_vertices() {
        if sigma[s] != 0 {
            continue;
        }
        sigma[s] = 1;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in &adj[v] {
                let w = g.other_end(e, v);
                let want = sigma[v] * twist(e) * g.sign(e);
                if sigma[w] == 0 {
                    sigma[w] = want;
                    queue.push_back(w);
                } else if sigma[w] != want {
                    return None;
                }
            }
        }
    }
    Some(sigma)
}

/// Traces faces and classifies the closed surface.
pub fn validate(g: &EmbeddedGraph) -> Result<SurfaceData> {
    if g.num_vertices() == 0 {
        return Err(Error::Disconnected);
    }
    let (ncomp, _) = components(g);
    if ncomp != 1 {
        return Err(Error::Disconnected);
    }
    let faces = trace_faces(g)?;
    let total: usize = faces.iter().map(Vec::len).sum();
    if total != 2 * g.num_edges() {
        return Err(Error::MalformedRotation(format!(
            "face walks cover {total} edge sides, expected {}",
            2 * g.num_edges()
        )));
    }
    let mut edge_sides = vec![[(usize::MAX, 0); 2]; g.num_edges()];
    let mut filled = vec![0usize; g.num_edges()];
    for (f, face) in faces.iter().enumerate() {
        for (i, s) in face.iter().enumerate() {
            let e = s.half.edge();
            edge_sides[e][filled[e]] = (f, i);
            filled[e] += 1;
        }
    }
    let euler_char = g.num_vertices() as i64 - g.num_edges() as i64 + faces.len() as i64;
    let vertex_orientation = solve_vertex_signs(g, |_| 1);
    let orientable = vertex_orientation.is_some();
    let genus = if orientable {
        if euler_char > 2 || euler_char % 2 != 0 {
            return Err(Error::MalformedRotation(format!(
                "impossible Euler characteristic {euler_char}"
            )));
        }
        ((2 - euler_char) / 2) as u32
    } else {
        if euler_char > 1 {
            return Err(Error::MalformedRotation(format!(
                "impossible Euler characteristic {euler_char}"
            )));
        }
        (2 - euler_char) as u32
    };
    Ok(SurfaceData {
        orientable,
        euler_char,
        genus,
        faces,
        vertex_orientation,
        edge_sides,
    })
}

/// Whether every face boundary meets `set` an even number of times.
pub fn first_odd_face(surface: &SurfaceData, set: &EdgeSet) -> Option<usize> {
    (0..surface.num_faces())
        .find(|&f| surface.face_edges(f).filter(|&e| set.contains(e)).count() % 2 == 1)
}

pub fn check_cocycle(surface: &SurfaceData, set: &EdgeSet) -> Result<()> {
    match first_odd_face(surface, set) {
        Some(f) => Err(Error::InvalidCocycle(f)),
        None => Ok(()),
    }
}

/// Every named cut must be a cocycle.
pub fn check_cuts(g: &EmbeddedGraph, surface: &SurfaceData) -> Result<()> {
    for (name, set) in g.cuts() {
        if first_odd_face(surface, set).is_some() {
            return Err(Error::NonCocycleCut(name.clone()));
        }
    }
    Ok(())
}

/// Whether `omega` represents `w1`: a cycle meets it oddly exactly when its
/// sign product is `-1`.
pub fn represents_w1(g: &EmbeddedGraph, omega: &EdgeSet) -> bool {
    cut_vertex_signs(g, omega).is_some()
}

/// Vertex signs making `(-1)^{ω(e)} sign(e)` a coboundary; these orient the
/// surface cut open along `ω`.
pub fn cut_vertex_signs(g: &EmbeddedGraph, omega: &EdgeSet) -> Option<Vec<i8>> {
    solve_vertex_signs(g, |e| if omega.contains(e) { -1 } else { 1 })
}

/// A canonical cut representing `w1`: the edges whose sign disagrees with a
/// BFS-propagated vertex orientation.
pub fn w1_cut(g: &EmbeddedGraph) -> EdgeSet {
    let adj = g.adjacency();
    let mut sigma = vec![0i8; g.num_vertices()];
    for s in 0..g.num_vertices() {
        if sigma[s] != 0 {
            continue;
        }
        sigma[s] = 1;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in &adj[v] {
                let w = g.other_end(e, v);
                if sigma[w] == 0 {
                    sigma[w] = sigma[v] * g.sign(e);
                    queue.push_back(w);
                }
            }
        }
    }
    EdgeSet::from_ids(
        g.num_edges(),
        (0..g.num_edges()).filter(|&e| {
            let edge = g.edge(e);
            sigma[edge.u] * sigma[edge.v] * edge.sign < 0
        }),
    )
}

/// The cut to use with `g`: its `"omega"` cut when present, otherwise the
/// canonical one.
pub fn default_omega(g: &EmbeddedGraph) -> EdgeSet {
    match g.cut("omega") {
        Some(omega) => omega.clone(),
        None => w1_cut(g),
    }
}

/// `(locally bipartite, bipartite, ℓ on the homology basis)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteFlags {
    pub locally_bipartite: bool,
    pub bipartite: bool,
    /// Length parity of each homology basis cycle; present only when locally bipartite.
    ell_on_basis: Option<u64>,
}

impl BipartiteFlags {
    /// `ℓ(α)`: length parity of any cycle in class `α`.
    pub fn ell(&self, class: Class) -> Result<u8> {
        match self.ell_on_basis {
            Some(mask) => Ok(crate::z2::parity(mask & class.0)),
            None => Err(Error::NotLocallyBipartite),
        }
    }

    pub fn ell_mask(&self) -> Option<u64> {
        self.ell_on_basis
    }
}

pub fn bipartite_flags(
    g: &EmbeddedGraph,
    surface: &SurfaceData,
    basis: &HomologyBasis,
) -> BipartiteFlags {
    let locally_bipartite = surface.faces.iter().all(|f| f.len() % 2 == 0);
    let adj = g.adjacency();
    let mut color = vec![u8::MAX; g.num_vertices()];
    let mut bipartite = true;
    for s in 0..g.num_vertices() {
        if color[s] != u8::MAX {
            continue;
        }
        color[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in &adj[v] {
                let w = g.other_end(e, v);
                if color[w] == u8::MAX {
                    color[w] = 1 - color[v];
                    queue.push_back(w);
                } else if color[w] == color[v] {
                    bipartite = false;
                }
            }
        }
    }
    let ell_on_basis = locally_bipartite.then(|| {
        basis
            .cycles
            .iter()
            .enumerate()
            .filter(|(_, c)| c.len() % 2 == 1)
            .fold(0u64, |acc, (i, _)| acc | 1 << i)
    });
    BipartiteFlags {
        locally_bipartite,
        bipartite,
        ell_on_basis,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    /// 4-cycle 0-1-2-3 in the plane.
    pub(crate) fn square_cycle() -> EmbeddedGraph {
        let edges = (0..4)
            .map(|i| Edge {
                u: i,
                v: (i + 1) % 4,
                weight: int(1),
                sign: 1,
            })
            .collect();
        // vertex i: half-edge of edge i (end 0) and edge i-1 (end 1)
        let rotation = (0..4)
            .map(|i| vec![HalfEdge::new(i, 0), HalfEdge::new((i + 3) % 4, 1)])
            .collect();
        EmbeddedGraph::new(4, edges, rotation).unwrap()
    }

    #[test]
    fn four_cycle_is_a_sphere() {
        let g = square_cycle();
        let s = validate(&g).unwrap();
        assert_eq!(s.num_faces(), 2);
        assert_eq!(s.euler_char, 2);
        assert!(s.orientable);
        assert_eq!(s.genus, 0);
    }

    #[test]
    fn loops_are_rejected() {
        let edges = vec![Edge {
            u: 0,
            v: 0,
            weight: int(1),
            sign: 1,
        }];
        let rotation = vec![vec![HalfEdge(0), HalfEdge(1)]];
        assert_eq!(
            EmbeddedGraph::new(1, edges, rotation),
            Err(Error::LoopEdge(0))
        );
    }

    #[test]
    fn missing_and_duplicated_half_edges_are_rejected() {
        let edges = vec![Edge {
            u: 0,
            v: 1,
            weight: int(1),
            sign: 1,
        }];
        let missing = vec![vec![HalfEdge(0)], vec![]];
        assert!(matches!(
            EmbeddedGraph::new(2, edges.clone(), missing),
            Err(Error::MalformedRotation(_))
        ));
        let dup = vec![vec![HalfEdge(0), HalfEdge(0)], vec![HalfEdge(1)]];
        assert!(matches!(
            EmbeddedGraph::new(2, edges.clone(), dup),
            Err(Error::MalformedRotation(_))
        ));
        let wrong = vec![vec![HalfEdge(1)], vec![HalfEdge(0)]];
        assert!(matches!(
            EmbeddedGraph::new(2, edges, wrong),
            Err(Error::MalformedRotation(_))
        ));
    }

    #[test]
    fn single_edge_is_a_sphere_with_one_face() {
        let edges = vec![Edge {
            u: 0,
            v: 1,
            weight: int(1),
            sign: 1,
        }];
        let g = EmbeddedGraph::new(2, edges, vec![vec![HalfEdge(0)], vec![HalfEdge(1)]]).unwrap();
        let s = validate(&g).unwrap();
        assert_eq!((s.num_faces(), s.euler_char), (1, 2));
        assert_eq!(s.faces[0].len(), 2);
    }

    #[test]
    fn twisted_cycle_is_projective_plane() {
        let mut g = square_cycle();
        g.edges[3].sign = -1;
        let s = validate(&g).unwrap();
        assert_eq!(s.num_faces(), 1);
        assert_eq!(s.faces[0].len(), 8);
        assert!(!s.orientable);
        assert_eq!(s.genus, 1);
        let omega = w1_cut(&g);
        assert_eq!(omega.count(), 1);
        assert!(represents_w1(&g, &omega));
        assert!(!represents_w1(&g, &EdgeSet::empty(4)));
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let edges = vec![
            Edge {
                u: 0,
                v: 1,
                weight: int(1),
                sign: 1,
            },
            Edge {
                u: 2,
                v: 3,
                weight: int(1),
                sign: 1,
            },
        ];
        let rotation = vec![
            vec![HalfEdge(0)],
            vec![HalfEdge(1)],
            vec![HalfEdge(2)],
            vec![HalfEdge(3)],
        ];
        let g = EmbeddedGraph::new(4, edges, rotation).unwrap();
        assert_eq!(validate(&g), Err(Error::Disconnected));
    }

    #[test]
    fn edge_removal_and_insertion_preserve_euler_characteristic_when_splitting_faces() {
        let g = square_cycle();
        let s = validate(&g).unwrap();
        // chord 0-2 inside face 0
        let face = &s.faces[0];
        let at0 = face.iter().position(|st| g.tail(st.half) == 0).unwrap();
        let at2 = face.iter().position(|st| g.tail(st.half) == 2).unwrap();
        let prev = |i: usize| face[(i + face.len() - 1) % face.len()];
        let a = (prev(at0).half.opposite(), prev(at0).orient);
        let b = (prev(at2).half.opposite(), prev(at2).orient);
        let h = g.insert_edge(a, b, int(1), 1, &[]).unwrap();
        let s2 = validate(&h).unwrap();
        assert_eq!(s2.num_faces(), 3);
        assert_eq!(s2.euler_char, 2);
        let back = h.remove_edge(4).unwrap();
        assert_eq!(validate(&back).unwrap().euler_char, 2);
    }
}
