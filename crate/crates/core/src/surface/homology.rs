//! Z2 homology and cohomology bases by tree–cotree decomposition.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{EdgeSet, EmbeddedGraph, HalfEdge, SurfaceData};
use crate::error::{Error, Result};
use crate::z2::{parity, Z2Matrix};

/// A homology class as a bitmask of coefficients on the basis cycles `b_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Class(pub u64);

impl Class {
    pub fn zero() -> Self {
        Class(0)
    }

    pub fn add(self, other: Class) -> Class {
        Class(self.0 ^ other.0)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Bit-string label with basis index 0 first, e.g. `"01"`.
    pub fn label(self, k: usize) -> String {
        (0..k)
            .map(|i| if self.0 >> i & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn parse_label(s: &str) -> Option<Class> {
        if s.len() > 64 {
            return None;
        }
        let mut mask = 0;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => mask |= 1 << i,
                _ => return None,
            }
        }
        Some(Class(mask))
    }
}

/// A closed walk, as the sequence of half-edges it leaves from. Consecutive
/// entries chain: the head of one is the tail of the next, cyclically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedWalk(pub Vec<HalfEdge>);

impl ClosedWalk {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn edge_set(&self, num_edges: usize) -> EdgeSet {
        EdgeSet::from_ids(num_edges, self.0.iter().map(|h| h.edge()))
    }

    /// Parity of the number of sign `-1` edges traversed.
    pub fn w1(&self, g: &EmbeddedGraph) -> u8 {
        (self.0.iter().filter(|h| g.sign(h.edge()) < 0).count() % 2) as u8
    }

    pub fn vertices(&self, g: &EmbeddedGraph) -> Vec<usize> {
        self.0.iter().map(|&h| g.tail(h)).collect()
    }

    pub fn is_closed(&self, g: &EmbeddedGraph) -> bool {
        let n = self.0.len();
        (0..n).all(|i| g.head(self.0[i]) == g.tail(self.0[(i + 1) % n]))
    }

    /// Whether no vertex repeats.
    pub fn is_simple(&self, g: &EmbeddedGraph) -> bool {
        let vs = self.vertices(g);
        vs.iter().collect::<BTreeSet<_>>().len() == vs.len()
    }
}

/// A basis of `H1(Σ; Z2)` together with a dual family of cocycles.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    /// Simple closed walks `b_1..b_k`.
    pub cycles: Vec<ClosedWalk>,
    /// Cocycles `γ_1..γ_k`.
    pub cocycles: Vec<EdgeSet>,
    /// `pairing[i][j] = |b_i ∩ γ_j| mod 2`.
    pub pairing: Z2Matrix,
    /// Mod-2 intersection form on the basis cycles.
    pub intersection: Z2Matrix,
    /// `w1(b_i)` as a bitmask.
    pub w1: u64,
    pairing_inv: Z2Matrix,
    /// For every edge, the set of cocycles containing it.
    edge_masks: Vec<u64>,
}

impl HomologyBasis {
    pub fn dim(&self) -> usize {
        self.cycles.len()
    }

    pub fn num_classes(&self) -> usize {
        1 << self.dim()
    }

    pub fn classes(&self) -> impl Iterator<Item = Class> {
        (0..1u64 << self.dim()).map(Class)
    }

    pub fn w1_of(&self, a: Class) -> u8 {
        parity(a.0 & self.w1)
    }

    pub fn intersect(&self, a: Class, b: Class) -> u8 {
        self.intersection.form(a.0, b.0)
    }

    pub fn w1_vector(&self) -> Vec<u8> {
        (0..self.dim()).map(|i| (self.w1 >> i & 1) as u8).collect()
    }

    /// Cocycle pairing vector `(|C ∩ γ_j| mod 2)_j`, without checking that `C` is a cycle.
    pub fn pairing_vector(&self, edges: impl IntoIterator<Item = usize>) -> u64 {
        edges.into_iter().fold(0, |acc, e| acc ^ self.edge_masks[e])
    }

    pub fn class_from_pairing(&self, y: u64) -> Class {
        Class(self.pairing_inv.left_mul(y))
    }

    /// Class of a closed walk (no degree check needed).
    pub fn walk_class(&self, walk: &ClosedWalk) -> Class {
        self.class_from_pairing(self.pairing_vector(walk.0.iter().map(|h| h.edge())))
    }

    /// Cocycle mask of one edge: bit `j` set when `e ∈ γ_j`.
    pub fn edge_mask(&self, e: usize) -> u64 {
        self.edge_masks[e]
    }
}

/// Homology class of a Z2 cycle given as an edge set.
pub fn cycle_class(g: &EmbeddedGraph, cycle: &EdgeSet, basis: &HomologyBasis) -> Result<Class> {
    let mut degree = vec![0u8; g.num_vertices()];
    for e in cycle.iter() {
        let edge = g.edge(e);
        degree[edge.u] ^= 1;
        degree[edge.v] ^= 1;
    }
    if let Some(v) = degree.iter().position(|&d| d == 1) {
        return Err(Error::NotACycle(v));
    }
    Ok(basis.class_from_pairing(basis.pairing_vector(cycle.iter())))
}

/// BFS spanning tree: parent half-edge (pointing towards the root) per vertex.
fn bfs_tree(
    g: &EmbeddedGraph,
    root: usize,
    adj: &[Vec<usize>],
) -> (Vec<Option<HalfEdge>>, Vec<usize>, Vec<bool>) {
    let n = g.num_vertices();
    let mut parent = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    let mut in_tree = vec![false; g.num_edges()];
    depth[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &e in &adj[v] {
            let w = g.other_end(e, v);
            if depth[w] == usize::MAX {
                depth[w] = depth[v] + 1;
                let end = if g.edge(e).u == w { 0 } else { 1 };
                parent[w] = Some(HalfEdge::new(e, end));
                in_tree[e] = true;
                queue.push_back(w);
            }
        }
    }
    (parent, depth, in_tree)
}

/// Closed walk: traverse `e` from `u` to `v`, then return to `u` along the tree.
fn fundamental_walk(
    g: &EmbeddedGraph,
    e: usize,
    parent: &[Option<HalfEdge>],
    depth: &[usize],
) -> ClosedWalk {
    let (u, v) = (g.edge(e).u, g.edge(e).v);
    // climb from both ends to the common ancestor
    let (mut a, mut b) = (v, u);
    let mut down_from_v = Vec::new();
    let mut up_to_u = Vec::new();
    while a != b {
        if depth[a] >= depth[b] {
            let h = parent[a].expect("non-root has a parent");
            down_from_v.push(h);
            a = g.head(h);
        } else {
            let h = parent[b].expect("non-root has a parent");
            up_to_u.push(h.opposite());
            b = g.head(h);
        }
    }
    let mut walk = vec![HalfEdge::new(e, 0)];
    walk.extend(down_from_v);
    walk.extend(up_to_u.into_iter().rev());
    ClosedWalk(walk)
}

/// Fundamental cycles of a BFS tree rooted at `root`, one per non-tree edge.
pub fn fundamental_cycles(g: &EmbeddedGraph, root: usize) -> Vec<ClosedWalk> {
    let adj = g.adjacency();
    let (parent, depth, in_tree) = bfs_tree(g, root, &adj);
    (0..g.num_edges())
        .filter(|&e| !in_tree[e])
        .map(|e| fundamental_walk(g, e, &parent, &depth))
        .collect()
}

/// Distinct simple cycles gathered from BFS trees at every root.
pub fn simple_cycles(g: &EmbeddedGraph) -> Vec<ClosedWalk> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for root in 0..g.num_vertices() {
        for walk in fundamental_cycles(g, root) {
            let mut key: Vec<usize> = walk.0.iter().map(|h| h.edge()).collect();
            key.sort_unstable();
            if seen.insert(key) {
                out.push(walk);
            }
        }
    }
    out
}

/// Calls `visit` on closed trails that trace simple closed curves on the
/// surface, until it returns `false`: each vertex is passed at most twice,
/// and the two passages through a vertex must not cross in its rotation.
/// Simple cycles come first in depth-first order from each lowest vertex;
/// the lowest vertex may itself be passed a second time.
pub fn for_each_simple_curve(g: &EmbeddedGraph, mut visit: impl FnMut(&ClosedWalk) -> bool) {
    struct Search<'a> {
        g: &'a EmbeddedGraph,
        adj: Vec<Vec<usize>>,
        visits: Vec<u8>,
        used: Vec<bool>,
        path: Vec<HalfEdge>,
        max_visits: u8,
    }

    impl Search<'_> {
        fn go(
            &mut self,
            start: usize,
            v: usize,
            visit: &mut dyn FnMut(&ClosedWalk) -> bool,
        ) -> bool {
            for i in 0..self.adj[v].len() {
                let e = self.adj[v][i];
                if self.used[e] {
                    continue;
                }
                let h = if self.g.edge(e).u == v {
                    HalfEdge::new(e, 0)
                } else {
                    HalfEdge::new(e, 1)
                };
                let w = self.g.head(h);
                self.path.push(h);
                self.used[e] = true;
                let mut more = true;
                if w == start && self.path.len() > 1 {
                    let walk = ClosedWalk(self.path.clone());
                    if non_crossing(self.g, &walk) {
                        more = visit(&walk);
                    }
                }
                let limit = self.max_visits - u8::from(w == start);
                if more && w >= start && self.visits[w] < limit {
                    self.visits[w] += 1;
                    more = self.go(start, w, visit);
                    self.visits[w] -= 1;
                }
                self.used[e] = false;
                self.path.pop();
                if !more {
                    return false;
                }
            }
            true
        }
    }

    let mut search = Search {
        g,
        adj: g.adjacency(),
        visits: vec![0; g.num_vertices()],
        used: vec![false; g.num_edges()],
        path: Vec::new(),
        max_visits: 1,
    };
    for max_visits in [1, 2] {
        search.max_visits = max_visits;
        for start in 0..g.num_vertices() {
            if !search.go(start, start, &mut visit) {
                return;
            }
        }
    }
}

/// Whether no two passages of a closed walk through a vertex cross.
fn non_crossing(g: &EmbeddedGraph, walk: &ClosedWalk) -> bool {
    let n = walk.len();
    let mut passages: BTreeMap<usize, Vec<(HalfEdge, HalfEdge)>> = BTreeMap::new();
    for j in 0..n {
        let incoming = walk.0[(j + n - 1) % n].opposite();
        passages
            .entry(g.tail(walk.0[j]))
            .or_default()
            .push((incoming, walk.0[j]));
    }
    passages.iter().all(|(&x, ps)| {
        let rot = g.rotation(x);
        let pos = |h: HalfEdge| {
            rot.iter()
                .position(|&r| r == h)
                .expect("half-edge at vertex")
        };
        ps.iter().enumerate().all(|(i, &(a1, b1))| {
            ps[i + 1..].iter().all(|&(a2, b2)| {
                let (p, q) = (pos(a1).min(pos(b1)), pos(a1).max(pos(b1)));
                let inside = |h: HalfEdge| (p < pos(h)) && (pos(h) < q);
                inside(a2) == inside(b2)
            })
        })
    })
}

/// Cocycle dual to a curve pushed off a simple closed walk to one side.
///
/// Along the walk the side is carried by the local orientation, which flips
/// across sign `-1` edges. When the walk is one-sided the push-off switches
/// sides at the start vertex and so meets the walk once.
pub fn push_off(g: &EmbeddedGraph, walk: &ClosedWalk) -> EdgeSet {
    let mut set = EdgeSet::empty(g.num_edges());
    let n = walk.len();
    if n == 0 {
        return set;
    }
    let mut orient = vec![1i8; n + 1];
    for j in 0..n {
        orient[j + 1] = orient[j] * g.sign(walk.0[j].edge());
    }
    for j in 1..n {
        let incoming = walk.0[j - 1].opposite();
        for h in g.between(incoming, walk.0[j], orient[j]) {
            set.toggle(h.edge());
        }
    }
    let incoming = walk.0[n - 1].opposite();
    if orient[n] != orient[0] {
        set.toggle(incoming.edge());
    }
    for h in g.between(incoming, walk.0[0], orient[0]) {
        set.toggle(h.edge());
    }
    set
}

/// Tree–cotree basis: BFS tree from vertex 0, BFS dual tree from face 0 over
/// the remaining edges; the leftover edges index the basis.
pub fn homology_basis(g: &EmbeddedGraph, surface: &SurfaceData) -> Result<HomologyBasis> {
    if super::components(g).0 != 1 {
        return Err(Error::Disconnected);
    }
    let m = g.num_edges();
    let adj = g.adjacency();
    let (parent, depth, in_tree) = bfs_tree(g, 0, &adj);

    let nf = surface.num_faces();
    let mut dual_adj = vec![Vec::new(); nf];
    for e in (0..m).filter(|&e| !in_tree[e]) {
        let [(f1, _), (f2, _)] = surface.edge_sides[e];
        dual_adj[f1].push(e);
        if f2 != f1 {
            dual_adj[f2].push(e);
        }
    }
    let face_of = |e: usize, f: usize| {
        let [(f1, _), (f2, _)] = surface.edge_sides[e];
        if f1 == f {
            f2
        } else {
            f1
        }
    };
    let mut dual_parent: Vec<Option<usize>> = vec![None; nf];
    let mut dual_depth = vec![usize::MAX; nf];
    let mut in_cotree = vec![false; m];
    if nf > 0 {
        dual_depth[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(f) = queue.pop_front() {
            for &e in &dual_adj[f] {
                let h = face_of(e, f);
                if dual_depth[h] == usize::MAX {
                    dual_depth[h] = dual_depth[f] + 1;
                    dual_parent[h] = Some(e);
                    in_cotree[e] = true;
                    queue.push_back(h);
                }
            }
        }
    }

    let leftover: Vec<usize> = (0..m).filter(|&e| !in_tree[e] && !in_cotree[e]).collect();
    let k = leftover.len();
    if k != surface.h1_dim() {
        return Err(Error::MalformedRotation(format!(
            "tree-cotree left {k} edges, expected {}",
            surface.h1_dim()
        )));
    }
    if k > 63 {
        return Err(Error::UnsupportedSpec(format!(
            "first homology of dimension {k} is too large"
        )));
    }

    let cycles: Vec<ClosedWalk> = leftover
        .iter()
        .map(|&e| fundamental_walk(g, e, &parent, &depth))
        .collect();
    let cocycles: Vec<EdgeSet> = leftover
        .iter()
        .map(|&e| {
            let mut set = EdgeSet::from_ids(m, [e]);
            let [(f1, _), (f2, _)] = surface.edge_sides[e];
            let (mut a, mut b) = (f1, f2);
            while a != b {
                if dual_depth[a] >= dual_depth[b] {
                    let t = dual_parent[a].expect("non-root face has a parent");
                    set.toggle(t);
                    a = face_of(t, a);
                } else {
                    let t = dual_parent[b].expect("non-root face has a parent");
                    set.toggle(t);
                    b = face_of(t, b);
                }
            }
            set
        })
        .collect();

    let mut edge_masks = vec![0u64; m];
    for (j, set) in cocycles.iter().enumerate() {
        for e in set.iter() {
            edge_masks[e] |= 1 << j;
        }
    }
    let mut pairing = Z2Matrix::zeros(k, k);
    for (i, b) in cycles.iter().enumerate() {
        let y = b.0.iter().fold(0u64, |acc, h| acc ^ edge_masks[h.edge()]);
        for j in 0..k {
            pairing.set(i, j, y >> j & 1 == 1);
        }
    }
    let pairing_inv = pairing
        .inverse()
        .ok_or_else(|| Error::MalformedRotation("cycle-cocycle pairing is singular".into()))?;

    let mut intersection = Z2Matrix::zeros(k, k);
    for (l, bl) in cycles.iter().enumerate() {
        let delta = push_off(g, bl);
        for (i, bi) in cycles.iter().enumerate() {
            intersection.set(i, l, bi.edge_set(m).pairing(&delta) == 1);
        }
    }
    let w1 = cycles
        .iter()
        .enumerate()
        .filter(|(_, b)| b.w1(g) == 1)
        .fold(0u64, |acc, (i, _)| acc | 1 << i);

    Ok(HomologyBasis {
        cycles,
        cocycles,
        pairing,
        intersection,
        w1,
        pairing_inv,
        edge_masks,
    })
}
