//! Kasteleyn orientations relative to a cut `ω` representing `w1`.
//!
//! The parity condition lives on the orientation cover: a face of the base is
//! good when one (equivalently, each) of its lifts has an odd number of edges
//! oriented along the clockwise boundary walk, with the lifted orientation
//! kept in the first copy and reversed on internal edges of the second.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::surface::{
    check_cocycle, cut_vertex_signs, EdgeSet, EmbeddedGraph, HalfEdge, SurfaceData,
};

/// Per-edge direction: `true` when the edge points from its stored `u` to `v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Orientation(Vec<bool>);

impl Orientation {
    /// Every edge directed `u → v`.
    pub fn forward(num_edges: usize) -> Self {
        Orientation(vec![true; num_edges])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Orientation(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_forward(&self, e: usize) -> bool {
        self.0[e]
    }

    pub fn flip(&mut self, e: usize) {
        self.0[e] = !self.0[e];
    }

    /// Whether the edge of `h` points away from the tail of `h`.
    pub fn leaves(&self, h: HalfEdge) -> bool {
        self.0[h.edge()] == (h.end() == 0)
    }

    /// `ε^K_{ab}(e)`: `+1` if `e` is directed from `a` to `b`.
    pub fn epsilon(&self, g: &EmbeddedGraph, e: usize, a: usize) -> i8 {
        let from_u = g.edge(e).u == a;
        if self.0[e] == from_u {
            1
        } else {
            -1
        }
    }

    pub fn flipped_on(&self, set: &EdgeSet) -> Orientation {
        let mut k = self.clone();
        for e in set.iter() {
            k.flip(e);
        }
        k
    }
}

/// Lift of a base face walk to the cover: the copy (0 or 1) occupied at each step.
pub(crate) fn lift_face_copies(
    g: &EmbeddedGraph,
    face: &[crate::surface::FaceStep],
    omega: &EdgeSet,
    sigma: &[i8],
) -> Vec<u8> {
    let mut copies = Vec::with_capacity(face.len());
    let Some(first) = face.first() else {
        return copies;
    };
    // copy c has cover orientation σ_v · (+1, -1)[c]
    let mut c: u8 = if sigma[g.tail(first.half)] == first.orient {
        0
    } else {
        1
    };
    for step in face {
        copies.push(c);
        if omega.contains(step.half.edge()) {
            c ^= 1;
        }
    }
    copies
}

/// `d(f) = (number of lifted edges oriented along the walk + 1) mod 2`.
pub fn face_defects(
    g: &EmbeddedGraph,
    surface: &SurfaceData,
    omega: &EdgeSet,
    k: &Orientation,
) -> Result<Vec<u8>> {
    let sigma = cut_vertex_signs(g, omega).ok_or(Error::NotW1Representative)?;
    Ok(surface
        .faces
        .iter()
        .map(|face| {
            let copies = lift_face_copies(g, face, omega, &sigma);
            let along = face
                .iter()
                .zip(&copies)
                .filter(|(step, &c)| {
                    let e = step.half.edge();
                    let reversed = !omega.contains(e) && c == 1;
                    k.leaves(step.half) != reversed
                })
                .count();
            ((along + 1) % 2) as u8
        })
        .collect())
}

pub fn is_kasteleyn(
    g: &EmbeddedGraph,
    surface: &SurfaceData,
    omega: &EdgeSet,
    k: &Orientation,
) -> Result<bool> {
    Ok(face_defects(g, surface, omega, k)?.iter().all(|&d| d == 0))
}

/// Starting from all edges forward, repairs face defects along a BFS spanning
/// tree of the dual graph rooted at face 0, sweeping leaves to root.
pub fn find_kasteleyn(
    g: &EmbeddedGraph,
    surface: &SurfaceData,
    omega: &EdgeSet,
) -> Result<Orientation> {
    if g.num_vertices() % 2 == 1 {
        return Err(Error::OddVertexCount(g.num_vertices()));
    }
    let mut k = Orientation::forward(g.num_edges());
    let mut defects = face_defects(g, surface, omega, &k)?;
    let nf = surface.num_faces();
    if nf == 0 {
        return Ok(k);
    }
    let mut dual_adj = vec![Vec::new(); nf];
    for (e, sides) in surface.edge_sides.iter().enumerate() {
        let (f1, f2) = (sides[0].0, sides[1].0);
        if f1 != f2 {
            dual_adj[f1].push((e, f2));
            dual_adj[f2].push((e, f1));
        }
    }
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; nf];
    let mut seen = vec![false; nf];
    let mut order = Vec::with_capacity(nf);
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(f) = queue.pop_front() {
        order.push(f);
        for &(e, h) in &dual_adj[f] {
            if !seen[h] {
                seen[h] = true;
                parent[h] = Some((e, f));
                queue.push_back(h);
            }
        }
    }
    for &f in order.iter().rev() {
        if defects[f] == 1 {
            if let Some((e, p)) = parent[f] {
                k.flip(e);
                defects[f] = 0;
                defects[p] ^= 1;
            }
        }
    }
    debug_assert_eq!(defects[0], 0, "defect parity must vanish for even V");
    if defects.contains(&1) {
        return Err(Error::PreconditionFailed(
            "face defects could not be repaired".into(),
        ));
    }
    Ok(k)
}

/// Reverses `k` on the cocycle `gamma`; face parities are unchanged.
pub fn flip_cocycle(
    surface: &SurfaceData,
    k: &Orientation,
    gamma: &EdgeSet,
) -> Result<Orientation> {
    check_cocycle(surface, gamma)?;
    Ok(k.flipped_on(gamma))
}

/// Moves the cut across vertex `v`: `ω` is toggled on the edges at `v`, and
/// `k` reversed on those edges at `v` that were in `ω`. Then
/// `Pf(A^{K′,ω′}) = i·Pf(A^{K,ω})`.
///
/// Face parities are measured against the orientation of the cut-open
/// surface that is positive at vertex 0. Moving the cut across vertex 0
/// mirrors that reference, so there `K′` passes [`face_defects`] only after
/// reversing every edge, which changes faces of odd length.
pub fn move_cut(
    g: &EmbeddedGraph,
    omega: &EdgeSet,
    k: &Orientation,
    v: usize,
) -> (EdgeSet, Orientation) {
    let mut omega2 = omega.clone();
    let mut k2 = k.clone();
    for &h in g.rotation(v) {
        let e = h.edge();
        omega2.toggle(e);
        if omega.contains(e) {
            k2.flip(e);
        }
    }
    (omega2, k2)
}
