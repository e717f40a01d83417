//! The orientation double cover of a graph on a non-orientable surface.
//!
//! Vertex `(v, c)` of the cover has id `v + c·V` for copy `c ∈ {0, 1}`. Edge
//! `e` lifts to `e` (starting in copy 0) and `e + E` (starting in copy 1);
//! lifts of edges in `ω` join the two copies. Copy `c` carries the base
//! rotation at `v`, reversed when `σ_v · (+1, −1)[c] = −1`, where `σ` orients
//! the base cut open along `ω`. All cover edges have sign `+1`.

use crate::dimer::Matching;
use crate::error::{Error, Result};
use crate::kasteleyn::Orientation;
use crate::pfaffian::check_perfect;
use crate::surface::{
    cut_vertex_signs, validate, ClosedWalk, Edge, EdgeSet, EmbeddedGraph, HalfEdge, SurfaceData,
};

#[derive(Clone, Debug)]
pub struct CoverMap {
    pub cover: EmbeddedGraph,
    pub surface: SurfaceData,
    pub omega: EdgeSet,
    /// Orientation signs of the base cut open along `ω`.
    pub sigma: Vec<i8>,
    base_vertices: usize,
    base_edges: usize,
}

impl CoverMap {
    pub fn base_vertex(&self, v: usize) -> usize {
        v % self.base_vertices
    }

    pub fn copy(&self, v: usize) -> u8 {
        (v / self.base_vertices) as u8
    }

    pub fn base_edge(&self, e: usize) -> usize {
        e % self.base_edges
    }

    /// Which lift (`0` or `1`) a cover edge is.
    pub fn lift_index(&self, e: usize) -> u8 {
        (e / self.base_edges) as u8
    }

    pub fn vertex_projection(&self) -> Vec<usize> {
        (0..2 * self.base_vertices)
            .map(|v| self.base_vertex(v))
            .collect()
    }

    pub fn edge_projection(&self) -> Vec<usize> {
        (0..2 * self.base_edges)
            .map(|e| self.base_edge(e))
            .collect()
    }

    /// Swaps the two copies.
    pub fn deck_vertex(&self, v: usize) -> usize {
        (v + self.base_vertices) % (2 * self.base_vertices)
    }

    pub fn deck_edge(&self, e: usize) -> usize {
        (e + self.base_edges) % (2 * self.base_edges)
    }

    /// Cover half-edge over `h` at the copy-`c` endpoint.
    pub fn lift_half(&self, h: HalfEdge, c: u8) -> HalfEdge {
        lift_half(&self.omega, self.base_edges, h, c)
    }

    /// Lift of a closed walk starting in copy `start`; a walk crossing `ω` an
    /// odd number of times is followed twice so that it closes up.
    pub fn lift_walk(&self, walk: &ClosedWalk, start: u8) -> ClosedWalk {
        let mut out = Vec::with_capacity(2 * walk.len());
        let mut c = start;
        loop {
            for &h in &walk.0 {
                out.push(self.lift_half(h, c));
                if self.omega.contains(h.edge()) {
                    c ^= 1;
                }
            }
            if c == start {
                return ClosedWalk(out);
            }
        }
    }

    /// Copy whose cover orientation agrees with local orientation `s` at `v`.
    pub fn copy_with_orientation(&self, v: usize, s: i8) -> u8 {
        if self.sigma[v] == s {
            0
        } else {
            1
        }
    }
}

/// Builds the orientation cover determined by a cut `ω` representing `w1`.
pub fn orientation_cover(g: &EmbeddedGraph, omega: &EdgeSet) -> Result<CoverMap> {
    let sigma = cut_vertex_signs(g, omega).ok_or(Error::NotW1Representative)?;
    let (nv, ne) = (g.num_vertices(), g.num_edges());
    let mut edges = Vec::with_capacity(2 * ne);
    for c in 0..2 {
        for (e, edge) in g.edges().iter().enumerate() {
            let vc = if omega.contains(e) { 1 - c } else { c };
            edges.push(Edge {
                u: edge.u + c * nv,
                v: edge.v + vc * nv,
                weight: edge.weight.clone(),
                sign: 1,
            });
        }
    }
    let mut rotation = Vec::with_capacity(2 * nv);
    for c in 0..2u8 {
        for v in 0..nv {
            let mut rot: Vec<HalfEdge> = g
                .rotation(v)
                .iter()
                .map(|&h| lift_half(omega, ne, h, c))
                .collect();
            let eps = if c == 0 { 1 } else { -1 };
            if sigma[v] * eps < 0 {
                rot.reverse();
            }
            rotation.push(rot);
        }
    }
    let cover = EmbeddedGraph::new(2 * nv, edges, rotation)?;
    let surface = if nv == 0 {
        SurfaceData {
            orientable: true,
            euler_char: 0,
            genus: 0,
            faces: Vec::new(),
            vertex_orientation: Some(Vec::new()),
            edge_sides: Vec::new(),
        }
    } else {
        let surface = validate(&cover).map_err(|e| match e {
            Error::Disconnected => Error::NotW1Representative,
            other => other,
        })?;
        if !surface.orientable {
            return Err(Error::NotW1Representative);
        }
        surface
    };
    Ok(CoverMap {
        cover,
        surface,
        omega: omega.clone(),
        sigma,
        base_vertices: nv,
        base_edges: ne,
    })
}

fn lift_half(omega: &EdgeSet, base_edges: usize, h: HalfEdge, c: u8) -> HalfEdge {
    let e = h.edge();
    let lift = if h.end() == 0 || !omega.contains(e) {
        c
    } else {
        1 - c
    };
    HalfEdge::new(e + lift as usize * base_edges, h.end())
}

/// `K̃`: lifts of `ω` edges keep `K`; other edges keep `K` in copy 0 and are
/// reversed in copy 1.
pub fn lift_orientation(cm: &CoverMap, k: &Orientation) -> Orientation {
    let ne = cm.base_edges;
    let bits = (0..2 * ne)
        .map(|e| {
            let base = e % ne;
            let keep = e < ne || cm.omega.contains(base);
            k.is_forward(base) == keep
        })
        .collect();
    Orientation::from_bits(bits)
}

/// Preimage of a perfect matching.
pub fn lift_matching(g: &EmbeddedGraph, cm: &CoverMap, d: &Matching) -> Result<Matching> {
    check_perfect(g, d)?;
    let ne = cm.base_edges;
    Ok(Matching::new(
        d.edges().iter().flat_map(|&e| [e, e + ne]).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn projective_square() -> EmbeddedGraph {
        let mut edges: Vec<Edge> = (0..4)
            .map(|i| Edge {
                u: i,
                v: (i + 1) % 4,
                weight: int(1),
                sign: 1,
            })
            .collect();
        edges[3].sign = -1;
        let rotation = (0..4)
            .map(|i| vec![HalfEdge::new(i, 0), HalfEdge::new((i + 3) % 4, 1)])
            .collect();
        EmbeddedGraph::new(4, edges, rotation).unwrap()
    }

    #[test]
    fn cover_of_projective_square_is_an_octagon_on_the_sphere() {
        let g = projective_square();
        let omega = EdgeSet::from_ids(4, [3]);
        let cm = orientation_cover(&g, &omega).unwrap();
        assert_eq!(cm.cover.num_vertices(), 8);
        assert_eq!(cm.surface.euler_char, 2);
        assert_eq!(cm.surface.num_faces(), 2);
        assert!(matches!(
            orientation_cover(&g, &EdgeSet::empty(4)),
            Err(Error::NotW1Representative)
        ));
    }

    #[test]
    fn lifted_orientation_flips_exactly_two_lifts() {
        let g = projective_square();
        let omega = EdgeSet::from_ids(4, [3]);
        let cm = orientation_cover(&g, &omega).unwrap();
        let k = Orientation::forward(4);
        let mut k2 = k.clone();
        k2.flip(1);
        let (a, b) = (lift_orientation(&cm, &k), lift_orientation(&cm, &k2));
        let diff: Vec<usize> = (0..8)
            .filter(|&e| a.is_forward(e) != b.is_forward(e))
            .collect();
        assert_eq!(diff, vec![1, 5]);
    }

    #[test]
    fn matching_lifts_to_preimage() {
        let g = projective_square();
        let cm = orientation_cover(&g, &EdgeSet::from_ids(4, [3])).unwrap();
        let d = Matching::new(vec![0, 2]);
        assert_eq!(
            lift_matching(&g, &cm, &d).unwrap(),
            Matching::new(vec![0, 2, 4, 6])
        );
        assert!(lift_matching(&g, &cm, &Matching::new(vec![0])).is_err());
    }
}
