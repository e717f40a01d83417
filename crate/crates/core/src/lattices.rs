//! Lattice generators on the plane, cylinder, torus, Möbius band and Klein
//! bottle.
//!
//! An `m × n` lattice has `m` rows (row 0 on top) and `n` columns; the vertex
//! in row `r`, column `c` has id `r·n + c`. The horizontal sides are glued
//! periodically on the cylinder and torus, and with a flip `r ↦ m−1−r` on the
//! Möbius band and Klein bottle. The vertical sides are glued periodically on
//! the torus and Klein bottle and left free otherwise. Free boundary circles
//! become disc faces, so every generated surface is closed.
//!
//! The edges crossing a flipped side carry sign `-1` and form the `"omega"`
//! cut. Cuts `"horizontal_seam"` and `"vertical_seam"` (edges crossing the
//! horizontal / vertical gluing) are attached whenever they are cocycles.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::scalar::{int, Weight};
use crate::surface::{check_cuts, validate, Edge, EdgeSet, EmbeddedGraph, HalfEdge, SurfaceData};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Square,
    Hexagonal,
    SquareOctagon,
    Triangular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Surface {
    Plane,
    Cylinder,
    Torus,
    Mobius,
    Klein,
}

impl Surface {
    fn wraps_horizontally(self) -> bool {
        !matches!(self, Surface::Plane)
    }

    fn flipped(self) -> bool {
        matches!(self, Surface::Mobius | Surface::Klein)
    }

    fn wraps_vertically(self) -> bool {
        matches!(self, Surface::Torus | Surface::Klein)
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "square" => Ok(Family::Square),
            "hexagonal" | "hex" => Ok(Family::Hexagonal),
            "square-octagon" | "square_octagon" => Ok(Family::SquareOctagon),
            "triangular" => Ok(Family::Triangular),
            other => Err(format!("unknown lattice family `{other}`")),
        }
    }
}

impl std::str::FromStr for Surface {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "plane" => Ok(Surface::Plane),
            "cylinder" => Ok(Surface::Cylinder),
            "torus" => Ok(Surface::Torus),
            "mobius" | "möbius" => Ok(Surface::Mobius),
            "klein" => Ok(Surface::Klein),
            other => Err(format!("unknown surface `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Weights {
    Uniform,
    /// Horizontal edges get `x`, vertical edges `y`; everything else 1.
    Xy(Weight, Weight),
    /// As `Xy`, with diagonals and square-octagon cell edges weighted `z`.
    Xyz(Weight, Weight, Weight),
    /// One weight per generated edge, in edge-id order.
    PerEdge(Vec<Weight>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSpec {
    pub family: Family,
    pub surface: Surface,
    pub rows: usize,
    pub cols: usize,
    pub weights: Weights,
}

impl LatticeSpec {
    pub fn new(family: Family, surface: Surface, rows: usize, cols: usize) -> Self {
        LatticeSpec {
            family,
            surface,
            rows,
            cols,
            weights: Weights::Uniform,
        }
    }

    pub fn square(surface: Surface, rows: usize, cols: usize) -> Self {
        Self::new(Family::Square, surface, rows, cols)
    }

    pub fn with_weights(mut self, weights: Weights) -> Self {
        self.weights = weights;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Horizontal,
    Vertical,
    Diagonal,
    /// Edge of a square cell in the square-octagon lattice.
    Cell,
}

/// A generated lattice with its classification and per-edge metadata.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub spec: LatticeSpec,
    pub graph: EmbeddedGraph,
    pub surface: SurfaceData,
    pub kinds: Vec<EdgeKind>,
    /// `(row, column)` of each vertex; square-octagon vertices report their cell.
    pub coords: Vec<(usize, usize)>,
}

struct Proto {
    u: usize,
    v: usize,
    angle_u: i32,
    angle_v: i32,
    sign: i8,
    kind: EdgeKind,
    hwrap: bool,
    vwrap: bool,
}

struct Builder {
    num_vertices: usize,
    edges: Vec<Proto>,
}

const E: i32 = 0;
const NE: i32 = 45;
const N: i32 = 90;
const NW: i32 = 135;
const W: i32 = 180;
const SW: i32 = 225;
const S: i32 = 270;
const SE: i32 = 315;

impl Builder {
    fn new(num_vertices: usize) -> Self {
        Builder {
            num_vertices,
            edges: Vec::new(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn edge(
        &mut self,
        u: usize,
        v: usize,
        angle_u: i32,
        angle_v: i32,
        sign: i8,
        kind: EdgeKind,
        hwrap: bool,
        vwrap: bool,
    ) -> Result<()> {
        if u == v {
            return Err(Error::UnsupportedSpec(format!(
                "identification creates a loop at vertex {u}"
            )));
        }
        self.edges.push(Proto {
            u,
            v,
            angle_u,
            angle_v,
            sign,
            kind,
            hwrap,
            vwrap,
        });
        Ok(())
    }

    fn finish(self, spec: &LatticeSpec, coords: Vec<(usize, usize)>) -> Result<Lattice> {
        let weights = assign_weights(&spec.weights, &self.edges)?;
        let mut incident: Vec<Vec<(i32, HalfEdge)>> = vec![Vec::new(); self.num_vertices];
        for (e, p) in self.edges.iter().enumerate() {
            incident[p.u].push((p.angle_u, HalfEdge::new(e, 0)));
            incident[p.v].push((p.angle_v, HalfEdge::new(e, 1)));
        }
        let rotation = incident
            .into_iter()
            .enumerate()
            .map(|(vertex, mut hs)| {
                hs.sort();
                if hs.windows(2).any(|w| w[0].0 == w[1].0) {
                    return Err(Error::UnsupportedSpec(format!(
                        "two edges leave vertex {vertex} in the same direction"
                    )));
                }
                Ok(hs.into_iter().map(|(_, h)| h).collect())
            })
            .collect::<Result<Vec<Vec<HalfEdge>>>>()?;
        let edges = self
            .edges
            .iter()
            .zip(weights)
            .map(|(p, weight)| Edge {
                u: p.u,
                v: p.v,
                weight,
                sign: p.sign,
            })
            .collect();
        let mut graph = EmbeddedGraph::new(self.num_vertices, edges, rotation)?;
        let m = graph.num_edges();
        let collect = |f: &dyn Fn(&Proto) -> bool| {
            EdgeSet::from_ids(m, (0..m).filter(|&e| f(&self.edges[e])))
        };
        let hseam = collect(&|p| p.hwrap);
        let vseam = collect(&|p| p.vwrap);
        let omega = if spec.surface.flipped() {
            hseam.clone()
        } else {
            EdgeSet::empty(m)
        };
        let surface = validate(&graph)?;
        graph = graph.with_cut("omega", omega);
        for (name, set) in [("horizontal_seam", hseam), ("vertical_seam", vseam)] {
            if !set.is_empty() && crate::surface::first_odd_face(&surface, &set).is_none() {
                graph = graph.with_cut(name, set);
            }
        }
        check_cuts(&graph, &surface)?;
        Ok(Lattice {
            spec: spec.clone(),
            graph,
            surface,
            kinds: self.edges.iter().map(|p| p.kind).collect(),
            coords,
        })
    }
}

fn assign_weights(weights: &Weights, edges: &[Proto]) -> Result<Vec<Weight>> {
    let one = int(1);
    match weights {
        Weights::Uniform => Ok(vec![one; edges.len()]),
        Weights::Xy(x, y) => Ok(edges
            .iter()
            .map(|p| match p.kind {
                EdgeKind::Horizontal => x.clone(),
                EdgeKind::Vertical => y.clone(),
                _ => one.clone(),
            })
            .collect()),
        Weights::Xyz(x, y, z) => Ok(edges
            .iter()
            .map(|p| match p.kind {
                EdgeKind::Horizontal => x.clone(),
                EdgeKind::Vertical => y.clone(),
                _ => z.clone(),
            })
            .collect()),
        Weights::PerEdge(list) => {
            if list.len() != edges.len() {
                return Err(Error::UnsupportedSpec(format!(
                    "{} weights given for {} edges",
                    list.len(),
                    edges.len()
                )));
            }
            Ok(list.clone())
        }
    }
}

/// Builds the lattice described by `spec`.
pub fn generate(spec: &LatticeSpec) -> Result<Lattice> {
    if spec.rows == 0 || spec.cols == 0 {
        return Err(Error::UnsupportedSpec(
            "rows and columns must be at least 1".into(),
        ));
    }
    match spec.family {
        Family::Square => grid(spec, |_, _| true, |_, _| None),
        Family::Triangular => {
            if !matches!(spec.surface, Surface::Plane | Surface::Mobius) {
                return Err(Error::UnsupportedSpec(
                    "triangular lattices are generated on the plane and Möbius band".into(),
                ));
            }
            if spec.surface == Surface::Mobius && spec.rows.is_multiple_of(2) {
                return Err(Error::UnsupportedSpec(
                    "a triangular Möbius lattice needs an odd number of rows".into(),
                ));
            }
            let upper = (spec.rows.saturating_sub(1)) / 2;
            grid(spec, |_, _| true, move |r, _| Some(r < upper))
        }
        Family::Hexagonal => {
            match spec.surface {
                Surface::Plane => {}
                Surface::Cylinder if spec.cols.is_multiple_of(2) => {}
                Surface::Mobius if spec.cols % 2 == spec.rows % 2 => {}
                _ => {
                    return Err(Error::UnsupportedSpec(
                        "hexagonal lattices need an even period on the cylinder and matching row/column parity on the Möbius band"
                            .into(),
                    ))
                }
            }
            grid(spec, |r, c| (r + c) % 2 == 0, |_, _| None)
        }
        Family::SquareOctagon => square_octagon(spec),
    }
}

/// Rectangular grid with optional missing vertical rungs and diagonals.
/// `diagonal(r, c)` returns `Some(true)` for a `\` diagonal in the cell below
/// and right of `(r, c)`, `Some(false)` for `/`.
fn grid(
    spec: &LatticeSpec,
    rung: impl Fn(usize, usize) -> bool,
    diagonal: impl Fn(usize, usize) -> Option<bool>,
) -> Result<Lattice> {
    let (m, n) = (spec.rows, spec.cols);
    let id = |r: usize, c: usize| r * n + c;
    let mut b = Builder::new(m * n);
    let surf = spec.surface;
    let flip_sign: i8 = if surf.flipped() { -1 } else { 1 };
    let image_row = |r: usize| if surf.flipped() { m - 1 - r } else { r };
    for r in 0..m {
        for c in 0..n {
            if c + 1 < n {
                b.edge(
                    id(r, c),
                    id(r, c + 1),
                    E,
                    W,
                    1,
                    EdgeKind::Horizontal,
                    false,
                    false,
                )?;
            } else if surf.wraps_horizontally() {
                b.edge(
                    id(r, c),
                    id(image_row(r), 0),
                    E,
                    W,
                    flip_sign,
                    EdgeKind::Horizontal,
                    true,
                    false,
                )?;
            }
            if r + 1 < m {
                if rung(r, c) {
                    b.edge(
                        id(r, c),
                        id(r + 1, c),
                        S,
                        N,
                        1,
                        EdgeKind::Vertical,
                        false,
                        false,
                    )?;
                }
            } else if surf.wraps_vertically() && m > 1 && rung(r, c) {
                b.edge(id(r, c), id(0, c), S, N, 1, EdgeKind::Vertical, false, true)?;
            }
        }
    }
    for r in 0..m.saturating_sub(1) {
        for c in 0..n {
            let Some(back) = diagonal(r, c) else { continue };
            let wrap = c + 1 == n;
            if wrap && !surf.wraps_horizontally() {
                continue;
            }
            let sign = if wrap { flip_sign } else { 1 };
            let (right_top, right_bottom) = if wrap {
                (id(image_row(r), 0), id(image_row(r + 1), 0))
            } else {
                (id(r, c + 1), id(r + 1, c + 1))
            };
            // A flipped wrap turns the right column upside down.
            let (nw_angle, sw_angle) = if wrap && surf.flipped() {
                (SW, NW)
            } else {
                (NW, SW)
            };
            if back {
                b.edge(
                    id(r, c),
                    right_bottom,
                    SE,
                    nw_angle,
                    sign,
                    EdgeKind::Diagonal,
                    wrap,
                    false,
                )?;
            } else {
                b.edge(
                    id(r + 1, c),
                    right_top,
                    NE,
                    sw_angle,
                    sign,
                    EdgeKind::Diagonal,
                    wrap,
                    false,
                )?;
            }
        }
    }
    let coords = (0..m * n).map(|v| (v / n, v % n)).collect();
    b.finish(spec, coords)
}

/// Cells of four vertices `n, e, s, w` joined in a square, with connectors
/// between neighbouring cells.
fn square_octagon(spec: &LatticeSpec) -> Result<Lattice> {
    let (p, q) = (spec.rows, spec.cols);
    let surf = spec.surface;
    if surf.wraps_vertically() {
        return Err(Error::UnsupportedSpec(
            "square-octagon lattices are generated on the plane, cylinder and Möbius band".into(),
        ));
    }
    let id = |i: usize, j: usize, k: usize| 4 * (i * q + j) + k;
    let (vn, ve, vs, vw) = (0, 1, 2, 3);
    let mut b = Builder::new(4 * p * q);
    let flip_sign: i8 = if surf.flipped() { -1 } else { 1 };
    for i in 0..p {
        for j in 0..q {
            b.edge(
                id(i, j, vn),
                id(i, j, ve),
                SE,
                NW,
                1,
                EdgeKind::Cell,
                false,
                false,
            )?;
            b.edge(
                id(i, j, ve),
                id(i, j, vs),
                SW,
                NE,
                1,
                EdgeKind::Cell,
                false,
                false,
            )?;
            b.edge(
                id(i, j, vs),
                id(i, j, vw),
                NW,
                SE,
                1,
                EdgeKind::Cell,
                false,
                false,
            )?;
            b.edge(
                id(i, j, vw),
                id(i, j, vn),
                NE,
                SW,
                1,
                EdgeKind::Cell,
                false,
                false,
            )?;
            if j + 1 < q {
                b.edge(
                    id(i, j, ve),
                    id(i, j + 1, vw),
                    E,
                    W,
                    1,
                    EdgeKind::Horizontal,
                    false,
                    false,
                )?;
            } else if surf.wraps_horizontally() {
                let target = if surf.flipped() { p - 1 - i } else { i };
                b.edge(
                    id(i, j, ve),
                    id(target, 0, vw),
                    E,
                    W,
                    flip_sign,
                    EdgeKind::Horizontal,
                    true,
                    false,
                )?;
            }
            if i + 1 < p {
                b.edge(
                    id(i, j, vs),
                    id(i + 1, j, vn),
                    S,
                    N,
                    1,
                    EdgeKind::Vertical,
                    false,
                    false,
                )?;
            }
        }
    }
    let coords = (0..4 * p * q).map(|v| ((v / 4) / q, (v / 4) % q)).collect();
    b.finish(spec, coords)
}

/// A lattice symmetry given by vertex and edge permutations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Translation {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    /// Smallest `t > 0` with `τ^t = id`.
    pub order: usize,
    /// Whether every edge weight equals the weight of its image.
    pub preserves_weights: bool,
}

impl Translation {
    pub fn apply_edges(&self, set: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = set.iter().map(|&e| self.edges[e]).collect();
        out.sort_unstable();
        out
    }
}

/// Horizontal translation by one period (one column, two for the hexagonal
/// brick wall), checked to be an automorphism of the embedded graph.
pub fn translation(lattice: &Lattice) -> Result<Translation> {
    let spec = &lattice.spec;
    let surf = spec.surface;
    if !surf.wraps_horizontally() {
        return Err(Error::UnsupportedSpec(
            "translation needs a horizontally glued surface".into(),
        ));
    }
    let g = &lattice.graph;
    let (m, n) = (spec.rows, spec.cols);
    let vertices: Vec<usize> = match spec.family {
        Family::Square | Family::Triangular | Family::Hexagonal => {
            let step = if spec.family == Family::Hexagonal {
                2
            } else {
                1
            };
            (0..m * n)
                .map(|v| {
                    let (mut r, mut c) = (v / n, v % n);
                    for _ in 0..step {
                        if c + 1 < n {
                            c += 1;
                        } else {
                            c = 0;
                            if surf.flipped() {
                                r = m - 1 - r;
                            }
                        }
                    }
                    r * n + c
                })
                .collect()
        }
        Family::SquareOctagon => (0..g.num_vertices())
            .map(|v| {
                let (cell, k) = (v / 4, v % 4);
                let (i, j) = (cell / n, cell % n);
                if j + 1 < n {
                    4 * (i * n + j + 1) + k
                } else if surf.flipped() {
                    let k2 = match k {
                        0 => 2,
                        2 => 0,
                        other => other,
                    };
                    4 * ((m - 1 - i) * n) + k2
                } else {
                    4 * (i * n) + k
                }
            })
            .collect(),
    };

    // edges by directed endpoint pair and kind; generated edges point right or
    // up, so parallel edges (narrow lattices) keep their direction under τ
    let mut by_ends: BTreeMap<(usize, usize, u8), Vec<usize>> = BTreeMap::new();
    for (e, edge) in g.edges().iter().enumerate() {
        by_ends
            .entry((edge.u, edge.v, lattice.kinds[e] as u8))
            .or_default()
            .push(e);
    }
    let mut used = BTreeSet::new();
    let mut edges = Vec::with_capacity(g.num_edges());
    for (e, edge) in g.edges().iter().enumerate() {
        let (u, v, kind) = (vertices[edge.u], vertices[edge.v], lattice.kinds[e] as u8);
        let forward = by_ends.get(&(u, v, kind)).into_iter().flatten();
        let backward = by_ends.get(&(v, u, kind)).into_iter().flatten();
        let image = forward
            .chain(backward)
            .copied()
            .find(|c| !used.contains(c))
            .ok_or_else(|| {
                Error::UnsupportedSpec(format!("translation does not map edge {e} to an edge"))
            })?;
        used.insert(image);
        edges.push(image);
    }
    let preserves_weights = (0..g.num_edges()).all(|e| g.weight(e) == g.weight(edges[e]));

    let canonical = |cycle: Vec<usize>| -> Vec<usize> {
        let mut best: Option<Vec<usize>> = None;
        let len = cycle.len();
        for dir in [false, true] {
            let seq: Vec<usize> = if dir {
                cycle.iter().rev().copied().collect()
            } else {
                cycle.clone()
            };
            for start in 0..len.max(1) {
                let rot: Vec<usize> = (0..len).map(|i| seq[(start + i) % len]).collect();
                if best.as_ref().is_none_or(|b| rot < *b) {
                    best = Some(rot);
                }
            }
        }
        best.unwrap_or_default()
    };
    let face_cycles = |map: &dyn Fn(usize) -> usize| -> BTreeMap<Vec<usize>, usize> {
        let mut census = BTreeMap::new();
        for face in &lattice.surface.faces {
            let cyc = canonical(face.iter().map(|s| map(s.half.edge())).collect());
            *census.entry(cyc).or_insert(0) += 1;
        }
        census
    };
    if face_cycles(&|e| e) != face_cycles(&|e| edges[e]) {
        return Err(Error::UnsupportedSpec(
            "translation does not preserve the faces".into(),
        ));
    }

    let mut order = 1;
    let mut current: Vec<usize> = vertices.clone();
    while current.iter().enumerate().any(|(v, &w)| v != w) {
        current = current.iter().map(|&w| vertices[w]).collect();
        order += 1;
        if order > 4 * g.num_vertices() + 4 {
            return Err(Error::UnsupportedSpec(
                "translation has no finite order".into(),
            ));
        }
    }
    Ok(Translation {
        vertices,
        edges,
        order,
        preserves_weights,
    })
}

/// All horizontal dimers `(r, 2j)–(r, 2j+1)` of a square or triangular
/// lattice with an even number of columns.
pub fn horizontal_matching(lattice: &Lattice) -> Option<crate::dimer::Matching> {
    let n = lattice.spec.cols;
    if n % 2 == 1 || !matches!(lattice.spec.family, Family::Square | Family::Triangular) {
        return None;
    }
    let g = &lattice.graph;
    let edges = (0..g.num_edges())
        .filter(|&e| {
            let edge = g.edge(e);
            let ((ru, cu), (rv, cv)) = (lattice.coords[edge.u], lattice.coords[edge.v]);
            lattice.kinds[e] == EdgeKind::Horizontal && ru == rv && cu % 2 == 0 && cu + 1 == cv
        })
        .collect();
    Some(crate::dimer::Matching::new(edges))
}
