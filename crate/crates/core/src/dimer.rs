//! Perfect matchings: enumeration, twisted partition functions, and the
//! polynomial-time partition function by character inversion over Pfaffians.

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kasteleyn::{find_kasteleyn, Orientation};
use crate::pfaffian::{graph_pfaffian, reference_prefactor};
use crate::scalar::{GaussianField, Mode, Value, Weight};
use crate::surface::{
    check_cuts, default_omega, homology_basis, represents_w1, validate, Class, EdgeSet,
    EmbeddedGraph, HomologyBasis, SurfaceData,
};
use crate::z2::parity;

/// A set of edges, stored sorted by id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching(Vec<usize>);

impl Matching {
    pub fn new(mut edges: Vec<usize>) -> Self {
        edges.sort_unstable();
        Matching(edges)
    }

    pub fn edges(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn edge_set(&self, num_edges: usize) -> EdgeSet {
        EdgeSet::from_ids(num_edges, self.0.iter().copied())
    }

    pub fn weight(&self, g: &EmbeddedGraph) -> Weight {
        g.weight_product(&self.0)
    }

    pub fn symmetric_difference(&self, other: &Matching, num_edges: usize) -> EdgeSet {
        self.edge_set(num_edges)
            .symmetric_difference(&other.edge_set(num_edges))
    }
}

/// Visits every perfect matching. The lowest uncovered vertex is matched
/// first, branching over its edges by increasing id.
pub fn for_each_matching(g: &EmbeddedGraph, mut visit: impl FnMut(&[usize])) {
    let adj = g.adjacency();
    let mut covered = vec![false; g.num_vertices()];
    let mut chosen = Vec::with_capacity(g.num_vertices() / 2);
    if g.num_vertices().is_multiple_of(2) {
        search(g, &adj, &mut covered, 0, &mut chosen, &mut visit);
    }
}

fn search(
    g: &EmbeddedGraph,
    adj: &[Vec<usize>],
    covered: &mut [bool],
    from: usize,
    chosen: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    let Some(v) = (from..covered.len()).find(|&v| !covered[v]) else {
        visit(chosen);
        return;
    };
    covered[v] = true;
    for &e in &adj[v] {
        let w = g.other_end(e, v);
        if covered[w] {
            continue;
        }
        covered[w] = true;
        chosen.push(e);
        search(g, adj, covered, v + 1, chosen, visit);
        chosen.pop();
        covered[w] = false;
    }
    covered[v] = false;
}

pub fn enumerate_matchings(g: &EmbeddedGraph) -> Vec<Matching> {
    let mut out = Vec::new();
    for_each_matching(g, |d| out.push(Matching::new(d.to_vec())));
    out
}

pub fn first_matching(g: &EmbeddedGraph) -> Option<Matching> {
    let adj = g.adjacency();
    let mut covered = vec![false; g.num_vertices()];
    let mut chosen = Vec::new();
    if g.num_vertices() % 2 == 1 {
        return None;
    }
    first(g, &adj, &mut covered, 0, &mut chosen).then(|| Matching::new(chosen))
}

fn first(
    g: &EmbeddedGraph,
    adj: &[Vec<usize>],
    covered: &mut [bool],
    from: usize,
    chosen: &mut Vec<usize>,
) -> bool {
    let Some(v) = (from..covered.len()).find(|&v| !covered[v]) else {
        return true;
    };
    covered[v] = true;
    for &e in &adj[v] {
        let w = g.other_end(e, v);
        if covered[w] {
            continue;
        }
        covered[w] = true;
        chosen.push(e);
        if first(g, adj, covered, v + 1, chosen) {
            return true;
        }
        chosen.pop();
        covered[w] = false;
    }
    covered[v] = false;
    false
}

/// `Z(G) = Σ_D ν(D)` by enumeration.
pub fn brute_force_partition(g: &EmbeddedGraph) -> Weight {
    let mut z = Weight::zero();
    for_each_matching(g, |d| z += g.weight_product(d));
    z
}

/// Partition function split by homology class of `D ∆ D0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedZ {
    /// Indexed by class bitmask.
    pub classes: Vec<Weight>,
    pub total: Weight,
    pub reference: Option<Matching>,
    pub dim: usize,
}

impl TwistedZ {
    pub fn get(&self, a: Class) -> &Weight {
        &self.classes[a.0 as usize]
    }

    /// Whether a reference matching existed; otherwise every entry is zero.
    pub fn has_reference(&self) -> bool {
        self.reference.is_some()
    }
}

/// Exact `Z_{α, D0}` for all classes `α`, by enumeration. Defaults to the
/// first enumerated matching as `D0`.
pub fn twisted_partition(
    g: &EmbeddedGraph,
    basis: &HomologyBasis,
    d0: Option<&Matching>,
) -> Result<TwistedZ> {
    let n = basis.num_classes();
    let reference = match d0 {
        Some(d) => {
            crate::pfaffian::check_perfect(g, d)?;
            Some(d.clone())
        }
        None => first_matching(g),
    };
    let mut classes = vec![Weight::zero(); n];
    let mut total = Weight::zero();
    if let Some(d0) = &reference {
        let y0 = basis.pairing_vector(d0.edges().iter().copied());
        for_each_matching(g, |d| {
            let y = basis.pairing_vector(d.iter().copied()) ^ y0;
            let w = g.weight_product(d);
            total += &w;
            classes[basis.class_from_pairing(y).0 as usize] += w;
        });
    }
    Ok(TwistedZ {
        classes,
        total,
        reference,
        dim: basis.dim(),
    })
}

/// Everything needed to evaluate Pfaffians on a graph.
#[derive(Clone, Debug)]
pub struct PfaffianSetup {
    pub surface: SurfaceData,
    pub basis: HomologyBasis,
    pub omega: EdgeSet,
    pub kasteleyn: Orientation,
}

impl PfaffianSetup {
    /// Validates the graph, picks its cut (the `"omega"` cut or a canonical
    /// one), and constructs a Kasteleyn orientation.
    pub fn new(g: &EmbeddedGraph) -> Result<Self> {
        let surface = validate(g)?;
        check_cuts(g, &surface)?;
        Self::with_omega(g, surface, default_omega(g))
    }

    pub fn with_omega(g: &EmbeddedGraph, surface: SurfaceData, omega: EdgeSet) -> Result<Self> {
        if !represents_w1(g, &omega) {
            return Err(Error::NotW1Representative);
        }
        let basis = homology_basis(g, &surface)?;
        let kasteleyn = find_kasteleyn(g, &surface, &omega)?;
        Ok(PfaffianSetup {
            surface,
            basis,
            omega,
            kasteleyn,
        })
    }

    /// `K` reversed along `Σ_{i ∈ S} γ_i`.
    pub fn flipped(&self, subset: u64) -> Orientation {
        let mut k = self.kasteleyn.clone();
        for (i, gamma) in self.basis.cocycles.iter().enumerate() {
            if subset >> i & 1 == 1 {
                for e in gamma.iter() {
                    k.flip(e);
                }
            }
        }
        k
    }

    /// `Pf(A^{K_S, ω})` for every subset `S` of the cocycle basis.
    pub fn pfaffians<T: GaussianField>(&self, g: &EmbeddedGraph) -> Vec<T> {
        (0..1u64 << self.basis.dim())
            .into_par_iter()
            .map(|s| graph_pfaffian::<T>(g, &self.flipped(s), &self.omega))
            .collect()
    }
}

/// Walsh–Hadamard transform over Z2^k, divided by `2^k`.
fn character_average<T: GaussianField>(values: &[T]) -> Vec<T> {
    let mut f = values.to_vec();
    let n = f.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (f[i].clone(), f[i + h].clone());
                f[i] = a.add(&b);
                f[i + h] = a.sub(&b);
            }
        }
        h *= 2;
    }
    let scale = T::from_weight(&Weight::from_integer((n as i64).into()));
    f.iter().map(|x| x.div(&scale)).collect()
}

/// Partition function recovered from Pfaffians.
#[derive(Clone, Debug, PartialEq)]
pub struct PfaffianZ<T> {
    pub total: T,
    /// `Z_{α, D0}` indexed by class, when a reference matching was used.
    pub classes: Option<Vec<T>>,
    /// Twisted Pfaffian values `P_S`, or raw Pfaffians without a reference.
    pub pfaffians: Vec<T>,
}

/// Character inversion: with `P_S` the twisted Pfaffian for `K` flipped along
/// the cocycles in `S`, `2^{-k} Σ_S (-1)^{γ_S(α)} P_S` has modulus `Z_α`.
///
/// Without `d0` the transform is taken of the raw Pfaffians, whose moduli are
/// the `Z_α` in permuted order; the total is unaffected.
pub fn pfaffian_partition<T: GaussianField>(
    g: &EmbeddedGraph,
    setup: &PfaffianSetup,
    d0: Option<&Matching>,
) -> Result<PfaffianZ<T>> {
    if g.num_vertices() % 2 == 1 {
        return Err(Error::OddVertexCount(g.num_vertices()));
    }
    let raw = setup.pfaffians::<T>(g);
    let values: Vec<T> = match d0 {
        Some(d0) => (0..raw.len() as u64)
            .map(|s| {
                Ok(
                    reference_prefactor::<T>(g, &setup.flipped(s), &setup.omega, d0)?
                        .mul(&raw[s as usize]),
                )
            })
            .collect::<Result<_>>()?,
        None => raw,
    };
    let averaged = character_average(&values);
    let moduli: Vec<T> = averaged
        .iter()
        .map(|c| {
            c.axis_modulus().ok_or_else(|| {
                Error::PreconditionFailed(
                    "character average is not a unit multiple of a real".into(),
                )
            })
        })
        .collect::<Result<_>>()?;
    let total = moduli.iter().fold(T::zero(), |acc, x| acc.add(x));
    let classes = d0.map(|_| {
        let mut by_class = vec![T::zero(); moduli.len()];
        for (y, z) in moduli.iter().enumerate() {
            by_class[setup.basis.class_from_pairing(y as u64).0 as usize] = z.clone();
        }
        by_class
    });
    Ok(PfaffianZ {
        total,
        classes,
        pfaffians: values,
    })
}

/// Gamma-pairing sign `(-1)^{γ_S(α)}`.
pub fn character(basis: &HomologyBasis, subset: u64, a: Class) -> i8 {
    if parity(basis.pairing.left_mul(a.0) & subset) == 1 {
        -1
    } else {
        1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Brute,
    Pfaffian,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "brute" => Ok(Method::Brute),
            "pfaffian" => Ok(Method::Pfaffian),
            other => Err(format!(
                "unknown method `{other}` (expected brute|pfaffian)"
            )),
        }
    }
}

pub fn partition_function(g: &EmbeddedGraph, method: Method, mode: Mode) -> Result<Value> {
    match method {
        Method::Brute => {
            let z = brute_force_partition(g);
            Ok(match mode {
                Mode::Exact => Value::Exact(z),
                Mode::Float => {
                    Value::Float(num_traits::ToPrimitive::to_f64(&z).unwrap_or(f64::NAN))
                }
            })
        }
        Method::Pfaffian => {
            if g.num_vertices() % 2 == 1 {
                return Err(Error::OddVertexCount(g.num_vertices()));
            }
            let setup = PfaffianSetup::new(g)?;
            Ok(match mode {
                Mode::Exact => pfaffian_partition::<crate::scalar::Exact>(g, &setup, None)?
                    .total
                    .real_value(),
                Mode::Float => pfaffian_partition::<num_complex::Complex64>(g, &setup, None)?
                    .total
                    .real_value(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use crate::surface::{Edge, HalfEdge};

    fn cycle(n: usize) -> EmbeddedGraph {
        let edges = (0..n)
            .map(|i| Edge {
                u: i,
                v: (i + 1) % n,
                weight: int(1),
                sign: 1,
            })
            .collect();
        let rotation = (0..n)
            .map(|i| vec![HalfEdge::new(i, 0), HalfEdge::new((i + n - 1) % n, 1)])
            .collect();
        EmbeddedGraph::new(n, edges, rotation).unwrap()
    }

    #[test]
    fn four_cycle_has_two_matchings() {
        let g = cycle(4);
        let all = enumerate_matchings(&g);
        assert_eq!(
            all,
            vec![Matching::new(vec![0, 2]), Matching::new(vec![1, 3])]
        );
        assert_eq!(brute_force_partition(&g), int(2));
        assert_eq!(
            partition_function(&g, Method::Pfaffian, Mode::Exact).unwrap(),
            Value::Exact(int(2))
        );
    }

    #[test]
    fn odd_cycle_has_none() {
        let g = cycle(5);
        assert!(enumerate_matchings(&g).is_empty());
        assert_eq!(first_matching(&g), None);
        assert_eq!(
            partition_function(&g, Method::Pfaffian, Mode::Exact),
            Err(Error::OddVertexCount(5))
        );
    }

    #[test]
    fn walsh_hadamard_inverts_characters() {
        use crate::scalar::Exact;
        let v: Vec<Exact> = [3, 1]
            .iter()
            .map(|&x| Exact::from_weight(&int(x)))
            .collect();
        let f = character_average(&v);
        assert_eq!(f[0], Exact::from_weight(&int(2)));
        assert_eq!(f[1], Exact::from_weight(&int(1)));
    }
}
