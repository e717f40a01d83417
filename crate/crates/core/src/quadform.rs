//! Quadratic enhancements `q: H1(Σ; Z2) → Z4` and quadratic forms on the
//! orientation cover.

use crate::cover::{lift_orientation, CoverMap};
use crate::dimer::{Matching, TwistedZ};
use crate::error::{Error, Result};
use crate::kasteleyn::Orientation;
use crate::scalar::{Exact, Field, GaussianField};
use crate::surface::{
    cut_vertex_signs, for_each_simple_curve, simple_cycles, Class, ClosedWalk, EdgeSet,
    EmbeddedGraph, HomologyBasis,
};
use crate::z2::Z2Span;

/// Table of values in Z4, indexed by class bitmask.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Enhancement {
    pub values: Vec<u8>,
}

impl Enhancement {
    pub fn get(&self, a: Class) -> u8 {
        self.values[a.0 as usize]
    }

    /// Extends basis values by `q(Σ a_i b_i) = Σ a_i q(b_i) + 2 Σ_{i<j} a_i a_j (b_i · b_j)`.
    pub fn from_basis_values(basis: &HomologyBasis, on_basis: &[u8]) -> Enhancement {
        let k = basis.dim();
        let values = (0..1u64 << k)
            .map(|a| {
                let mut q = 0u32;
                for i in (0..k).filter(|&i| a >> i & 1 == 1) {
                    q += u32::from(on_basis[i]);
                    for j in (i + 1..k).filter(|&j| a >> j & 1 == 1) {
                        q += 2 * u32::from(basis.intersection.get(i, j));
                    }
                }
                (q % 4) as u8
            })
            .collect();
        Enhancement { values }
    }

    pub fn on_basis(&self, k: usize) -> Vec<u8> {
        (0..k).map(|i| self.values[1 << i]).collect()
    }

    /// Checks `q(0) = 0`, `q ≡ w1 (mod 2)` and the enhancement law on all pairs.
    pub fn check(&self, basis: &HomologyBasis) -> Result<()> {
        if self.values.len() != basis.num_classes() {
            return Err(Error::LawViolation(format!(
                "table has {} entries",
                self.values.len()
            )));
        }
        if self.values[0] != 0 {
            return Err(Error::LawViolation("q(0) != 0".into()));
        }
        for a in basis.classes() {
            if self.get(a) % 2 != basis.w1_of(a) {
                return Err(Error::LawViolation(format!(
                    "q - w1 is odd at class {}",
                    a.label(basis.dim())
                )));
            }
            for b in basis.classes() {
                let lhs = self.get(a.add(b));
                let rhs = (self.get(a) + self.get(b) + 2 * basis.intersect(a, b)) % 4;
                if lhs != rhs {
                    return Err(Error::LawViolation(format!(
                        "q({}+{}) = {lhs}, expected {rhs}",
                        a.label(basis.dim()),
                        b.label(basis.dim())
                    )));
                }
            }
        }
        Ok(())
    }

    /// `α ↦ q(α) + 2 γ(α)`: the enhancement after flipping along a cocycle
    /// pairing with classes as `gamma_pairing` (a bitmask of values on the basis).
    pub fn shifted(&self, gamma_pairing: u64) -> Enhancement {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(a, &q)| (q + 2 * crate::z2::parity(a as u64 & gamma_pairing)) % 4)
            .collect();
        Enhancement { values }
    }
}

/// All `2^k` enhancements, ordered by their basis values.
pub fn enumerate_enhancements(basis: &HomologyBasis) -> Result<Vec<Enhancement>> {
    let k = basis.dim();
    let mut out = Vec::with_capacity(1 << k);
    for choice in 0..1u64 << k {
        let on_basis: Vec<u8> = (0..k)
            .map(|i| (basis.w1 >> i & 1) as u8 + 2 * (choice >> i & 1) as u8)
            .collect();
        let q = Enhancement::from_basis_values(basis, &on_basis);
        q.check(basis)?;
        out.push(q);
    }
    Ok(out)
}

/// Table of values in Z2 on the classes of the cover.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadraticForm {
    pub values: Vec<u8>,
}

impl QuadraticForm {
    pub fn get(&self, a: Class) -> u8 {
        self.values[a.0 as usize]
    }

    /// Checks `q̃(a + b) = q̃(a) + q̃(b) + a·b` on all pairs.
    pub fn check(&self, basis: &HomologyBasis) -> Result<()> {
        if self.values.first().copied().unwrap_or(0) != 0 {
            return Err(Error::LawViolation("form is nonzero at 0".into()));
        }
        for a in basis.classes() {
            for b in basis.classes() {
                if self.get(a.add(b)) != (self.get(a) + self.get(b) + basis.intersect(a, b)) % 2 {
                    return Err(Error::LawViolation(format!(
                        "quadratic form law fails at ({}, {})",
                        a.label(basis.dim()),
                        b.label(basis.dim())
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A cover class together with the value the induced form must take on it.
#[derive(Clone, Debug)]
pub struct CoverConstraint {
    pub walk: ClosedWalk,
    pub class: Class,
    pub value: u8,
}

/// Values forced on the lifts of one simple cycle: `q̃ = 0` on the preimage
/// of a one-sided cycle `C`, and `q̃ = q(C)/2` on each lift of a two-sided one.
fn lift_constraints(
    g: &EmbeddedGraph,
    basis: &HomologyBasis,
    q: &Enhancement,
    cm: &CoverMap,
    cover_basis: &HomologyBasis,
    walk: &ClosedWalk,
) -> Vec<CoverConstraint> {
    let constraint = |start: u8, value: u8| {
        let lifted = cm.lift_walk(walk, start);
        CoverConstraint {
            class: cover_basis.walk_class(&lifted),
            walk: lifted,
            value,
        }
    };
    if walk.w1(g) == 1 {
        vec![constraint(0, 0)]
    } else {
        let value = q.get(basis.walk_class(walk)) / 2;
        vec![constraint(0, value), constraint(1, value)]
    }
}

/// Constraints from the BFS fundamental cycles at every root.
pub fn cover_constraints(
    g: &EmbeddedGraph,
    basis: &HomologyBasis,
    q: &Enhancement,
    cm: &CoverMap,
    cover_basis: &HomologyBasis,
) -> Vec<CoverConstraint> {
    simple_cycles(g)
        .iter()
        .flat_map(|walk| lift_constraints(g, basis, q, cm, cover_basis, walk))
        .collect()
}

/// Upper bound on curves examined when fundamental cycles fall short.
const CYCLE_SEARCH_LIMIT: usize = 1 << 20;

/// The quadratic form `q̃` on the cover induced by an enhancement `q`.
///
/// Lifts of simple cycles fix `q̃` on classes spanning `H1(Σ̃)`: fundamental
/// cycles first, then a depth-first search over simple closed curves if those
/// do not span. The form is extended by the quadratic law and checked
/// against every constraint collected.
pub fn induced_cover_form(
    g: &EmbeddedGraph,
    basis: &HomologyBasis,
    q: &Enhancement,
    cm: &CoverMap,
    cover_basis: &HomologyBasis,
) -> Result<QuadraticForm> {
    let mut constraints = cover_constraints(g, basis, q, cm, cover_basis);
    let dim = cover_basis.dim();
    let mut span = Z2Span::new();
    let mut chosen: Vec<(u64, u8)> = Vec::new();
    let mut absorb = |c: &CoverConstraint, span: &mut Z2Span| {
        if span.rank() < dim && span.express(c.class.0).is_none() {
            span.insert(c.class.0);
            chosen.push((c.class.0, c.value));
        }
    };
    for c in &constraints {
        absorb(c, &mut span);
    }
    if span.rank() < dim {
        let mut examined = 0;
        for_each_simple_curve(g, |walk| {
            examined += 1;
            for c in lift_constraints(g, basis, q, cm, cover_basis, walk) {
                absorb(&c, &mut span);
                constraints.push(c);
            }
            span.rank() < dim && examined < CYCLE_SEARCH_LIMIT
        });
    }
    if span.rank() < dim {
        return Err(Error::Underdetermined(format!(
            "lifted simple cycles span {} of {dim} cover homology dimensions",
            span.rank()
        )));
    }
    let values = (0..1u64 << dim)
        .map(|z| {
            let combo = span.express(z).expect("full rank");
            let idx: Vec<usize> = (0..chosen.len()).filter(|&j| combo >> j & 1 == 1).collect();
            let mut v = 0u8;
            for (pos, &j) in idx.iter().enumerate() {
                v ^= chosen[j].1;
                for &l in &idx[pos + 1..] {
                    v ^= cover_basis.intersect(Class(chosen[j].0), Class(chosen[l].0));
                }
            }
            v
        })
        .collect();
    let form = QuadraticForm { values };
    form.check(cover_basis)?;
    if let Some(bad) = constraints.iter().find(|c| form.get(c.class) != c.value) {
        return Err(Error::LawViolation(format!(
            "induced form is {} on a lifted cycle that requires {}",
            form.get(bad.class),
            bad.value
        )));
    }
    Ok(form)
}

/// `Σ_α i^{-q(α)} Z_α`.
pub fn enhancement_sum(q: &Enhancement, tz: &TwistedZ) -> Exact {
    tz.classes
        .iter()
        .enumerate()
        .fold(Exact::zero(), |acc, (a, z)| {
            acc.add(&Exact::i_pow(-i64::from(q.values[a])).mul(&Exact::from_weight(z)))
        })
}

/// `2(n^K(C) + ℓ_{D0}(C) + 1) mod 4` for a simple cycle avoiding `ω`, read
/// on the surface cut open along `ω`: `n^K` counts edges directed against
/// the walk and `ℓ` counts walk vertices whose `D0`-dimer leaves to the left.
pub fn geometric_value(
    g: &EmbeddedGraph,
    omega: &EdgeSet,
    k: &Orientation,
    d0: &Matching,
    walk: &ClosedWalk,
) -> Option<u8> {
    if walk.0.iter().any(|h| omega.contains(h.edge())) {
        return None;
    }
    let sigma = cut_vertex_signs(g, omega)?;
    let mut partner = vec![usize::MAX; g.num_vertices()];
    for &e in d0.edges() {
        partner[g.edge(e).u] = e;
        partner[g.edge(e).v] = e;
    }
    let n = walk.len();
    let against = walk.0.iter().filter(|&&h| !k.leaves(h)).count();
    let mut left = 0;
    for j in 0..n {
        let incoming = walk.0[(j + n - 1) % n].opposite();
        let outgoing = walk.0[j];
        let x = g.tail(outgoing);
        let between = g.between(outgoing, incoming, sigma[x]);
        if between.iter().any(|h| h.edge() == partner[x]) {
            left += 1;
        }
    }
    Some((2 * ((against + left + 1) % 2)) as u8)
}

/// The enhancement `q` with `P = Σ_α i^{-q(α)} Z_α`, where `P` is the twisted
/// Pfaffian for `(K, ω, D0)` and `Z_α` the twisted partition functions.
///
/// Candidates are all enhancements matching `P`; ties (possible when some
/// `Z_α` vanish) are broken by the geometric value on two-sided simple cycles
/// avoiding `ω`. Remaining ambiguity is reported as `Underdetermined`.
pub fn fit_enhancement(
    g: &EmbeddedGraph,
    k: &Orientation,
    omega: &EdgeSet,
    d0: &Matching,
    basis: &HomologyBasis,
    tz: &TwistedZ,
    p: &Exact,
) -> Result<Enhancement> {
    let all = enumerate_enhancements(basis)?;
    let matching: Vec<Enhancement> = all
        .into_iter()
        .filter(|q| enhancement_sum(q, tz) == *p)
        .collect();
    if matching.is_empty() {
        return Err(Error::LawViolation(
            "no enhancement reproduces the twisted Pfaffian".into(),
        ));
    }
    if matching.len() == 1 {
        return Ok(matching.into_iter().next().expect("one candidate"));
    }
    let geometric: Vec<(Class, u8)> = simple_cycles(g)
        .iter()
        .filter(|w| w.w1(g) == 0)
        .filter_map(|w| geometric_value(g, omega, k, d0, w).map(|v| (basis.walk_class(w), v)))
        .collect();
    let refined: Vec<Enhancement> = matching
        .iter()
        .filter(|q| geometric.iter().all(|&(a, v)| q.get(a) == v))
        .cloned()
        .collect();
    match refined.len() {
        1 => Ok(refined.into_iter().next().expect("one candidate")),
        0 => Err(Error::LawViolation(
            "geometric values contradict every fitted enhancement".into(),
        )),
        _ => {
            let k = basis.dim();
            let free: Vec<String> = (0..k)
                .filter(|&i| {
                    refined
                        .iter()
                        .any(|q| q.values[1 << i] != refined[0].values[1 << i])
                })
                .map(|i| format!("q(b{})", i + 1))
                .collect();
            Err(Error::Underdetermined(format!(
                "{} remain free",
                free.join(", ")
            )))
        }
    }
}

/// Whether the lift `K̃` is a Kasteleyn orientation of the cover.
pub fn lifted_is_kasteleyn(cm: &CoverMap, k: &Orientation) -> Result<bool> {
    let kt = lift_orientation(cm, k);
    crate::kasteleyn::is_kasteleyn(
        &cm.cover,
        &cm.surface,
        &EdgeSet::empty(cm.cover.num_edges()),
        &kt,
    )
}
