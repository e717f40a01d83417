//! Skew-symmetric matrices, Pfaffians and matching signs.

use crate::dimer::Matching;
use crate::error::{Error, Result};
use crate::kasteleyn::Orientation;
use crate::scalar::{Field, GaussianField};
use crate::surface::{EdgeSet, EmbeddedGraph};

/// Dense square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Field> SkewMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        SkewMatrix {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    /// Takes ownership of row-major entries; skew-symmetry is checked by [`pfaffian`].
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        SkewMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.n + j] = value;
    }

    /// Adds `value` at `(i, j)` and its negative at `(j, i)`.
    pub fn add_skew(&mut self, i: usize, j: usize, value: &T) {
        let a = self.get(i, j).add(value);
        self.set(i, j, a);
        let b = self.get(j, i).sub(value);
        self.set(j, i, b);
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.n.max(1)).take(self.n)
    }

    /// Simultaneous row and column permutation: entry `(i, j)` of the result is
    /// entry `(perm[i], perm[j])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(perm[i], perm[j]).clone());
            }
        }
        out
    }

    fn check_skew(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            if !T::near_zero(self.get(i, i), 0.0) {
                return Err(Error::AsymmetryDetected(i, i));
            }
            for j in i + 1..n {
                let (a, b) = (self.get(i, j), self.get(j, i));
                let scale = a.magnitude() + b.magnitude();
                if !T::near_zero(&a.add(b), scale) {
                    return Err(Error::AsymmetryDetected(i, j));
                }
            }
        }
        Ok(())
    }
}

/// Pfaffian by skew-symmetric Gaussian elimination with partial pivoting.
pub fn pfaffian<T: Field>(m: &SkewMatrix<T>) -> Result<T> {
    m.check_skew()?;
    if m.n % 2 == 1 {
        return Err(Error::OddDimension(m.n));
    }
    Ok(pfaffian_unchecked(m.clone()))
}

/// Elimination proper; consumes a matrix already known to be skew of even size.
pub(crate) fn pfaffian_unchecked<T: Field>(mut m: SkewMatrix<T>) -> T {
    let n = m.n;
    let mut pf = T::one();
    let mut tau = vec![T::zero(); n];
    let mut s = vec![T::zero(); n];
    for k in (0..n).step_by(2) {
        let row_k = k * n;
        let mut pivot = k + 1;
        let mut best = m.data[row_k + pivot].magnitude();
        for r in k + 2..n {
            let mag = m.data[row_k + r].magnitude();
            if mag > best {
                best = mag;
                pivot = r;
            }
        }
        if m.data[row_k + pivot].is_zero() {
            return T::zero();
        }
        if pivot != k + 1 {
            swap_index(&mut m, k + 1, pivot);
            pf = pf.neg();
        }
        let a = m.data[row_k + k + 1].clone();
        pf = pf.mul(&a);
        if k + 2 >= n {
            break;
        }
        let inv = T::one().div(&a);
        for j in k + 2..n {
            tau[j] = m.data[row_k + j].mul(&inv);
            s[j] = m.data[(k + 1) * n + j].clone();
        }
        for i in k + 2..n {
            let (si, ti) = (s[i].clone(), tau[i].clone());
            let row = &mut m.data[i * n..(i + 1) * n];
            T::rank2_update(&mut row[k + 2..], &si, &tau[k + 2..], &ti, &s[k + 2..]);
        }
    }
    pf
}

fn swap_index<T: Field>(m: &mut SkewMatrix<T>, a: usize, b: usize) {
    let n = m.n;
    for j in 0..n {
        m.data.swap(a * n + j, b * n + j);
    }
    for i in 0..n {
        m.data.swap(i * n + a, i * n + b);
    }
}

/// `A^{K,ω}`: entry `(u, v)` is `Σ ε^K_{uv}(e) i^{ω(e)} ν(e)` over edges joining them.
pub fn skew_adjacency<T: GaussianField>(
    g: &EmbeddedGraph,
    k: &Orientation,
    omega: Option<&EdgeSet>,
) -> SkewMatrix<T> {
    let mut m = SkewMatrix::zeros(g.num_vertices());
    for (e, edge) in g.edges().iter().enumerate() {
        let twist = omega.is_some_and(|w| w.contains(e));
        let value = T::from_weight(&edge.weight).mul(&T::i_pow(i64::from(twist)));
        if k.is_forward(e) {
            m.add_skew(edge.u, edge.v, &value);
        } else {
            m.add_skew(edge.v, edge.u, &value);
        }
    }
    m
}

/// Real `A^K` in double precision, for cuts that are empty.
pub fn real_skew_adjacency(g: &EmbeddedGraph, k: &Orientation) -> SkewMatrix<f64> {
    let mut m = SkewMatrix::zeros(g.num_vertices());
    for (e, edge) in g.edges().iter().enumerate() {
        let value = num_traits::ToPrimitive::to_f64(&edge.weight).unwrap_or(f64::NAN);
        if k.is_forward(e) {
            m.add_skew(edge.u, edge.v, &value);
        } else {
            m.add_skew(edge.v, edge.u, &value);
        }
    }
    m
}

/// `Pf(A^{K,ω})`, using a real double-precision matrix when possible.
pub fn graph_pfaffian<T: GaussianField>(g: &EmbeddedGraph, k: &Orientation, omega: &EdgeSet) -> T {
    if g.num_vertices() % 2 == 1 {
        return T::zero();
    }
    if T::IS_FLOAT && omega.is_empty() {
        return T::from_f64_parts(pfaffian_unchecked(real_skew_adjacency(g, k)), 0.0);
    }
    pfaffian_unchecked(skew_adjacency::<T>(g, k, Some(omega)))
}

/// Sign of a permutation given as images of `0..n`.
pub fn permutation_sign(perm: &[usize]) -> i8 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Checks that `d` covers every vertex exactly once.
pub fn check_perfect(g: &EmbeddedGraph, d: &Matching) -> Result<()> {
    let mut covered = vec![false; g.num_vertices()];
    for &e in d.edges() {
        if e >= g.num_edges() {
            return Err(Error::NotPerfect(format!("unknown edge {e}")));
        }
        let edge = g.edge(e);
        for v in [edge.u, edge.v] {
            if covered[v] {
                return Err(Error::NotPerfect(format!("vertex {v} covered twice")));
            }
            covered[v] = true;
        }
    }
    match covered.iter().position(|&c| !c) {
        Some(v) => Err(Error::NotPerfect(format!("vertex {v} uncovered"))),
        None => Ok(()),
    }
}

/// `ε^K(D) = sign(σ) Π ε^K_{u_l v_l}(e_l)` with `σ = (u_1 v_1 … u_n v_n)`.
pub fn matching_sign(g: &EmbeddedGraph, k: &Orientation, d: &Matching) -> Result<i8> {
    check_perfect(g, d)?;
    let mut perm = Vec::with_capacity(g.num_vertices());
    let mut sign = 1;
    for &e in d.edges() {
        let edge = g.edge(e);
        perm.push(edge.u);
        perm.push(edge.v);
        sign *= k.epsilon(g, e, edge.u);
    }
    Ok(sign * permutation_sign(&perm))
}

/// `P = i^{-ω(D0)} ε^K(D0) Pf(A^{K,ω})`, with both factors kept.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedPfaffian<T> {
    pub pfaffian: T,
    /// `i^{-ω(D0)} ε^K(D0)`; `1` when no reference matching exists.
    pub prefactor: T,
    pub value: T,
    /// False when the graph has no perfect matching and the prefactor is a placeholder.
    pub has_reference: bool,
}

pub fn twisted_pfaffian<T: GaussianField>(
    g: &EmbeddedGraph,
    k: &Orientation,
    omega: &EdgeSet,
    d0: Option<&Matching>,
) -> Result<TwistedPfaffian<T>> {
    let pf = graph_pfaffian::<T>(g, k, omega);
    let (prefactor, has_reference) = match d0 {
        Some(d0) => (reference_prefactor::<T>(g, k, omega, d0)?, true),
        None => (T::one(), false),
    };
    Ok(TwistedPfaffian {
        value: prefactor.mul(&pf),
        pfaffian: pf,
        prefactor,
        has_reference,
    })
}

/// `i^{-ω(D0)} ε^K(D0)`.
pub fn reference_prefactor<T: GaussianField>(
    g: &EmbeddedGraph,
    k: &Orientation,
    omega: &EdgeSet,
    d0: &Matching,
) -> Result<T> {
    let eps = matching_sign(g, k, d0)?;
    let crossings = d0.edges().iter().filter(|&&e| omega.contains(e)).count() as i64;
    Ok(T::i_pow(-crossings + if eps < 0 { 2 } else { 0 }))
}
