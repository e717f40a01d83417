//! Shared fixtures for the benchmarks.

use num_complex::Complex64;
use surface_dimer::lattices::{generate, Family, LatticeSpec, Surface};
use surface_dimer::pfaffian::SkewMatrix;
use surface_dimer::scalar::{Exact, GaussianField};
use surface_dimer::EmbeddedGraph;

pub fn lattice(family: Family, surface: Surface, rows: usize, cols: usize) -> EmbeddedGraph {
    generate(&LatticeSpec::new(family, surface, rows, cols))
        .expect("benchmark lattice")
        .graph
}

/// Deterministic dense skew matrix with small integer entries.
pub fn dense_skew<T: GaussianField>(n: usize) -> SkewMatrix<T> {
    let mut m = SkewMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            let x = ((7 * i + 13 * j + i * j) % 11) as f64 - 5.0;
            m.set(i, j, T::from_f64_parts(x, 0.0));
            m.set(j, i, T::from_f64_parts(-x, 0.0));
        }
    }
    m
}

pub fn dense_float(n: usize) -> SkewMatrix<Complex64> {
    dense_skew(n)
}

pub fn dense_exact(n: usize) -> SkewMatrix<Exact> {
    dense_skew(n)
}
