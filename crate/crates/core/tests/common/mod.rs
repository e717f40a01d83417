//! Random test instances: lattices perturbed by edge deletions, chords and
//! extra crosscaps, with random rational weights.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surface_dimer::lattices::{generate, Family, LatticeSpec, Surface};
use surface_dimer::scalar::rational;
use surface_dimer::surface::{represents_w1, validate, EdgeSet, EmbeddedGraph};
use surface_dimer::Weight;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_weight(rng: &mut impl Rng) -> Weight {
    rational(rng.gen_range(1..10), rng.gen_range(1..5))
}

pub fn randomize_weights(g: &EmbeddedGraph, rng: &mut impl Rng) -> EmbeddedGraph {
    let weights = (0..g.num_edges()).map(|_| random_weight(rng)).collect();
    g.clone().with_weights(weights).expect("positive weights")
}

pub fn lattice(family: Family, surface: Surface, rows: usize, cols: usize) -> EmbeddedGraph {
    generate(&LatticeSpec::new(family, surface, rows, cols))
        .expect("valid spec")
        .graph
}

/// Keeps only the `"omega"` cut, or none when `omega` is `None`.
fn with_omega(g: EmbeddedGraph, omega: Option<EdgeSet>) -> EmbeddedGraph {
    let g = g.without_cuts();
    match omega {
        Some(w) => g.with_cut("omega", w),
        None => g,
    }
}

fn omega_ok(g: &EmbeddedGraph) -> bool {
    g.cut("omega").is_none_or(|w| represents_w1(g, w))
}

/// Deletes a random edge whose removal merges two distinct faces.
pub fn try_delete_edge(g: &EmbeddedGraph, rng: &mut impl Rng) -> Option<EmbeddedGraph> {
    let before = validate(g).ok()?;
    let e = rng.gen_range(0..g.num_edges());
    let h = g.remove_edge(e).ok()?;
    let omega = h.cut("omega").cloned();
    let h = with_omega(h, omega);
    let after = validate(&h).ok()?;
    (after.euler_char == before.euler_char && after.orientable == before.orientable && omega_ok(&h))
        .then_some(h)
}

/// Adds an edge across a random face, splitting it in two.
pub fn try_insert_chord(g: &EmbeddedGraph, rng: &mut impl Rng) -> Option<EmbeddedGraph> {
    insert_across_face(g, rng, 0)
}

/// Adds an edge inside a random face without splitting it, which lowers the
/// Euler characteristic by one and makes the surface non-orientable.
pub fn try_add_crosscap(g: &EmbeddedGraph, rng: &mut impl Rng) -> Option<EmbeddedGraph> {
    let h = insert_across_face(g, rng, -1)?;
    let h = h.without_cuts();
    validate(&h).ok().filter(|s| !s.orientable).map(|_| h)
}

fn insert_across_face(g: &EmbeddedGraph, rng: &mut impl Rng, dchi: i64) -> Option<EmbeddedGraph> {
    let before = validate(g).ok()?;
    let face = &before.faces[rng.gen_range(0..before.num_faces())];
    if face.len() < 3 {
        return None;
    }
    let i = rng.gen_range(0..face.len());
    let j = rng.gen_range(0..face.len());
    let (a, b) = (face[i], face[j]);
    if g.tail(a.half) == g.tail(b.half) {
        return None;
    }
    let weight = random_weight(rng);
    let mut options: Vec<(i8, i8, i8, bool)> = Vec::new();
    for oa in [1, -1] {
        for ob in [1, -1] {
            for sign in [1, -1] {
                for in_omega in [false, true] {
                    options.push((oa, ob, sign, in_omega));
                }
            }
        }
    }
    options.shuffle(rng);
    for (oa, ob, sign, in_omega) in options {
        let members: &[&str] = if in_omega { &["omega"] } else { &[] };
        let Ok(h) = g.insert_edge((a.half, oa), (b.half, ob), weight.clone(), sign, members) else {
            continue;
        };
        let omega = h.cut("omega").cloned();
        let h = with_omega(h, omega);
        let Ok(after) = validate(&h) else { continue };
        let faces_ok = after.num_faces() as i64 == before.num_faces() as i64 + 1 + dchi;
        let kind_ok = dchi != 0 || after.orientable == before.orientable;
        if after.euler_char == before.euler_char + dchi
            && faces_ok
            && kind_ok
            && (dchi != 0 || omega_ok(&h))
        {
            return Some(h);
        }
    }
    None
}

/// A few random deletions and chords followed by random weights.
pub fn perturb(g: &EmbeddedGraph, rng: &mut impl Rng) -> EmbeddedGraph {
    let mut g = g.clone();
    for _ in 0..rng.gen_range(0..4) {
        if let Some(h) = try_delete_edge(&g, rng) {
            g = h;
        }
    }
    for _ in 0..rng.gen_range(0..3) {
        if let Some(h) = try_insert_chord(&g, rng) {
            g = h;
        }
    }
    randomize_weights(&g, rng)
}

fn pick<T: Clone>(items: &[T], rng: &mut impl Rng) -> T {
    items[rng.gen_range(0..items.len())].clone()
}

/// Graphs in the projective plane with an even number of vertices, at most 14.
pub fn projective_instances(count: usize, seed: u64) -> Vec<EmbeddedGraph> {
    let bases = [
        lattice(Family::Square, Surface::Mobius, 2, 2),
        lattice(Family::Square, Surface::Mobius, 2, 3),
        lattice(Family::Square, Surface::Mobius, 3, 2),
        lattice(Family::Square, Surface::Mobius, 2, 4),
        lattice(Family::Square, Surface::Mobius, 4, 2),
        lattice(Family::Square, Surface::Mobius, 3, 4),
        lattice(Family::Square, Surface::Mobius, 4, 3),
        lattice(Family::Square, Surface::Mobius, 2, 6),
        lattice(Family::Hexagonal, Surface::Mobius, 2, 4),
        lattice(Family::Triangular, Surface::Mobius, 3, 4),
        lattice(Family::SquareOctagon, Surface::Mobius, 1, 2),
    ];
    let mut rng = rng(seed);
    (0..count)
        .map(|_| perturb(&pick(&bases, &mut rng), &mut rng))
        .collect()
}

/// Graphs in the Klein bottle with an even number of vertices, at most 14:
/// perturbed Klein lattices and projective lattices with an extra crosscap.
pub fn klein_instances(count: usize, seed: u64) -> Vec<EmbeddedGraph> {
    let bases = [
        lattice(Family::Square, Surface::Klein, 2, 2),
        lattice(Family::Square, Surface::Klein, 2, 3),
        lattice(Family::Square, Surface::Klein, 3, 2),
        lattice(Family::Square, Surface::Klein, 2, 4),
        lattice(Family::Square, Surface::Klein, 4, 2),
        lattice(Family::Square, Surface::Klein, 3, 4),
        lattice(Family::Square, Surface::Klein, 4, 3),
        lattice(Family::Square, Surface::Klein, 2, 6),
    ];
    let projective = [
        lattice(Family::Square, Surface::Mobius, 2, 2),
        lattice(Family::Square, Surface::Mobius, 2, 3),
        lattice(Family::Square, Surface::Mobius, 3, 4),
        lattice(Family::Triangular, Surface::Mobius, 3, 4),
    ];
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g = if rng.gen_bool(0.3) {
            match try_add_crosscap(&pick(&projective, &mut rng), &mut rng) {
                Some(g) => g,
                None => continue,
            }
        } else {
            pick(&bases, &mut rng)
        };
        out.push(perturb(&g, &mut rng));
    }
    out
}

/// Non-orientable surfaces of genus `h` (1, 2 or 3) with at most 12 vertices.
pub fn genus_instances(h: usize, count: usize, seed: u64) -> Vec<EmbeddedGraph> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g = match h {
            1 => pick(
                &[
                    lattice(Family::Square, Surface::Mobius, 2, 2),
                    lattice(Family::Square, Surface::Mobius, 3, 4),
                ],
                &mut rng,
            ),
            2 => pick(
                &[
                    lattice(Family::Square, Surface::Klein, 2, 3),
                    lattice(Family::Square, Surface::Klein, 3, 4),
                ],
                &mut rng,
            ),
            _ => {
                let base = pick(
                    &[
                        lattice(Family::Square, Surface::Klein, 2, 3),
                        lattice(Family::Square, Surface::Torus, 3, 4),
                    ],
                    &mut rng,
                );
                match try_add_crosscap(&base, &mut rng) {
                    Some(g) => g,
                    None => continue,
                }
            }
        };
        let g = perturb(&g, &mut rng);
        if validate(&g).is_ok_and(|s| !s.orientable && s.h1_dim() == h) {
            out.push(g);
        }
    }
    out
}
