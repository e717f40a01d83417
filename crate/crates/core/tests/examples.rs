//! Worked examples on the standard lattices.

mod common;

use std::collections::BTreeSet;

use num_traits::Zero;
use surface_dimer::cover::orientation_cover;
use surface_dimer::dimer::{first_matching, twisted_partition, Matching, PfaffianSetup};
use surface_dimer::kasteleyn::{find_kasteleyn, flip_cocycle, is_kasteleyn};
use surface_dimer::lattices::{
    generate, horizontal_matching, translation, Family, LatticeSpec, Surface, Weights,
};
use surface_dimer::pfaffian::{check_perfect, twisted_pfaffian};
use surface_dimer::quadform::{
    enhancement_sum, enumerate_enhancements, fit_enhancement, geometric_value, induced_cover_form,
};
use surface_dimer::scalar::{int, Exact, Field, GaussianField};
use surface_dimer::surface::{
    bipartite_flags, cycle_class, default_omega, homology_basis, simple_cycles, validate,
};
use surface_dimer::{Class, EdgeSet, EmbeddedGraph, HomologyBasis};

fn lattice(family: Family, surface: Surface, m: usize, n: usize) -> EmbeddedGraph {
    common::lattice(family, surface, m, n)
}

fn basis_of(g: &EmbeddedGraph) -> HomologyBasis {
    homology_basis(g, &validate(g).unwrap()).unwrap()
}

fn twisted_value(g: &EmbeddedGraph, setup: &PfaffianSetup, subset: u64, d0: &Matching) -> Exact {
    twisted_pfaffian::<Exact>(g, &setup.flipped(subset), &setup.omega, Some(d0))
        .unwrap()
        .value
}

#[test]
fn first_homology_and_w1() {
    let sphere = basis_of(&lattice(Family::Square, Surface::Plane, 2, 2));
    assert_eq!(sphere.dim(), 0);
    let rp2 = basis_of(&lattice(Family::Square, Surface::Mobius, 2, 2));
    assert_eq!(rp2.w1_vector(), vec![1]);
    let klein = basis_of(&lattice(Family::Square, Surface::Klein, 2, 4));
    assert_eq!(klein.dim(), 2);
    let pair = klein.classes().any(|a| {
        klein
            .classes()
            .any(|b| klein.w1_of(a) == 0 && klein.w1_of(b) == 1 && klein.intersect(a, b) == 1)
    });
    assert!(pair, "no classes with w1 = (0, 1) meeting once");
}

#[test]
fn cycle_classes() {
    let lat = generate(&LatticeSpec::square(Surface::Mobius, 3, 4)).unwrap();
    let g = &lat.graph;
    let surface = validate(g).unwrap();
    let basis = homology_basis(g, &surface).unwrap();
    let empty = EdgeSet::empty(g.num_edges());
    assert_eq!(cycle_class(g, &empty, &basis).unwrap(), Class::zero());
    for f in 0..surface.num_faces() {
        let boundary = surface
            .face_edges(f)
            .fold(EdgeSet::empty(g.num_edges()), |mut s, e| {
                s.toggle(e);
                s
            });
        assert_eq!(cycle_class(g, &boundary, &basis).unwrap(), Class::zero());
    }
    let d0 = horizontal_matching(&lat).unwrap();
    let tau = translation(&lat).unwrap();
    let moved = Matching::new(tau.apply_edges(d0.edges()));
    let cycle = d0.symmetric_difference(&moved, g.num_edges());
    assert_eq!(cycle_class(g, &cycle, &basis).unwrap(), Class(1));
}

#[test]
fn translated_horizontal_matchings() {
    for (m, n) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        for (surface, rows, odd) in [
            (Surface::Mobius, 2 * m - 1, true),
            (Surface::Cylinder, 2 * m, false),
            (Surface::Klein, 2 * m - 1, true),
        ] {
            let lat = generate(&LatticeSpec::square(surface, rows, 2 * n)).unwrap();
            let g = &lat.graph;
            let d0 = horizontal_matching(&lat).unwrap();
            check_perfect(g, &d0).unwrap();
            let tau = translation(&lat).unwrap();
            let moved = Matching::new(tau.apply_edges(d0.edges()));
            let cycle = d0.symmetric_difference(&moved, g.num_edges());
            let basis = basis_of(g);
            let class = cycle_class(g, &cycle, &basis).unwrap();
            assert_eq!(basis.w1_of(class) == 1, odd, "{surface:?} {rows}x{}", 2 * n);
        }
    }
}

#[test]
fn bipartiteness() {
    let cases = [
        (Family::Square, Surface::Cylinder, 2, 4, true, true),
        (Family::Square, Surface::Mobius, 2, 2, true, false),
        (Family::Square, Surface::Mobius, 4, 2, true, false),
        (Family::Hexagonal, Surface::Mobius, 2, 4, true, false),
        (Family::SquareOctagon, Surface::Mobius, 1, 2, true, true),
        (Family::SquareOctagon, Surface::Mobius, 2, 2, true, false),
        (Family::Triangular, Surface::Mobius, 3, 4, false, false),
    ];
    for (family, surface, m, n, local, global) in cases {
        let g = lattice(family, surface, m, n);
        let s = validate(&g).unwrap();
        let basis = homology_basis(&g, &s).unwrap();
        let flags = bipartite_flags(&g, &s, &basis);
        let name = format!("{family:?} {surface:?} {m}x{n}");
        assert_eq!(flags.locally_bipartite, local, "{name}");
        assert_eq!(flags.bipartite, global, "{name}");
        if local {
            let ell_is_zero = basis.classes().all(|a| flags.ell(a).unwrap() == 0);
            assert_eq!(ell_is_zero, global, "{name}");
        }
    }
}

#[test]
fn orientation_covers_of_small_lattices() {
    let g = lattice(Family::Square, Surface::Mobius, 2, 2);
    let cm = orientation_cover(&g, &default_omega(&g)).unwrap();
    assert_eq!(cm.cover.num_vertices(), 8);
    assert_eq!(cm.surface.genus, 0);
    let g = lattice(Family::Square, Surface::Klein, 2, 4);
    let cm = orientation_cover(&g, &default_omega(&g)).unwrap();
    assert!(cm.surface.orientable);
    assert_eq!(cm.surface.genus, 1);
}

#[test]
fn generated_lattices_admit_kasteleyn_orientations() {
    for family in [
        Family::Square,
        Family::Triangular,
        Family::Hexagonal,
        Family::SquareOctagon,
    ] {
        for surface in [
            Surface::Mobius,
            Surface::Klein,
            Surface::Torus,
            Surface::Cylinder,
        ] {
            for (m, n) in [(2, 2), (2, 4), (3, 4), (4, 4)] {
                let Ok(lat) = generate(&LatticeSpec::new(family, surface, m, n)) else {
                    continue;
                };
                let g = &lat.graph;
                if g.num_vertices() % 2 == 1 {
                    continue;
                }
                let omega = default_omega(g);
                let k = find_kasteleyn(g, &lat.surface, &omega).unwrap();
                assert!(
                    is_kasteleyn(g, &lat.surface, &omega, &k).unwrap(),
                    "{family:?} {surface:?} {m}x{n}"
                );
            }
        }
    }
}

#[test]
fn planar_twisted_pfaffian_is_the_partition_function() {
    let g = common::randomize_weights(
        &lattice(Family::Square, Surface::Plane, 4, 4),
        &mut common::rng(1),
    );
    let setup = PfaffianSetup::new(&g).unwrap();
    let d0 = first_matching(&g).unwrap();
    let tz = twisted_partition(&g, &setup.basis, Some(&d0)).unwrap();
    assert_eq!(tz.classes, vec![tz.total.clone()]);
    assert_eq!(
        twisted_value(&g, &setup, 0, &d0),
        Exact::from_weight(&tz.total)
    );
}

#[test]
fn mobius_twisted_pfaffian_is_z0_plus_or_minus_i_z1() {
    for g in common::projective_instances(40, 21) {
        let setup = PfaffianSetup::new(&g).unwrap();
        let Some(d0) = first_matching(&g) else {
            continue;
        };
        let tz = twisted_partition(&g, &setup.basis, Some(&d0)).unwrap();
        let p = twisted_value(&g, &setup, 0, &d0);
        let z0 = Exact::from_weight(&tz.classes[0]);
        let iz1 = Exact::i_pow(1).mul(&Exact::from_weight(&tz.classes[1]));
        assert!(p == z0.add(&iz1) || p == z0.sub(&iz1), "P = {p}");
    }
}

#[test]
fn twisted_classes_on_mobius_squares() {
    for (m, n) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        let even = lattice(Family::Square, Surface::Mobius, 2 * m, 2 * n);
        let tz = twisted_partition(&even, &basis_of(&even), None).unwrap();
        assert!(tz.classes[1].is_zero(), "{}x{}", 2 * m, 2 * n);
        let odd = lattice(Family::Square, Surface::Mobius, 2 * m - 1, 2 * n);
        let tz = twisted_partition(&odd, &basis_of(&odd), None).unwrap();
        assert_eq!(tz.classes[0], tz.classes[1], "{}x{}", 2 * m - 1, 2 * n);
    }
}

#[test]
fn enhancement_counts() {
    let rp2 = basis_of(&lattice(Family::Square, Surface::Mobius, 2, 2));
    let values: BTreeSet<u8> = enumerate_enhancements(&rp2)
        .unwrap()
        .iter()
        .map(|q| q.get(Class(1)))
        .collect();
    assert_eq!(values, BTreeSet::from([1, 3]));

    let klein = basis_of(&lattice(Family::Square, Surface::Klein, 2, 4));
    let qs = enumerate_enhancements(&klein).unwrap();
    assert_eq!(qs.len(), 4);
    let b1 = klein
        .classes()
        .find(|&a| !a.is_zero() && klein.w1_of(a) == 0)
        .unwrap();
    let b2 = klein.classes().find(|&a| klein.w1_of(a) == 1).unwrap();
    let pairs: BTreeSet<(u8, u8)> = qs.iter().map(|q| (q.get(b1), q.get(b2))).collect();
    assert_eq!(pairs, BTreeSet::from([(0, 1), (0, 3), (2, 1), (2, 3)]));

    let torus = basis_of(&lattice(Family::Square, Surface::Torus, 2, 4));
    let qs = enumerate_enhancements(&torus).unwrap();
    assert_eq!(qs.len(), 4);
    assert!(qs.iter().all(|q| q.values.iter().all(|&v| v % 2 == 0)));
}

#[test]
fn projective_plane_induces_the_trivial_form_on_the_sphere() {
    let g = lattice(Family::Square, Surface::Mobius, 2, 2);
    let basis = basis_of(&g);
    let cm = orientation_cover(&g, &default_omega(&g)).unwrap();
    let cover_basis = homology_basis(&cm.cover, &cm.surface).unwrap();
    assert_eq!(cover_basis.dim(), 0);
    for q in enumerate_enhancements(&basis).unwrap() {
        let form = induced_cover_form(&g, &basis, &q, &cm, &cover_basis).unwrap();
        assert_eq!(form.values, vec![0]);
    }
}

#[test]
fn fitted_enhancement_on_the_mobius_lattice() {
    let lat = generate(
        &LatticeSpec::square(Surface::Mobius, 3, 4).with_weights(Weights::Xy(int(2), int(3))),
    )
    .unwrap();
    let g = &lat.graph;
    let setup = PfaffianSetup::new(g).unwrap();
    let d0 = first_matching(g).unwrap();
    let tz = twisted_partition(g, &setup.basis, Some(&d0)).unwrap();
    let p = twisted_value(g, &setup, 0, &d0);
    let q = fit_enhancement(
        g,
        &setup.kasteleyn,
        &setup.omega,
        &d0,
        &setup.basis,
        &tz,
        &p,
    )
    .unwrap();
    assert!(matches!(q.get(Class(1)), 1 | 3));
    let flipped = flip_cocycle(&setup.surface, &setup.kasteleyn, &setup.basis.cocycles[0]).unwrap();
    let p2 = twisted_pfaffian::<Exact>(g, &flipped, &setup.omega, Some(&d0))
        .unwrap()
        .value;
    let q2 = fit_enhancement(g, &flipped, &setup.omega, &d0, &setup.basis, &tz, &p2).unwrap();
    let shift = setup.basis.pairing.left_mul(1) & 1;
    assert_eq!(q2, q.shifted(shift));
}

/// Flipping `K` along the cocycles in `S` shifts the enhancement by the
/// pairing with `γ_S`, on every instance and every subset.
#[test]
fn cocycle_flips_shift_the_enhancement() {
    let instances = common::projective_instances(30, 8)
        .into_iter()
        .chain(common::klein_instances(30, 9))
        .chain(common::genus_instances(3, 10, 10));
    for g in instances {
        let setup = PfaffianSetup::new(&g).unwrap();
        let Some(d0) = first_matching(&g) else {
            continue;
        };
        let basis = &setup.basis;
        let tz = twisted_partition(&g, basis, Some(&d0)).unwrap();
        let subsets = 1u64 << basis.dim();
        let values: Vec<Exact> = (0..subsets)
            .map(|s| twisted_value(&g, &setup, s, &d0))
            .collect();
        let shift = |s: u64| -> u64 {
            (0..basis.dim())
                .filter(|&j| (basis.pairing.left_mul(1 << j) & s).count_ones() % 2 == 1)
                .fold(0, |acc, j| acc | 1 << j)
        };
        let consistent = enumerate_enhancements(basis).unwrap().iter().any(|q| {
            (0..subsets).all(|s| enhancement_sum(&q.shifted(shift(s)), &tz) == values[s as usize])
        });
        assert!(consistent);
    }
}

#[test]
fn geometric_values_agree_with_the_fitted_enhancement() {
    let mut checked = 0;
    let instances = common::projective_instances(40, 3)
        .into_iter()
        .chain(common::klein_instances(30, 4));
    for g in instances {
        let setup = PfaffianSetup::new(&g).unwrap();
        let Some(d0) = first_matching(&g) else {
            continue;
        };
        let tz = twisted_partition(&g, &setup.basis, Some(&d0)).unwrap();
        let p = twisted_value(&g, &setup, 0, &d0);
        let candidates: Vec<_> = enumerate_enhancements(&setup.basis)
            .unwrap()
            .into_iter()
            .filter(|q| enhancement_sum(q, &tz) == p)
            .collect();
        if candidates.len() != 1 {
            continue;
        }
        for walk in simple_cycles(&g).iter().filter(|w| w.w1(&g) == 0) {
            if let Some(v) = geometric_value(&g, &setup.omega, &setup.kasteleyn, &d0, walk) {
                assert_eq!(v, candidates[0].get(setup.basis.walk_class(walk)));
                checked += 1;
            }
        }
    }
    assert!(checked > 100, "only {checked} cycles checked");
}

/// A Klein bottle with a single face, where the only curve with an
/// orientation-reversing lift in the right class passes vertex 0 twice.
#[test]
fn induced_form_on_a_one_face_klein_bottle() {
    let g = surface_dimer::io::read_graph(include_bytes!("data/klein_one_face.json")).unwrap();
    let setting = surface_dimer::identities::CoverSetting::new(&g).unwrap();
    assert_eq!(setting.basis.dim(), 2);
    let mut forms = BTreeSet::new();
    for q in enumerate_enhancements(&setting.basis).unwrap() {
        let form = induced_cover_form(&g, &setting.basis, &q, &setting.cover, &setting.cover_basis)
            .unwrap();
        forms.insert(form.values);
    }
    assert_eq!(forms.len(), 2);
    let report = surface_dimer::identities::verify_main(
        &g,
        None,
        None,
        &surface_dimer::identities::VerifyOptions::default(),
    )
    .unwrap();
    assert_eq!(report.verdict, surface_dimer::identities::Verdict::Pass);
}
