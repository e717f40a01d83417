//! End-to-end identity reports on lattices and fuzzed graphs.

mod common;

use surface_dimer::identities::{
    verify_klein_vanishing, verify_lattice_equation, verify_main, verify_prop24, verify_thm1,
    verify_thm2, LatticeEquation, Report, Thm1Variant, Verdict, VerifyOptions,
};
use surface_dimer::lattices::{generate, translation, Family, LatticeSpec, Surface, Weights};
use surface_dimer::scalar::{int, rational};
use surface_dimer::surface::validate;
use surface_dimer::{EmbeddedGraph, Mode};

fn assert_pass(report: &Report) {
    let failed: Vec<_> = report.failed_checks().map(|c| c.name.clone()).collect();
    assert_eq!(
        report.verdict,
        Verdict::Pass,
        "{} on {}: preconditions {:?}, failed {failed:?}",
        report.identity,
        report.instance,
        report.preconditions
    );
}

fn fast() -> VerifyOptions {
    VerifyOptions {
        pfaffian: false,
        ..VerifyOptions::default()
    }
}

fn with_random_weights(
    family: Family,
    surface: Surface,
    m: usize,
    n: usize,
    seed: u64,
) -> EmbeddedGraph {
    common::randomize_weights(
        &common::lattice(family, surface, m, n),
        &mut common::rng(seed),
    )
}

#[test]
fn lattice_equations_on_the_smallest_grid() {
    for eq in [
        LatticeEquation::CylinderEven,
        LatticeEquation::CylinderOdd,
        LatticeEquation::Torus,
    ] {
        for (x, y) in [(int(1), int(1)), (int(2), int(3)), (rational(1, 2), int(5))] {
            let report =
                verify_lattice_equation(eq, 1, 1, &x, &y, &VerifyOptions::default()).unwrap();
            assert_pass(&report);
        }
    }
}

#[test]
fn float_mode_reports_agree() {
    let opts = VerifyOptions {
        mode: Mode::Float,
        ..VerifyOptions::default()
    };
    let report =
        verify_lattice_equation(LatticeEquation::Torus, 1, 2, &int(2), &int(3), &opts).unwrap();
    assert_pass(&report);
}

#[test]
fn two_square_identity_on_the_projective_plane() {
    let g = common::lattice(Family::Square, Surface::Mobius, 2, 2);
    assert_pass(&verify_prop24(&g, None, &VerifyOptions::default()).unwrap());
    for g in common::projective_instances(20, 40) {
        assert_pass(&verify_prop24(&g, None, &VerifyOptions::default()).unwrap());
    }
}

#[test]
fn graphs_without_perfect_matchings_give_zero_on_both_sides() {
    let mut rng = common::rng(2);
    let mut found = 0;
    for g in common::projective_instances(200, 77) {
        let mut g = g;
        for _ in 0..6 {
            if let Some(h) = common::try_delete_edge(&g, &mut rng) {
                g = h;
            }
        }
        if surface_dimer::dimer::first_matching(&g).is_none() {
            let report = verify_prop24(&g, None, &VerifyOptions::default()).unwrap();
            assert_pass(&report);
            found += 1;
        }
    }
    assert!(found > 0, "no matching-free instance generated");
}

#[test]
fn locally_bipartite_lattices_square_exactly() {
    let cases = [
        (Family::Square, 2, 2),
        (Family::Square, 4, 2),
        (Family::Square, 2, 4),
        (Family::Hexagonal, 2, 4),
        (Family::SquareOctagon, 2, 2),
        (Family::SquareOctagon, 1, 1),
    ];
    for (i, (family, m, n)) in cases.into_iter().enumerate() {
        let g = with_random_weights(family, Surface::Mobius, m, n, i as u64);
        let report = verify_thm1(
            &g,
            Thm1Variant::LocallyBipartite,
            None,
            None,
            &VerifyOptions::default(),
        )
        .unwrap();
        assert_pass(&report);
        assert_eq!(report.preconditions.get("locally bipartite"), Some(&true));
        assert_eq!(report.preconditions.get("not bipartite"), Some(&true));
    }
}

#[test]
fn translation_invariant_lattices_give_half_the_square() {
    let specs = [
        LatticeSpec::square(Surface::Mobius, 1, 2),
        LatticeSpec::square(Surface::Mobius, 1, 4),
        LatticeSpec::square(Surface::Mobius, 3, 2),
        LatticeSpec::square(Surface::Mobius, 3, 4).with_weights(Weights::Xy(int(2), int(3))),
        LatticeSpec::new(Family::Triangular, Surface::Mobius, 3, 4).with_weights(Weights::Xyz(
            int(2),
            int(3),
            rational(1, 2),
        )),
    ];
    for spec in specs {
        let lat = generate(&spec).unwrap();
        let tau = translation(&lat).unwrap();
        let report = verify_thm1(
            &lat.graph,
            Thm1Variant::Translation,
            Some(&tau),
            None,
            &VerifyOptions::default(),
        )
        .unwrap();
        assert_pass(&report);
        assert!(report
            .checks
            .iter()
            .any(|c| c.name.contains("Z_0 = Z_1") && c.holds));
    }
}

#[test]
fn klein_lattices_give_half_the_square() {
    for (rows, cols, weights) in [
        (3, 2, Weights::Xy(rational(3, 2), int(1))),
        (3, 4, Weights::Xy(int(1), int(2))),
        (3, 4, Weights::Uniform),
    ] {
        let lat = generate(&LatticeSpec::square(Surface::Klein, rows, cols).with_weights(weights))
            .unwrap();
        let tau = translation(&lat).unwrap();
        let report = verify_thm2(&lat.graph, Some(&tau), None, &VerifyOptions::default()).unwrap();
        assert_pass(&report);
    }
}

/// A single row has no vertical gluing edges, so the surface degenerates and
/// only the lattice equation applies.
#[test]
fn single_row_klein_lattice_is_not_a_klein_bottle() {
    let spec = LatticeSpec::square(Surface::Klein, 1, 2).with_weights(Weights::Xy(int(2), int(3)));
    let lat = generate(&spec).unwrap();
    let tau = translation(&lat).unwrap();
    let report = verify_thm2(&lat.graph, Some(&tau), None, &fast()).unwrap();
    assert_eq!(report.verdict, Verdict::PreconditionFailed);
    let report =
        verify_lattice_equation(LatticeEquation::Torus, 1, 1, &int(2), &int(3), &fast()).unwrap();
    assert_pass(&report);
}

#[test]
fn general_identity_on_fuzzed_surfaces() {
    for h in 1..=3 {
        for g in common::genus_instances(h, 8, 100 + h as u64) {
            let report = verify_main(&g, None, None, &VerifyOptions::default()).unwrap();
            assert_pass(&report);
            let distinct = report
                .checks
                .iter()
                .find(|c| c.name == "distinct identities")
                .expect("distinct identities check");
            assert!(distinct.holds);
        }
    }
}

#[test]
fn general_identity_reduces_to_the_two_square_identity_on_the_projective_plane() {
    for g in common::projective_instances(10, 55) {
        let main = verify_main(&g, None, None, &fast()).unwrap();
        let prop = verify_prop24(&g, None, &fast()).unwrap();
        assert_pass(&main);
        assert_pass(&prop);
        let (lhs, rhs) = (main.headline().unwrap(), prop.headline().unwrap());
        assert_eq!(lhs.lhs, rhs.lhs);
        assert_eq!(lhs.rhs, rhs.rhs);
    }
}

#[test]
fn unmet_preconditions_are_reported() {
    let torus = common::lattice(Family::Square, Surface::Torus, 2, 4);
    for report in [
        verify_prop24(&torus, None, &fast()).unwrap(),
        verify_thm2(&torus, None, None, &fast()).unwrap(),
        verify_main(&torus, None, None, &fast()).unwrap(),
    ] {
        assert_eq!(
            report.verdict,
            Verdict::PreconditionFailed,
            "{}",
            report.identity
        );
    }
    let triangular = common::lattice(Family::Triangular, Surface::Mobius, 3, 4);
    let report = verify_thm1(
        &triangular,
        Thm1Variant::LocallyBipartite,
        None,
        None,
        &fast(),
    )
    .unwrap();
    assert_eq!(report.verdict, Verdict::PreconditionFailed);
    assert_eq!(report.preconditions.get("locally bipartite"), Some(&false));
    let bipartite = common::lattice(Family::SquareOctagon, Surface::Mobius, 1, 2);
    let report = verify_thm1(
        &bipartite,
        Thm1Variant::LocallyBipartite,
        None,
        None,
        &fast(),
    )
    .unwrap();
    assert_eq!(report.verdict, Verdict::PreconditionFailed);
    let klein = common::lattice(Family::Square, Surface::Klein, 2, 4);
    let report = verify_prop24(&klein, None, &fast()).unwrap();
    assert_eq!(report.verdict, Verdict::PreconditionFailed);
}

#[test]
fn weighted_translation_must_preserve_weights() {
    let lat = generate(&LatticeSpec::square(Surface::Mobius, 3, 4)).unwrap();
    let tau = translation(&lat).unwrap();
    let g = common::randomize_weights(&lat.graph, &mut common::rng(4));
    let report = verify_thm1(&g, Thm1Variant::Translation, Some(&tau), None, &fast()).unwrap();
    assert_eq!(report.verdict, Verdict::PreconditionFailed);
}

#[test]
fn klein_vanishing_check_runs_to_a_verdict() {
    for rows in [2, 4] {
        let g = common::lattice(Family::Square, Surface::Klein, rows, 2);
        validate(&g).unwrap();
        let report = verify_klein_vanishing(&g, None).unwrap();
        assert!(!report.checks.is_empty() || report.verdict == Verdict::PreconditionFailed);
    }
}
