use fuzzobs::linalg::{CMat, C64};
use fuzzobs::torus::{self, Arc, Atom, CMatrix, HerglotzSequence, Reconstruction, TorusMeasure};
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

fn circular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Atomic measures with `1..=max_atoms` atoms at least `sep` apart and no
/// weight below 0.05.
fn atomic(max_atoms: usize, sep: f64) -> impl Strategy<Value = TorusMeasure> {
    prop::collection::vec((0.0f64..TAU, 0.05f64..1.0), 1..=max_atoms)
        .prop_filter("separated atoms", move |atoms| {
            atoms.iter().enumerate().all(|(i, a)| {
                atoms[i + 1..].iter().all(|b| circular_gap(a.0, b.0) >= sep)
            })
        })
        .prop_map(|atoms| {
            let total: f64 = atoms.iter().map(|a| a.1).sum();
            TorusMeasure::atomic(
                atoms
                    .into_iter()
                    .map(|(angle, w)| Atom { angle, weight: w / total })
                    .collect(),
            )
            .unwrap()
        })
}

fn atoms_of(m: &TorusMeasure) -> Vec<Atom> {
    match m {
        TorusMeasure::Atomic(a) => a.clone(),
        TorusMeasure::Grid(_) => panic!("expected an atomic measure"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn measure_matrices_are_valid_and_toeplitz(rho in atomic(5, 0.0), k in 1usize..=10) {
        let c = torus::cmatrix_from_measure(&rho, k);
        prop_assert!(torus::validate_cmatrix(&c).valid);
        prop_assert!(torus::commutes_with_sharp(&c).toeplitz);
        let phi = torus::herglotz_sequence(&c).unwrap();
        for j in -(k as i64)..=k as i64 {
            prop_assert!((phi.get(j) - rho.moment(j)).norm() <= 1e-12);
        }
    }

    #[test]
    fn caratheodory_recovers_separated_atoms(rho in atomic(4, 0.4)) {
        let k = 12;
        let phi = torus::herglotz_sequence(&torus::cmatrix_from_measure(&rho, k)).unwrap();
        let back = torus::herglotz_reconstruct(&phi, Reconstruction::Caratheodory).unwrap();
        prop_assert!(torus::moment_residual(&back, &phi) <= 1e-8);
        let (want, got) = (atoms_of(&rho), atoms_of(&back));
        prop_assert_eq!(want.len(), got.len());
        for a in &want {
            let nearest = got
                .iter()
                .min_by(|x, y| circular_gap(x.angle, a.angle).total_cmp(&circular_gap(y.angle, a.angle)))
                .unwrap();
            prop_assert!(circular_gap(nearest.angle, a.angle) <= 1e-6);
            prop_assert!((nearest.weight - a.weight).abs() <= 1e-6);
        }
    }

    #[test]
    fn fejer_densities_are_positive_with_damped_moments(
        rho in atomic(6, 0.0),
        k in 1usize..=12,
        extra in 1usize..=40,
    ) {
        let grid = 2 * k + extra;
        let phi = torus::herglotz_sequence(&torus::cmatrix_from_measure(&rho, k)).unwrap();
        let d = torus::herglotz_reconstruct(&phi, Reconstruction::Fejer { grid }).unwrap();
        let TorusMeasure::Grid(values) = &d else { panic!("grid expected") };
        prop_assert!(values.iter().all(|&v| v >= -1e-9));
        for j in -(k as i64)..=k as i64 {
            let damp = 1.0 - j.unsigned_abs() as f64 / (k + 1) as f64;
            prop_assert!((d.moment(j) - phi.get(j) * damp).norm() <= 1e-10);
        }
    }

    #[test]
    fn arc_partitions_resolve_the_identity(rho in atomic(4, 0.0), k in 1usize..=8, arcs in 1usize..=12) {
        for c in [torus::cmatrix_from_measure(&rho, k), torus::toigo_cmatrix(k)] {
            let mut sum = CMat::zeros(c.side());
            for arc in Arc::partition(arcs) {
                sum = &sum + &torus::arc_effect(&c, &arc);
            }
            prop_assert!(sum.max_diff(&CMat::identity(c.side())) <= 1e-13);
        }
    }

    #[test]
    fn arc_moments_add_over_splits(start in 0.0f64..TAU, a in 0.0f64..3.0, b in 0.0f64..3.0, j in -6i64..=6) {
        let mid = start + a;
        let whole = Arc::new(start, mid + b);
        let left = Arc::new(start, mid);
        let right = Arc::new(mid, mid + b);
        prop_assert!((whole.moment(j) - left.moment(j) - right.moment(j)).norm() <= 1e-13);
    }
}

#[test]
fn two_atom_fixture_round_trips() {
    let rho = TorusMeasure::atomic(vec![
        Atom { angle: 0.0, weight: 0.6 },
        Atom { angle: PI, weight: 0.4 },
    ])
    .unwrap();
    let phi = torus::herglotz_sequence(&torus::cmatrix_from_measure(&rho, 16)).unwrap();
    // closed form: Phi(k) = 0.6 + 0.4 (-1)^k
    for k in -16i64..=16 {
        let want = 0.6 + 0.4 * if k % 2 == 0 { 1.0 } else { -1.0 };
        assert!((phi.get(k) - C64::new(want, 0.0)).norm() < 1e-14);
    }
    let back = atoms_of(&torus::herglotz_reconstruct(&phi, Reconstruction::Caratheodory).unwrap());
    assert_eq!(back.len(), 2);
    let zero = back.iter().find(|a| circular_gap(a.angle, 0.0) < 1e-6).unwrap();
    let half = back.iter().find(|a| circular_gap(a.angle, PI) < 1e-6).unwrap();
    assert!((zero.weight - 0.6).abs() < 1e-6 && (half.weight - 0.4).abs() < 1e-6);
}

#[test]
fn toigo_matrices_are_valid_but_not_toeplitz() {
    for k in 5..=10 {
        let c = torus::toigo_cmatrix(k);
        assert!(torus::validate_cmatrix(&c).valid, "K = {k}");
        let check = torus::commutes_with_sharp(&c);
        assert!(!check.toeplitz);
        assert!(check.violates(2, 4, 1));
        assert_eq!(c.get(2, 4), C64::new(1.0, 0.0));
        assert_eq!(c.get(3, 5), C64::new(0.0, 0.0));
        assert!(matches!(torus::herglotz_sequence(&c), Err(torus::TorusError::NotToeplitz(_))));
    }
}

#[test]
fn flat_sequences_give_flat_fejer_densities() {
    let phi = HerglotzSequence::from_fn(6, |k| C64::new(if k == 0 { 1.0 } else { 0.0 }, 0.0)).unwrap();
    let TorusMeasure::Grid(d) = torus::herglotz_reconstruct(&phi, Reconstruction::Fejer { grid: 64 }).unwrap() else {
        panic!("grid expected")
    };
    assert!(d.iter().all(|v| (v - 1.0).abs() < 1e-14));
}

#[test]
fn identity_cmatrix_gives_half_on_half_circle() {
    let c = CMatrix::identity(4);
    let e = torus::arc_effect(&c, &Arc::new(0.0, PI));
    assert!(e.max_diff(&CMat::identity(9).scale(0.5)) < 1e-15);
}

fn two_atoms() -> TorusMeasure {
    TorusMeasure::atomic(vec![
        Atom { angle: 0.7, weight: 0.6 },
        Atom { angle: 2.9, weight: 0.4 },
    ])
    .unwrap()
}

#[test]
fn sharp_localization_commutator_is_a_truncation_effect() {
    // entries with n + m = 0 see a symmetric inner sum and commute exactly
    let arcs = Arc::partition(8);
    let mut values = Vec::new();
    for k in [2usize, 4, 8, 16] {
        let c = CMatrix::all_ones(k);
        assert!(torus::commutator_diagnostic(&c, &arcs, 0).value <= 1e-12);
        values.push(torus::commutator_diagnostic(&c, &arcs, torus::default_inner(k)).value);
    }
    assert!(values.windows(2).all(|w| w[0] > w[1]), "{values:?}");
}

#[test]
fn toeplitz_commutator_shrinks_with_the_window() {
    let arcs = Arc::partition(8);
    let values: Vec<f64> = [4usize, 8, 16]
        .iter()
        .map(|&k| {
            let c = torus::cmatrix_from_measure(&two_atoms(), k);
            torus::commutator_diagnostic(&c, &arcs, torus::default_inner(k)).value
        })
        .collect();
    assert!(values[1] <= 0.15, "{values:?}");
    assert!(values[0] > values[1] && values[1] > values[2], "{values:?}");
}

#[test]
fn toigo_commutator_stays_away_from_zero() {
    let arcs = Arc::partition(8);
    let c = torus::toigo_cmatrix(6);
    let d = torus::commutator_diagnostic(&c, &arcs, torus::default_inner(6));
    assert!(d.value > 1e-3, "{d:?}");
    let values: Vec<f64> = [6usize, 8, 12, 16]
        .iter()
        .map(|&k| torus::commutator_diagnostic(&torus::toigo_cmatrix(k), &arcs, torus::default_inner(k)).value)
        .collect();
    assert!(values.iter().all(|&v| v > 1e-2), "{values:?}");
}

#[test]
fn toigo_self_commutator_shrinks_with_the_window() {
    let arcs = Arc::partition(8);
    let values: Vec<f64> = [4usize, 6, 8]
        .iter()
        .map(|&k| {
            torus::self_commutator_diagnostic(&torus::toigo_cmatrix(k), &arcs, torus::default_inner(k)).value
        })
        .collect();
    assert!(values[0] > values[1] && values[1] > values[2], "{values:?}");
}
