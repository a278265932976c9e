mod common;

use common::{measure, naive_convolve, sparse_measure};
use fuzzobs::group::{CyclicGroup, ProbabilityMeasure};
use fuzzobs::linalg::C64;
use proptest::prelude::*;
use std::f64::consts::TAU;

fn pair(max_n: usize) -> impl Strategy<Value = (ProbabilityMeasure, ProbabilityMeasure)> {
    (2..=max_n).prop_flat_map(|n| (measure(n), sparse_measure(n)))
}

fn triple(max_n: usize) -> impl Strategy<Value = [ProbabilityMeasure; 3]> {
    (2..=max_n).prop_flat_map(|n| (measure(n), sparse_measure(n), measure(n)).prop_map(|(a, b, c)| [a, b, c]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn convolution_matches_direct_sum((a, b) in pair(16)) {
        let c = a.convolve(&b).unwrap();
        for (x, y) in c.weights().iter().zip(naive_convolve(a.weights(), b.weights())) {
            prop_assert!((x - y).abs() <= 1e-14);
        }
        prop_assert!((c.total_mass() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn convolution_is_commutative((a, b) in pair(16)) {
        let ab = a.convolve(&b).unwrap();
        let ba = b.convolve(&a).unwrap();
        prop_assert!(ab.total_variation(&ba).unwrap() <= 1e-14);
    }

    #[test]
    fn convolution_is_associative([a, b, c] in triple(12)) {
        let left = a.convolve(&b).unwrap().convolve(&c).unwrap();
        let right = a.convolve(&b.convolve(&c).unwrap()).unwrap();
        prop_assert!(left.total_variation(&right).unwrap() <= 1e-14);
    }

    #[test]
    fn transform_turns_convolution_into_product((a, b) in pair(16)) {
        let lhs = a.convolve(&b).unwrap().fourier();
        let (fa, fb) = (a.fourier(), b.fourier());
        for k in 0..a.order() {
            prop_assert!((lhs.at(k) - fa.at(k) * fb.at(k)).norm() <= 1e-12);
        }
    }

    #[test]
    fn transform_inverts_and_conserves_energy(a in (2usize..=24).prop_flat_map(sparse_measure)) {
        let n = a.order();
        let spec = a.fourier();
        let back = spec.inverse();
        for (z, w) in back.iter().zip(a.weights()) {
            prop_assert!((z - C64::new(*w, 0.0)).norm() <= 1e-13);
        }
        let energy: f64 = spec.values().iter().map(|z| z.norm_sqr()).sum();
        let direct: f64 = a.weights().iter().map(|w| w * w).sum::<f64>() * n as f64;
        prop_assert!((energy - direct).abs() <= 1e-12);
        prop_assert!((spec.at(0) - C64::new(1.0, 0.0)).norm() <= 1e-12);
        prop_assert!(spec.min_abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn translation_is_convolution_with_a_point_mass(
        (a, w) in (2usize..=16).prop_flat_map(|n| (measure(n), 0..n))
    ) {
        let g = a.group();
        let moved = a.translate(w).unwrap();
        let via_dirac = a.convolve(&ProbabilityMeasure::dirac(g, w).unwrap()).unwrap();
        prop_assert!(moved.total_variation(&via_dirac).unwrap() <= 1e-15);
        // a shift multiplies the transform by a character
        let n = a.order() as f64;
        let (fa, fm) = (a.fourier(), moved.fourier());
        for k in 0..a.order() {
            let phase = C64::from_polar(1.0, -TAU * (w * k) as f64 / n);
            prop_assert!((fm.at(k) - phase * fa.at(k)).norm() <= 1e-12);
        }
    }

    #[test]
    fn total_variation_is_a_metric([a, b, c] in triple(10)) {
        let ab = a.total_variation(&b).unwrap();
        let bc = b.total_variation(&c).unwrap();
        let ac = a.total_variation(&c).unwrap();
        prop_assert!((0.0..=1.0 + 1e-15).contains(&ab));
        prop_assert!(ac <= ab + bc + 1e-15);
        prop_assert!((ab - b.total_variation(&a).unwrap()).abs() <= 1e-15);
    }
}

#[test]
fn uniform_transform_is_a_point_mass_at_zero() {
    for n in 2..=12 {
        let u = ProbabilityMeasure::uniform(CyclicGroup::new(n).unwrap());
        let spec = u.fourier();
        assert!((spec.at(0) - C64::new(1.0, 0.0)).norm() < 1e-14);
        for k in 1..n {
            assert!(spec.at(k).norm() < 1e-14, "N = {n}, k = {k}");
        }
    }
}

#[test]
fn mismatched_groups_are_rejected() {
    let a = ProbabilityMeasure::uniform(CyclicGroup::new(3).unwrap());
    let b = ProbabilityMeasure::uniform(CyclicGroup::new(4).unwrap());
    assert!(a.convolve(&b).is_err());
    assert!(a.total_variation(&b).is_err());
}
