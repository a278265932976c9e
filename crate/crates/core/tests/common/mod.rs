#![allow(dead_code)]

use fuzzobs::group::{CyclicGroup, ProbabilityMeasure};
use fuzzobs::linalg::C64;
use fuzzobs::povm::StateVector;
use proptest::prelude::*;

/// Probability measure on `Z_n` with strictly positive raw weights.
pub fn measure(n: usize) -> impl Strategy<Value = ProbabilityMeasure> {
    prop::collection::vec(0.01f64..1.0, n).prop_map(move |w| {
        ProbabilityMeasure::from_unnormalized(CyclicGroup::new(n).unwrap(), w).unwrap()
    })
}

/// Probability measure that may put zero weight on some points.
pub fn sparse_measure(n: usize) -> impl Strategy<Value = ProbabilityMeasure> {
    prop::collection::vec(prop_oneof![Just(0.0f64), 0.01f64..1.0], n)
        .prop_filter("some mass", |w| w.iter().any(|&x| x > 0.0))
        .prop_map(move |w| {
            ProbabilityMeasure::from_unnormalized(CyclicGroup::new(n).unwrap(), w).unwrap()
        })
}

pub fn state(dim: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| {
            StateVector::normalized(v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap()
        })
}

pub fn tv(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Direct convolution `(a * b)(x) = sum_y a(y) b(x - y)`, independent of the
/// library's implementation.
pub fn naive_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    (0..n)
        .map(|x| (0..n).map(|y| a[y] * b[(x + n - y) % n]).sum())
        .collect()
}
