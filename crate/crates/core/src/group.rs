//! Probability measures on the cyclic group `Z_N`.
//!
//! The group is written additively: translating a set `X` by `w` gives
//! `X + w`, and the dual group is identified with `Z_N` through the
//! characters `x -> exp(2 pi i x k / N)`.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use thiserror::Error;

use crate::linalg::C64;

/// Largest supported group order (the transform is a direct O(N^2) sum).
pub const MAX_ORDER: usize = 4096;
/// Normalization slack that is silently renormalized on construction.
pub const RENORMALIZE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("group order must be between 2 and {MAX_ORDER}, got {0}")]
    InvalidOrder(usize),
    #[error("group element {index} out of range for Z_{order}")]
    IndexOutOfRange { index: usize, order: usize },
    #[error("measures live on different groups (Z_{left} vs Z_{right})")]
    GroupMismatch { left: usize, right: usize },
    #[error("expected {expected} weights, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("weight {index} is negative or not finite ({value})")]
    InvalidWeight { index: usize, value: f64 },
    #[error("weights sum to {sum}, not 1")]
    NotNormalized { sum: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CyclicGroup {
    order: usize,
}

impl CyclicGroup {
    pub fn new(order: usize) -> Result<Self, GroupError> {
        if !(2..=MAX_ORDER).contains(&order) {
            return Err(GroupError::InvalidOrder(order));
        }
        Ok(Self { order })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        (a + b) % self.order
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        (a + self.order - b % self.order) % self.order
    }

    pub fn neg(&self, a: usize) -> usize {
        self.sub(0, a)
    }

    pub fn check(&self, index: usize) -> Result<usize, GroupError> {
        if index < self.order {
            Ok(index)
        } else {
            Err(GroupError::IndexOutOfRange {
                index,
                order: self.order,
            })
        }
    }

    pub(crate) fn ensure_same(&self, other: &CyclicGroup) -> Result<(), GroupError> {
        if self.order == other.order {
            Ok(())
        } else {
            Err(GroupError::GroupMismatch {
                left: self.order,
                right: other.order,
            })
        }
    }
}

/// A probability vector on `Z_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMeasure {
    group: CyclicGroup,
    weights: Vec<f64>,
}

impl ProbabilityMeasure {
    /// Validates nonnegativity and normalization. Sums within
    /// [`RENORMALIZE_TOL`] of one are rescaled; anything further off is an
    /// error.
    pub fn new(group: CyclicGroup, weights: Vec<f64>) -> Result<Self, GroupError> {
        if weights.len() != group.order() {
            return Err(GroupError::LengthMismatch {
                expected: group.order(),
                got: weights.len(),
            });
        }
        if let Some((index, &value)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(GroupError::InvalidWeight { index, value });
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > RENORMALIZE_TOL {
            return Err(GroupError::NotNormalized { sum });
        }
        let weights = if sum == 1.0 {
            weights
        } else {
            weights.into_iter().map(|w| w / sum).collect()
        };
        Ok(Self { group, weights })
    }

    /// Normalizes an arbitrary nonnegative vector.
    pub fn from_unnormalized(group: CyclicGroup, weights: Vec<f64>) -> Result<Self, GroupError> {
        let sum: f64 = weights.iter().sum();
        if !sum.is_finite() || sum <= 0.0 {
            return Err(GroupError::NotNormalized { sum });
        }
        Self::new(group, weights.into_iter().map(|w| w / sum).collect())
    }

    /// Used for results of internal operations whose normalization holds by
    /// construction up to rounding.
    pub(crate) fn from_trusted(group: CyclicGroup, weights: Vec<f64>) -> Self {
        debug_assert_eq!(weights.len(), group.order());
        Self { group, weights }
    }

    pub fn uniform(group: CyclicGroup) -> Self {
        let n = group.order();
        Self {
            group,
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn dirac(group: CyclicGroup, at: usize) -> Result<Self, GroupError> {
        group.check(at)?;
        let mut weights = vec![0.0; group.order()];
        weights[at] = 1.0;
        Ok(Self { group, weights })
    }

    pub fn group(&self) -> CyclicGroup {
        self.group
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, x: usize) -> f64 {
        self.weights[x % self.order()]
    }

    /// `(mu * rho)(x) = sum_y mu(y) rho(x - y)`
    pub fn convolve(&self, other: &ProbabilityMeasure) -> Result<ProbabilityMeasure, GroupError> {
        self.group.ensure_same(&other.group)?;
        let n = self.order();
        let mut out = vec![0.0; n];
        for (y, &my) in self.weights.iter().enumerate() {
            if my == 0.0 {
                continue;
            }
            for (z, &rz) in other.weights.iter().enumerate() {
                out[(y + z) % n] += my * rz;
            }
        }
        Ok(Self::from_trusted(self.group, out))
    }

    /// `rho^(k) = sum_x rho(x) exp(-2 pi i x k / N)`
    pub fn fourier(&self) -> Spectrum {
        Spectrum {
            values: dft(&self.weights),
        }
    }

    /// `result(x) = rho(x - w)`
    pub fn translate(&self, by: usize) -> Result<ProbabilityMeasure, GroupError> {
        self.group.check(by)?;
        let n = self.order();
        let weights = (0..n).map(|x| self.weights[self.group.sub(x, by)]).collect();
        Ok(Self::from_trusted(self.group, weights))
    }

    /// `{x : rho(x) > tol}`
    pub fn support(&self, tol: f64) -> BTreeSet<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > tol)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Total-variation distance `1/2 sum |p - q|`.
    pub fn total_variation(&self, other: &ProbabilityMeasure) -> Result<f64, GroupError> {
        self.group.ensure_same(&other.group)?;
        Ok(0.5
            * self
                .weights
                .iter()
                .zip(&other.weights)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>())
    }
}

/// Fourier data indexed by the characters of `Z_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<C64>,
}

impl Spectrum {
    pub fn new(values: Vec<C64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn at(&self, k: usize) -> C64 {
        self.values[k % self.values.len()]
    }

    pub fn min_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
    }

    /// Inverse transform, `x(j) = 1/N sum_k X(k) exp(2 pi i j k / N)`.
    pub fn inverse(&self) -> Vec<C64> {
        let n = self.values.len();
        (0..n)
            .map(|j| {
                self.values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * twiddle(j * k, n).conj())
                    .sum::<C64>()
                    / n as f64
            })
            .collect()
    }
}

fn twiddle(jk: usize, n: usize) -> C64 {
    // reduce before the multiply so large products stay exact
    let r = (jk % n) as f64;
    C64::from_polar(1.0, -2.0 * PI * r / n as f64)
}

/// Direct DFT with the `exp(-2 pi i j k / N)` convention.
pub fn dft(x: &[f64]) -> Vec<C64> {
    let n = x.len();
    (0..n)
        .map(|k| x.iter().enumerate().map(|(j, &v)| twiddle(j * k, n) * v).sum())
        .collect()
}
