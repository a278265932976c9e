//! Observables with outcomes in `Z_N`, the canonical system of imprimitivity,
//! smearing, and the structural property checkers.
//!
//! An observable is stored by its atoms `E({x})`; the effect of a set is the
//! sum of the atoms it contains. Sets are passed around as bitmasks, bit `x`
//! standing for the outcome `x`, which fixes the lexicographic tie-breaking
//! order used by the brute-force scans.

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::group::{CyclicGroup, GroupError, ProbabilityMeasure};
use crate::linalg::{
    self, hermitian_eigenvalues, CMat, LinalgError, C64, EFFECT_TOL, HERMITIAN_TOL,
    PROJECTION_TOL,
};

/// Default cap on `N` for the `2^N` subset scans.
pub const DEFAULT_MAX_SUBSET_ORDER: usize = 16;
/// Hard ceiling regardless of overrides.
pub const HARD_MAX_SUBSET_ORDER: usize = 30;
/// Per-entry slack for `sum_x E({x}) = I`.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Slack for unit-norm state vectors.
pub const STATE_NORM_TOL: f64 = 1e-12;
/// A transform value at or below this counts as vanishing for the witness.
pub const WITNESS_TRANSFORM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PovmError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("multiplicity must be at least 1")]
    InvalidMultiplicity,
    #[error("atom {0} is not an effect")]
    NotEffect(usize),
    #[error("atoms do not sum to the identity (max deviation {0:e})")]
    NotNormalized(f64),
    #[error("observable is not sharp: {0}")]
    NotSharp(String),
    #[error("not a unitary representation of Z_N: {0}")]
    NotRepresentation(String),
    #[error("membership degree {index} = {value} is outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },
    #[error("brute-force scan over 2^{order} subsets exceeds the cap N <= {cap}")]
    TooLarge { order: usize, cap: usize },
    #[error("transform at character {character} does not vanish (|value| = {magnitude:e})")]
    NonVanishingTransform { character: usize, magnitude: f64 },
    #[error("state vector is not normalized (norm {0})")]
    InvalidState(f64),
    #[error("sharp observable is not the canonical block projection family")]
    NotCanonical,
}

/// Normalized positive operator measure on `Z_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    group: CyclicGroup,
    dim: usize,
    atoms: Vec<CMat>,
}

impl Observable {
    pub fn new(group: CyclicGroup, atoms: Vec<CMat>) -> Result<Self, PovmError> {
        Self::new_with_tol(group, atoms, EFFECT_TOL, NORMALIZATION_TOL)
    }

    pub fn new_with_tol(
        group: CyclicGroup,
        atoms: Vec<CMat>,
        effect_tol: f64,
        normalization_tol: f64,
    ) -> Result<Self, PovmError> {
        if atoms.len() != group.order() {
            return Err(PovmError::DimensionMismatch {
                expected: group.order(),
                got: atoms.len(),
            });
        }
        let dim = atoms[0].dim();
        if let Some(bad) = atoms.iter().find(|a| a.dim() != dim) {
            return Err(PovmError::DimensionMismatch {
                expected: dim,
                got: bad.dim(),
            });
        }
        if let Some(i) = atoms.iter().position(|a| !linalg::is_effect(a, effect_tol)) {
            return Err(PovmError::NotEffect(i));
        }
        let obs = Self { group, dim, atoms };
        let defect = obs.normalization_defect();
        if defect > normalization_tol {
            return Err(PovmError::NotNormalized(defect));
        }
        Ok(obs)
    }

    pub(crate) fn from_trusted(group: CyclicGroup, atoms: Vec<CMat>) -> Self {
        let dim = atoms[0].dim();
        Self { group, dim, atoms }
    }

    pub fn group(&self) -> CyclicGroup {
        self.group
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[CMat] {
        &self.atoms
    }

    pub fn atom(&self, x: usize) -> &CMat {
        &self.atoms[x]
    }

    /// `max |sum_x E({x}) - I|`
    pub fn normalization_defect(&self) -> f64 {
        let mut total = CMat::zeros(self.dim);
        for a in &self.atoms {
            total.add_scaled(1.0, a);
        }
        total.max_diff(&CMat::identity(self.dim))
    }

    /// `E(X)` for the set encoded by `mask`.
    pub fn effect_of_mask(&self, mask: u64) -> CMat {
        let mut e = CMat::zeros(self.dim);
        for (x, atom) in self.atoms.iter().enumerate() {
            if mask >> x & 1 == 1 {
                e.add_scaled(1.0, atom);
            }
        }
        e
    }

    pub fn effect(&self, set: &BTreeSet<usize>) -> CMat {
        let mut e = CMat::zeros(self.dim);
        for &x in set {
            e.add_scaled(1.0, &self.atoms[x % self.order()]);
        }
        e
    }

    /// Largest entrywise difference between corresponding atoms.
    pub fn max_atom_diff(&self, other: &Observable) -> f64 {
        self.atoms
            .iter()
            .zip(&other.atoms)
            .map(|(a, b)| a.max_diff(b))
            .fold(0.0, f64::max)
    }
}

/// Observable whose atoms are mutually orthogonal projections.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpObservable {
    inner: Observable,
}

impl SharpObservable {
    pub fn new(obs: Observable) -> Result<Self, PovmError> {
        for (i, a) in obs.atoms.iter().enumerate() {
            if !linalg::is_projection(a, PROJECTION_TOL) {
                return Err(PovmError::NotSharp(format!("atom {i} is not a projection")));
            }
        }
        for i in 0..obs.atoms.len() {
            for j in (i + 1)..obs.atoms.len() {
                if (&obs.atoms[i] * &obs.atoms[j]).max_abs() > PROJECTION_TOL {
                    return Err(PovmError::NotSharp(format!("atoms {i} and {j} overlap")));
                }
            }
        }
        Ok(Self { inner: obs })
    }

    pub fn observable(&self) -> &Observable {
        &self.inner
    }

    pub fn group(&self) -> CyclicGroup {
        self.inner.group
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    /// Multiplicity `m` if the atoms are exactly the coordinate block
    /// projections of the canonical system on `C^(N m)`.
    pub fn canonical_multiplicity(&self) -> Option<usize> {
        let n = self.inner.order();
        if !self.inner.dim.is_multiple_of(n) {
            return None;
        }
        let m = self.inner.dim / n;
        let canonical = block_projections(n, m);
        (self
            .inner
            .atoms
            .iter()
            .zip(&canonical)
            .all(|(a, b)| a.max_diff(b) <= 1e-12))
        .then_some(m)
    }
}

impl std::ops::Deref for SharpObservable {
    type Target = Observable;
    fn deref(&self) -> &Observable {
        &self.inner
    }
}

/// Unitary representation `g -> U(g)` of `Z_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    group: CyclicGroup,
    dim: usize,
    matrices: Vec<CMat>,
}

impl Representation {
    pub fn new(group: CyclicGroup, matrices: Vec<CMat>) -> Result<Self, PovmError> {
        const TOL: f64 = 1e-10;
        let n = group.order();
        if matrices.len() != n {
            return Err(PovmError::DimensionMismatch {
                expected: n,
                got: matrices.len(),
            });
        }
        let dim = matrices[0].dim();
        if matrices.iter().any(|u| u.dim() != dim) {
            return Err(PovmError::NotRepresentation("mixed dimensions".into()));
        }
        if matrices[0].max_diff(&CMat::identity(dim)) > TOL {
            return Err(PovmError::NotRepresentation("U(0) != I".into()));
        }
        if let Some(g) = matrices.iter().position(|u| !linalg::is_unitary(u, TOL)) {
            return Err(PovmError::NotRepresentation(format!("U({g}) is not unitary")));
        }
        for g in 0..n {
            for h in 0..n {
                if (&matrices[g] * &matrices[h]).max_diff(&matrices[group.add(g, h)]) > TOL {
                    return Err(PovmError::NotRepresentation(format!(
                        "U({g}) U({h}) != U({})",
                        group.add(g, h)
                    )));
                }
            }
        }
        Ok(Self {
            group,
            dim,
            matrices,
        })
    }

    pub fn group(&self) -> CyclicGroup {
        self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, g: usize) -> &CMat {
        &self.matrices[g]
    }
}

/// Row `w` holds the confidence measure `nu_w`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceKernel {
    group: CyclicGroup,
    rows: Vec<ProbabilityMeasure>,
}

impl ConfidenceKernel {
    pub fn new(group: CyclicGroup, rows: Vec<Vec<f64>>) -> Result<Self, PovmError> {
        if rows.len() != group.order() {
            return Err(PovmError::DimensionMismatch {
                expected: group.order(),
                got: rows.len(),
            });
        }
        let rows = rows
            .into_iter()
            .map(|r| ProbabilityMeasure::new(group, r))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { group, rows })
    }

    pub fn from_measures(rows: Vec<ProbabilityMeasure>) -> Result<Self, PovmError> {
        let group = rows
            .first()
            .map(|r| r.group())
            .ok_or(PovmError::DimensionMismatch {
                expected: 2,
                got: 0,
            })?;
        if rows.len() != group.order() {
            return Err(PovmError::DimensionMismatch {
                expected: group.order(),
                got: rows.len(),
            });
        }
        for r in &rows {
            group.ensure_same(&r.group())?;
        }
        Ok(Self { group, rows })
    }

    /// `nu_w = delta_w`
    pub fn identity(group: CyclicGroup) -> Self {
        let rows = (0..group.order())
            .map(|w| ProbabilityMeasure::dirac(group, w).expect("index in range"))
            .collect();
        Self { group, rows }
    }

    pub fn uniform(group: CyclicGroup) -> Self {
        Self {
            group,
            rows: vec![ProbabilityMeasure::uniform(group); group.order()],
        }
    }

    /// `nu_w = rho translated by w`
    pub fn from_translates(rho: &ProbabilityMeasure) -> Self {
        let group = rho.group();
        let rows = (0..group.order())
            .map(|w| rho.translate(w).expect("index in range"))
            .collect();
        Self { group, rows }
    }

    pub fn group(&self) -> CyclicGroup {
        self.group
    }

    pub fn row(&self, w: usize) -> &ProbabilityMeasure {
        &self.rows[w]
    }

    pub fn rows(&self) -> &[ProbabilityMeasure] {
        &self.rows
    }
}

/// Unit vector in `C^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(Vec<C64>);

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self, PovmError> {
        let norm = linalg::vec_norm(&amplitudes);
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(PovmError::InvalidState(norm));
        }
        Ok(Self(amplitudes))
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self, PovmError> {
        let norm = linalg::vec_norm(&amplitudes);
        if !norm.is_finite() || norm <= 0.0 {
            return Err(PovmError::InvalidState(norm));
        }
        Ok(Self(amplitudes.into_iter().map(|z| z / norm).collect()))
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[index] = C64::new(1.0, 0.0);
        Self(v)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

fn block_projections(n: usize, m: usize) -> Vec<CMat> {
    (0..n)
        .map(|w| {
            let mut p = CMat::zeros(n * m);
            for j in 0..m {
                p[(w * m + j, w * m + j)] = C64::new(1.0, 0.0);
            }
            p
        })
        .collect()
}

/// Multiplication-by-indicator spectral measure and block shift
/// representation on `C^N (x) C^m`, basis index `w * m + j`.
pub fn canonical_system(
    order: usize,
    multiplicity: usize,
) -> Result<(SharpObservable, Representation), PovmError> {
    let group = CyclicGroup::new(order)?;
    if multiplicity == 0 {
        return Err(PovmError::InvalidMultiplicity);
    }
    let m = multiplicity;
    let dim = order * m;
    let sharp = SharpObservable {
        inner: Observable::from_trusted(group, block_projections(order, m)),
    };
    // U(g) e_{w, j} = e_{w + g, j}
    let matrices = (0..order)
        .map(|g| {
            let mut u = CMat::zeros(dim);
            for w in 0..order {
                for j in 0..m {
                    u[(group.add(w, g) * m + j, w * m + j)] = C64::new(1.0, 0.0);
                }
            }
            u
        })
        .collect();
    let rep = Representation {
        group,
        dim,
        matrices,
    };
    Ok((sharp, rep))
}

/// `E({x}) = sum_w nu_w({x}) P({w})`
pub fn smear(p: &SharpObservable, kernel: &ConfidenceKernel) -> Result<Observable, PovmError> {
    p.group().ensure_same(&kernel.group())?;
    let n = p.order();
    let atoms = (0..n)
        .map(|x| {
            let mut e = CMat::zeros(p.dim());
            for w in 0..n {
                let weight = kernel.row(w).weight(x);
                if weight != 0.0 {
                    e.add_scaled(weight, p.atom(w));
                }
            }
            e
        })
        .collect();
    Ok(Observable::from_trusted(p.group(), atoms))
}

/// `E_rho({x}) = sum_w rho(x - w) P({w})`
pub fn smear_by_measure(
    p: &SharpObservable,
    rho: &ProbabilityMeasure,
) -> Result<Observable, PovmError> {
    let g = p.group();
    g.ensure_same(&rho.group())?;
    let n = g.order();
    let atoms = (0..n)
        .map(|x| {
            let mut e = CMat::zeros(p.dim());
            for w in 0..n {
                let weight = rho.weight(g.sub(x, w));
                if weight != 0.0 {
                    e.add_scaled(weight, p.atom(w));
                }
            }
            e
        })
        .collect();
    Ok(Observable::from_trusted(g, atoms))
}

/// Pointer rows and the induced system observable of a von Neumann type
/// measurement model.
#[derive(Debug, Clone)]
pub struct StandardModel {
    /// `rows[j]` is the pointer distribution for the `j`-th eigenvalue of `A`.
    pub rows: Vec<ProbabilityMeasure>,
    pub observable: Observable,
}

/// Couples a system observable `A = diag(spectrum)` to an apparatus through
/// `exp(i lambda A (x) B)` and reads the pointer with `pointer`.
///
/// Row `j` is `X -> <phi_j | pointer(X) phi_j>` with
/// `phi_j = exp(i lambda a_j B) phi`, and the system observable is
/// `E({x}) = sum_j row_j(x) |j><j|`.
pub fn standard_model_observable(
    spectrum: &[f64],
    pointer: &SharpObservable,
    coupling: &CMat,
    apparatus_state: &StateVector,
    lambda: f64,
) -> Result<StandardModel, PovmError> {
    let d = spectrum.len();
    if d == 0 {
        return Err(PovmError::DimensionMismatch { expected: 1, got: 0 });
    }
    let adim = pointer.dim();
    if coupling.dim() != adim {
        return Err(PovmError::DimensionMismatch {
            expected: adim,
            got: coupling.dim(),
        });
    }
    if apparatus_state.dim() != adim {
        return Err(PovmError::DimensionMismatch {
            expected: adim,
            got: apparatus_state.dim(),
        });
    }
    let eig = linalg::hermitian_eig(coupling, HERMITIAN_TOL)?;
    let group = pointer.group();
    let rows = spectrum
        .iter()
        .map(|&a| {
            let u = eig.map_spectrum(|b| C64::from_polar(1.0, lambda * a * b));
            let phi_a = StateVector(u.mul_vec(apparatus_state.amplitudes()));
            distribution(pointer.observable(), &phi_a)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let atoms = (0..group.order())
        .map(|x| {
            let diag: Vec<f64> = rows.iter().map(|r| r.weight(x)).collect();
            CMat::from_real_diagonal(&diag)
        })
        .collect();
    Ok(StandardModel {
        rows,
        observable: Observable::from_trusted(group, atoms),
    })
}

/// `sum_w membership[w] P({w})`
pub fn fuzzy_event_operator(p: &SharpObservable, membership: &[f64]) -> Result<CMat, PovmError> {
    if membership.len() != p.order() {
        return Err(PovmError::DimensionMismatch {
            expected: p.order(),
            got: membership.len(),
        });
    }
    let mut e = CMat::zeros(p.dim());
    for (w, &mu) in membership.iter().enumerate() {
        if !(0.0..=1.0).contains(&mu) {
            return Err(PovmError::OutOfRange { index: w, value: mu });
        }
        if mu != 0.0 {
            e.add_scaled(mu, p.atom(w));
        }
    }
    Ok(e)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceReport {
    pub covariant: bool,
    pub max_deviation: f64,
}

/// `max_{g, w} |U(g) E({w}) U(g)^† - E({w + g})|`
pub fn check_covariance(
    e: &Observable,
    u: &Representation,
    tol: f64,
) -> Result<CovarianceReport, PovmError> {
    e.group().ensure_same(&u.group())?;
    if e.dim() != u.dim() {
        return Err(PovmError::DimensionMismatch {
            expected: e.dim(),
            got: u.dim(),
        });
    }
    let g = e.group();
    let mut max_deviation = 0.0f64;
    for s in 0..g.order() {
        for w in 0..g.order() {
            let moved = e.atom(w).conjugate_by(u.matrix(s));
            max_deviation = max_deviation.max(moved.max_diff(e.atom(g.add(w, s))));
        }
    }
    Ok(CovarianceReport {
        covariant: max_deviation <= tol,
        max_deviation,
    })
}

/// Outcome distribution `x -> <psi | E({x}) psi>`.
pub fn distribution(e: &Observable, psi: &StateVector) -> Result<ProbabilityMeasure, PovmError> {
    if psi.dim() != e.dim() {
        return Err(PovmError::DimensionMismatch {
            expected: e.dim(),
            got: psi.dim(),
        });
    }
    let weights = e
        .atoms()
        .iter()
        .map(|a| a.expectation(psi.amplitudes()).re.max(0.0))
        .collect();
    Ok(ProbabilityMeasure::from_trusted(e.group(), weights))
}

/// Bitmask to the sorted outcome list it encodes.
pub fn mask_to_set(mask: u64) -> Vec<usize> {
    (0..64).filter(|b| mask >> b & 1 == 1).collect()
}

fn check_subset_cap(order: usize, cap: usize) -> Result<(), PovmError> {
    let cap = cap.min(HARD_MAX_SUBSET_ORDER);
    if order > cap {
        Err(PovmError::TooLarge { order, cap })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormOneReport {
    pub holds: bool,
    /// Smallest-norm set among those with `E(X) != 0` (lowest bitmask on ties).
    pub worst_set: Option<Vec<usize>>,
    pub worst_norm: f64,
}

/// Brute force over all `2^N` sets: every nonzero `E(X)` must have norm one.
pub fn has_norm_one_property(e: &Observable, tol: f64) -> Result<NormOneReport, PovmError> {
    has_norm_one_property_capped(e, tol, DEFAULT_MAX_SUBSET_ORDER)
}

pub fn has_norm_one_property_capped(
    e: &Observable,
    tol: f64,
    cap: usize,
) -> Result<NormOneReport, PovmError> {
    let n = e.order();
    check_subset_cap(n, cap)?;
    let norms = (1u64..(1u64 << n))
        .into_par_iter()
        .map(|mask| -> Result<(u64, f64), PovmError> {
            let ev = hermitian_eigenvalues(&e.effect_of_mask(mask), HERMITIAN_TOL)?;
            Ok((mask, ev.iter().map(|l| l.abs()).fold(0.0, f64::max)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let worst = norms
        .into_iter()
        .filter(|&(_, norm)| norm > tol)
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    Ok(match worst {
        Some((mask, norm)) => NormOneReport {
            holds: norm >= 1.0 - tol,
            worst_set: Some(mask_to_set(mask)),
            worst_norm: norm,
        },
        None => NormOneReport {
            holds: true,
            worst_set: None,
            worst_norm: 0.0,
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub regular: bool,
    /// First failing set in bitmask order.
    pub witness: Option<Vec<usize>>,
    /// Spectrum bounds `(min, max)` of the witness effect.
    pub witness_spectrum: Option<(f64, f64)>,
}

/// Every nontrivial `E(X)` (neither `0` nor `I`) must have spectrum reaching
/// strictly below and strictly above `1/2`, with `tol` as the margin.
pub fn is_regular(e: &Observable, tol: f64) -> Result<RegularityReport, PovmError> {
    is_regular_capped(e, tol, DEFAULT_MAX_SUBSET_ORDER)
}

pub fn is_regular_capped(
    e: &Observable,
    tol: f64,
    cap: usize,
) -> Result<RegularityReport, PovmError> {
    let n = e.order();
    check_subset_cap(n, cap)?;
    let outcome = (1u64..(1u64 << n))
        .into_par_iter()
        .map(|mask| -> Result<Option<(u64, f64, f64)>, PovmError> {
            let ev = hermitian_eigenvalues(&e.effect_of_mask(mask), HERMITIAN_TOL)?;
            let lo = ev[0];
            let hi = ev[ev.len() - 1];
            let norm = lo.abs().max(hi.abs());
            // spectrum of I - E(X) is 1 - ev
            let co_norm = (1.0 - lo).abs().max((1.0 - hi).abs());
            if norm <= tol || co_norm <= tol {
                return Ok(None);
            }
            if lo < 0.5 - tol && hi > 0.5 + tol {
                Ok(None)
            } else {
                Ok(Some((mask, lo, hi)))
            }
        })
        .find_first(|r| !matches!(r, Ok(None)));
    match outcome {
        None => Ok(RegularityReport {
            regular: true,
            witness: None,
            witness_spectrum: None,
        }),
        Some(Err(err)) => Err(err),
        Some(Ok(Some((mask, lo, hi)))) => Ok(RegularityReport {
            regular: false,
            witness: Some(mask_to_set(mask)),
            witness_spectrum: Some((lo, hi)),
        }),
        Some(Ok(None)) => unreachable!(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub zero_characters: Vec<usize>,
    pub min_abs_transform: f64,
}

/// `E_rho` and the sharp observable separate the same states iff the
/// transform of `rho` vanishes nowhere.
pub fn informationally_equivalent(rho: &ProbabilityMeasure, tol: f64) -> EquivalenceReport {
    let spectrum = rho.fourier();
    let zero_characters: Vec<usize> = spectrum
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() <= tol)
        .map(|(k, _)| k)
        .collect();
    EquivalenceReport {
        equivalent: zero_characters.is_empty(),
        zero_characters,
        min_abs_transform: spectrum.min_abs(),
    }
}

/// States with identical `E_rho` statistics but different sharp statistics,
/// built from a character `k0` where the transform of `rho` vanishes:
/// `psi(w) = sqrt((1 + cos(2 pi w k0 / N)) / N) v`, `phi(w) = sqrt(1/N) v`,
/// with `v` the first basis vector of the multiplicity space.
pub fn inequivalence_witness(
    p: &SharpObservable,
    rho: &ProbabilityMeasure,
    character: usize,
) -> Result<(StateVector, StateVector), PovmError> {
    let g = p.group();
    g.ensure_same(&rho.group())?;
    let m = p.canonical_multiplicity().ok_or(PovmError::NotCanonical)?;
    let n = g.order();
    let k0 = g.check(character)?;
    let magnitude = rho.fourier().at(k0).norm();
    if k0 == 0 || magnitude > WITNESS_TRANSFORM_TOL {
        return Err(PovmError::NonVanishingTransform {
            character: k0,
            magnitude,
        });
    }
    let mut psi = vec![C64::new(0.0, 0.0); n * m];
    let mut phi = vec![C64::new(0.0, 0.0); n * m];
    for w in 0..n {
        let angle = 2.0 * std::f64::consts::PI * ((w * k0) % n) as f64 / n as f64;
        let f1 = ((1.0 + angle.cos()) / n as f64).max(0.0);
        psi[w * m] = C64::new(f1.sqrt(), 0.0);
        phi[w * m] = C64::new((1.0 / n as f64).sqrt(), 0.0);
    }
    Ok((StateVector::normalized(psi)?, StateVector::normalized(phi)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize) -> CyclicGroup {
        CyclicGroup::new(n).unwrap()
    }

    fn measure(w: &[f64]) -> ProbabilityMeasure {
        ProbabilityMeasure::new(z(w.len()), w.to_vec()).unwrap()
    }

    #[test]
    fn canonical_smallest_case() {
        let (p, u) = canonical_system(2, 1).unwrap();
        assert_eq!(p.atom(0), &CMat::from_real_diagonal(&[1.0, 0.0]));
        assert_eq!(p.atom(1), &CMat::from_real_diagonal(&[0.0, 1.0]));
        let swap = CMat::from_fn(2, |i, j| C64::new(if i != j { 1.0 } else { 0.0 }, 0.0));
        assert_eq!(u.matrix(1), &swap);
    }

    #[test]
    fn canonical_shift_moves_indicator() {
        let (p, u) = canonical_system(3, 1).unwrap();
        assert_eq!(&p.atom(0).conjugate_by(u.matrix(1)), p.atom(1));
    }

    #[test]
    fn canonical_with_multiplicity_is_sharp() {
        let (p, u) = canonical_system(4, 2).unwrap();
        assert_eq!(p.dim(), 8);
        let checked = SharpObservable::new(p.observable().clone()).unwrap();
        assert_eq!(checked.canonical_multiplicity(), Some(2));
        for a in p.atoms() {
            assert!((a.trace().re - 2.0).abs() < 1e-15);
        }
        assert!(p.normalization_defect() < 1e-15);
        // representation passes its own validation
        Representation::new(u.group(), (0..4).map(|g| u.matrix(g).clone()).collect()).unwrap();
    }

    #[test]
    fn canonical_rejects_bad_arguments() {
        assert!(matches!(canonical_system(1, 1), Err(PovmError::Group(_))));
        assert!(matches!(canonical_system(3, 0), Err(PovmError::InvalidMultiplicity)));
    }

    #[test]
    fn smear_examples() {
        let g = z(2);
        let (p, _) = canonical_system(2, 1).unwrap();
        assert_eq!(&smear(&p, &ConfidenceKernel::identity(g)).unwrap(), p.observable());
        let trivial = smear(&p, &ConfidenceKernel::uniform(g)).unwrap();
        for a in trivial.atoms() {
            assert!(a.max_diff(&CMat::identity(2).scale(0.5)) < 1e-15);
        }
        let nu = ConfidenceKernel::new(g, vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        let e = smear(&p, &nu).unwrap();
        assert!(e.atom(0).max_diff(&CMat::from_real_diagonal(&[0.9, 0.2])) < 1e-15);
        assert!(e.atom(1).max_diff(&CMat::from_real_diagonal(&[0.1, 0.8])) < 1e-15);
        Observable::new(g, e.atoms().to_vec()).unwrap();
    }

    #[test]
    fn smear_by_measure_examples() {
        let g = z(4);
        let (p, _) = canonical_system(4, 1).unwrap();
        let shifted = smear_by_measure(&p, &ProbabilityMeasure::dirac(g, 1).unwrap()).unwrap();
        for x in 0..4 {
            assert_eq!(shifted.atom(x), p.atom(g.sub(x, 1)));
        }
        let trivial = smear_by_measure(&p, &ProbabilityMeasure::uniform(g)).unwrap();
        assert!(trivial.atom(2).max_diff(&CMat::identity(4).scale(0.25)) < 1e-15);
        let e = smear_by_measure(&p, &measure(&[0.5, 0.5, 0.0, 0.0])).unwrap();
        let mut expected = p.atom(0).scale(0.5);
        expected.add_scaled(0.5, p.atom(3));
        assert!(e.atom(0).max_diff(&expected) < 1e-15);
    }

    #[test]
    fn smear_group_mismatch() {
        let (p, _) = canonical_system(4, 1).unwrap();
        assert!(matches!(
            smear_by_measure(&p, &ProbabilityMeasure::uniform(z(3))),
            Err(PovmError::Group(GroupError::GroupMismatch { .. }))
        ));
        assert!(smear(&p, &ConfidenceKernel::uniform(z(5))).is_err());
    }

    #[test]
    fn fuzzy_event_examples() {
        let (p, _) = canonical_system(3, 2).unwrap();
        assert!(fuzzy_event_operator(&p, &[1.0; 3]).unwrap().max_diff(&CMat::identity(6)) < 1e-15);
        assert_eq!(&fuzzy_event_operator(&p, &[1.0, 0.0, 0.0]).unwrap(), p.atom(0));
        assert!(matches!(
            fuzzy_event_operator(&p, &[1.2, 0.0, 0.0]),
            Err(PovmError::OutOfRange { index: 0, .. })
        ));
    }

    #[test]
    fn covariance_examples() {
        let (p, u) = canonical_system(5, 1).unwrap();
        let r = check_covariance(p.observable(), &u, 1e-12).unwrap();
        assert!(r.covariant && r.max_deviation == 0.0);
        let e = smear_by_measure(&p, &measure(&[0.1, 0.4, 0.2, 0.2, 0.1])).unwrap();
        assert!(check_covariance(&e, &u, 1e-12).unwrap().covariant);

        // tilt atom 0 by a rank-one projector and push the compensation into atom 1
        let s = 1.0 / 2f64.sqrt();
        let mut v = vec![C64::new(0.0, 0.0); 5];
        v[0] = C64::new(s, 0.0);
        v[1] = C64::new(s, 0.0);
        let bump = CMat::outer(&v).scale(0.1);
        let mut atoms = e.atoms().to_vec();
        atoms[0] = &atoms[0] + &bump;
        atoms[1] = &atoms[1] - &bump;
        let tilted = Observable::from_trusted(e.group(), atoms);
        let r = check_covariance(&tilted, &u, 1e-12).unwrap();
        assert!(!r.covariant);
        assert!(r.max_deviation >= 0.05 - 1e-12);
    }

    #[test]
    fn covariance_dimension_mismatch() {
        let (p, _) = canonical_system(3, 1).unwrap();
        let (_, u2) = canonical_system(3, 2).unwrap();
        assert!(matches!(
            check_covariance(p.observable(), &u2, 1e-12),
            Err(PovmError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn distribution_examples() {
        let g = z(4);
        let (p, _) = canonical_system(4, 2).unwrap();
        let d = distribution(p.observable(), &StateVector::basis(8, 2 * 2 + 1)).unwrap();
        assert_eq!(d, ProbabilityMeasure::dirac(g, 2).unwrap());
        let trivial = smear_by_measure(&p, &ProbabilityMeasure::uniform(g)).unwrap();
        let psi = StateVector::normalized((0..8).map(|i| C64::new(i as f64, 1.0)).collect())
            .unwrap();
        let d = distribution(&trivial, &psi).unwrap();
        assert!(d.weights().iter().all(|w| (w - 0.25).abs() < 1e-15));

        let (p1, _) = canonical_system(4, 1).unwrap();
        let rho = measure(&[0.5, 0.5, 0.0, 0.0]);
        let psi = StateVector::new(vec![C64::new(0.5, 0.0); 4]).unwrap();
        let direct = distribution(&smear_by_measure(&p1, &rho).unwrap(), &psi).unwrap();
        let via = distribution(p1.observable(), &psi).unwrap().convolve(&rho).unwrap();
        assert!(direct.total_variation(&via).unwrap() < 1e-15);
        assert!(direct.weights().iter().all(|w| (w - 0.25).abs() < 1e-15));
    }

    #[test]
    fn norm_one_examples() {
        let g = z(4);
        let (p, _) = canonical_system(4, 1).unwrap();
        assert!(has_norm_one_property(p.observable(), 1e-9).unwrap().holds);
        let shifted = smear_by_measure(&p, &ProbabilityMeasure::dirac(g, 3).unwrap()).unwrap();
        assert!(has_norm_one_property(&shifted, 1e-9).unwrap().holds);
        let e = smear_by_measure(&p, &measure(&[0.5, 0.5, 0.0, 0.0])).unwrap();
        let r = has_norm_one_property(&e, 1e-9).unwrap();
        assert!(!r.holds);
        assert!((r.worst_norm - 0.5).abs() < 1e-12);
        assert_eq!(r.worst_set, Some(vec![0]));
    }

    #[test]
    fn subset_cap() {
        let (p, _) = canonical_system(17, 1).unwrap();
        assert!(matches!(
            has_norm_one_property(p.observable(), 1e-9),
            Err(PovmError::TooLarge { order: 17, cap: 16 })
        ));
        assert!(matches!(
            is_regular(p.observable(), 1e-9),
            Err(PovmError::TooLarge { .. })
        ));
        assert!(is_regular_capped(p.observable(), 1e-9, 17).unwrap().regular);
    }

    #[test]
    fn regularity_examples() {
        let g = z(5);
        let (p, _) = canonical_system(5, 1).unwrap();
        assert!(is_regular(p.observable(), 1e-9).unwrap().regular);
        let mut w = vec![0.0; 5];
        w[1] = 0.7;
        w[3] = 0.3;
        let mix = smear_by_measure(&p, &ProbabilityMeasure::new(g, w).unwrap()).unwrap();
        assert!(is_regular(&mix, 1e-9).unwrap().regular);
        let flat = smear_by_measure(&p, &ProbabilityMeasure::uniform(g)).unwrap();
        let r = is_regular(&flat, 1e-9).unwrap();
        assert!(!r.regular);
        assert_eq!(r.witness, Some(vec![0]));
        let (lo, hi) = r.witness_spectrum.unwrap();
        assert!((lo - 0.2).abs() < 1e-15 && (hi - 0.2).abs() < 1e-15);
    }

    #[test]
    fn equivalence_examples() {
        let r = informationally_equivalent(&ProbabilityMeasure::dirac(z(6), 2).unwrap(), 1e-9);
        assert!(r.equivalent);
        assert!((r.min_abs_transform - 1.0).abs() < 1e-14);
        let r = informationally_equivalent(&measure(&[0.5, 0.5, 0.0, 0.0, 0.0, 0.0]), 1e-9);
        assert!(!r.equivalent);
        assert_eq!(r.zero_characters, vec![3]);
        let geo: Vec<f64> = (0..8).map(|k| 0.5f64.powi(k)).collect();
        let rho = ProbabilityMeasure::from_unnormalized(z(8), geo).unwrap();
        assert!(informationally_equivalent(&rho, 1e-9).equivalent);
    }

    #[test]
    fn witness_two_point() {
        let (p, _) = canonical_system(2, 1).unwrap();
        let rho = measure(&[0.5, 0.5]);
        let (psi, phi) = inequivalence_witness(&p, &rho, 1).unwrap();
        let e = smear_by_measure(&p, &rho).unwrap();
        let dp = distribution(p.observable(), &psi).unwrap();
        let dq = distribution(p.observable(), &phi).unwrap();
        assert!((dp.weight(0) - 1.0).abs() < 1e-15 && dp.weight(1).abs() < 1e-15);
        assert!((dq.weight(0) - 0.5).abs() < 1e-15);
        let ep = distribution(&e, &psi).unwrap();
        let eq = distribution(&e, &phi).unwrap();
        assert!(ep.total_variation(&eq).unwrap() < 1e-15);
        assert!((ep.weight(0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn witness_rejects_nonvanishing() {
        let (p, _) = canonical_system(4, 1).unwrap();
        let rho = measure(&[0.5, 0.0, 0.5, 0.0]);
        assert!(inequivalence_witness(&p, &rho, 1).is_ok());
        assert!(matches!(
            inequivalence_witness(&p, &rho, 2),
            Err(PovmError::NonVanishingTransform { character: 2, .. })
        ));
        assert!(matches!(
            inequivalence_witness(&p, &rho, 0),
            Err(PovmError::NonVanishingTransform { .. })
        ));
    }

    #[test]
    fn standard_model_no_coupling() {
        let (pz, _) = canonical_system(3, 1).unwrap();
        let b = CMat::from_fn(3, |i, j| C64::new((i + j) as f64, 0.0));
        let phi = StateVector::normalized(vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 2.0),
            C64::new(1.0, 1.0),
        ])
        .unwrap();
        let fixed = distribution(pz.observable(), &phi).unwrap();
        for (lambda, coupling) in [(0.0, b.clone()), (1.3, CMat::zeros(3))] {
            let sm = standard_model_observable(&[0.0, 1.0], &pz, &coupling, &phi, lambda).unwrap();
            for row in &sm.rows {
                assert!(row.total_variation(&fixed).unwrap() < 1e-14);
            }
            for (x, a) in sm.observable.atoms().iter().enumerate() {
                assert!(a.max_diff(&CMat::identity(2).scale(fixed.weight(x))) < 1e-14);
            }
        }
    }

    #[test]
    fn standard_model_dimension_checks() {
        let (pz, _) = canonical_system(2, 1).unwrap();
        let phi = StateVector::basis(2, 0);
        assert!(matches!(
            standard_model_observable(&[0.0], &pz, &CMat::zeros(3), &phi, 1.0),
            Err(PovmError::DimensionMismatch { .. })
        ));
        let skew = CMat::from_fn(2, |i, j| C64::new((i as f64) - (j as f64), 0.0));
        assert!(matches!(
            standard_model_observable(&[0.0], &pz, &skew, &phi, 1.0),
            Err(PovmError::Linalg(LinalgError::NotHermitian { .. }))
        ));
    }

    #[test]
    fn observable_validation() {
        let g = z(2);
        let bad = vec![CMat::from_real_diagonal(&[1.2, 0.0]), CMat::from_real_diagonal(&[-0.2, 1.0])];
        assert!(matches!(Observable::new(g, bad), Err(PovmError::NotEffect(0))));
        let short = vec![CMat::from_real_diagonal(&[0.5, 0.5]), CMat::from_real_diagonal(&[0.4, 0.5])];
        assert!(matches!(Observable::new(g, short), Err(PovmError::NotNormalized(_))));
        let half = vec![CMat::identity(2).scale(0.5), CMat::identity(2).scale(0.5)];
        let e = Observable::new(g, half).unwrap();
        assert!(matches!(SharpObservable::new(e), Err(PovmError::NotSharp(_))));
    }
}
