//! Coarse-graining maps between outcome statistics.
//!
//! A [`CoarseKernel`] acts on measures as row vectors, `(m W)(x) =
//! sum_w m(w) W[w][x]`. On the canonical system every observable that
//! commutes with the sharp one factors through it, and the factor is
//! translation invariant exactly when the observable is a smearing by a
//! single measure.

use thiserror::Error;

use crate::group::{CyclicGroup, GroupError, ProbabilityMeasure};
use crate::linalg::{self, CMat, LinalgError, C64, HERMITIAN_TOL};
use crate::povm::{ConfidenceKernel, Observable, PovmError, SharpObservable, StateVector};

/// Row-sum slack for a valid kernel.
pub const KERNEL_TOL: f64 = 1e-12;
/// Tolerance used when verifying a solved factorization.
pub const FACTORIZATION_TOL: f64 = 1e-10;
/// Circulant tolerance required before extracting a smearing measure.
pub const CIRCULANT_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoarseError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Povm(#[from] PovmError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("sharp observable is not canonical")]
    NotCanonical,
    #[error("observable does not factor through the sharp statistics (residual {0:e})")]
    FactorizationFailed(f64),
    #[error("kernel does not commute with translations (max defect {0:e})")]
    NotCovariant(f64),
}

/// Positive trace-one operator.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDensity(CMat);

impl StateDensity {
    pub fn new(t: CMat) -> Result<Self, CoarseError> {
        if !t.is_hermitian(1e-10) {
            return Err(CoarseError::InvalidState("not Hermitian".into()));
        }
        let tr = t.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(CoarseError::InvalidState(format!("trace {tr}")));
        }
        let ev = linalg::hermitian_eigenvalues(&t, HERMITIAN_TOL)?;
        if ev[0] < -1e-9 {
            return Err(CoarseError::InvalidState(format!(
                "negative eigenvalue {}",
                ev[0]
            )));
        }
        Ok(Self(t))
    }

    pub fn pure(psi: &StateVector) -> Self {
        Self(CMat::outer(psi.amplitudes()))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(CMat::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// Row-stochastic matrix acting on measures from the right.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseKernel {
    group: CyclicGroup,
    matrix: Vec<Vec<f64>>,
}

impl CoarseKernel {
    pub fn new(group: CyclicGroup, matrix: Vec<Vec<f64>>) -> Result<Self, CoarseError> {
        let n = group.order();
        if matrix.len() != n {
            return Err(CoarseError::DimensionMismatch {
                expected: n,
                got: matrix.len(),
            });
        }
        for (w, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(CoarseError::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(CoarseError::InvalidKernel(format!("row {w} has a negative entry")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > KERNEL_TOL {
                return Err(CoarseError::InvalidKernel(format!("row {w} sums to {s}")));
            }
        }
        Ok(Self { group, matrix })
    }

    pub fn identity(group: CyclicGroup) -> Self {
        let n = group.order();
        let matrix = (0..n)
            .map(|w| (0..n).map(|x| if w == x { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { group, matrix }
    }

    /// `W[w][x] = rho(x - w)`
    pub fn circulant(rho: &ProbabilityMeasure) -> Self {
        let g = rho.group();
        let n = g.order();
        let matrix = (0..n)
            .map(|w| (0..n).map(|x| rho.weight(g.sub(x, w))).collect())
            .collect();
        Self { group: g, matrix }
    }

    pub fn group(&self) -> CyclicGroup {
        self.group
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn entry(&self, w: usize, x: usize) -> f64 {
        self.matrix[w][x]
    }

    pub fn apply(&self, m: &ProbabilityMeasure) -> Result<ProbabilityMeasure, CoarseError> {
        self.group.ensure_same(&m.group())?;
        let out = self.apply_real(m.weights());
        Ok(ProbabilityMeasure::from_trusted(self.group, out))
    }

    pub fn apply_real(&self, m: &[f64]) -> Vec<f64> {
        let n = self.group.order();
        let mut out = vec![0.0; n];
        for (w, &mw) in m.iter().enumerate() {
            for (o, &k) in out.iter_mut().zip(&self.matrix[w]) {
                *o += mw * k;
            }
        }
        out
    }

    /// Linear extension to complex measures.
    pub fn apply_complex(&self, m: &[C64]) -> Vec<C64> {
        let n = self.group.order();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (w, &mw) in m.iter().enumerate() {
            for (o, &k) in out.iter_mut().zip(&self.matrix[w]) {
                *o += mw * k;
            }
        }
        out
    }
}

/// `x -> tr(T E({x}))`
pub fn statistics_map(e: &Observable, t: &StateDensity) -> Result<ProbabilityMeasure, CoarseError> {
    if t.dim() != e.dim() {
        return Err(CoarseError::DimensionMismatch {
            expected: e.dim(),
            got: t.dim(),
        });
    }
    let weights = e
        .atoms()
        .iter()
        .map(|a| t.matrix().trace_product(a).re.max(0.0))
        .collect();
    Ok(ProbabilityMeasure::from_trusted(e.group(), weights))
}

/// `W[w][x] = nu_w({x})`
pub fn kernel_from_confidence(nu: &ConfidenceKernel) -> CoarseKernel {
    CoarseKernel {
        group: nu.group(),
        matrix: nu.rows().iter().map(|r| r.weights().to_vec()).collect(),
    }
}

/// Factor `V_E2 = W o V_P` over the canonical sharp observable.
///
/// `W[w][x] = tr(T_w E2({x}))` with `T_w = P({w}) / m`. The result is checked
/// on a real-linear spanning set of Hermitian operators (diagonal projectors
/// and the two-level superpositions `e_i + e_j`, `e_i + i e_j`); an observable
/// with coherences across blocks fails that check.
pub fn solve_coarsening(e2: &Observable, p: &SharpObservable) -> Result<CoarseKernel, CoarseError> {
    e2.group().ensure_same(&p.group())?;
    if e2.dim() != p.dim() {
        return Err(CoarseError::DimensionMismatch {
            expected: p.dim(),
            got: e2.dim(),
        });
    }
    let m = p.canonical_multiplicity().ok_or(CoarseError::NotCanonical)?;
    let n = p.order();
    let matrix: Vec<Vec<f64>> = (0..n)
        .map(|w| {
            (0..n)
                .map(|x| {
                    let a = e2.atom(x);
                    let tr: f64 = (0..m).map(|j| a[(w * m + j, w * m + j)].re).sum();
                    (tr / m as f64).max(0.0)
                })
                .collect()
        })
        .collect();
    let kernel = CoarseKernel {
        group: e2.group(),
        matrix,
    };

    let dim = p.dim();
    let block = |i: usize| i / m;
    let mut residual = 0.0f64;
    let one = C64::new(1.0, 0.0);
    let phases = [one, C64::new(0.0, 1.0)];
    for i in 0..dim {
        // <e_i | A | e_i>
        let direct: Vec<f64> = e2.atoms().iter().map(|a| a[(i, i)].re).collect();
        let via = &kernel.matrix[block(i)];
        residual = residual.max(max_gap(&direct, via));
        for j in (i + 1)..dim {
            for &c in &phases {
                // v = (e_i + c e_j) / sqrt 2
                let direct: Vec<f64> = e2
                    .atoms()
                    .iter()
                    .map(|a| {
                        0.5 * (a[(i, i)] + c * a[(i, j)] + c.conj() * a[(j, i)] + a[(j, j)]).re
                    })
                    .collect();
                // P-statistics of v put mass 1/2 on each of the two blocks
                let via: Vec<f64> = (0..n)
                    .map(|x| 0.5 * (kernel.matrix[block(i)][x] + kernel.matrix[block(j)][x]))
                    .collect();
                residual = residual.max(max_gap(&direct, &via));
            }
        }
    }
    if residual > FACTORIZATION_TOL {
        return Err(CoarseError::FactorizationFailed(residual));
    }
    Ok(kernel)
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Largest `|W[w + k][x + k] - W[w][x]|`.
pub fn translation_defect(w: &CoarseKernel) -> f64 {
    let g = w.group;
    let n = g.order();
    let mut worst = 0.0f64;
    for a in 0..n {
        for x in 0..n {
            // comparing against row 0 covers every shift k
            worst = worst.max((w.matrix[a][x] - w.matrix[0][g.sub(x, a)]).abs());
        }
    }
    worst
}

/// True iff `W` commutes with every translation, i.e. is circulant.
pub fn translation_commutes(w: &CoarseKernel, tol: f64) -> bool {
    translation_defect(w) <= tol
}

/// Reads off `rho = W[0][.]` from a translation-invariant kernel, so that
/// `m W = m * rho`.
pub fn extract_smearing_measure(w: &CoarseKernel) -> Result<ProbabilityMeasure, CoarseError> {
    let defect = translation_defect(w);
    if defect > CIRCULANT_TOL {
        return Err(CoarseError::NotCovariant(defect));
    }
    Ok(ProbabilityMeasure::new(w.group, w.matrix[0].clone())?)
}
