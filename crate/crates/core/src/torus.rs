//! Circle-covariant localization observables in the Fourier basis `e_n`,
//! truncated to `|n| <= K`.
//!
//! Such an observable is fixed by its coefficient matrix `c[n][m]`:
//! `<e_n| E(X) |e_m> = c[n][m] * int_X z^(m - n) dmu`, with `mu` the
//! normalized Haar measure. It is a smearing of the sharp localization
//! exactly when `c` is Toeplitz, in which case `Phi(k) = c[k][0]` is the
//! moment sequence of the smearing measure.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{self, CMat, LinalgError, C64, HERMITIAN_TOL};

/// Unit-diagonal and Hermitian slack for a coefficient matrix.
pub const CMATRIX_TOL: f64 = 1e-12;
/// Lowest eigenvalue tolerated in a positive window.
pub const PSD_TOL: f64 = 1e-9;
/// Entrywise Toeplitz tolerance.
pub const TOEPLITZ_TOL: f64 = 1e-12;
/// Relative eigenvalue threshold for the numerical rank of a moment matrix.
pub const RANK_RATIO: f64 = 1e-8;
/// Normalization slack for circle measures.
pub const MEASURE_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TorusError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("coefficient matrix needs (2K+1)^2 = {expected} entries, got {got}")]
    BadShape { expected: usize, got: usize },
    #[error("coefficient matrix is not Toeplitz at (n, m, k) = {0:?}")]
    NotToeplitz((i64, i64, i64)),
    #[error("invalid Herglotz sequence: {0}")]
    InvalidSequence(String),
    #[error("invalid circle measure: {0}")]
    InvalidMeasure(String),
    #[error("moment matrix has full rank {rank}; no finite atomic decomposition in this window")]
    RankDeficiencyAmbiguous { rank: usize },
    #[error("grid of {grid} points is too coarse for half-width {k}")]
    GridTooSmall { grid: usize, k: usize },
    #[error("polynomial root finding did not converge")]
    RootFinding,
}

/// Coefficients `c[n][m]`, `-K <= n, m <= K`.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    half_width: usize,
    entries: Vec<C64>,
}

impl CMatrix {
    pub fn new(half_width: usize, entries: Vec<C64>) -> Result<Self, TorusError> {
        let side = 2 * half_width + 1;
        if entries.len() != side * side {
            return Err(TorusError::BadShape {
                expected: side * side,
                got: entries.len(),
            });
        }
        Ok(Self {
            half_width,
            entries,
        })
    }

    pub fn from_fn(half_width: usize, f: impl Fn(i64, i64) -> C64) -> Self {
        let k = half_width as i64;
        let mut entries = Vec::with_capacity((2 * half_width + 1).pow(2));
        for n in -k..=k {
            for m in -k..=k {
                entries.push(f(n, m));
            }
        }
        Self {
            half_width,
            entries,
        }
    }

    /// The sharp localization: every coefficient is one.
    pub fn all_ones(half_width: usize) -> Self {
        Self::from_fn(half_width, |_, _| C64::new(1.0, 0.0))
    }

    /// Haar smearing: `c[n][m] = delta_nm`.
    pub fn identity(half_width: usize) -> Self {
        Self::from_fn(half_width, |n, m| C64::new(if n == m { 1.0 } else { 0.0 }, 0.0))
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn side(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn contains(&self, n: i64) -> bool {
        n.unsigned_abs() as usize <= self.half_width
    }

    fn offset(&self, n: i64) -> usize {
        (n + self.half_width as i64) as usize
    }

    pub fn get(&self, n: i64, m: i64) -> C64 {
        self.entries[self.offset(n) * self.side() + self.offset(m)]
    }

    pub fn set(&mut self, n: i64, m: i64, value: C64) {
        let idx = self.offset(n) * self.side() + self.offset(m);
        self.entries[idx] = value;
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    /// The window `-k..=k` as a dense matrix.
    pub fn window(&self, k: usize) -> CMat {
        let k = k.min(self.half_width) as i64;
        CMat::from_fn((2 * k + 1) as usize, |i, j| {
            self.get(i as i64 - k, j as i64 - k)
        })
    }

    pub fn to_matrix(&self) -> CMat {
        self.window(self.half_width)
    }
}

/// First violated coefficient condition.
#[derive(Debug, Clone, PartialEq)]
pub enum CMatrixViolation {
    /// `c[n][n] != 1`
    Diagonal { n: i64 },
    /// `c[m][n] != conj(c[n][m])`
    NotHermitian { n: i64, m: i64 },
    /// `|c[n][m]| > 1`
    Magnitude { n: i64, m: i64 },
    /// The window `-k..=k` has a negative eigenvalue.
    NotPositive { k: usize, min_eigenvalue: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrixValidation {
    pub valid: bool,
    pub violation: Option<CMatrixViolation>,
}

/// Checks unit diagonal, Hermiticity, `|c| <= 1`, then positivity of every
/// nested window, stopping at the first failure.
pub fn validate_cmatrix(c: &CMatrix) -> CMatrixValidation {
    let fail = |v| CMatrixValidation {
        valid: false,
        violation: Some(v),
    };
    let k = c.half_width as i64;
    for n in -k..=k {
        if (c.get(n, n) - C64::new(1.0, 0.0)).norm() > CMATRIX_TOL {
            return fail(CMatrixViolation::Diagonal { n });
        }
    }
    for n in -k..=k {
        for m in n..=k {
            if (c.get(m, n) - c.get(n, m).conj()).norm() > CMATRIX_TOL {
                return fail(CMatrixViolation::NotHermitian { n, m });
            }
        }
    }
    for n in -k..=k {
        for m in -k..=k {
            if c.get(n, m).norm() > 1.0 + CMATRIX_TOL {
                return fail(CMatrixViolation::Magnitude { n, m });
            }
        }
    }
    for w in 0..=c.half_width {
        let min = match linalg::hermitian_eigenvalues(&c.window(w), HERMITIAN_TOL) {
            Ok(ev) => ev[0],
            Err(_) => f64::NEG_INFINITY,
        };
        if min < -PSD_TOL {
            return fail(CMatrixViolation::NotPositive {
                k: w,
                min_eigenvalue: min,
            });
        }
    }
    CMatrixValidation {
        valid: true,
        violation: None,
    }
}

/// Matrix with `c[n][n] = 1` and, off the diagonal, `c[n][m] = 1` when both
/// indices are even and `0` otherwise: commutative, covariant, not Toeplitz.
pub fn toigo_cmatrix(half_width: usize) -> CMatrix {
    CMatrix::from_fn(half_width, |n, m| {
        let one = n == m || (n % 2 == 0 && m % 2 == 0);
        C64::new(if one { 1.0 } else { 0.0 }, 0.0)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzCheck {
    pub toeplitz: bool,
    /// Lexicographically first `(n, m, k)` with `c[n + k][m + k] != c[n][m]`,
    /// `k >= 1`.
    pub first_violation: Option<(i64, i64, i64)>,
    /// Every unit-shift violation `(n, m, 1)`; unit shifts generate all others.
    pub unit_shift_violations: Vec<(i64, i64, i64)>,
}

impl ToeplitzCheck {
    pub fn violates(&self, n: i64, m: i64, k: i64) -> bool {
        self.unit_shift_violations.contains(&(n, m, k)) || self.first_violation == Some((n, m, k))
    }
}

/// `|c[n + k][m + k] - c[n][m]|` when both index pairs lie in the window.
pub fn toeplitz_defect(c: &CMatrix, n: i64, m: i64, k: i64) -> Option<f64> {
    let inside = [n, m, n + k, m + k].iter().all(|&i| c.contains(i));
    inside.then(|| (c.get(n + k, m + k) - c.get(n, m)).norm())
}

/// Toeplitz test `c[n + k][m + k] = c[n][m]` over the whole window, which is
/// the finite form of commuting with the sharp localization.
pub fn commutes_with_sharp(c: &CMatrix) -> ToeplitzCheck {
    let k = c.half_width as i64;
    let mut first = None;
    'outer: for n in -k..=k {
        for m in -k..=k {
            for s in 1..=(2 * k) {
                if let Some(d) = toeplitz_defect(c, n, m, s) {
                    if d > TOEPLITZ_TOL {
                        first = Some((n, m, s));
                        break 'outer;
                    }
                }
            }
        }
    }
    let mut unit = Vec::new();
    for n in -k..k {
        for m in -k..k {
            if toeplitz_defect(c, n, m, 1).is_some_and(|d| d > TOEPLITZ_TOL) {
                unit.push((n, m, 1));
            }
        }
    }
    ToeplitzCheck {
        toeplitz: first.is_none(),
        first_violation: first,
        unit_shift_violations: unit,
    }
}

/// Half-open arc `[start, start + length)` on the circle, angles in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    start: f64,
    length: f64,
}

impl Arc {
    /// `[start, end)` going counterclockwise; `start == end` is empty.
    pub fn new(start: f64, end: f64) -> Self {
        let start = start.rem_euclid(TAU);
        let length = (end - start).rem_euclid(TAU);
        Self { start, length }
    }

    pub fn full() -> Self {
        Self {
            start: 0.0,
            length: TAU,
        }
    }

    pub fn empty() -> Self {
        Self {
            start: 0.0,
            length: 0.0,
        }
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.start + self.length
    }

    /// Normalized Haar measure of the arc.
    pub fn haar_length(&self) -> f64 {
        self.length / TAU
    }

    pub fn contains(&self, angle: f64) -> bool {
        (angle - self.start).rem_euclid(TAU) < self.length
    }

    /// `I_j(X) = int_X z^j dmu`
    pub fn moment(&self, j: i64) -> C64 {
        if j == 0 {
            return C64::new(self.haar_length(), 0.0);
        }
        let jf = j as f64;
        let num = C64::from_polar(1.0, jf * self.end()) - C64::from_polar(1.0, jf * self.start);
        num / C64::new(0.0, TAU * jf)
    }

    /// `count` equal arcs starting at angle zero.
    pub fn partition(count: usize) -> Vec<Arc> {
        (0..count)
            .map(|i| Arc {
                start: TAU * i as f64 / count as f64,
                length: TAU / count as f64,
            })
            .collect()
    }
}

/// Truncated `E(X)`: entry `(n, m)` is `c[n][m] I_(m - n)(X)`.
pub fn arc_effect(c: &CMatrix, arc: &Arc) -> CMat {
    let k = c.half_width as i64;
    let moments: Vec<C64> = (-2 * k..=2 * k).map(|j| arc.moment(j)).collect();
    CMat::from_fn(c.side(), |i, j| {
        let (n, m) = (i as i64 - k, j as i64 - k);
        c.get(n, m) * moments[(m - n + 2 * k) as usize]
    })
}

/// Restriction of the commutator diagnostics to the central window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorDiagnostic {
    pub half_width: usize,
    /// Entries with `|n|, |m| <= inner` are compared.
    pub inner: usize,
    pub value: f64,
}

fn commutator_over(
    c_left: &CMatrix,
    c_right: &CMatrix,
    arcs: &[Arc],
    inner: usize,
) -> CommutatorDiagnostic {
    let k = c_left.half_width;
    let inner = inner.min(k);
    let lefts: Vec<CMat> = arcs.iter().map(|a| arc_effect(c_left, a)).collect();
    let rights: Vec<CMat> = arcs.iter().map(|a| arc_effect(c_right, a)).collect();
    let lo = k - inner;
    let hi = k + inner;
    let value = lefts
        .par_iter()
        .map(|x| {
            rights
                .iter()
                .map(|y| {
                    let xy = x * y;
                    let yx = y * x;
                    let mut worst = 0.0f64;
                    for i in lo..=hi {
                        for j in lo..=hi {
                            worst = worst.max((xy[(i, j)] - yx[(i, j)]).norm());
                        }
                    }
                    worst
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    CommutatorDiagnostic {
        half_width: k,
        inner,
        value,
    }
}

/// Default inner window: the central half of the truncation.
pub fn default_inner(half_width: usize) -> usize {
    half_width / 2
}

/// `max_(X, Y) |[P(X), E(Y)]|` over arc pairs, both operators truncated to
/// the window and compared on the central `|n|, |m| <= inner` block, where
/// truncation of the inner sums over `s` does the least damage.
pub fn commutator_diagnostic(c: &CMatrix, arcs: &[Arc], inner: usize) -> CommutatorDiagnostic {
    commutator_over(&CMatrix::all_ones(c.half_width), c, arcs, inner)
}

/// `max_(X, Y) |[E(X), E(Y)]|`, same truncation convention.
pub fn self_commutator_diagnostic(c: &CMatrix, arcs: &[Arc], inner: usize) -> CommutatorDiagnostic {
    commutator_over(c, c, arcs, inner)
}

/// `Phi(k)` for `|k| <= K`.
#[derive(Debug, Clone, PartialEq)]
pub struct HerglotzSequence {
    half_width: usize,
    values: Vec<C64>,
}

impl HerglotzSequence {
    /// Validates `Phi(0) = 1`, `Phi(-k) = conj Phi(k)`, `|Phi(k)| <= 1` and
    /// positivity of the Toeplitz matrix `[Phi(n - m)]`.
    pub fn new(half_width: usize, values: Vec<C64>) -> Result<Self, TorusError> {
        if values.len() != 2 * half_width + 1 {
            return Err(TorusError::InvalidSequence(format!(
                "expected {} values, got {}",
                2 * half_width + 1,
                values.len()
            )));
        }
        let seq = Self { half_width, values };
        if (seq.get(0) - C64::new(1.0, 0.0)).norm() > CMATRIX_TOL {
            return Err(TorusError::InvalidSequence("Phi(0) != 1".into()));
        }
        let k = half_width as i64;
        for j in 1..=k {
            if (seq.get(-j) - seq.get(j).conj()).norm() > CMATRIX_TOL {
                return Err(TorusError::InvalidSequence(format!("Phi(-{j}) != conj Phi({j})")));
            }
            if seq.get(j).norm() > 1.0 + CMATRIX_TOL {
                return Err(TorusError::InvalidSequence(format!("|Phi({j})| > 1")));
            }
        }
        let min = linalg::hermitian_eigenvalues(&seq.toeplitz(half_width + 1), HERMITIAN_TOL)?[0];
        if min < -PSD_TOL {
            return Err(TorusError::InvalidSequence(format!(
                "not positive definite (eigenvalue {min:e})"
            )));
        }
        Ok(seq)
    }

    pub fn from_fn(half_width: usize, f: impl Fn(i64) -> C64) -> Result<Self, TorusError> {
        let k = half_width as i64;
        Self::new(half_width, (-k..=k).map(f).collect())
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn get(&self, k: i64) -> C64 {
        self.values[(k + self.half_width as i64) as usize]
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// `[Phi(n - m)]` for `0 <= n, m < size`.
    pub fn toeplitz(&self, size: usize) -> CMat {
        CMat::from_fn(size, |n, m| self.get(n as i64 - m as i64))
    }
}

/// `Phi(k) = c[k][0]`, after confirming `c` is Toeplitz.
pub fn herglotz_sequence(c: &CMatrix) -> Result<HerglotzSequence, TorusError> {
    let check = commutes_with_sharp(c);
    if let Some(v) = check.first_violation {
        return Err(TorusError::NotToeplitz(v));
    }
    let k = c.half_width as i64;
    HerglotzSequence::new(c.half_width, (-k..=k).map(|j| c.get(j, 0)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Atom {
    pub angle: f64,
    pub weight: f64,
}

/// Probability measure on the circle: finitely many atoms, or a density
/// sampled at `M` equispaced angles `2 pi j / M` with mean one.
#[derive(Debug, Clone, PartialEq)]
pub enum TorusMeasure {
    Atomic(Vec<Atom>),
    Grid(Vec<f64>),
}

impl TorusMeasure {
    pub fn atomic(atoms: Vec<Atom>) -> Result<Self, TorusError> {
        if atoms.is_empty() {
            return Err(TorusError::InvalidMeasure("no atoms".into()));
        }
        if atoms
            .iter()
            .any(|a| !a.angle.is_finite() || !a.weight.is_finite() || a.weight < 0.0)
        {
            return Err(TorusError::InvalidMeasure("negative or non-finite atom".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > MEASURE_TOL {
            return Err(TorusError::InvalidMeasure(format!("atom weights sum to {total}")));
        }
        Ok(Self::Atomic(
            atoms
                .into_iter()
                .map(|a| Atom {
                    angle: a.angle.rem_euclid(TAU),
                    weight: a.weight,
                })
                .collect(),
        ))
    }

    pub fn grid(density: Vec<f64>) -> Result<Self, TorusError> {
        if density.is_empty() {
            return Err(TorusError::InvalidMeasure("empty grid".into()));
        }
        if let Some(v) = density.iter().find(|v| !v.is_finite() || **v < -PSD_TOL) {
            return Err(TorusError::InvalidMeasure(format!("density value {v}")));
        }
        let mean = density.iter().sum::<f64>() / density.len() as f64;
        if (mean - 1.0).abs() > MEASURE_TOL {
            return Err(TorusError::InvalidMeasure(format!("density mean {mean}")));
        }
        Ok(Self::Grid(density))
    }

    pub fn dirac(angle: f64) -> Self {
        Self::Atomic(vec![Atom {
            angle: angle.rem_euclid(TAU),
            weight: 1.0,
        }])
    }

    /// Haar measure as a constant density on `points` samples.
    pub fn haar(points: usize) -> Self {
        Self::Grid(vec![1.0; points.max(1)])
    }

    /// `int z^k drho`; grid measures use the equal-weight periodic rule.
    pub fn moment(&self, k: i64) -> C64 {
        match self {
            Self::Atomic(atoms) => atoms
                .iter()
                .map(|a| C64::from_polar(a.weight, k as f64 * a.angle))
                .sum(),
            Self::Grid(d) => {
                let m = d.len();
                d.iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        let r = ((k.rem_euclid(m as i64) as usize * j) % m) as f64;
                        C64::from_polar(v, TAU * r / m as f64)
                    })
                    .sum::<C64>()
                    / m as f64
            }
        }
    }

    /// Mass assigned to a half-open arc (grid samples count as point masses
    /// `d_j / M` at their angles).
    pub fn arc_mass(&self, arc: &Arc) -> f64 {
        match self {
            Self::Atomic(atoms) => atoms
                .iter()
                .filter(|a| arc.contains(a.angle))
                .map(|a| a.weight)
                .sum(),
            Self::Grid(d) => {
                let m = d.len();
                d.iter()
                    .enumerate()
                    .filter(|(j, _)| arc.contains(TAU * *j as f64 / m as f64))
                    .map(|(_, v)| v / m as f64)
                    .sum()
            }
        }
    }
}

/// `c[n][m] = int z^(n - m) drho`, which is Toeplitz by construction.
pub fn cmatrix_from_measure(rho: &TorusMeasure, half_width: usize) -> CMatrix {
    let k = half_width as i64;
    let moments: Vec<C64> = (-2 * k..=2 * k).map(|j| rho.moment(j)).collect();
    CMatrix::from_fn(half_width, |n, m| moments[(n - m + 2 * k) as usize])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reconstruction {
    /// Cesaro-damped density on an `M`-point grid.
    Fejer { grid: usize },
    /// Finite atomic measure from a rank-deficient moment matrix.
    Caratheodory,
}

/// Rebuilds a circle measure from its moment sequence.
///
/// `Fejer` returns `d(t_j) = sum_(|k| <= K) (1 - |k|/(K+1)) Phi(k) e^(-i k t_j)`,
/// which is nonnegative for any positive definite `Phi` and reproduces the
/// damped moments exactly once `M > 2K`. `Caratheodory` finds the `r` atoms
/// of a moment matrix of numerical rank `r <= K` as the roots of its
/// annihilating polynomial and fits nonnegative weights.
pub fn herglotz_reconstruct(
    phi: &HerglotzSequence,
    mode: Reconstruction,
) -> Result<TorusMeasure, TorusError> {
    match mode {
        Reconstruction::Fejer { grid } => fejer_density(phi, grid),
        Reconstruction::Caratheodory => caratheodory_atoms(phi, RANK_RATIO),
    }
}

fn fejer_density(phi: &HerglotzSequence, grid: usize) -> Result<TorusMeasure, TorusError> {
    let k = phi.half_width;
    if grid <= 2 * k {
        return Err(TorusError::GridTooSmall { grid, k });
    }
    let ki = k as i64;
    let density: Vec<f64> = (0..grid)
        .into_par_iter()
        .map(|j| {
            (-ki..=ki)
                .map(|s| {
                    let damp = 1.0 - s.unsigned_abs() as f64 / (k + 1) as f64;
                    let r = ((s.rem_euclid(grid as i64) as usize * j) % grid) as f64;
                    phi.get(s) * C64::from_polar(damp, -TAU * r / grid as f64)
                })
                .sum::<C64>()
                .re
        })
        .collect();
    Ok(TorusMeasure::Grid(density))
}

/// Numerical rank of `[Phi(n - m)]_(0 <= n, m <= K)`.
pub fn moment_rank(phi: &HerglotzSequence, ratio: f64) -> Result<usize, TorusError> {
    let ev = linalg::hermitian_eigenvalues(&phi.toeplitz(phi.half_width + 1), HERMITIAN_TOL)?;
    let top = ev[ev.len() - 1];
    Ok(ev.iter().filter(|&&l| l > ratio * top).count())
}

fn caratheodory_atoms(phi: &HerglotzSequence, ratio: f64) -> Result<TorusMeasure, TorusError> {
    let k = phi.half_width;
    let rank = moment_rank(phi, ratio)?;
    if rank == k + 1 {
        return Err(TorusError::RankDeficiencyAmbiguous { rank });
    }
    // null vector a of the (r+1) leading block: sum_m conj(a_m) z_j^m = 0 at
    // every atom z_j
    let block = phi.toeplitz(rank + 1);
    let eig = linalg::hermitian_eig(&block, HERMITIAN_TOL)?;
    let null = eig.eigenvector(0);
    let coeffs: Vec<C64> = null.iter().map(|a| a.conj()).collect();
    let roots = polynomial_roots(&coeffs)?;
    let mut angles: Vec<f64> = roots.iter().map(|z| z.arg().rem_euclid(TAU)).collect();
    angles.sort_by(f64::total_cmp);

    let weights = fit_weights(phi, &angles);
    let total: f64 = weights.iter().sum();
    let atoms: Vec<Atom> = angles
        .into_iter()
        .zip(weights)
        .filter(|(_, w)| *w > 0.0)
        .map(|(angle, w)| Atom {
            angle,
            weight: w / total,
        })
        .collect();
    TorusMeasure::atomic(atoms)
}

/// Nonnegative least squares for `sum_j w_j e^(i k t_j) = Phi(k)`, `|k| <= K`,
/// by repeatedly dropping the most negative weight.
fn fit_weights(phi: &HerglotzSequence, angles: &[f64]) -> Vec<f64> {
    let k = phi.half_width as i64;
    let mut active: Vec<usize> = (0..angles.len()).collect();
    loop {
        let r = active.len();
        if r == 0 {
            return vec![0.0; angles.len()];
        }
        // real normal equations Re(V^H V) w = Re(V^H Phi)
        let mut gram = vec![vec![0.0; r]; r];
        let mut rhs = vec![0.0; r];
        for s in -k..=k {
            let col: Vec<C64> = active
                .iter()
                .map(|&a| C64::from_polar(1.0, s as f64 * angles[a]))
                .collect();
            for i in 0..r {
                rhs[i] += (col[i].conj() * phi.get(s)).re;
                for j in 0..r {
                    gram[i][j] += (col[i].conj() * col[j]).re;
                }
            }
        }
        let sol = solve_dense(gram, rhs);
        let (worst, min) = sol
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        if min >= 0.0 {
            let mut full = vec![0.0; angles.len()];
            for (i, &a) in active.iter().enumerate() {
                full[a] = sol[i];
            }
            return full;
        }
        active.remove(worst);
    }
}

/// Gaussian elimination with partial pivoting for a small dense system.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        a.swap(col, piv);
        b.swap(col, piv);
        let d = a[col][col];
        if d.abs() < 1e-300 {
            continue;
        }
        let (upper, lower) = a.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        for (offset, row) in lower.iter_mut().enumerate() {
            let f = row[col] / d;
            if f == 0.0 {
                continue;
            }
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
            b[col + 1 + offset] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = ((row + 1)..n).map(|c| a[row][c] * x[c]).sum();
        let d = a[row][row];
        x[row] = if d.abs() < 1e-300 { 0.0 } else { (b[row] - s) / d };
    }
    x
}

/// Roots of `sum_m coeffs[m] z^m` by Aberth iteration followed by Newton
/// polishing.
pub fn polynomial_roots(coeffs: &[C64]) -> Result<Vec<C64>, TorusError> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c[c.len() - 1].norm() < 1e-14 * c.iter().map(|z| z.norm()).fold(0.0, f64::max) {
        c.pop();
    }
    let deg = c.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = c[deg];
    let monic: Vec<C64> = c.iter().map(|z| z / lead).collect();
    let eval = |z: C64| -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for a in monic.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    };
    let radius = 1.0 + monic[..deg].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut roots: Vec<C64> = (0..deg)
        .map(|i| C64::from_polar(0.5 * radius.min(2.0), TAU * i as f64 / deg as f64 + 0.4))
        .collect();
    let mut converged = false;
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..deg {
            let (p, dp) = eval(roots[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: C64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| C64::new(1.0, 0.0) / (roots[i] - roots[j]))
                .sum();
            let step = ratio / (C64::new(1.0, 0.0) - ratio * repulsion);
            roots[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-15 {
            converged = true;
            break;
        }
    }
    for r in roots.iter_mut() {
        for _ in 0..5 {
            let (p, dp) = eval(*r);
            if dp.norm() == 0.0 {
                break;
            }
            *r -= p / dp;
        }
    }
    if !converged && roots.iter().any(|r| eval(*r).0.norm() > 1e-8) {
        return Err(TorusError::RootFinding);
    }
    Ok(roots)
}

/// `max_(|k| <= K) |int z^k drho - target(k)|`
pub fn moment_residual(rho: &TorusMeasure, phi: &HerglotzSequence) -> f64 {
    let k = phi.half_width as i64;
    (-k..=k)
        .map(|j| (rho.moment(j) - phi.get(j)).norm())
        .fold(0.0, f64::max)
}

/// Periodized density `1 + cos t`, whose moments are
/// `Phi(k) = max(1 - |k|/2, 0)`.
pub fn triangle_density_fixture(grid: usize) -> Result<TorusMeasure, TorusError> {
    if grid < 64 {
        return Err(TorusError::GridTooSmall { grid, k: 2 });
    }
    let density = (0..grid)
        .map(|j| 1.0 + (TAU * j as f64 / grid as f64).cos())
        .collect();
    TorusMeasure::grid(density)
}

/// Closed form of the triangle transform, `max(1 - |k|/2, 0)`.
pub fn triangle_transform(k: i64) -> f64 {
    (1.0 - 0.5 * k.unsigned_abs() as f64).max(0.0)
}

/// Angle of a grid sample.
pub fn grid_angle(j: usize, grid: usize) -> f64 {
    2.0 * PI * j as f64 / grid as f64
}
