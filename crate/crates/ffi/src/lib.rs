//! C ABI over `fuzzobs`.
//!
//! Objects are opaque heap handles created by `fz_*_new`-style constructors
//! and released with the matching `fz_*_free`. Every fallible function
//! returns an [`FzStatus`]; on failure `fz_last_error` holds a message for the
//! calling thread. Output pointers are written only on success. Panics never
//! cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use fuzzobs::coarsegrain::{self, CoarseError};
use fuzzobs::group::{CyclicGroup, GroupError, ProbabilityMeasure};
use fuzzobs::io::{self, DocError};
use fuzzobs::povm::{self, Observable, PovmError, StateVector};
use fuzzobs::sterngerlach;
use fuzzobs::torus::{self, CMatrix};
use fuzzobs::C64;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FzStatus {
    Ok = 0,
    NullPointer = 1,
    /// Malformed input: bad length, bad JSON, bad UTF-8.
    InvalidArgument = 2,
    /// Well-formed input that breaks a mathematical invariant.
    InvariantViolation = 3,
    /// The operation does not apply to this input.
    Precondition = 4,
    /// Brute-force size cap exceeded.
    TooLarge = 5,
    /// Internal failure, including a caught panic.
    Internal = 6,
}

/// Probability measure on `Z_N`.
pub struct FzMeasure(ProbabilityMeasure);

/// Observable on `Z_N` with effects on `C^dim`.
pub struct FzObservable(Observable);

/// Truncated circle coefficient matrix.
pub struct FzCMatrix(CMatrix);

/// Stern-Gerlach analysis.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FzSgReport {
    pub is_sharp: bool,
    pub has_norm_one: bool,
    pub is_regular: bool,
    pub is_info_equivalent: bool,
    pub is_trivial: bool,
    pub norm_up: f64,
    pub norm_down: f64,
}

struct Failure(FzStatus, String);

type FfiResult<T> = Result<T, Failure>;

impl From<GroupError> for Failure {
    fn from(e: GroupError) -> Self {
        Failure(FzStatus::InvariantViolation, e.to_string())
    }
}

impl From<PovmError> for Failure {
    fn from(e: PovmError) -> Self {
        let status = match e {
            PovmError::TooLarge { .. } => FzStatus::TooLarge,
            PovmError::NonVanishingTransform { .. } | PovmError::NotCanonical => {
                FzStatus::Precondition
            }
            PovmError::DimensionMismatch { .. } => FzStatus::InvalidArgument,
            _ => FzStatus::InvariantViolation,
        };
        Failure(status, e.to_string())
    }
}

impl From<CoarseError> for Failure {
    fn from(e: CoarseError) -> Self {
        let status = match e {
            CoarseError::NotCovariant(_)
            | CoarseError::FactorizationFailed(_)
            | CoarseError::NotCanonical => FzStatus::Precondition,
            _ => FzStatus::InvariantViolation,
        };
        Failure(status, e.to_string())
    }
}

impl From<DocError> for Failure {
    fn from(e: DocError) -> Self {
        match e {
            DocError::Schema(s) => Failure(FzStatus::InvalidArgument, s),
            DocError::Invariant(s) => Failure(FzStatus::InvariantViolation, s),
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let clean = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = clean);
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> FzStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            FzStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("internal error: {message}"));
            FzStatus::Internal
        }
    }
}

fn null(name: &str) -> Failure {
    Failure(FzStatus::NullPointer, format!("{name} is null"))
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn write<T>(out: *mut T, value: T, name: &str) -> FfiResult<()> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> FfiResult<()> {
    nonnull(out, "out")?;
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

fn nonnull<T>(p: *mut T, name: &str) -> FfiResult<()> {
    if p.is_null() {
        Err(null(name))
    } else {
        Ok(())
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> FfiResult<&'a [T]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, name: &str) -> FfiResult<&'a mut [T]> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn expect_len(name: &str, got: usize, want: usize) -> FfiResult<()> {
    if got == want {
        Ok(())
    } else {
        Err(Failure(
            FzStatus::InvalidArgument,
            format!("{name} has length {got}, expected {want}"),
        ))
    }
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(FzStatus::InvalidArgument, format!("{name}: {e}")))
}

fn into_c_string(s: String) -> FfiResult<*mut c_char> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| Failure(FzStatus::Internal, e.to_string()))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next `fz_*` call on the same thread.
#[no_mangle]
pub extern "C" fn fz_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fz_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Probability measure from `order` weights; sums within 1e-9 of one are
/// renormalized.
///
/// # Safety
/// `weights` must point to `order` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fz_measure_new(
    order: usize,
    weights: *const f64,
    out: *mut *mut FzMeasure,
) -> FzStatus {
    guard(|| {
        let w = slice(weights, order, "weights")?.to_vec();
        let g = CyclicGroup::new(order)
            .map_err(|e| Failure(FzStatus::InvalidArgument, e.to_string()))?;
        let m = ProbabilityMeasure::new(g, w)?;
        emit(out, FzMeasure(m))
    })
}

/// # Safety
/// `m` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn fz_measure_free(m: *mut FzMeasure) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fz_measure_order(m: *const FzMeasure, out: *mut usize) -> FzStatus {
    guard(|| write(out, deref(m, "measure")?.0.order(), "out"))
}

/// Copies the `order` weights into `out`.
///
/// # Safety
/// `m` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fz_measure_weights(
    m: *const FzMeasure,
    out: *mut f64,
    len: usize,
) -> FzStatus {
    guard(|| {
        let w = deref(m, "measure")?.0.weights();
        expect_len("out", len, w.len())?;
        slice_mut(out, len, "out")?.copy_from_slice(w);
        Ok(())
    })
}

/// Whether smearing by `m` keeps every distinction of the sharp observable:
/// no transform value has modulus at or below `tol`.
///
/// # Safety
/// `m` must be a live handle; both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn fz_measure_info_equivalent(
    m: *const FzMeasure,
    tol: f64,
    out_equivalent: *mut bool,
    out_min_abs_transform: *mut f64,
) -> FzStatus {
    guard(|| {
        nonnull(out_equivalent, "out_equivalent")?;
        nonnull(out_min_abs_transform, "out_min_abs_transform")?;
        let r = povm::informationally_equivalent(&deref(m, "measure")?.0, tol);
        write(out_equivalent, r.equivalent, "out_equivalent")?;
        write(out_min_abs_transform, r.min_abs_transform, "out_min_abs_transform")
    })
}

/// Smearing of the canonical sharp observable on `C^N (x) C^multiplicity`.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fz_observable_smear(
    m: *const FzMeasure,
    multiplicity: usize,
    out: *mut *mut FzObservable,
) -> FzStatus {
    guard(|| {
        let rho = &deref(m, "measure")?.0;
        let (p, _) = povm::canonical_system(rho.order(), multiplicity)?;
        let e = povm::smear_by_measure(&p, rho)?;
        emit(out, FzObservable(e))
    })
}

/// # Safety
/// `e` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn fz_observable_free(e: *mut FzObservable) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fz_observable_order(e: *const FzObservable, out: *mut usize) -> FzStatus {
    guard(|| write(out, deref(e, "observable")?.0.order(), "out"))
}

/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fz_observable_dim(e: *const FzObservable, out: *mut usize) -> FzStatus {
    guard(|| write(out, deref(e, "observable")?.0.dim(), "out"))
}

/// Copies atom `x` as `2 dim^2` doubles: row-major, real and imaginary parts
/// interleaved.
///
/// # Safety
/// `e` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fz_observable_atom(
    e: *const FzObservable,
    x: usize,
    out: *mut f64,
    len: usize,
) -> FzStatus {
    guard(|| {
        let e = &deref(e, "observable")?.0;
        if x >= e.order() {
            return Err(Failure(
                FzStatus::InvalidArgument,
                format!("outcome {x} out of range for N = {}", e.order()),
            ));
        }
        let atom = e.atom(x).as_slice();
        expect_len("out", len, 2 * atom.len())?;
        let dst = slice_mut(out, len, "out")?;
        for (pair, z) in dst.chunks_exact_mut(2).zip(atom) {
            pair[0] = z.re;
            pair[1] = z.im;
        }
        Ok(())
    })
}

fn canonical_of(e: &Observable) -> FfiResult<(povm::SharpObservable, povm::Representation)> {
    let n = e.order();
    if !e.dim().is_multiple_of(n) {
        return Err(Failure(
            FzStatus::Precondition,
            format!("dimension {} is not a multiple of N = {n}", e.dim()),
        ));
    }
    Ok(povm::canonical_system(n, e.dim() / n)?)
}

/// Covariance under the canonical shift representation.
///
/// # Safety
/// `e` must be a live handle; both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn fz_observable_covariance(
    e: *const FzObservable,
    tol: f64,
    out_covariant: *mut bool,
    out_max_deviation: *mut f64,
) -> FzStatus {
    guard(|| {
        nonnull(out_covariant, "out_covariant")?;
        nonnull(out_max_deviation, "out_max_deviation")?;
        let e = &deref(e, "observable")?.0;
        let (_, u) = canonical_of(e)?;
        let r = povm::check_covariance(e, &u, tol)?;
        write(out_covariant, r.covariant, "out_covariant")?;
        write(out_max_deviation, r.max_deviation, "out_max_deviation")
    })
}

/// Norm-1 property by exhaustive subset scan (N <= 16).
///
/// # Safety
/// `e` must be a live handle; `out_holds` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fz_observable_norm_one(
    e: *const FzObservable,
    tol: f64,
    out_holds: *mut bool,
) -> FzStatus {
    guard(|| {
        let r = povm::has_norm_one_property(&deref(e, "observable")?.0, tol)?;
        write(out_holds, r.holds, "out_holds")
    })
}

/// Regularity by exhaustive subset scan (N <= 16). The witness is the
/// bitmask of the smallest failing outcome set, zero when regular.
///
/// # Safety
/// `e` must be a live handle; both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn fz_observable_regular(
    e: *const FzObservable,
    tol: f64,
    out_regular: *mut bool,
    out_witness_mask: *mut u64,
) -> FzStatus {
    guard(|| {
        nonnull(out_regular, "out_regular")?;
        nonnull(out_witness_mask, "out_witness_mask")?;
        let r = povm::is_regular(&deref(e, "observable")?.0, tol)?;
        let mask = r
            .witness
            .as_deref()
            .unwrap_or_default()
            .iter()
            .fold(0u64, |m, &x| m | 1 << x);
        write(out_regular, r.regular, "out_regular")?;
        write(out_witness_mask, mask, "out_witness_mask")
    })
}

/// Outcome distribution in the pure state given as `2 dim` interleaved
/// doubles; writes `N` probabilities.
///
/// # Safety
/// `e` must be a live handle; `state` must hold `state_len` doubles and
/// `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fz_observable_distribution(
    e: *const FzObservable,
    state: *const f64,
    state_len: usize,
    out: *mut f64,
    out_len: usize,
) -> FzStatus {
    guard(|| {
        let e = &deref(e, "observable")?.0;
        expect_len("state", state_len, 2 * e.dim())?;
        expect_len("out", out_len, e.order())?;
        let raw = slice(state, state_len, "state")?;
        let psi = StateVector::new(raw.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect())?;
        let d = povm::distribution(e, &psi)?;
        slice_mut(out, out_len, "out")?.copy_from_slice(d.weights());
        Ok(())
    })
}

/// Smearing measure of a covariant smearing of the canonical sharp
/// observable; `Precondition` if none exists.
///
/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fz_observable_extract_measure(
    e: *const FzObservable,
    out: *mut *mut FzMeasure,
) -> FzStatus {
    guard(|| {
        let e = &deref(e, "observable")?.0;
        let (p, _) = canonical_of(e)?;
        let w = coarsegrain::solve_coarsening(e, &p)?;
        let rho = coarsegrain::extract_smearing_measure(&w)?;
        emit(out, FzMeasure(rho))
    })
}

/// Parses an observable document `{"N", "dim", "atoms"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fz_observable_from_json(
    json: *const c_char,
    out: *mut *mut FzObservable,
) -> FzStatus {
    guard(|| {
        let e = io::parse_observable(text(json, "json")?)?;
        emit(out, FzObservable(e))
    })
}

/// Serializes to an observable document; release with `fz_string_free`.
///
/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fz_observable_to_json(
    e: *const FzObservable,
    out: *mut *mut c_char,
) -> FzStatus {
    guard(|| {
        nonnull(out, "out")?;
        let s = into_c_string(io::observable_to_json(&deref(e, "observable")?.0))?;
        write(out, s, "out")
    })
}

/// Commutative non-Toeplitz coefficient matrix of half-width `k >= 1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fz_cmatrix_toigo(k: usize, out: *mut *mut FzCMatrix) -> FzStatus {
    guard(|| {
        if k == 0 {
            return Err(Failure(FzStatus::InvalidArgument, "half-width must be positive".into()));
        }
        emit(out, FzCMatrix(torus::toigo_cmatrix(k)))
    })
}

/// Parses a coefficient-matrix document `{"K", "entries"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fz_cmatrix_from_json(
    json: *const c_char,
    out: *mut *mut FzCMatrix,
) -> FzStatus {
    guard(|| {
        let c = io::parse_cmatrix(text(json, "json")?)?;
        emit(out, FzCMatrix(c))
    })
}

/// # Safety
/// `c` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn fz_cmatrix_free(c: *mut FzCMatrix) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Unit diagonal, Hermiticity, entries bounded by one and positivity of
/// every centred window.
///
/// # Safety
/// `c` must be a live handle; `out_valid` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fz_cmatrix_validate(c: *const FzCMatrix, out_valid: *mut bool) -> FzStatus {
    guard(|| write(out_valid, torus::validate_cmatrix(&deref(c, "cmatrix")?.0).valid, "out_valid"))
}

/// Toeplitz test, equivalent to commuting with the sharp localization.
///
/// # Safety
/// `c` must be a live handle; `out_toeplitz` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fz_cmatrix_is_toeplitz(
    c: *const FzCMatrix,
    out_toeplitz: *mut bool,
) -> FzStatus {
    guard(|| {
        let check = torus::commutes_with_sharp(&deref(c, "cmatrix")?.0);
        write(out_toeplitz, check.toeplitz, "out_toeplitz")
    })
}

/// Two-outcome spin observable `E_up = diag(a, b)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fz_sg_analyze(a: f64, b: f64, tol: f64, out: *mut FzSgReport) -> FzStatus {
    guard(|| {
        let m = sterngerlach::build_sg(a, b)
            .map_err(|e| Failure(FzStatus::InvariantViolation, e.to_string()))?;
        let r = sterngerlach::analyze_sg(&m, tol);
        write(
            out,
            FzSgReport {
                is_sharp: r.is_sharp,
                has_norm_one: r.has_norm_one,
                is_regular: r.is_regular,
                is_info_equivalent: r.is_info_equivalent,
                is_trivial: r.is_trivial,
                norm_up: r.norms.0,
                norm_down: r.norms.1,
            },
            "out",
        )
    })
}
