//! C ABI over `siegel-core`.
//!
//! Points cross the boundary as opaque `SiegelPoint` handles owned by the
//! caller and released with `siegel_point_free`. Matrices are row-major.
//! Every fallible call returns a `SiegelStatus`; on failure the message is
//! kept per thread and can be read with `siegel_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nalgebra::{Complex, DMatrix};
use siegel_core::elliptic::{kernel_periods, quasi_periods, wp, TorusModulus};
use siegel_core::plumbing::Family;
use siegel_core::reduction::{quotient_distance_upper, reduce, SiegelSetParams};
use siegel_core::{distance, mobius_act, SiegelError, SymplecticMatrix};

/// Opaque point of the Siegel upper half space.
pub struct SiegelPoint(siegel_core::SiegelPoint);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiegelComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex<f64>> for SiegelComplex {
    fn from(z: Complex<f64>) -> Self {
        SiegelComplex { re: z.re, im: z.im }
    }
}

impl From<SiegelComplex> for Complex<f64> {
    fn from(z: SiegelComplex) -> Self {
        Complex::new(z.re, z.im)
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiegelStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DimensionMismatch = 3,
    NotSymmetric = 4,
    NotPositiveDefinite = 5,
    NotSymplectic = 6,
    SingularDenominator = 7,
    NumericalFailure = 8,
    IterationLimit = 9,
    Overflow = 10,
    PoleProximity = 11,
    ExpansionDomain = 12,
    BranchAmbiguity = 13,
    InvalidPermutation = 14,
    RankOutOfRange = 15,
    Config = 16,
    Panic = 17,
}

impl From<&SiegelError> for SiegelStatus {
    fn from(e: &SiegelError) -> Self {
        match e {
            SiegelError::DimensionMismatch { .. } => SiegelStatus::DimensionMismatch,
            SiegelError::NotSymmetric(_) => SiegelStatus::NotSymmetric,
            SiegelError::NotPositiveDefinite => SiegelStatus::NotPositiveDefinite,
            SiegelError::NotSymplectic(_) => SiegelStatus::NotSymplectic,
            SiegelError::SingularDenominator(_) => SiegelStatus::SingularDenominator,
            SiegelError::NumericalFailure(_) => SiegelStatus::NumericalFailure,
            SiegelError::IterationLimit(_) => SiegelStatus::IterationLimit,
            SiegelError::Overflow => SiegelStatus::Overflow,
            SiegelError::PoleProximity(..) => SiegelStatus::PoleProximity,
            SiegelError::ExpansionDomain { .. } => SiegelStatus::ExpansionDomain,
            SiegelError::BranchAmbiguity(_) => SiegelStatus::BranchAmbiguity,
            SiegelError::InvalidPermutation(_) => SiegelStatus::InvalidPermutation,
            SiegelError::RankOutOfRange { .. } => SiegelStatus::RankOutOfRange,
            SiegelError::InvalidInput(_) => SiegelStatus::InvalidInput,
            SiegelError::Config(_) => SiegelStatus::Config,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

enum Failure {
    Core(SiegelError),
    Null(&'static str),
}

impl From<SiegelError> for Failure {
    fn from(e: SiegelError) -> Self {
        Failure::Core(e)
    }
}

/// Runs `f`, recording the error message and catching panics.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> SiegelStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SiegelStatus::Ok,
        Ok(Err(Failure::Core(e))) => {
            let status = SiegelStatus::from(&e);
            set_error(e.to_string());
            status
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            SiegelStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic".into());
            SiegelStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &'static str) -> Result<&'a mut [T], Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn put<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

fn boxed(z: siegel_core::SiegelPoint) -> *mut SiegelPoint {
    Box::into_raw(Box::new(SiegelPoint(z)))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`) and returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn siegel_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Builds a point from row-major `g x g` real and imaginary parts.
///
/// # Safety
/// `re` and `im` must point to `g * g` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_point_new(
    g: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut SiegelPoint,
) -> SiegelStatus {
    guard(|| {
        if g == 0 {
            return Err(SiegelError::InvalidInput("genus must be positive".into()).into());
        }
        let n = g.checked_mul(g).ok_or(SiegelError::Overflow)?;
        let (re, im) = (slice(re, n, "re")?, slice(im, n, "im")?);
        let z = DMatrix::from_fn(g, g, |i, j| Complex::new(re[i * g + j], im[i * g + j]));
        put(out, boxed(siegel_core::SiegelPoint::new(z)?), "out")
    })
}

/// Releases a point. Null is ignored.
///
/// # Safety
/// `p` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn siegel_point_free(p: *mut SiegelPoint) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Genus of the point, or 0 for null.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn siegel_point_genus(p: *const SiegelPoint) -> usize {
    p.as_ref().map_or(0, |p| p.0.genus())
}

/// Copies the row-major entries into `re` and `im`, each of length `len`
/// (at least `g * g`).
///
/// # Safety
/// `p` must be a live handle; `re`, `im` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn siegel_point_entries(
    p: *const SiegelPoint,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> SiegelStatus {
    guard(|| {
        let p = &deref(p, "p")?.0;
        let g = p.genus();
        if len < g * g {
            return Err(SiegelError::DimensionMismatch { expected: g * g, got: len }.into());
        }
        let (re, im) = (slice_mut(re, len, "re")?, slice_mut(im, len, "im")?);
        for i in 0..g {
            for j in 0..g {
                let z = p.entry(i, j);
                re[i * g + j] = z.re;
                im[i * g + j] = z.im;
            }
        }
        Ok(())
    })
}

/// Invariant distance.
///
/// # Safety
/// `p`, `q` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_distance(p: *const SiegelPoint, q: *const SiegelPoint, out: *mut f64) -> SiegelStatus {
    guard(|| {
        let d = distance(&deref(p, "p")?.0, &deref(q, "q")?.0)?;
        put(out, d, "out")
    })
}

/// Upper bound on the distance between the classes of `p` and `q` under the
/// integral symplectic group, from a word search of length `radius`.
///
/// # Safety
/// `p`, `q` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_quotient_distance_upper(
    p: *const SiegelPoint,
    q: *const SiegelPoint,
    radius: usize,
    out: *mut f64,
) -> SiegelStatus {
    guard(|| {
        let d = quotient_distance_upper(&deref(p, "p")?.0, &deref(q, "q")?.0, radius)?;
        put(out, d, "out")
    })
}

/// `(AZ + B)(CZ + D)^{-1}` for the integral symplectic `gamma`, given as a
/// row-major `2g x 2g` array with `g` the genus of `z`.
///
/// # Safety
/// `gamma` must point to `4 g^2` integers; `z` must be a live handle; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_mobius_act(
    gamma: *const i64,
    z: *const SiegelPoint,
    out: *mut *mut SiegelPoint,
) -> SiegelStatus {
    guard(|| {
        let z = &deref(z, "z")?.0;
        let n = 2 * z.genus();
        let m = slice(gamma, n * n, "gamma")?;
        let gamma = SymplecticMatrix::new(DMatrix::from_row_slice(n, n, m))?;
        put(out, boxed(mobius_act(&gamma, z)?), "out")
    })
}

/// Reduces `z` into the Siegel set with parameters `a`, `n_bound`.
/// `gamma_out` (optional) receives the row-major `2g x 2g` integral matrix
/// with `out = gamma_out · z`; `iterations` (optional) the round count.
///
/// # Safety
/// `z` must be a live handle; `out` must be writable; `gamma_out` must be
/// null or hold `4 g^2` integers; `iterations` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_reduce(
    z: *const SiegelPoint,
    a: f64,
    n_bound: f64,
    max_iter: usize,
    out: *mut *mut SiegelPoint,
    gamma_out: *mut i64,
    iterations: *mut usize,
) -> SiegelStatus {
    guard(|| {
        let z = &deref(z, "z")?.0;
        let params = SiegelSetParams::new(a, n_bound)?;
        let r = reduce(z, &params, max_iter)?.require_converged()?;
        if !gamma_out.is_null() {
            let n = 2 * z.genus();
            let dst = slice_mut(gamma_out, n * n, "gamma_out")?;
            let e = r.gamma.entries();
            for i in 0..n {
                for j in 0..n {
                    dst[i * n + j] = e[(i, j)];
                }
            }
        }
        if !iterations.is_null() {
            iterations.write(r.iterations);
        }
        put(out, boxed(r.z_reduced), "out")
    })
}

/// Period matrix of a plumbed family described by JSON (`"kind"` is
/// `"chain"` or `"nonseparating"`).
///
/// # Safety
/// `json` must be a NUL-terminated UTF-8 string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_period_matrix_json(json: *const c_char, out: *mut *mut SiegelPoint) -> SiegelStatus {
    guard(|| {
        if json.is_null() {
            return Err(Failure::Null("json"));
        }
        let s =
            CStr::from_ptr(json).to_str().map_err(|_| SiegelError::InvalidInput("family JSON is not UTF-8".into()))?;
        put(out, boxed(Family::from_json(s)?.period_matrix()?), "out")
    })
}

/// Weierstrass `℘(z; Z + τZ)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_wp(tau: SiegelComplex, z: SiegelComplex, out: *mut SiegelComplex) -> SiegelStatus {
    guard(|| {
        let v = wp(z.into(), &TorusModulus::new(tau.into())?)?;
        put(out, v.into(), "out")
    })
}

/// Quasi-periods `H1`, `H2` of the lattice `Z + τZ`.
///
/// # Safety
/// `h1`, `h2` must be writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_quasi_periods(
    tau: SiegelComplex,
    h1: *mut SiegelComplex,
    h2: *mut SiegelComplex,
) -> SiegelStatus {
    guard(|| {
        let q = quasi_periods(&TorusModulus::new(tau.into())?)?;
        put(h1, q.h1.into(), "h1")?;
        put(h2, q.h2.into(), "h2")
    })
}

/// A- and B-periods of the normalized kernel with its pole at `p`.
///
/// # Safety
/// `a_period`, `b_period` must be writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_kernel_periods(
    tau: SiegelComplex,
    p: SiegelComplex,
    a_period: *mut SiegelComplex,
    b_period: *mut SiegelComplex,
) -> SiegelStatus {
    guard(|| {
        let (a, b) = kernel_periods(&TorusModulus::new(tau.into())?, p.into())?;
        put(a_period, a.into(), "a_period")?;
        put(b_period, b.into(), "b_period")
    })
}
