//! C ABI over the `ergolab` core.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call
//! returns an [`ErgolabStatus`]; on failure the message is available from
//! [`ergolab_last_error`] on the same thread until the next failing call.
//!
//! Panics never unwind into C: they are caught and reported as
//! `ERGOLAB_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ergolab::czlab::{cz_decompose, DyadicDecomposition};
use ergolab::kernel::{autocorrelate, build_triple, convolve};
use ergolab::{Error, IntegerSignal, SelectorConfig, SelectorSequence, TauProfile};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErgolabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    Parse = 4,
    Io = 5,
    /// Caller buffer shorter than the data; the required length is still
    /// written to the length out-parameter.
    BufferTooSmall = 6,
    Internal = 7,
}

/// Realized selector sequence.
pub struct ErgolabSelector(SelectorSequence);

/// Finitely supported real function on Z.
pub struct ErgolabSignal(IntegerSignal);

/// Dyadic Calderon-Zygmund decomposition.
pub struct ErgolabDecomposition(DyadicDecomposition);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: ErgolabStatus, msg: impl Into<String>) -> ErgolabStatus {
    set_error(msg);
    status
}

fn status_of(e: &Error) -> ErgolabStatus {
    match e {
        Error::InvalidTau(_) | Error::InvalidArgument(_) => ErgolabStatus::InvalidArgument,
        Error::OutOfRange { .. } => ErgolabStatus::OutOfRange,
        Error::Parse(_) | Error::Json(_) => ErgolabStatus::Parse,
        Error::Io(_) => ErgolabStatus::Io,
    }
}

fn guard(body: impl FnOnce() -> Result<(), ErgolabStatus>) -> ErgolabStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ErgolabStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(ErgolabStatus::Internal, "internal panic"),
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, ErgolabStatus>;
}

impl<T> OrStatus<T> for ergolab::Result<T> {
    fn or_status(self) -> Result<T, ErgolabStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, ErgolabStatus> {
    p.as_ref()
        .ok_or_else(|| fail(ErgolabStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), ErgolabStatus> {
    if out.is_null() {
        return Err(fail(ErgolabStatus::NullPointer, "output pointer is null"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), ErgolabStatus> {
    if out.is_null() {
        return Err(fail(ErgolabStatus::NullPointer, "output pointer is null"));
    }
    *out = value;
    Ok(())
}

/// Copy `data` into `buf[..cap]`, always storing the full length in `len`.
unsafe fn copy_out<T: Copy>(data: &[T], buf: *mut T, cap: usize, len: *mut usize) -> Result<(), ErgolabStatus> {
    write(len, data.len())?;
    if data.len() > cap {
        return Err(fail(
            ErgolabStatus::BufferTooSmall,
            format!("buffer holds {cap} items, {} needed", data.len()),
        ));
    }
    if !data.is_empty() {
        if buf.is_null() {
            return Err(fail(ErgolabStatus::NullPointer, "buffer is null"));
        }
        ptr::copy_nonoverlapping(data.as_ptr(), buf, data.len());
    }
    Ok(())
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ergolab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// NUL-terminated crate version; static storage.
#[no_mangle]
pub extern "C" fn ergolab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ergolab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Selector sequence of length `length` with `tau_n = n^-alpha`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergolab_selector_generate(
    length: usize,
    alpha: f64,
    seed: u64,
    out: *mut *mut ErgolabSelector,
) -> ErgolabStatus {
    guard(|| {
        let s = ergolab::selector::generate(&SelectorConfig::new(length, TauProfile::power_law(alpha), seed))
            .or_status()?;
        put(out, ErgolabSelector(s))
    })
}

/// Selector sequence with explicit probabilities `tau[0..length]`.
///
/// # Safety
/// `tau` must point to `length` readable doubles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergolab_selector_generate_explicit(
    tau: *const f64,
    length: usize,
    seed: u64,
    out: *mut *mut ErgolabSelector,
) -> ErgolabStatus {
    guard(|| {
        if tau.is_null() && length > 0 {
            return Err(fail(ErgolabStatus::NullPointer, "tau is null"));
        }
        let values = if length == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(tau, length).to_vec()
        };
        let s = ergolab::selector::generate(&SelectorConfig::new(length, TauProfile::Explicit { values }, seed))
            .or_status()?;
        put(out, ErgolabSelector(s))
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ergolab_selector_free(s: *mut ErgolabSelector) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Length, number of selections and `beta(N)`. Any out pointer may be null.
///
/// # Safety
/// `s` must be a live handle; non-null out pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergolab_selector_stats(
    s: *const ErgolabSelector,
    length: *mut usize,
    count: *mut usize,
    beta: *mut f64,
) -> ErgolabStatus {
    guard(|| {
        let s = &deref(s, "selector")?.0;
        if !length.is_null() {
            *length = s.len();
        }
        if !count.is_null() {
            *count = s.count;
        }
        if !beta.is_null() {
            *beta = s.beta;
        }
        Ok(())
    })
}

/// Copy the bits `xi_1 .. xi_N` into `buf`.
///
/// # Safety
/// `s` must be a live handle, `buf` valid for `cap` writes, `len` for one.
#[no_mangle]
pub unsafe extern "C" fn ergolab_selector_bits(
    s: *const ErgolabSelector,
    buf: *mut u8,
    cap: usize,
    len: *mut usize,
) -> ErgolabStatus {
    guard(|| copy_out(&deref(s, "selector")?.0.bits, buf, cap, len))
}

/// Copy the selected positions, increasing, into `buf`.
///
/// # Safety
/// As for [`ergolab_selector_bits`].
#[no_mangle]
pub unsafe extern "C" fn ergolab_selector_positions(
    s: *const ErgolabSelector,
    buf: *mut u64,
    cap: usize,
    len: *mut usize,
) -> ErgolabStatus {
    guard(|| copy_out(&deref(s, "selector")?.0.enumerate(), buf, cap, len))
}

/// Signal with `values[i]` at `offset + i`.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergolab_signal_new(
    offset: i64,
    values: *const f64,
    len: usize,
    out: *mut *mut ErgolabSignal,
) -> ErgolabStatus {
    guard(|| {
        let v = if len == 0 {
            Vec::new()
        } else if values.is_null() {
            return Err(fail(ErgolabStatus::NullPointer, "values is null"));
        } else {
            std::slice::from_raw_parts(values, len).to_vec()
        };
        if v.iter().any(|x| !x.is_finite()) {
            return Err(fail(ErgolabStatus::InvalidArgument, "signal values must be finite"));
        }
        put(out, ErgolabSignal(IntegerSignal::new(offset, v)))
    })
}

/// Signal from a literal such as `point:8@0+block:1@2..5`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergolab_signal_parse(text: *const c_char, out: *mut *mut ErgolabSignal) -> ErgolabStatus {
    guard(|| {
        if text.is_null() {
            return Err(fail(ErgolabStatus::NullPointer, "text is null"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| fail(ErgolabStatus::Parse, "text is not UTF-8"))?;
        put(out, ErgolabSignal(ergolab::cli::parse_signal(text).or_status()?))
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ergolab_signal_free(s: *mut ErgolabSignal) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Leftmost support point; 0 for the zero signal.
///
/// # Safety
/// `s` must be a live handle and `offset` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergolab_signal_offset(s: *const ErgolabSignal, offset: *mut i64) -> ErgolabStatus {
    guard(|| write(offset, deref(s, "signal")?.0.offset()))
}

/// Copy the stored values, starting at the offset, into `buf`.
///
/// # Safety
/// `s` must be a live handle, `buf` valid for `cap` writes, `len` for one.
#[no_mangle]
pub unsafe extern "C" fn ergolab_signal_values(
    s: *const ErgolabSignal,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> ErgolabStatus {
    guard(|| copy_out(deref(s, "signal")?.0.values(), buf, cap, len))
}

/// Value at `x`.
///
/// # Safety
/// `s` must be a live handle and `value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergolab_signal_get(s: *const ErgolabSignal, x: i64, value: *mut f64) -> ErgolabStatus {
    guard(|| write(value, deref(s, "signal")?.0.get(x)))
}

/// `f * g`.
///
/// # Safety
/// `f` and `g` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergolab_convolve(
    f: *const ErgolabSignal,
    g: *const ErgolabSignal,
    out: *mut *mut ErgolabSignal,
) -> ErgolabStatus {
    guard(|| {
        let c = convolve(&deref(f, "f")?.0, &deref(g, "g")?.0);
        put(out, ErgolabSignal(c))
    })
}

/// `f * reflect(f)`.
///
/// # Safety
/// `f` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergolab_autocorrelate(f: *const ErgolabSignal, out: *mut *mut ErgolabSignal) -> ErgolabStatus {
    guard(|| put(out, ErgolabSignal(autocorrelate(&deref(f, "f")?.0))))
}

/// `x -> f(-x)`.
///
/// # Safety
/// `f` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergolab_signal_reflect(f: *const ErgolabSignal, out: *mut *mut ErgolabSignal) -> ErgolabStatus {
    guard(|| put(out, ErgolabSignal(deref(f, "f")?.0.reflect())))
}

/// Kernels `mu_j` and `nu_j` of a selector at scale `j`; either out
/// pointer may be null.
///
/// # Safety
/// `s` must be a live handle; non-null out pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergolab_kernel(
    s: *const ErgolabSelector,
    j: u32,
    mu: *mut *mut ErgolabSignal,
    nu: *mut *mut ErgolabSignal,
) -> ErgolabStatus {
    guard(|| {
        let t = build_triple(&deref(s, "selector")?.0, j).or_status()?;
        if !mu.is_null() {
            put(mu, ErgolabSignal(t.mu))?;
        }
        if !nu.is_null() {
            put(nu, ErgolabSignal(t.nu))?;
        }
        Ok(())
    })
}

/// Height-`lambda` decomposition of `phi`.
///
/// # Safety
/// `phi` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergolab_cz_decompose(
    phi: *const ErgolabSignal,
    lambda: f64,
    out: *mut *mut ErgolabDecomposition,
) -> ErgolabStatus {
    guard(|| {
        let d = cz_decompose(&deref(phi, "phi")?.0, lambda).or_status()?;
        put(out, ErgolabDecomposition(d))
    })
}

/// # Safety
/// `d` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ergolab_decomposition_free(d: *mut ErgolabDecomposition) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Number of selected cubes.
///
/// # Safety
/// `d` must be a live handle and `count` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergolab_decomposition_cube_count(
    d: *const ErgolabDecomposition,
    count: *mut usize,
) -> ErgolabStatus {
    guard(|| write(count, deref(d, "decomposition")?.0.bad_parts.len()))
}

/// Scale `s` and index `k` of the `i`-th cube `[k 2^s, (k+1) 2^s)`.
///
/// # Safety
/// `d` must be a live handle; `s` and `k` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergolab_decomposition_cube(
    d: *const ErgolabDecomposition,
    i: usize,
    s: *mut u32,
    k: *mut i64,
) -> ErgolabStatus {
    guard(|| {
        let parts = &deref(d, "decomposition")?.0.bad_parts;
        let part = parts.get(i).ok_or_else(|| {
            fail(ErgolabStatus::OutOfRange, format!("cube index {i} of {}", parts.len()))
        })?;
        write(s, part.cube.s)?;
        write(k, part.cube.k)
    })
}

/// Good part `g`.
///
/// # Safety
/// `d` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergolab_decomposition_good(
    d: *const ErgolabDecomposition,
    out: *mut *mut ErgolabSignal,
) -> ErgolabStatus {
    guard(|| put(out, ErgolabSignal(deref(d, "decomposition")?.0.good.clone())))
}

/// Bad part `b = sum b_{s,k}`.
///
/// # Safety
/// `d` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergolab_decomposition_bad(
    d: *const ErgolabDecomposition,
    out: *mut *mut ErgolabSignal,
) -> ErgolabStatus {
    guard(|| put(out, ErgolabSignal(deref(d, "decomposition")?.0.bad())))
}

/// Whether all decomposition invariants hold against `phi`, with
/// reconstruction tolerance `tol`.
///
/// # Safety
/// `d` and `phi` must be live handles; `holds` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergolab_decomposition_check(
    d: *const ErgolabDecomposition,
    phi: *const ErgolabSignal,
    tol: f64,
    holds: *mut bool,
) -> ErgolabStatus {
    guard(|| {
        let r = deref(d, "decomposition")?.0.check_invariants(&deref(phi, "phi")?.0);
        write(holds, r.all_hold(tol))
    })
}

/// JSON form of the decomposition; release with [`ergolab_string_free`].
///
/// # Safety
/// `d` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ergolab_decomposition_json(
    d: *const ErgolabDecomposition,
    out: *mut *mut c_char,
) -> ErgolabStatus {
    guard(|| {
        let text = serde_json::to_string(&deref(d, "decomposition")?.0)
            .map_err(|e| fail(ErgolabStatus::Internal, e.to_string()))?;
        let c = CString::new(text).map_err(|e| fail(ErgolabStatus::Internal, e.to_string()))?;
        write(out, c.into_raw())
    })
}
