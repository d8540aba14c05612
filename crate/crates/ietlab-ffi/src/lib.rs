//! C ABI over the core library.
//!
//! Objects are opaque heap handles released with their `*_free` function.
//! Every fallible call returns an [`IetlabStatus`]; on failure the message is
//! kept per thread and read with [`ietlab_last_error_message`]. Strings
//! returned by the library are released with [`ietlab_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ietlab::combinatorics::classify;
use ietlab::renormalize::rauzy_step;
use ietlab::scalar::{format_rational, parse_rational, Scalar};
use ietlab::{Error, Iet, Permutation, StepKind};

/// Result codes shared by all functions.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IetlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed input: bad syntax, reducible permutation, point out of range.
    InvalidInput = 3,
    /// Arithmetic could not decide, e.g. equal lengths or exhausted precision.
    Numeric = 4,
    Panic = 5,
}

/// Opaque permutation handle.
pub struct IetlabPermutation(Permutation);

/// Opaque IET handle.
pub struct IetlabIet(Iet);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: IetlabStatus, msg: impl Into<String>) -> IetlabStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> IetlabStatus {
    let status = if e.is_config_error() { IetlabStatus::InvalidInput } else { IetlabStatus::Numeric };
    fail(status, format!("{}: {e}", e.kind()))
}

/// Runs `f`, turning panics and errors into status codes.
fn guard(f: impl FnOnce() -> Result<(), IetlabStatus>) -> IetlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IetlabStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(IetlabStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, IetlabStatus> {
    if p.is_null() {
        return Err(fail(IetlabStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(IetlabStatus::InvalidUtf8, "argument is not UTF-8"))
}

fn give_string(s: String, out: *mut *mut c_char) -> Result<(), IetlabStatus> {
    if out.is_null() {
        return Err(fail(IetlabStatus::NullPointer, "null output pointer"));
    }
    let c = CString::new(s).map_err(|_| fail(IetlabStatus::InvalidInput, "string contains nul"))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ietlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn ietlab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ietlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `"A B C / C B A"`.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ietlab_perm_parse(text: *const c_char, out: *mut *mut IetlabPermutation) -> IetlabStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(IetlabStatus::NullPointer, "null output pointer"));
        }
        let p: Permutation = read_str(text)?.parse().map_err(from_error)?;
        *out = Box::into_raw(Box::new(IetlabPermutation(p)));
        Ok(())
    })
}

/// # Safety
/// `p` must come from [`ietlab_perm_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ietlab_perm_free(p: *mut IetlabPermutation) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Classification as a JSON object string.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ietlab_perm_classify(p: *const IetlabPermutation, out: *mut *mut c_char) -> IetlabStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| fail(IetlabStatus::NullPointer, "null permutation"))?;
        let c = classify(&p.0).map_err(from_error)?;
        give_string(serde_json::to_string(&c).expect("serializable"), out)
    })
}

/// Builds an IET from a permutation string and whitespace-separated rational
/// lengths; lengths are normalized to sum to one.
///
/// # Safety
/// Both strings must be nul-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ietlab_iet_new(perm: *const c_char, lengths: *const c_char, out: *mut *mut IetlabIet) -> IetlabStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(IetlabStatus::NullPointer, "null output pointer"));
        }
        let t = Iet::parse(read_str(perm)?, read_str(lengths)?).map_err(from_error)?;
        *out = Box::into_raw(Box::new(IetlabIet(t)));
        Ok(())
    })
}

/// # Safety
/// `t` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ietlab_iet_free(t: *mut IetlabIet) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of intervals.
///
/// # Safety
/// `t` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn ietlab_iet_dimension(t: *const IetlabIet) -> usize {
    t.as_ref().map_or(0, |t| t.0.d())
}

/// Exact image of the rational `x` (as `"p/q"`), returned as `"p/q"`.
///
/// # Safety
/// `t` must be a live handle, `x` nul-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ietlab_iet_apply_str(t: *const IetlabIet, x: *const c_char, out: *mut *mut c_char) -> IetlabStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(|| fail(IetlabStatus::NullPointer, "null IET"))?;
        let x = parse_rational(read_str(x)?).map_err(from_error)?;
        let y = t.0.apply(&Scalar::Exact(x)).map_err(from_error)?;
        let y = y.as_exact().ok_or_else(|| fail(IetlabStatus::Numeric, "inexact result"))?;
        give_string(format_rational(y), out)
    })
}

/// Image of a double, computed exactly from its binary value.
///
/// # Safety
/// `t` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ietlab_iet_apply_f64(t: *const IetlabIet, x: f64, out: *mut f64) -> IetlabStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(|| fail(IetlabStatus::NullPointer, "null IET"))?;
        if out.is_null() {
            return Err(fail(IetlabStatus::NullPointer, "null output pointer"));
        }
        if !x.is_finite() {
            return Err(fail(IetlabStatus::InvalidInput, "point is not finite"));
        }
        let y = t.0.apply(&Scalar::Exact(ietlab::scalar::f64_to_rational(x))).map_err(from_error)?;
        *out = y.to_f64();
        Ok(())
    })
}

/// One Rauzy–Veech step in place (renormalized to length one). Writes `'t'`
/// or `'b'` to `kind`.
///
/// # Safety
/// `t` must be a live handle and `kind` writable or null.
#[no_mangle]
pub unsafe extern "C" fn ietlab_iet_rauzy_step(t: *mut IetlabIet, kind: *mut c_char) -> IetlabStatus {
    guard(|| {
        let t = t.as_mut().ok_or_else(|| fail(IetlabStatus::NullPointer, "null IET"))?;
        let (next, step) = rauzy_step(&t.0).map_err(from_error)?;
        t.0 = next;
        if !kind.is_null() {
            *kind = match step.kind {
                StepKind::Top => b't' as c_char,
                StepKind::Bottom => b'b' as c_char,
            };
        }
        Ok(())
    })
}

/// Permutation of the IET as `"A B / B A"` text.
///
/// # Safety
/// `t` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ietlab_iet_permutation(t: *const IetlabIet, out: *mut *mut c_char) -> IetlabStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(|| fail(IetlabStatus::NullPointer, "null IET"))?;
        give_string(t.0.perm().to_string(), out)
    })
}
