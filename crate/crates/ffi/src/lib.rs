//! C ABI over the `ultrametric` crate.
//!
//! Spaces live behind an opaque [`UltraSpace`] handle. Exact values cross
//! the boundary as decimal rational strings ("3/8", "inf"). Every function
//! returns an [`UltraStatus`]; on failure the message is available from
//! [`ultra_last_error_message`] on the same thread. Strings handed out by
//! this library must be released with [`ultra_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ultrametric::extend::{interpolate, ProblemJson};
use ultrametric::generic::{doubling_check, DoublingCheck, SearchMode};
use ultrametric::space::{ud_distance, FiniteUltrametricSpace};
use ultrametric::{Error, Value};

/// Opaque handle to a validated finite ultrametric space.
pub struct UltraSpace(FiniteUltrametricSpace);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UltraStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidSpace = 4,
    Hypothesis = 5,
    Verification = 6,
    Other = 7,
    Panic = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let mut bytes = msg.into();
    bytes.retain(|&b| b != 0);
    let c = CString::new(bytes).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> UltraStatus {
    match e {
        Error::Parse(_) | Error::Json(_) | Error::Io(_) => UltraStatus::Parse,
        Error::TriangleViolation { .. }
        | Error::NotInRangeSet { .. }
        | Error::ZeroOffDiagonal { .. }
        | Error::Asymmetric { .. }
        | Error::NonZeroDiagonal(_)
        | Error::Shape { .. }
        | Error::DuplicateLabel(_) => UltraStatus::InvalidSpace,
        Error::HypothesisViolation { .. }
        | Error::DisjointnessViolation(_)
        | Error::RangeSetMismatch
        | Error::PointSetMismatch
        | Error::UnknownPoint(_)
        | Error::EmptySubset => UltraStatus::Hypothesis,
        Error::VerificationFailed(_) | Error::BoundViolation { .. } => UltraStatus::Verification,
        _ => UltraStatus::Other,
    }
}

struct Fail(UltraStatus);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        set_error(e.to_string());
        Fail(status_of(&e))
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        set_error(e.to_string());
        Fail(UltraStatus::Parse)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> UltraStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UltraStatus::Ok,
        Ok(Err(Fail(s))) => s,
        Err(_) => {
            set_error("internal panic");
            UltraStatus::Panic
        }
    }
}

fn null() -> Fail {
    set_error("null pointer argument");
    Fail(UltraStatus::NullPointer)
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|e| {
        set_error(e.to_string());
        Fail(UltraStatus::InvalidUtf8)
    })
}

unsafe fn space_arg<'a>(p: *const UltraSpace) -> Result<&'a FiniteUltrametricSpace, Fail> {
    p.as_ref().map(|s| &s.0).ok_or_else(null)
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null());
    }
    *out = CString::new(s).expect("no interior nul").into_raw();
    Ok(())
}

fn value_arg(s: &str) -> Result<Value, Fail> {
    Ok(s.parse::<Value>()?)
}

/// Parses and validates a space from `{"points", "dist", "range_set"?}`.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ultra_space_from_json(json: *const c_char, out: *mut *mut UltraSpace) -> UltraStatus {
    guard(|| {
        let text = str_arg(json)?;
        if out.is_null() {
            return Err(null());
        }
        let space = FiniteUltrametricSpace::from_json_str(text)?;
        *out = Box::into_raw(Box::new(UltraSpace(space)));
        Ok(())
    })
}

/// Releases a space. Null is ignored.
///
/// # Safety
/// `space` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ultra_space_free(space: *mut UltraSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Serializes a space back to JSON.
///
/// # Safety
/// `space` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ultra_space_to_json(space: *const UltraSpace, out: *mut *mut c_char) -> UltraStatus {
    guard(|| {
        let s = space_arg(space)?;
        put_string(out, serde_json::to_string(s)?)
    })
}

/// Number of points.
///
/// # Safety
/// `space` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ultra_space_len(space: *const UltraSpace, out: *mut usize) -> UltraStatus {
    guard(|| {
        let s = space_arg(space)?;
        if out.is_null() {
            return Err(null());
        }
        *out = s.len();
        Ok(())
    })
}

/// Distance between two labelled points, as an exact rational string.
///
/// # Safety
/// `space` must be a live handle; `x`, `y` nul-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ultra_space_distance(
    space: *const UltraSpace,
    x: *const c_char,
    y: *const c_char,
    out: *mut *mut c_char,
) -> UltraStatus {
    guard(|| {
        let s = space_arg(space)?;
        let d = s.distance(str_arg(x)?, str_arg(y)?)?;
        put_string(out, d.to_string())
    })
}

/// `UD` distance between two metrics on the same points; "inf" when the
/// range set has no element above the largest disagreement.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ultra_ud_distance(
    d: *const UltraSpace,
    e: *const UltraSpace,
    out: *mut *mut c_char,
) -> UltraStatus {
    guard(|| {
        let ud = ud_distance(space_arg(d)?, space_arg(e)?)?;
        put_string(out, ud.to_string())
    })
}

/// Runs an interpolation problem (`{"ambient", "family"}`) and writes the
/// result as JSON.
///
/// # Safety
/// `problem` must be nul-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ultra_interpolate_json(problem: *const c_char, out: *mut *mut c_char) -> UltraStatus {
    guard(|| {
        let p: ProblemJson = serde_json::from_str(str_arg(problem)?)?;
        let res = interpolate(&p.into_problem(None)?)?;
        put_string(out, serde_json::to_string(&res)?)
    })
}

/// Decides `card(A) ≤ C (δ(A)/α(A))^α` over subsets of `space`.
/// `holds` receives 1 or 0; when it is 0 and `witness` is non-null, the
/// violating subset is written there as a JSON array of labels.
///
/// # Safety
/// `space` must be live; `c`, `alpha` nul-terminated; `holds` writable.
#[no_mangle]
pub unsafe extern "C" fn ultra_doubling_check(
    space: *const UltraSpace,
    c: *const c_char,
    alpha: *const c_char,
    holds: *mut c_int,
    witness: *mut *mut c_char,
) -> UltraStatus {
    guard(|| {
        let s = space_arg(space)?;
        let q = DoublingCheck::new(value_arg(str_arg(c)?)?, value_arg(str_arg(alpha)?)?)?;
        if holds.is_null() {
            return Err(null());
        }
        let v = doubling_check(s, &q, SearchMode::Auto);
        *holds = c_int::from(v.holds);
        if !witness.is_null() {
            *witness = ptr::null_mut();
            if let Some(w) = &v.witness {
                put_string(witness, serde_json::to_string(w)?)?;
            }
        }
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ultra_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ultra_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
