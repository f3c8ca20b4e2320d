//! C ABI over the `diagk` library.
//!
//! Graphs and K₀ groups are opaque handles owned by the caller and released
//! with the matching `*_free` function. Every fallible call returns a
//! [`DiagkStatus`]; on failure a message is available from
//! [`diagk_last_error`] until the next failing call on the same thread.
//! Strings returned through out-parameters are released with
//! [`diagk_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use diagk::monoid::{monoid_equal, MonoidElement, MonoidEquality};
use diagk::{fixtures, k0_of_graph, parse_graph, pointed_compare, Error, Graph, K0Data, PointedComparison};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    DomainError = 4,
    UnknownFixture = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagkComparison {
    IsoPreservingUnit = 0,
    IsoOnlyFlippingUnit = 1,
    IsoEitherWay = 2,
    NotIsomorphic = 3,
    Undecided = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagkMonoidEquality {
    Equal = 0,
    NotEqual = 1,
    Unknown = 2,
}

/// Opaque graph handle.
pub struct DiagkGraph {
    graph: Graph,
}

/// Opaque K₀ handle.
pub struct DiagkK0 {
    k0: K0Data,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: DiagkStatus, msg: impl Into<String>) -> DiagkStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> DiagkStatus {
    let status = match e {
        Error::Syntax { .. } | Error::DuplicateVertex { .. } | Error::BadCount { .. } | Error::Parse(_) => {
            DiagkStatus::ParseError
        }
        _ => DiagkStatus::DomainError,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning panics into [`DiagkStatus::Panic`].
fn guard(f: impl FnOnce() -> DiagkStatus) -> DiagkStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(DiagkStatus::Panic, "internal panic"))
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, DiagkStatus> {
    if p.is_null() {
        return Err(fail(DiagkStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(DiagkStatus::InvalidUtf8, "argument is not UTF-8"))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> DiagkStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            DiagkStatus::Ok
        }
        Err(_) => fail(DiagkStatus::DomainError, "output contains a NUL byte"),
    }
}

macro_rules! deref {
    ($p:expr) => {
        match $p.as_ref() {
            Some(r) => r,
            None => return fail(DiagkStatus::NullPointer, concat!("null ", stringify!($p))),
        }
    };
}

/// Message describing the last failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn diagk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a graph in the line-based text format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn diagk_graph_parse(text: *const c_char, out: *mut *mut DiagkGraph) -> DiagkStatus {
    guard(|| {
        if out.is_null() {
            return fail(DiagkStatus::NullPointer, "null out");
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_graph(text) {
            Ok(graph) => {
                *out = Box::into_raw(Box::new(DiagkGraph { graph }));
                DiagkStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Loads one of the shipped graphs: `e_infinity`, `e_infinity_minus`,
/// `graph_e`, `graph_f`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn diagk_graph_fixture(name: *const c_char, out: *mut *mut DiagkGraph) -> DiagkStatus {
    guard(|| {
        if out.is_null() {
            return fail(DiagkStatus::NullPointer, "null out");
        }
        let name = match read_str(name) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match fixtures::by_name(name) {
            Some(graph) => {
                *out = Box::into_raw(Box::new(DiagkGraph { graph }));
                DiagkStatus::Ok
            }
            None => fail(DiagkStatus::UnknownFixture, format!("no fixture named `{name}`")),
        }
    })
}

/// Releases a graph. NULL is ignored.
///
/// # Safety
/// `g` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn diagk_graph_free(g: *mut DiagkGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live graph handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn diagk_graph_vertex_count(g: *const DiagkGraph, out: *mut usize) -> DiagkStatus {
    let g = deref!(g);
    if out.is_null() {
        return fail(DiagkStatus::NullPointer, "null out");
    }
    *out = g.graph.vertex_count();
    DiagkStatus::Ok
}

/// Graphviz rendering; release the string with [`diagk_string_free`].
///
/// # Safety
/// `g` must be a live graph handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn diagk_graph_to_dot(g: *const DiagkGraph, out: *mut *mut c_char) -> DiagkStatus {
    guard(|| {
        let g = deref!(g);
        if out.is_null() {
            return fail(DiagkStatus::NullPointer, "null out");
        }
        write_string(out, g.graph.to_dot())
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn diagk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Computes K₀ (with K₁ rank) of a graph.
///
/// # Safety
/// `g` must be a live graph handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn diagk_k0_compute(g: *const DiagkGraph, out: *mut *mut DiagkK0) -> DiagkStatus {
    guard(|| {
        let g = deref!(g);
        if out.is_null() {
            return fail(DiagkStatus::NullPointer, "null out");
        }
        match k0_of_graph(&g.graph) {
            Ok(k0) => {
                *out = Box::into_raw(Box::new(DiagkK0 { k0 }));
                DiagkStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases a K₀ handle. NULL is ignored.
///
/// # Safety
/// `k` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn diagk_k0_free(k: *mut DiagkK0) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// # Safety
/// `k` must be a live K₀ handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn diagk_k0_free_rank(k: *const DiagkK0, out: *mut usize) -> DiagkStatus {
    let k = deref!(k);
    if out.is_null() {
        return fail(DiagkStatus::NullPointer, "null out");
    }
    *out = k.k0.free_rank;
    DiagkStatus::Ok
}

/// # Safety
/// `k` must be a live K₀ handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn diagk_k0_k1_rank(k: *const DiagkK0, out: *mut usize) -> DiagkStatus {
    let k = deref!(k);
    if out.is_null() {
        return fail(DiagkStatus::NullPointer, "null out");
    }
    *out = k.k0.k1_rank;
    DiagkStatus::Ok
}

/// JSON description: invariant factors, free rank, vertex classes, unit and
/// K₁ rank. Release the string with [`diagk_string_free`].
///
/// # Safety
/// `k` must be a live K₀ handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn diagk_k0_to_json(k: *const DiagkK0, out: *mut *mut c_char) -> DiagkStatus {
    guard(|| {
        let k = deref!(k);
        if out.is_null() {
            return fail(DiagkStatus::NullPointer, "null out");
        }
        write_string(out, k.k0.to_json().to_string())
    })
}

/// Compares two K₀ groups together with their unit classes.
///
/// # Safety
/// `a`, `b` must be live K₀ handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn diagk_pointed_compare(
    a: *const DiagkK0,
    b: *const DiagkK0,
    out: *mut DiagkComparison,
) -> DiagkStatus {
    guard(|| {
        let (a, b) = (deref!(a), deref!(b));
        if out.is_null() {
            return fail(DiagkStatus::NullPointer, "null out");
        }
        *out = match pointed_compare(&a.k0, &b.k0) {
            PointedComparison::IsoPreservingUnit => DiagkComparison::IsoPreservingUnit,
            PointedComparison::IsoOnlyFlippingUnit => DiagkComparison::IsoOnlyFlippingUnit,
            PointedComparison::IsoEitherWay => DiagkComparison::IsoEitherWay,
            PointedComparison::NotIsomorphic => DiagkComparison::NotIsomorphic,
            PointedComparison::Undecided => DiagkComparison::Undecided,
        };
        DiagkStatus::Ok
    })
}

/// Compares two graph monoid elements written like `v + 2*w + q{w: e0, e1}`.
///
/// # Safety
/// `g` must be a live graph handle, `x` and `y` NUL-terminated strings and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn diagk_monoid_equal(
    g: *const DiagkGraph,
    x: *const c_char,
    y: *const c_char,
    depth: u64,
    out: *mut DiagkMonoidEquality,
) -> DiagkStatus {
    guard(|| {
        let g = deref!(g);
        if out.is_null() {
            return fail(DiagkStatus::NullPointer, "null out");
        }
        let (x, y) = match (read_str(x), read_str(y)) {
            (Ok(x), Ok(y)) => (x, y),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let result = MonoidElement::parse(&g.graph, x)
            .and_then(|a| Ok((a, MonoidElement::parse(&g.graph, y)?)))
            .and_then(|(a, b)| monoid_equal(&g.graph, &a, &b, depth));
        match result {
            Ok(v) => {
                *out = match v {
                    MonoidEquality::Equal => DiagkMonoidEquality::Equal,
                    MonoidEquality::NotEqual => DiagkMonoidEquality::NotEqual,
                    MonoidEquality::Unknown => DiagkMonoidEquality::Unknown,
                };
                DiagkStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
