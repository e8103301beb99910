//! C ABI for flowcrit.
//!
//! Graphs are opaque `FcGraph` handles created by one of the constructors and
//! released with `fc_graph_free`. Every fallible call returns an `FcStatus`;
//! on failure `fc_last_error_message` describes the error for the calling
//! thread. Strings returned through out-parameters are owned by the caller
//! and released with `fc_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use flowcrit::criticality::{is_3_flow_critical, verify_structure, z3_reduce};
use flowcrit::density::{check_rho_dichotomy, density_report, rho_min};
use flowcrit::flow::{has_mod3_orientation, is_z3_connected};
use flowcrit::format::{parse_edge_list, parse_graph6};
use flowcrit::{Error, MultiGraph};

/// Result codes shared by every function in this interface.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FcStatus {
    Ok = 0,
    NullPointer = 1,
    /// Malformed graph text or invalid UTF-8.
    Parse = 2,
    /// A solver size limit was exceeded.
    Cap = 3,
    InvalidArgument = 4,
    /// A proven bound failed; always a bug in the library.
    BoundViolated = 5,
    /// A panic was caught at the boundary.
    Internal = 6,
}

/// Opaque graph handle.
pub struct FcGraph {
    graph: MultiGraph,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> FcStatus {
    match e {
        Error::Parse { .. } => FcStatus::Parse,
        Error::CapExceeded { .. } => FcStatus::Cap,
        Error::ProvenBoundViolated { .. } => FcStatus::BoundViolated,
        _ => FcStatus::InvalidArgument,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (FcStatus, String)>) -> FcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside flowcrit");
            FcStatus::Internal
        }
    }
}

fn lib(e: Error) -> (FcStatus, String) {
    (status_of(&e), e.to_string())
}

fn null() -> (FcStatus, String) {
    (FcStatus::NullPointer, "null pointer argument".into())
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, (FcStatus, String)> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (FcStatus::Parse, "input is not valid UTF-8".into()))
}

unsafe fn graph<'a>(g: *const FcGraph) -> Result<&'a MultiGraph, (FcStatus, String)> {
    g.as_ref().map(|h| &h.graph).ok_or_else(null)
}

unsafe fn emit_graph(g: MultiGraph, out: *mut *mut FcGraph) -> Result<(), (FcStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    *out = Box::into_raw(Box::new(FcGraph { graph: g }));
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), (FcStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    *out = value;
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Empty graph on `n` vertices.
///
/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_graph_new(n: usize, out: *mut *mut FcGraph) -> FcStatus {
    guard(|| emit_graph(MultiGraph::new(n).map_err(lib)?, out))
}

/// Parses the edge-list format (`n m` header, then `m` lines `u v`).
///
/// # Safety
/// `text_in` must be a NUL-terminated string; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn fc_graph_from_edge_list(
    text_in: *const c_char,
    out: *mut *mut FcGraph,
) -> FcStatus {
    guard(|| emit_graph(parse_edge_list(text(text_in)?).map_err(lib)?, out))
}

/// Parses one graph6 string.
///
/// # Safety
/// `text_in` must be a NUL-terminated string; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn fc_graph_from_graph6(
    text_in: *const c_char,
    out: *mut *mut FcGraph,
) -> FcStatus {
    guard(|| emit_graph(parse_graph6(text(text_in)?.trim()).map_err(lib)?, out))
}

/// Adds the edge `uv` and stores its id in `id_out` (may be NULL).
///
/// # Safety
/// `g` must be a live handle; `id_out` must be NULL or valid for writing.
#[no_mangle]
pub unsafe extern "C" fn fc_graph_add_edge(
    g: *mut FcGraph,
    u: usize,
    v: usize,
    id_out: *mut u32,
) -> FcStatus {
    guard(|| {
        let h = g.as_mut().ok_or_else(null)?;
        let id = h.graph.add_edge(u, v).map_err(lib)?;
        if !id_out.is_null() {
            *id_out = id.0;
        }
        Ok(())
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `g` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fc_graph_free(g: *mut FcGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Vertex count, or 0 for NULL.
///
/// # Safety
/// `g` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_graph_vertex_count(g: *const FcGraph) -> usize {
    g.as_ref().map_or(0, |h| h.graph.n())
}

/// Edge count, or 0 for NULL.
///
/// # Safety
/// `g` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_graph_edge_count(g: *const FcGraph) -> usize {
    g.as_ref().map_or(0, |h| h.graph.m())
}

/// Whether the graph has a modulo-3 orientation.
///
/// # Safety
/// `g` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn fc_has_mod3_orientation(g: *const FcGraph, out: *mut bool) -> FcStatus {
    guard(|| {
        let d = has_mod3_orientation(graph(g)?).map_err(lib)?;
        write(out, d.admits)
    })
}

/// Whether the graph is Z3-connected.
///
/// # Safety
/// `g` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn fc_is_z3_connected(g: *const FcGraph, out: *mut bool) -> FcStatus {
    guard(|| {
        let d = is_z3_connected(graph(g)?).map_err(lib)?;
        write(out, d.connected)
    })
}

/// Whether the graph is 3-flow-critical.
///
/// # Safety
/// `g` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn fc_is_3_flow_critical(g: *const FcGraph, out: *mut bool) -> FcStatus {
    guard(|| {
        let c = is_3_flow_critical(graph(g)?).map_err(lib)?;
        write(out, c.is_critical())
    })
}

/// Minimum partition potential.
///
/// # Safety
/// `g` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn fc_rho_min(g: *const FcGraph, out: *mut i64) -> FcStatus {
    guard(|| {
        let r = rho_min(graph(g)?).map_err(lib)?;
        write(out, r.value)
    })
}

/// Runs one decision and returns its certificate as JSON. `command` is one
/// of `flow`, `z3`, `critical`, `reduce`, `rho`, `structure`, `bounds`.
///
/// # Safety
/// `g` must be a live handle, `command` NUL-terminated and `out` valid for
/// writing. The string stored in `out` must be released with
/// `fc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn fc_decide_json(
    g: *const FcGraph,
    command: *const c_char,
    out: *mut *mut c_char,
) -> FcStatus {
    guard(|| {
        let g = graph(g)?;
        let json = decide(g, text(command)?).map_err(lib)?;
        let s = CString::new(json).map_err(|_| (FcStatus::Internal, "NUL in JSON".into()))?;
        write(out, s.into_raw())
    })
}

fn decide(g: &MultiGraph, command: &str) -> Result<String, Error> {
    let to = |v: serde_json::Result<String>| v.expect("reports serialize");
    Ok(match command {
        "flow" => to(serde_json::to_string(&has_mod3_orientation(g)?)),
        "z3" => to(serde_json::to_string(&is_z3_connected(g)?)),
        "critical" => to(serde_json::to_string(&is_3_flow_critical(g)?)),
        "reduce" => to(serde_json::to_string(&z3_reduce(g)?)),
        "rho" => to(serde_json::to_string(&serde_json::json!({
            "rho": rho_min(g)?,
            "dichotomy": check_rho_dichotomy(g).ok(),
        }))),
        "structure" => to(serde_json::to_string(&verify_structure(g)?)),
        "bounds" => {
            let cert = is_3_flow_critical(g)?;
            to(serde_json::to_string(&density_report(g, &cert)?))
        }
        other => {
            return Err(Error::Precondition(format!("unknown command `{other}`")));
        }
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
