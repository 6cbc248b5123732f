//! C ABI for the listcol solvers.
//!
//! Instances and partitions are opaque handles created by the `*_parse`
//! functions and released by the matching `*_free`. Every fallible call
//! returns a [`ListcolStatus`]; the message for the last failure on the
//! calling thread is available through [`listcol_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use listcol::bench::{run_algorithm, Algorithm};
use listcol::instance::{parse_instance, parse_partition};
use listcol::{Error, Instance, TreePartition, WorkspaceMeter};

/// Opaque instance handle.
pub struct ListcolInstance {
    inner: Instance,
}

/// Opaque tree-partition handle.
pub struct ListcolPartition {
    inner: TreePartition,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListcolStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    NotATree = 4,
    InvalidPartition = 5,
    Refused = 6,
    OracleBudget = 7,
    Invalid = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListcolAlgorithm {
    Brute = 0,
    Dp = 1,
    Log2 = 2,
    Log = 3,
    Pathwidth = 4,
    Tpw = 5,
}

impl From<ListcolAlgorithm> for Algorithm {
    fn from(a: ListcolAlgorithm) -> Self {
        match a {
            ListcolAlgorithm::Brute => Algorithm::Brute,
            ListcolAlgorithm::Dp => Algorithm::Dp,
            ListcolAlgorithm::Log2 => Algorithm::Log2,
            ListcolAlgorithm::Log => Algorithm::Log,
            ListcolAlgorithm::Pathwidth => Algorithm::Pathwidth,
            ListcolAlgorithm::Tpw => Algorithm::Tpw,
        }
    }
}

/// Meter peaks of one solve.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ListcolPeaks {
    pub peak_persistent_bits: u64,
    pub peak_scratch_bits: u64,
    pub scratch_violations: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> ListcolStatus {
    match e {
        Error::Syntax { .. }
        | Error::SelfLoop(_)
        | Error::DuplicateEdge(..)
        | Error::VertexOutOfRange { .. }
        | Error::ColourOutOfRange { .. }
        | Error::RepeatedColour { .. } => ListcolStatus::Parse,
        Error::NotATree(_) => ListcolStatus::NotATree,
        Error::Partition(_) => ListcolStatus::InvalidPartition,
        Error::Refused(_) => ListcolStatus::Refused,
        Error::OracleBudget { .. } => ListcolStatus::OracleBudget,
        _ => ListcolStatus::Invalid,
    }
}

fn guard(f: impl FnOnce() -> Result<(), ListcolStatus>) -> ListcolStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ListcolStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            ListcolStatus::Panic
        }
    }
}

fn fail(e: Error) -> ListcolStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, ListcolStatus> {
    if s.is_null() {
        set_error("null pointer".into());
        return Err(ListcolStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("input is not UTF-8".into());
        ListcolStatus::InvalidUtf8
    })
}

/// Parses an instance from its text format.
///
/// # Safety
/// `src` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn listcol_instance_parse(
    src: *const c_char,
    out: *mut *mut ListcolInstance,
) -> ListcolStatus {
    guard(|| {
        if out.is_null() {
            set_error("null pointer".into());
            return Err(ListcolStatus::NullPointer);
        }
        let inner = parse_instance(text(src)?).map_err(fail)?;
        *out = Box::into_raw(Box::new(ListcolInstance { inner }));
        Ok(())
    })
}

/// # Safety
/// `inst` must come from [`listcol_instance_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn listcol_instance_free(inst: *mut ListcolInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of vertices, 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn listcol_instance_vertex_count(inst: *const ListcolInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.inner.n())
}

/// Parses a tree-partition.
///
/// # Safety
/// `src` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn listcol_partition_parse(
    src: *const c_char,
    out: *mut *mut ListcolPartition,
) -> ListcolStatus {
    guard(|| {
        if out.is_null() {
            set_error("null pointer".into());
            return Err(ListcolStatus::NullPointer);
        }
        let inner = parse_partition(text(src)?).map_err(fail)?;
        *out = Box::into_raw(Box::new(ListcolPartition { inner }));
        Ok(())
    })
}

/// # Safety
/// `tp` must come from [`listcol_partition_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn listcol_partition_free(tp: *mut ListcolPartition) {
    if !tp.is_null() {
        drop(Box::from_raw(tp));
    }
}

/// Decides colourability. `partition` may be null; `tpw` then uses one
/// bag per vertex. `peaks` may be null.
///
/// # Safety
/// Handles must be live; `answer` must be valid, `peaks` null or valid.
#[no_mangle]
pub unsafe extern "C" fn listcol_solve(
    inst: *const ListcolInstance,
    alg: ListcolAlgorithm,
    partition: *const ListcolPartition,
    answer: *mut bool,
    peaks: *mut ListcolPeaks,
) -> ListcolStatus {
    guard(|| {
        let (Some(inst), false) = (inst.as_ref(), answer.is_null()) else {
            set_error("null pointer".into());
            return Err(ListcolStatus::NullPointer);
        };
        let tp = partition.as_ref().map(|p| &p.inner);
        let mut meter = WorkspaceMeter::new(inst.inner.n());
        let (yes, _) = run_algorithm(alg.into(), &inst.inner, tp, &mut meter).map_err(fail)?;
        *answer = yes;
        if let Some(p) = peaks.as_mut() {
            let r = meter.peak_report();
            *p = ListcolPeaks {
                peak_persistent_bits: r.peak_persistent,
                peak_scratch_bits: r.peak_scratch,
                scratch_violations: r.scratch_violations,
            };
        }
        Ok(())
    })
}

/// Copies the last error message (NUL-terminated, truncated to fit) into
/// `buf` and returns the full message length without the terminator.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn listcol_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}
