//! C ABI for `edmrepair`.
//!
//! Objects cross the boundary as opaque handles created by `*_new` /
//! `*_from_json` functions and released by the matching `*_free`. Every
//! fallible call returns an [`EdmStatus`]; on failure a message is available
//! from [`edm_last_error`] until the next call on the same thread.

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use edmrepair::approx::{greedy_outliers, two_approx_outliers};
use edmrepair::exact::{solve_eeo, solve_weeo, WeeoOptions};
use edmrepair::io::{parse_instance, Answer, Meta, SolutionFile};
use edmrepair::space::solution_cost;
use edmrepair::{DistanceSpace, Error, Geometry, Pair, Solution, WeightedInstance};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdmStatus {
    Ok = 0,
    /// The question has answer "no" (not embeddable, no solution).
    No = 1,
    NullArgument = 2,
    InvalidInput = 3,
    TooLarge = 4,
    Unsupported = 5,
    /// An output buffer was too small; the needed length was written.
    BufferTooSmall = 6,
    Panic = 7,
}

/// Squared distance matrix.
pub struct EdmSpace(DistanceSpace);

/// Distance space plus dimension, budgets and weights.
pub struct EdmInstance(WeightedInstance);

/// Outliers, modified pairs with new squared distances, and total cost.
pub struct EdmSolution(Solution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> EdmStatus {
    match e {
        Error::TooLarge(_) => EdmStatus::TooLarge,
        Error::ModificationsNotSupported(_) => EdmStatus::Unsupported,
        _ => EdmStatus::InvalidInput,
    }
}

fn fail(e: Error) -> EdmStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn guard(f: impl FnOnce() -> EdmStatus) -> EdmStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            EdmStatus::Panic
        }
    }
}

fn null(what: &str) -> EdmStatus {
    set_error(&format!("{what} is null"));
    EdmStatus::NullArgument
}

fn geometry(exact: bool) -> Geometry {
    if exact {
        Geometry::exact()
    } else {
        Geometry::default()
    }
}

/// # Safety
/// `pts` must point to `npts` readable values when non-null.
unsafe fn point_list(space: &DistanceSpace, pts: *const usize, npts: usize) -> Result<Vec<usize>, EdmStatus> {
    if pts.is_null() {
        return Ok(space.points());
    }
    let v = std::slice::from_raw_parts(pts, npts).to_vec();
    if let Some(&bad) = v.iter().find(|&&p| p >= space.len()) {
        return Err(fail(Error::UnknownPoint(bad)));
    }
    Ok(v)
}

fn boxed<T>(out: *mut *mut T, v: T) {
    // SAFETY: callers check `out` for null first
    unsafe { *out = Box::into_raw(Box::new(v)) };
}

/// Message for the last failed call on this thread, or null. Owned by the
/// library; valid until the next call.
#[no_mangle]
pub extern "C" fn edm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn edm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a space from a row-major `n`×`n` matrix of squared distances.
///
/// # Safety
/// `sq` must point to `n * n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn edm_space_new(sq: *const f64, n: usize, out: *mut *mut EdmSpace) -> EdmStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        if sq.is_null() && n > 0 {
            return null("sq");
        }
        let flat = if n == 0 { &[][..] } else { std::slice::from_raw_parts(sq, n * n) };
        let rows: Vec<Vec<f64>> = flat.chunks(n.max(1)).map(<[f64]>::to_vec).collect();
        match DistanceSpace::from_rows(&rows) {
            Ok(s) => {
                boxed(out, EdmSpace(s));
                EdmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `space` must be null or a handle from [`edm_space_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn edm_space_free(space: *mut EdmSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// # Safety
/// `space` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn edm_space_len(space: *const EdmSpace) -> usize {
    space.as_ref().map_or(0, |s| s.0.len())
}

/// Whether the points `pts` (all points when null) embed in R^r. Writes the
/// answer to `out` and also returns `Ok` or `No`.
///
/// # Safety
/// `space` must be live; `pts` must hold `npts` values when non-null.
#[no_mangle]
pub unsafe extern "C" fn edm_is_embeddable(
    space: *const EdmSpace,
    pts: *const usize,
    npts: usize,
    r: isize,
    exact: bool,
    out: *mut bool,
) -> EdmStatus {
    guard(|| {
        let Some(s) = space.as_ref() else { return null("space") };
        let pts = match point_list(&s.0, pts, npts) {
            Ok(p) => p,
            Err(st) => return st,
        };
        let yes = geometry(exact).is_embeddable(&s.0, &pts, r);
        if let Some(o) = out.as_mut() {
            *o = yes;
        }
        if yes {
            EdmStatus::Ok
        } else {
            EdmStatus::No
        }
    })
}

/// Cayley–Menger determinant of `pts`.
///
/// # Safety
/// `space` must be live; `pts` must hold `npts` values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn edm_cm_det(
    space: *const EdmSpace,
    pts: *const usize,
    npts: usize,
    exact: bool,
    out: *mut f64,
) -> EdmStatus {
    guard(|| {
        let Some(s) = space.as_ref() else { return null("space") };
        if out.is_null() {
            return null("out");
        }
        let pts = match point_list(&s.0, pts, npts) {
            Ok(p) => p,
            Err(st) => return st,
        };
        match geometry(exact).cm_det(&s.0, &pts) {
            Ok(v) => {
                *out = v;
                EdmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Writes an `n`×`d` row-major realization to `coords` (which must hold
/// `n * d` doubles), or returns `No` when the space does not embed in R^d.
///
/// # Safety
/// `space` must be live; `coords` must be writable for `n * d` doubles.
#[no_mangle]
pub unsafe extern "C" fn edm_realize(space: *const EdmSpace, d: usize, coords: *mut f64) -> EdmStatus {
    guard(|| {
        let Some(s) = space.as_ref() else { return null("space") };
        if coords.is_null() && s.0.len() * d > 0 {
            return null("coords");
        }
        let pts = s.0.points();
        let Some(real) = Geometry::default().realize(&s.0, &pts, d) else {
            return EdmStatus::No;
        };
        for (i, p) in pts.iter().enumerate() {
            for (k, &x) in real.coords[p].iter().enumerate() {
                *coords.add(i * d + k) = x;
            }
        }
        EdmStatus::Ok
    })
}

/// Unit-weight instance over a copy of `space`; `budget` 0 means the sum
/// of all weights.
///
/// # Safety
/// `space` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn edm_instance_new(
    space: *const EdmSpace,
    d: usize,
    k_out: usize,
    k_mod: usize,
    budget: u64,
    out: *mut *mut EdmInstance,
) -> EdmStatus {
    guard(|| {
        let Some(s) = space.as_ref() else { return null("space") };
        if out.is_null() {
            return null("out");
        }
        match WeightedInstance::unit(s.0.clone(), d, k_out, k_mod) {
            Ok(inst) => {
                let inst = if budget > 0 { inst.with_budget(budget) } else { inst };
                boxed(out, EdmInstance(inst));
                EdmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Parses the JSON instance format used by the command-line tool.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn edm_instance_from_json(json: *const c_char, out: *mut *mut EdmInstance) -> EdmStatus {
    guard(|| {
        if json.is_null() {
            return null("json");
        }
        if out.is_null() {
            return null("out");
        }
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            set_error("json is not UTF-8");
            return EdmStatus::InvalidInput;
        };
        match parse_instance(text) {
            Ok(inst) => {
                boxed(out, EdmInstance(inst));
                EdmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn edm_instance_free(inst: *mut EdmInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// `inst` must be live; `w` must hold one weight per point.
#[no_mangle]
pub unsafe extern "C" fn edm_instance_set_outlier_weights(inst: *mut EdmInstance, w: *const u64, n: usize) -> EdmStatus {
    guard(|| {
        let Some(i) = inst.as_mut() else { return null("inst") };
        if w.is_null() && n > 0 {
            return null("w");
        }
        let weights = if n == 0 { Vec::new() } else { std::slice::from_raw_parts(w, n).to_vec() };
        match i.0.clone().with_outlier_weights(weights) {
            Ok(next) => {
                i.0 = next;
                EdmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `inst` must be live.
#[no_mangle]
pub unsafe extern "C" fn edm_instance_set_pair_weight(inst: *mut EdmInstance, a: usize, b: usize, w: u64) -> EdmStatus {
    guard(|| {
        let Some(i) = inst.as_mut() else { return null("inst") };
        match Pair::new(a, b).and_then(|p| i.0.set_pair_weight(p, w)) {
            Ok(()) => EdmStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

fn deliver(sol: Option<Solution>, out: *mut *mut EdmSolution) -> EdmStatus {
    match sol {
        Some(s) => {
            boxed(out, EdmSolution(s));
            EdmStatus::Ok
        }
        None => {
            // SAFETY: checked non-null by the caller
            unsafe { *out = ptr::null_mut() };
            EdmStatus::No
        }
    }
}

/// Optimal outlier-only solution; `No` (and a null handle) when none exists.
///
/// # Safety
/// `inst` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn edm_solve_eeo(inst: *const EdmInstance, exact: bool, out: *mut *mut EdmSolution) -> EdmStatus {
    guard(|| {
        let Some(i) = inst.as_ref() else { return null("inst") };
        if out.is_null() {
            return null("out");
        }
        match solve_eeo(&geometry(exact), &i.0) {
            Ok(s) => deliver(s, out),
            Err(e) => fail(e),
        }
    })
}

/// Cheapest solution with outliers and modified distances.
///
/// # Safety
/// `inst` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn edm_solve_weeo(
    inst: *const EdmInstance,
    exact: bool,
    seed: u64,
    out: *mut *mut EdmSolution,
) -> EdmStatus {
    guard(|| {
        let Some(i) = inst.as_ref() else { return null("inst") };
        if out.is_null() {
            return null("out");
        }
        let opts = WeeoOptions { seed, ..WeeoOptions::default() };
        match solve_weeo(&geometry(exact), &i.0, &opts) {
            Ok(o) => deliver(o.solution, out),
            Err(e) => fail(e),
        }
    })
}

/// Approximate outlier set ignoring k_out: greedy when `trials` is 0 and
/// `randomized` is false, otherwise the randomized 2-approximation with
/// `trials` trials per dimension guess (0 for the default).
///
/// # Safety
/// `inst` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn edm_approx_outliers(
    inst: *const EdmInstance,
    randomized: bool,
    seed: u64,
    trials: usize,
    out: *mut *mut EdmSolution,
) -> EdmStatus {
    guard(|| {
        let Some(i) = inst.as_ref() else { return null("inst") };
        if out.is_null() {
            return null("out");
        }
        let g = Geometry::default();
        let set: BTreeSet<usize> = if randomized {
            two_approx_outliers(&g, &i.0.space, i.0.d, seed, (trials > 0).then_some(trials))
        } else {
            greedy_outliers(&g, &i.0.space, i.0.d)
        };
        let mut sol = Solution::outliers_only(&i.0, set);
        sol.cost = solution_cost(&i.0, &sol);
        deliver(Some(sol), out)
    })
}

/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn edm_solution_free(sol: *mut EdmSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// # Safety
/// `sol` must be live or null.
#[no_mangle]
pub unsafe extern "C" fn edm_solution_cost(sol: *const EdmSolution) -> u64 {
    sol.as_ref().map_or(0, |s| s.0.cost)
}

/// Copies outlier indices into `buf`. `len` receives the count; returns
/// `BufferTooSmall` when `cap` is less than that.
///
/// # Safety
/// `sol` must be live; `buf` must hold `cap` values; `len` writable.
#[no_mangle]
pub unsafe extern "C" fn edm_solution_outliers(
    sol: *const EdmSolution,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> EdmStatus {
    guard(|| {
        let Some(s) = sol.as_ref() else { return null("sol") };
        if len.is_null() {
            return null("len");
        }
        *len = s.0.outliers.len();
        if cap < s.0.outliers.len() {
            return EdmStatus::BufferTooSmall;
        }
        for (k, &o) in s.0.outliers.iter().enumerate() {
            *buf.add(k) = o;
        }
        EdmStatus::Ok
    })
}

/// Copies modified pairs as parallel arrays `(a[k], b[k]) -> sq[k]`.
///
/// # Safety
/// `sol` must be live; the three buffers must hold `cap` values; `len` writable.
#[no_mangle]
pub unsafe extern "C" fn edm_solution_modifications(
    sol: *const EdmSolution,
    a: *mut usize,
    b: *mut usize,
    sq: *mut f64,
    cap: usize,
    len: *mut usize,
) -> EdmStatus {
    guard(|| {
        let Some(s) = sol.as_ref() else { return null("sol") };
        if len.is_null() {
            return null("len");
        }
        *len = s.0.modifications.len();
        if cap < s.0.modifications.len() {
            return EdmStatus::BufferTooSmall;
        }
        for (k, (p, &v)) in s.0.modifications.iter().enumerate() {
            *a.add(k) = p.lo();
            *b.add(k) = p.hi();
            *sq.add(k) = v;
        }
        EdmStatus::Ok
    })
}

/// Solution in the command-line JSON format. Free with [`edm_string_free`].
///
/// # Safety
/// Both handles must be live and `sol` must answer `inst`.
#[no_mangle]
pub unsafe extern "C" fn edm_solution_to_json(inst: *const EdmInstance, sol: *const EdmSolution) -> *mut c_char {
    let r = catch_unwind(AssertUnwindSafe(|| {
        let (Some(i), Some(s)) = (inst.as_ref(), sol.as_ref()) else { return ptr::null_mut() };
        let meta = Meta { algorithm: "ffi".into(), ..Meta::default() };
        let json = SolutionFile::from_solution(&i.0, Answer::Yes, &s.0, meta).to_json();
        CString::new(json).map_or(ptr::null_mut(), CString::into_raw)
    }));
    r.unwrap_or(ptr::null_mut())
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn edm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
