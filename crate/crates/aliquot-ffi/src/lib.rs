//! C ABI for the aliquot library: opaque handles and integer error codes.
//!
//! See `include/aliquot.h` for the mirrored declarations.  All functions
//! return `ALIQUOT_OK` (0) on success; outputs are written through pointers
//! that must be non-null.  Handles are freed with the matching `_free`.

use aliquot::constants::{self, Flavor};
use aliquot::cycle_search;
use aliquot::error::Error;
use aliquot::ff_curve::RationalCurveModel;
use aliquot::galois_models::{self, GaloisImageSpec};
use aliquot::point_count;
use std::ffi::CStr;
use std::os::raw::{c_char, c_double, c_int};

pub const ALIQUOT_OK: c_int = 0;
pub const ALIQUOT_ERR_NULL: c_int = 1;
pub const ALIQUOT_ERR_PARSE: c_int = 2;
pub const ALIQUOT_ERR_BAD_REDUCTION: c_int = 3;
pub const ALIQUOT_ERR_UNSUPPORTED: c_int = 4;
pub const ALIQUOT_ERR_RANGE: c_int = 5;
pub const ALIQUOT_ERR_INTERNAL: c_int = 6;

fn code_of(e: &Error) -> c_int {
    match e {
        Error::BadReduction { .. } => ALIQUOT_ERR_BAD_REDUCTION,
        Error::UnsupportedLength(_) => ALIQUOT_ERR_UNSUPPORTED,
        Error::BadIntegrationLimit(_) => ALIQUOT_ERR_RANGE,
        Error::InvalidParameter(_) => ALIQUOT_ERR_PARSE,
        _ => ALIQUOT_ERR_INTERNAL,
    }
}

/// Opaque curve handle.
pub struct AliquotCurve {
    model: RationalCurveModel,
}

/// Opaque search-result handle.
pub struct AliquotCycles {
    l: usize,
    rows: Vec<u64>, // row-major, `l` primes per cycle
    primes_scanned: u64,
}

/// Parses "[a1,a2,a3,a4,a6]" into a new curve handle.
///
/// # Safety
/// `spec` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aliquot_curve_parse(
    spec: *const c_char,
    out: *mut *mut AliquotCurve,
) -> c_int {
    if spec.is_null() || out.is_null() {
        return ALIQUOT_ERR_NULL;
    }
    let s = match CStr::from_ptr(spec).to_str() {
        Ok(s) => s,
        Err(_) => return ALIQUOT_ERR_PARSE,
    };
    match RationalCurveModel::parse(s) {
        Ok(model) => {
            *out = Box::into_raw(Box::new(AliquotCurve { model }));
            ALIQUOT_OK
        }
        Err(e) => code_of(&e),
    }
}

/// # Safety
/// `curve` must be null or a handle returned by `aliquot_curve_parse`.
#[no_mangle]
pub unsafe extern "C" fn aliquot_curve_free(curve: *mut AliquotCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// |E(F_p)| at a good prime p.
///
/// # Safety
/// `curve` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aliquot_order(
    curve: *const AliquotCurve,
    p: u64,
    out: *mut u64,
) -> c_int {
    if curve.is_null() || out.is_null() {
        return ALIQUOT_ERR_NULL;
    }
    match point_count::order(&(*curve).model.reduce(p)) {
        Ok(n) => {
            *out = n;
            ALIQUOT_OK
        }
        Err(e) => code_of(&e),
    }
}

/// Frobenius trace a_p at a good prime p.
///
/// # Safety
/// `curve` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aliquot_trace(
    curve: *const AliquotCurve,
    p: u64,
    out: *mut i64,
) -> c_int {
    if curve.is_null() || out.is_null() {
        return ALIQUOT_ERR_NULL;
    }
    match point_count::a_p(&(*curve).model.reduce(p)) {
        Ok(a) => {
            *out = a;
            ALIQUOT_OK
        }
        Err(e) => code_of(&e),
    }
}

/// Normalized aliquot cycles of length `l` with p_1 <= x.  `closed` = 0
/// searches sequences instead.
///
/// # Safety
/// `curve` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aliquot_search(
    curve: *const AliquotCurve,
    l: u32,
    x: u64,
    closed: c_int,
    out: *mut *mut AliquotCycles,
) -> c_int {
    if curve.is_null() || out.is_null() {
        return ALIQUOT_ERR_NULL;
    }
    let model = &(*curve).model;
    let report = if closed != 0 {
        cycle_search::find_cycles(model, l, x)
    } else {
        cycle_search::find_sequences(model, l, x)
    };
    match report {
        Ok(r) => {
            let mut rows = Vec::with_capacity(r.count * l as usize);
            for c in &r.cycles {
                rows.extend_from_slice(&c.primes);
            }
            *out = Box::into_raw(Box::new(AliquotCycles {
                l: l as usize,
                rows,
                primes_scanned: r.primes_scanned,
            }));
            ALIQUOT_OK
        }
        Err(e) => code_of(&e),
    }
}

/// # Safety
/// `cycles` must be null or a handle returned by `aliquot_search`.
#[no_mangle]
pub unsafe extern "C" fn aliquot_cycles_free(cycles: *mut AliquotCycles) {
    if !cycles.is_null() {
        drop(Box::from_raw(cycles));
    }
}

/// Number of cycles in a search result.
///
/// # Safety
/// `cycles` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn aliquot_cycles_count(cycles: *const AliquotCycles) -> u64 {
    if cycles.is_null() {
        return 0;
    }
    ((*cycles).rows.len() / (*cycles).l.max(1)) as u64
}

/// Number of primes scanned during the search.
///
/// # Safety
/// `cycles` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn aliquot_cycles_primes_scanned(cycles: *const AliquotCycles) -> u64 {
    if cycles.is_null() {
        return 0;
    }
    (*cycles).primes_scanned
}

/// Copies cycle `i` (length-L row) into `buf`, which must hold `l` values.
///
/// # Safety
/// `cycles` must be a live handle and `buf` a valid array of length >= L.
#[no_mangle]
pub unsafe extern "C" fn aliquot_cycles_get(
    cycles: *const AliquotCycles,
    i: u64,
    buf: *mut u64,
) -> c_int {
    if cycles.is_null() || buf.is_null() {
        return ALIQUOT_ERR_NULL;
    }
    let c = &*cycles;
    let start = i as usize * c.l;
    if start + c.l > c.rows.len() {
        return ALIQUOT_ERR_RANGE;
    }
    std::ptr::copy_nonoverlapping(c.rows.as_ptr().add(start), buf, c.l);
    ALIQUOT_OK
}

fn constant_for(spec: &GaloisImageSpec, l: u32, out: *mut c_double) -> c_int {
    match constants::constant(spec, l, Flavor::Cycle) {
        Ok(report) => {
            unsafe { *out = report.c };
            ALIQUOT_OK
        }
        Err(e) => code_of(&e),
    }
}

/// C_L for the full-image (Serre-generic) model.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aliquot_constant_full(l: u32, out: *mut c_double) -> c_int {
    if out.is_null() {
        return ALIQUOT_ERR_NULL;
    }
    constant_for(&GaloisImageSpec::FullGL2, l, out)
}

/// C_{E,L} for a Serre curve with squarefree discriminant `delta`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aliquot_constant_serre(
    delta: i64,
    l: u32,
    out: *mut c_double,
) -> c_int {
    if out.is_null() {
        return ALIQUOT_ERR_NULL;
    }
    let spec = match galois_models::serre_curve(delta) {
        Ok(s) => s,
        Err(e) => return code_of(&e),
    };
    constant_for(&spec, l, out)
}

/// Predicted cycle count C * li-type integral at bound x.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aliquot_predict_serre(
    delta: i64,
    l: u32,
    x: c_double,
    out: *mut c_double,
) -> c_int {
    if out.is_null() {
        return ALIQUOT_ERR_NULL;
    }
    let spec = match galois_models::serre_curve(delta) {
        Ok(s) => s,
        Err(e) => return code_of(&e),
    };
    match constants::predict(&spec, l, x, Flavor::Cycle) {
        Ok(v) => {
            *out = v;
            ALIQUOT_OK
        }
        Err(e) => code_of(&e),
    }
}
