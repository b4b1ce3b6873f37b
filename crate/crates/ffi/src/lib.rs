//! C ABI over `disk_eit`.
//!
//! Objects are opaque handles created by constructor calls such as `de_field_from_json` and
//! released by the matching `*_free`. Every fallible call returns a
//! [`DeStatus`]; the message of the last failure on the calling thread is
//! available from [`de_last_error`]. Strings returned to the caller are
//! released with [`de_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use disk_eit::inverse::ReconstructOptions;
use disk_eit::partial::{arc_invert, half_disk_invert, ArcReconstruction, ConformalMap, HalfDiskData};
use disk_eit::{
    admissibility, forward, reconstruct, validate, Block, DtnMatrixSet, EitError, FourierRadialField,
    Reconstruction,
};
use num::complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeStatus {
    Ok = 0,
    NullPointer = 1,
    Parse = 2,
    KindOrShape = 3,
    InconsistentData = 4,
    Domain = 5,
    Range = 6,
    SingularPoint = 7,
    InvalidUtf8 = 8,
    Io = 9,
    Panic = 10,
    Other = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeBlock {
    Cc = 0,
    Ss = 1,
    Sc = 2,
    Cs = 3,
}

pub struct DeField(FourierRadialField);
pub struct DeDtnSet(DtnMatrixSet);
pub struct DeReconstruction(Reconstruction);
pub struct DeArcReconstruction(ArcReconstruction);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &EitError) -> DeStatus {
    match e {
        EitError::Parse(_) => DeStatus::Parse,
        EitError::KindMismatch { .. } | EitError::Shape(_) => DeStatus::KindOrShape,
        EitError::InconsistentData(_) => DeStatus::InconsistentData,
        EitError::Domain(_) => DeStatus::Domain,
        EitError::Range(_) => DeStatus::Range,
        EitError::SingularPoint(_) => DeStatus::SingularPoint,
        EitError::Io(_) => DeStatus::Io,
        EitError::DegenerateSequence(_) => DeStatus::Other,
    }
}

fn guard(f: impl FnOnce() -> Result<(), DeStatus>) -> DeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DeStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            DeStatus::Panic
        }
    }
}

trait OrStatus<T> {
    fn status(self) -> Result<T, DeStatus>;
}

impl<T> OrStatus<T> for disk_eit::Result<T> {
    fn status(self) -> Result<T, DeStatus> {
        self.map_err(|e| {
            set_error(&e.to_string());
            status_of(&e)
        })
    }
}

fn null() -> DeStatus {
    set_error("null pointer argument");
    DeStatus::NullPointer
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, DeStatus> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        DeStatus::InvalidUtf8
    })
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, DeStatus> {
    p.as_ref().ok_or_else(null)
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), DeStatus> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), DeStatus> {
    let c = CString::new(s).map_err(|_| {
        set_error("output contains a NUL byte");
        DeStatus::Other
    })?;
    write(out, c.into_raw())
}

fn block_of(b: DeBlock) -> Block {
    match b {
        DeBlock::Cc => Block::Cc,
        DeBlock::Ss => Block::Ss,
        DeBlock::Sc => Block::Sc,
        DeBlock::Cs => Block::Cs,
    }
}

fn options(tol: f64, rational: c_int) -> ReconstructOptions {
    ReconstructOptions {
        tol,
        reg_cap: None,
        rational: rational != 0,
    }
}

/// Message of the last failed call on this thread; valid until the next failure.
#[no_mangle]
pub extern "C" fn de_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn de_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn de_field_from_json(json: *const c_char, out: *mut *mut DeField) -> DeStatus {
    guard(|| {
        let field = FourierRadialField::from_json(read_str(json)?).status()?;
        write(out, Box::into_raw(Box::new(DeField(field))))
    })
}

/// # Safety
/// `field` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn de_field_to_json(field: *const DeField, out: *mut *mut c_char) -> DeStatus {
    guard(|| write_string(out, deref(field)?.0.to_json().status()?))
}

/// # Safety
/// `field` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn de_field_eval(field: *const DeField, r: f64, phi: f64, out: *mut f64) -> DeStatus {
    guard(|| write(out, deref(field)?.0.eval(r, phi).status()?))
}

/// # Safety
/// `field` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn de_field_free(field: *mut DeField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Analytic matrix set of a field at truncation `n`.
///
/// # Safety
/// `field` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn de_forward(field: *const DeField, n: usize, out: *mut *mut DeDtnSet) -> DeStatus {
    guard(|| {
        let set = forward(&deref(field)?.0, n).status()?;
        write(out, Box::into_raw(Box::new(DeDtnSet(set))))
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn de_dtn_from_json(json: *const c_char, out: *mut *mut DeDtnSet) -> DeStatus {
    guard(|| {
        let set = DtnMatrixSet::from_json(read_str(json)?).status()?;
        write(out, Box::into_raw(Box::new(DeDtnSet(set))))
    })
}

/// # Safety
/// `set` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn de_dtn_to_json(set: *const DeDtnSet, out: *mut *mut c_char) -> DeStatus {
    guard(|| write_string(out, deref(set)?.0.to_json().status()?))
}

/// Entry at math indices `(i, j)` of a block.
///
/// # Safety
/// `set` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn de_dtn_entry(
    set: *const DeDtnSet,
    block: DeBlock,
    i: usize,
    j: usize,
    out: *mut f64,
) -> DeStatus {
    guard(|| {
        let v = deref(set)?.0.entry(block_of(block), i, j).ok_or_else(|| {
            set_error(&format!("({i}, {j}) is outside the block"));
            DeStatus::Range
        })?;
        write(out, v)
    })
}

/// # Safety
/// `set` must be valid.
#[no_mangle]
pub unsafe extern "C" fn de_dtn_set_entry(set: *mut DeDtnSet, block: DeBlock, i: usize, j: usize, value: f64) -> DeStatus {
    guard(|| {
        let s = set.as_mut().ok_or_else(null)?;
        s.0.set_entry(block_of(block), i, j, value).status()
    })
}

/// # Safety
/// `set` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn de_dtn_free(set: *mut DeDtnSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Structural checks; `passed` is 1 when every check holds.
///
/// # Safety
/// `set` must be valid; `passed` and `max_deviation` must be writable.
#[no_mangle]
pub unsafe extern "C" fn de_validate(
    set: *const DeDtnSet,
    tol: f64,
    passed: *mut c_int,
    max_deviation: *mut f64,
) -> DeStatus {
    guard(|| {
        let report = validate(&deref(set)?.0, tol).status()?;
        write(passed, report.passed() as c_int)?;
        write(max_deviation, report.max_deviation())
    })
}

/// # Safety
/// `set` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn de_reconstruct(
    set: *const DeDtnSet,
    n: usize,
    tol: f64,
    rational: c_int,
    out: *mut *mut DeReconstruction,
) -> DeStatus {
    guard(|| {
        let rec = reconstruct(&deref(set)?.0, n, options(tol, rational)).status()?;
        write(out, Box::into_raw(Box::new(DeReconstruction(rec))))
    })
}

/// # Safety
/// `rec` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn de_reconstruction_eval(rec: *const DeReconstruction, r: f64, phi: f64, out: *mut f64) -> DeStatus {
    guard(|| write(out, deref(rec)?.0.eval(r, phi).status()?))
}

/// `p_{n,k}` when `sine` is 0, `q_{n,k}` otherwise; zero outside the stored triangle.
///
/// # Safety
/// `rec` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn de_reconstruction_coefficient(
    rec: *const DeReconstruction,
    sine: c_int,
    n: usize,
    k: u32,
    out: *mut f64,
) -> DeStatus {
    guard(|| {
        let r = &deref(rec)?.0;
        write(out, if sine == 0 { r.p(n, k) } else { r.q(n, k) })
    })
}

/// # Safety
/// `rec` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn de_reconstruction_admissibility(rec: *const DeReconstruction, out: *mut f64) -> DeStatus {
    guard(|| write(out, admissibility(&deref(rec)?.0)))
}

/// # Safety
/// `rec` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn de_reconstruction_to_field(rec: *const DeReconstruction, out: *mut *mut DeField) -> DeStatus {
    guard(|| {
        let field = deref(rec)?.0.to_field().status()?;
        write(out, Box::into_raw(Box::new(DeField(field))))
    })
}

/// # Safety
/// `rec` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn de_reconstruction_to_json(rec: *const DeReconstruction, out: *mut *mut c_char) -> DeStatus {
    guard(|| write_string(out, deref(rec)?.0.to_json().status()?))
}

/// # Safety
/// `rec` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn de_reconstruction_free(rec: *mut DeReconstruction) {
    if !rec.is_null() {
        drop(Box::from_raw(rec));
    }
}

unsafe fn square_data(data: *const f64, size: usize) -> Result<HalfDiskData, DeStatus> {
    if data.is_null() && size > 0 {
        return Err(null());
    }
    let flat = if size == 0 { &[][..] } else { std::slice::from_raw_parts(data, size * size) };
    HalfDiskData::new(flat.chunks(size.max(1)).map(<[f64]>::to_vec).collect()).status()
}

/// Half-disk inversion of row-major `size x size` sine-mode pairings.
///
/// # Safety
/// `data` must point to `size * size` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn de_half_disk_invert(
    data: *const f64,
    size: usize,
    n: usize,
    tol: f64,
    out: *mut *mut DeReconstruction,
) -> DeStatus {
    guard(|| {
        let d = square_data(data, size)?;
        let rec = half_disk_invert(&d, n, options(tol, 0)).status()?;
        write(out, Box::into_raw(Box::new(DeReconstruction(rec))))
    })
}

/// `ψ(z)` for the arc of half-width `alpha`.
///
/// # Safety
/// `out_re` and `out_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn de_psi(alpha: f64, re: f64, im: f64, out_re: *mut f64, out_im: *mut f64) -> DeStatus {
    guard(|| {
        let w = ConformalMap::from_alpha(alpha).status()?.psi(Complex64::new(re, im)).status()?;
        write(out_re, w.re)?;
        write(out_im, w.im)
    })
}

/// `ψ⁻¹(z)`; fails with `SINGULAR_POINT` at endpoint images.
///
/// # Safety
/// `out_re` and `out_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn de_psi_inverse(alpha: f64, re: f64, im: f64, out_re: *mut f64, out_im: *mut f64) -> DeStatus {
    guard(|| {
        let map = ConformalMap::from_alpha(alpha).status()?;
        let w = map.psi_inverse(Complex64::new(re, im)).status()?;
        write(out_re, w.re)?;
        write(out_im, w.im)
    })
}

/// # Safety
/// `data` must point to `size * size` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn de_arc_invert(
    alpha: f64,
    data: *const f64,
    size: usize,
    n: usize,
    tol: f64,
    out: *mut *mut DeArcReconstruction,
) -> DeStatus {
    guard(|| {
        let map = ConformalMap::from_alpha(alpha).status()?;
        let d = square_data(data, size)?;
        let rec = arc_invert(&d, &map, n, options(tol, 0)).status()?;
        write(out, Box::into_raw(Box::new(DeArcReconstruction(rec))))
    })
}

/// # Safety
/// `rec` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn de_arc_eval(rec: *const DeArcReconstruction, re: f64, im: f64, out: *mut f64) -> DeStatus {
    guard(|| write(out, deref(rec)?.0.eval(Complex64::new(re, im)).status()?))
}

/// # Safety
/// `rec` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn de_arc_free(rec: *mut DeArcReconstruction) {
    if !rec.is_null() {
        drop(Box::from_raw(rec));
    }
}
