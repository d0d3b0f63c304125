//! C ABI over `polysum-core`.
//!
//! Every function returns a [`PolysumStatus`] and writes results through out
//! pointers. On failure the message is kept per thread and can be read with
//! [`polysum_last_error_message`] until the next failing call on that thread.
//! Sieves are opaque handles released with [`polysum_sieve_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use polysum_core::decompose::{decompose_practical_triangular, theorem2_decompose, Certification};
use polysum_core::polygonal::polygonal_u64;
use polysum_core::practical::{generate_practicals, is_practical, PracticalSieve};
use polysum_core::survey::{survey_row, survey_row_with, SurveyRow};
use polysum_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolysumStatus {
    Ok = 0,
    InvalidArgument = 1,
    Overflow = 2,
    NotFound = 3,
    Resource = 4,
    Io = 5,
    Format = 6,
    NullPointer = 7,
    Panic = 8,
}

/// `n = practical + T(tri_index)` with the 2-adic data behind it.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PolysumTriDecomposition {
    pub n: u64,
    pub practical: u64,
    pub tri_index: u64,
    pub x: u64,
    pub m: u32,
    pub cofactor: u64,
}

/// `n = practical + P_s(x) + P_s(y)`; `certification` is 0 for the quotient
/// bound and 1 for a direct check.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PolysumPolyDecomposition {
    pub n: u64,
    pub s: u32,
    pub practical: u64,
    pub x: u64,
    pub y: u64,
    pub r: u32,
    pub k: u32,
    pub n_k: u64,
    pub certification: u32,
}

/// `largest` is meaningful only when `count > 0`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PolysumSurveyRow {
    pub s: u32,
    pub bound: u64,
    pub allow_zero: bool,
    pub count: u64,
    pub largest: u64,
}

/// Opaque practical-number sieve.
pub struct PolysumSieve {
    inner: PracticalSieve,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PolysumStatus {
    match e {
        Error::Overflow(_) => PolysumStatus::Overflow,
        Error::NoDecompositionFound { .. } => PolysumStatus::NotFound,
        Error::Resource(_) => PolysumStatus::Resource,
        Error::Io(_) => PolysumStatus::Io,
        Error::Format(_) => PolysumStatus::Format,
        _ => PolysumStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (PolysumStatus, String)>) -> PolysumStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PolysumStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            PolysumStatus::Panic
        }
    }
}

fn core(e: Error) -> (PolysumStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (PolysumStatus, String) {
    (PolysumStatus::NullPointer, format!("{what} is null"))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (PolysumStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn path_arg(p: *const c_char) -> Result<String, (PolysumStatus, String)> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| (PolysumStatus::InvalidArgument, "path is not valid UTF-8".into()))
}

fn row_to_c(r: SurveyRow) -> PolysumSurveyRow {
    PolysumSurveyRow {
        s: r.s_gon,
        bound: r.bound,
        allow_zero: r.zero_index_allowed,
        count: r.count_non_representable,
        largest: r.largest_non_representable.unwrap_or(0),
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn polysum_status_string(status: PolysumStatus) -> *const c_char {
    let s: &'static CStr = match status {
        PolysumStatus::Ok => c"ok",
        PolysumStatus::InvalidArgument => c"invalid argument",
        PolysumStatus::Overflow => c"arithmetic overflow",
        PolysumStatus::NotFound => c"no decomposition found",
        PolysumStatus::Resource => c"resource limit",
        PolysumStatus::Io => c"i/o error",
        PolysumStatus::Format => c"malformed file",
        PolysumStatus::NullPointer => c"null pointer",
        PolysumStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Message of the last failure on this thread, or null if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn polysum_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn polysum_is_practical(n: u64, out: *mut bool) -> PolysumStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = is_practical(n).map_err(core)?.practical;
        Ok(())
    })
}

/// `P_s(k)`; reports overflow when it does not fit 64 bits.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn polysum_polygonal(s: u32, k: u64, out: *mut u64) -> PolysumStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = polygonal_u64(s, k).map_err(core)?;
        Ok(())
    })
}

/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn polysum_decompose_tri(n: u64, out: *mut PolysumTriDecomposition) -> PolysumStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let d = decompose_practical_triangular(n).map_err(core)?;
        *out = PolysumTriDecomposition {
            n: d.n,
            practical: d.practical_part,
            tri_index: d.tri_index,
            x: d.x,
            m: d.m,
            cofactor: d.s,
        };
        Ok(())
    })
}

/// Search-mode decomposition into a practical number and two s-gonal numbers.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn polysum_decompose_poly(
    s: u32,
    n: u64,
    r: u32,
    max_k: u32,
    out: *mut PolysumPolyDecomposition,
) -> PolysumStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let d = theorem2_decompose(s, n, r as usize, max_k).map_err(core)?;
        let p = d.decomposition;
        *out = PolysumPolyDecomposition {
            n: p.n,
            s: p.s_gon,
            practical: p.practical_part,
            x: p.x,
            y: p.y,
            r: d.proof.r as u32,
            k: d.proof.k,
            n_k: d.proof.n_k,
            certification: match d.proof.certification {
                Certification::QuotientBound => 0,
                Certification::Direct => 1,
            },
        };
        Ok(())
    })
}

/// Census row for practical plus one s-gonal number over `[1, bound)`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn polysum_survey_row(
    s: u32,
    bound: u64,
    allow_zero: bool,
    out: *mut PolysumSurveyRow,
) -> PolysumStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = row_to_c(survey_row(s, bound, allow_zero).map_err(core)?);
        Ok(())
    })
}

/// # Safety
/// `out` must be null or valid for writes. The handle written there must be
/// released with `polysum_sieve_free`.
#[no_mangle]
pub unsafe extern "C" fn polysum_sieve_new(bound: u64, out: *mut *mut PolysumSieve) -> PolysumStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let inner = generate_practicals(bound).map_err(core)?;
        *out = Box::into_raw(Box::new(PolysumSieve { inner }));
        Ok(())
    })
}

/// Reads a sieve written by `polysum_sieve_save` or `polysum practical sieve`.
///
/// # Safety
/// `path` must be null or a nul-terminated string; `out` must be null or
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn polysum_sieve_load(path: *const c_char, out: *mut *mut PolysumSieve) -> PolysumStatus {
    guard(|| {
        let path = path_arg(path)?;
        let out = out_ref(out, "out")?;
        let f = std::fs::File::open(&path).map_err(|e| core(Error::from(e)))?;
        let inner = PracticalSieve::read_from(std::io::BufReader::new(f)).map_err(core)?;
        *out = Box::into_raw(Box::new(PolysumSieve { inner }));
        Ok(())
    })
}

/// # Safety
/// `sieve` must be null or a live handle; `path` must be null or a
/// nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn polysum_sieve_save(sieve: *const PolysumSieve, path: *const c_char) -> PolysumStatus {
    guard(|| {
        let sieve = sieve.as_ref().ok_or_else(|| null("sieve"))?;
        let path = path_arg(path)?;
        let f = std::fs::File::create(&path).map_err(|e| core(Error::from(e)))?;
        let mut w = std::io::BufWriter::new(f);
        sieve.inner.write_to(&mut w).map_err(core)?;
        std::io::Write::flush(&mut w).map_err(|e| core(Error::from(e)))
    })
}

/// # Safety
/// `sieve` must be null or a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn polysum_sieve_bound(sieve: *const PolysumSieve, out: *mut u64) -> PolysumStatus {
    guard(|| {
        let sieve = sieve.as_ref().ok_or_else(|| null("sieve"))?;
        *out_ref(out, "out")? = sieve.inner.bound();
        Ok(())
    })
}

/// Whether `n` is practical; `n` must not exceed the sieve bound.
///
/// # Safety
/// `sieve` must be null or a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn polysum_sieve_contains(sieve: *const PolysumSieve, n: u64, out: *mut bool) -> PolysumStatus {
    guard(|| {
        let sieve = sieve.as_ref().ok_or_else(|| null("sieve"))?;
        let out = out_ref(out, "out")?;
        if n > sieve.inner.bound() {
            return Err((PolysumStatus::InvalidArgument, format!("{n} exceeds the sieve bound {}", sieve.inner.bound())));
        }
        *out = sieve.inner.contains(n);
        Ok(())
    })
}

/// Number of practical numbers up to the bound.
///
/// # Safety
/// `sieve` must be null or a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn polysum_sieve_count(sieve: *const PolysumSieve, out: *mut u64) -> PolysumStatus {
    guard(|| {
        let sieve = sieve.as_ref().ok_or_else(|| null("sieve"))?;
        *out_ref(out, "out")? = sieve.inner.count() as u64;
        Ok(())
    })
}

/// [`polysum_survey_row`] reusing a sieve that covers the bound.
///
/// # Safety
/// `sieve` must be null or a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn polysum_sieve_survey_row(
    sieve: *const PolysumSieve,
    s: u32,
    bound: u64,
    allow_zero: bool,
    out: *mut PolysumSurveyRow,
) -> PolysumStatus {
    guard(|| {
        let sieve = sieve.as_ref().ok_or_else(|| null("sieve"))?;
        let out = out_ref(out, "out")?;
        *out = row_to_c(survey_row_with(&sieve.inner, s, bound, allow_zero).map_err(core)?);
        Ok(())
    })
}

/// Releases a sieve; null is ignored.
///
/// # Safety
/// `sieve` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn polysum_sieve_free(sieve: *mut PolysumSieve) {
    if !sieve.is_null() {
        drop(Box::from_raw(sieve));
    }
}
