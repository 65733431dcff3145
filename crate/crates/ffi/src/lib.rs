//! C interface to the verification suites and the Gelfand-Graev
//! decomposition.
//!
//! Objects cross the boundary as opaque handles that the caller frees with
//! the matching `*_free` function. Fallible calls return an [`SoStatus`];
//! the message of the most recent failure on the calling thread is
//! available from [`so_last_error`]. Strings returned by the library are
//! owned by the caller and released with [`so_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use so_converse::genrep::{decompose_algebra, CellAlgebra, Decomposition};
use so_converse::groups::GroupSpec;
use so_converse::harness::{run_suite, Report, Status, Suite, SuiteConfig};
use so_converse::Error;

/// Result of a fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Budget = 4,
    Numerics = 5,
    Domain = 6,
    Io = 7,
    /// Any other library failure.
    Internal = 8,
    /// A Rust panic was caught at the boundary.
    Panic = 9,
}

/// Outcome of one check in a report.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SoCheckStatus {
    Pass = 0,
    Fail = 1,
    Skip = 2,
}

/// Suite configuration.
pub struct SoConfig {
    inner: SuiteConfig,
}

/// Result of a suite run.
pub struct SoReport {
    inner: Report,
}

/// Generic representations of SO(2l, F_q) for the standard character.
pub struct SoDecomposition {
    inner: Decomposition,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> SoStatus {
    match e {
        Error::Config(_) => SoStatus::Config,
        Error::Budget(_) => SoStatus::Budget,
        Error::Numerics(_) | Error::DegenerateSplit(_) | Error::DegenerateZeta(_) | Error::Proportionality(_) => {
            SoStatus::Numerics
        }
        Error::Domain(_) | Error::NotGeneric(_) | Error::Form(_) => SoStatus::Domain,
        Error::Io(_) => SoStatus::Io,
        Error::Consistency(_) => SoStatus::Internal,
    }
}

/// Run `f`, recording failures and converting panics.
fn guard(f: impl FnOnce() -> Result<(), (SoStatus, String)>) -> SoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SoStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside so-converse");
            SoStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (SoStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (SoStatus, String) {
    (SoStatus::NullPointer, format!("{what} is null"))
}

fn into_c_string(s: &str) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn so_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string; do not free it.
#[no_mangle]
pub extern "C" fn so_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn so_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// A configuration for rank `l` over F_q running every suite with the
/// default seed and tolerances. Validation happens when the suites run.
#[no_mangle]
pub extern "C" fn so_config_new(l: usize, q: u32) -> *mut SoConfig {
    Box::into_raw(Box::new(SoConfig { inner: SuiteConfig::new(l, q) }))
}

/// # Safety
/// `cfg` must be null or a handle from [`so_config_new`] not freed yet.
#[no_mangle]
pub unsafe extern "C" fn so_config_free(cfg: *mut SoConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// # Safety
/// `cfg` must be a live handle from [`so_config_new`].
#[no_mangle]
pub unsafe extern "C" fn so_config_set_seed(cfg: *mut SoConfig, seed: u64) -> SoStatus {
    guard(|| {
        let cfg = cfg.as_mut().ok_or_else(|| null("cfg"))?;
        cfg.inner.seed = seed;
        Ok(())
    })
}

/// Absolute tolerance of pointwise identities and relative tolerance of
/// gamma proportionality; both must be positive.
///
/// # Safety
/// `cfg` must be a live handle from [`so_config_new`].
#[no_mangle]
pub unsafe extern "C" fn so_config_set_tolerances(cfg: *mut SoConfig, eq_abs: f64, gamma_rel: f64) -> SoStatus {
    guard(|| {
        let cfg = cfg.as_mut().ok_or_else(|| null("cfg"))?;
        if !(eq_abs > 0.0 && gamma_rel > 0.0) {
            return Err((SoStatus::InvalidArgument, "tolerances must be positive".into()));
        }
        cfg.inner.tol.eq_abs = eq_abs;
        cfg.inner.tol.gamma_rel = gamma_rel;
        Ok(())
    })
}

/// Allow the slow (3, 3) tier.
///
/// # Safety
/// `cfg` must be a live handle from [`so_config_new`].
#[no_mangle]
pub unsafe extern "C" fn so_config_set_slow(cfg: *mut SoConfig, slow: bool) -> SoStatus {
    guard(|| {
        let cfg = cfg.as_mut().ok_or_else(|| null("cfg"))?;
        cfg.inner.slow = slow;
        Ok(())
    })
}

/// Directory for cached group enumerations; null clears it.
///
/// # Safety
/// `cfg` must be a live handle from [`so_config_new`]; `dir` must be null
/// or a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn so_config_set_cache_dir(cfg: *mut SoConfig, dir: *const c_char) -> SoStatus {
    guard(|| {
        let cfg = cfg.as_mut().ok_or_else(|| null("cfg"))?;
        cfg.inner.cache_dir = if dir.is_null() {
            None
        } else {
            let s = CStr::from_ptr(dir)
                .to_str()
                .map_err(|_| (SoStatus::InvalidArgument, "cache directory is not UTF-8".to_string()))?;
            Some(PathBuf::from(s))
        };
        Ok(())
    })
}

/// Restrict the run to a comma-separated list of suite names (groups,
/// weyl, decompose, bessel, zeta, gamma, multone, cells, converse) or
/// "all".
///
/// # Safety
/// `cfg` must be a live handle from [`so_config_new`]; `names` must be a
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn so_config_set_suites(cfg: *mut SoConfig, names: *const c_char) -> SoStatus {
    guard(|| {
        let cfg = cfg.as_mut().ok_or_else(|| null("cfg"))?;
        if names.is_null() {
            return Err(null("names"));
        }
        let names = CStr::from_ptr(names)
            .to_str()
            .map_err(|_| (SoStatus::InvalidArgument, "suite list is not UTF-8".to_string()))?;
        let mut suites = Vec::new();
        for name in names.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if name == "all" {
                suites.extend(Suite::ALL);
                continue;
            }
            let s = Suite::parse(name).ok_or_else(|| (SoStatus::InvalidArgument, format!("unknown suite {name}")))?;
            suites.push(s);
        }
        suites.sort();
        suites.dedup();
        if suites.is_empty() {
            return Err((SoStatus::InvalidArgument, "no suites named".into()));
        }
        cfg.inner.suites = suites;
        Ok(())
    })
}

/// Run the configured suites. On success `*out` receives a report to be
/// released with [`so_report_free`]; failed checks are part of a
/// successful run.
///
/// # Safety
/// `cfg` must be a live handle from [`so_config_new`]; `out` must be a
/// valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn so_run(cfg: *const SoConfig, out: *mut *mut SoReport) -> SoStatus {
    guard(|| {
        let cfg = cfg.as_ref().ok_or_else(|| null("cfg"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let report = run_suite(&cfg.inner).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(SoReport { inner: report }));
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a handle from [`so_run`] not freed yet.
#[no_mangle]
pub unsafe extern "C" fn so_report_free(report: *mut SoReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// True when no check failed.
///
/// # Safety
/// `report` must be a live handle from [`so_run`].
#[no_mangle]
pub unsafe extern "C" fn so_report_passed(report: *const SoReport) -> bool {
    report.as_ref().is_some_and(|r| r.inner.passed())
}

/// Number of checks, or 0 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle from [`so_run`].
#[no_mangle]
pub unsafe extern "C" fn so_report_len(report: *const SoReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.checks.len())
}

/// Name and status of check `index`. `*name` receives a string to free
/// with [`so_string_free`]; pass null to skip it.
///
/// # Safety
/// `report` must be a live handle from [`so_run`]; `name` must be null or
/// valid for writing; `status` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn so_report_check(
    report: *const SoReport,
    index: usize,
    name: *mut *mut c_char,
    status: *mut SoCheckStatus,
) -> SoStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let status = status.as_mut().ok_or_else(|| null("status"))?;
        let c = r.inner.checks.get(index).ok_or_else(|| {
            (SoStatus::InvalidArgument, format!("check {index} out of range ({} checks)", r.inner.checks.len()))
        })?;
        *status = match c.status {
            Status::Pass => SoCheckStatus::Pass,
            Status::Fail => SoCheckStatus::Fail,
            Status::Skip => SoCheckStatus::Skip,
        };
        if let Some(name) = name.as_mut() {
            *name = into_c_string(&c.name);
        }
        Ok(())
    })
}

/// The report as JSON; free with [`so_string_free`]. Null on a null handle.
///
/// # Safety
/// `report` must be null or a live handle from [`so_run`].
#[no_mangle]
pub unsafe extern "C" fn so_report_json(report: *const SoReport) -> *mut c_char {
    report.as_ref().map_or(ptr::null_mut(), |r| into_c_string(&r.inner.to_json()))
}

/// Decompose the Gelfand-Graev representation of SO(2l, F_q). On success
/// `*out` receives a handle to be released with [`so_decomposition_free`].
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn so_decompose(l: usize, q: u32, seed: u64, out: *mut *mut SoDecomposition) -> SoStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let mut cfg = SuiteConfig::new(l, q);
        cfg.slow = true;
        cfg.validate().map_err(lib_err)?;
        let alg = CellAlgebra::build(GroupSpec::so_even(l, q), false).map_err(lib_err)?;
        let dec = decompose_algebra(&alg, seed, &cfg.tol).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(SoDecomposition { inner: dec }));
        Ok(())
    })
}

/// # Safety
/// `dec` must be null or a handle from [`so_decompose`] not freed yet.
#[no_mangle]
pub unsafe extern "C" fn so_decomposition_free(dec: *mut SoDecomposition) {
    if !dec.is_null() {
        drop(Box::from_raw(dec));
    }
}

/// Number of generic representations, or 0 for a null handle.
///
/// # Safety
/// `dec` must be null or a live handle from [`so_decompose`].
#[no_mangle]
pub unsafe extern "C" fn so_decomposition_len(dec: *const SoDecomposition) -> usize {
    dec.as_ref().map_or(0, |d| d.inner.reps.len())
}

/// Facts about representation `index`: its dimension, whether it is
/// cuspidal, and the index of its conjugate by the outer automorphism.
///
/// # Safety
/// `dec` must be a live handle from [`so_decompose`]; the out pointers
/// must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn so_decomposition_rep(
    dec: *const SoDecomposition,
    index: usize,
    dim: *mut usize,
    cuspidal: *mut bool,
    partner: *mut usize,
) -> SoStatus {
    guard(|| {
        let d = dec.as_ref().ok_or_else(|| null("dec"))?;
        let (dim, cuspidal, partner) = (
            dim.as_mut().ok_or_else(|| null("dim"))?,
            cuspidal.as_mut().ok_or_else(|| null("cuspidal"))?,
            partner.as_mut().ok_or_else(|| null("partner"))?,
        );
        let r = d.inner.reps.get(index).ok_or_else(|| {
            (SoStatus::InvalidArgument, format!("representation {index} out of range"))
        })?;
        *dim = r.dim;
        *cuspidal = r.cuspidal;
        *partner = r.partner.unwrap_or(index);
        Ok(())
    })
}

/// Copy the Bessel function of representation `index` (its values on the
/// cell representatives) into `re` and `im`, each of capacity `cap`.
/// `*len` always receives the number of values; when `cap` is too small
/// nothing is copied and `SO_STATUS_INVALID_ARGUMENT` is returned.
///
/// # Safety
/// `dec` must be a live handle from [`so_decompose`]; `len` must be valid
/// for writing; `re` and `im` must each be valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn so_decomposition_bessel(
    dec: *const SoDecomposition,
    index: usize,
    re: *mut f64,
    im: *mut f64,
    cap: usize,
    len: *mut usize,
) -> SoStatus {
    guard(|| {
        let d = dec.as_ref().ok_or_else(|| null("dec"))?;
        let len = len.as_mut().ok_or_else(|| null("len"))?;
        let r = d.inner.reps.get(index).ok_or_else(|| {
            (SoStatus::InvalidArgument, format!("representation {index} out of range"))
        })?;
        let coeffs = &r.bessel.coeffs;
        *len = coeffs.len();
        if cap < coeffs.len() {
            return Err((SoStatus::InvalidArgument, format!("need room for {} values", coeffs.len())));
        }
        if re.is_null() || im.is_null() {
            return Err(null("output buffer"));
        }
        let (re, im) = (std::slice::from_raw_parts_mut(re, cap), std::slice::from_raw_parts_mut(im, cap));
        for (k, z) in coeffs.iter().enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        Ok(())
    })
}
