//! C ABI over the lsgame library.
//!
//! Objects are opaque handles created by `*_new`/`*_parse` functions and
//! released with the matching `*_free`. Every fallible call returns an
//! [`LsStatus`]; the message of the last failure on the calling thread is
//! available from [`ls_last_error`]. Strings returned through `char **`
//! out-parameters are owned by the caller and released with [`ls_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lsgame::games::{build_game, classical_value, pzk_correlation, run_protocol, CorrelationProver, LinearSystemGame, DEFAULT_CLASSICAL_CAP};
use lsgame::group::{verify_area_certificate, AreaCertificate, Presentation};
use lsgame::sdp::npa_upper_bound;
use lsgame::wagon::{compile_presentation, magic_square, solution_group, LinearSystemZ2};
use lsgame::Error;

/// Status codes; the non-zero values match the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LsStatus {
    Ok = 0,
    Malformed = 2,
    Precondition = 3,
    Resource = 4,
    Analysis = 5,
    NullPointer = 10,
    InvalidUtf8 = 11,
    Panic = 12,
}

/// A linear system `Mx = c` over GF(2).
pub struct LsSystem(LinearSystemZ2);

/// A finite presentation, possibly with a designated involution.
pub struct LsPresentation(Presentation);

/// The linear-system game of a system.
pub struct LsGame(LinearSystemGame);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LsStatus {
    match e.exit_code() {
        2 => LsStatus::Malformed,
        3 => LsStatus::Precondition,
        4 => LsStatus::Resource,
        _ => LsStatus::Analysis,
    }
}

enum Failure {
    Lib(Error),
    Status(LsStatus, &'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Run `f`, turning errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LsStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg.to_owned());
            s
        }
        Err(_) => {
            set_error("internal panic".to_owned());
            LsStatus::Panic
        }
    }
}

unsafe fn cstr<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Status(LsStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Status(LsStatus::InvalidUtf8, "string is not valid UTF-8"))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Status(LsStatus::NullPointer, "null handle"))
}

fn out_ptr<T>(out: *mut T) -> Result<(), Failure> {
    if out.is_null() {
        Err(Failure::Status(LsStatus::NullPointer, "null output pointer"))
    } else {
        Ok(())
    }
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    out_ptr(out)?;
    let c = CString::new(s).map_err(|_| Failure::Status(LsStatus::Malformed, "string contains NUL"))?;
    *out = c.into_raw();
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ls_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ls_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse the `m n` / `j1 j2 ... | c` system format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ls_system_parse(text: *const c_char, out: *mut *mut LsSystem) -> LsStatus {
    guard(|| {
        out_ptr(out)?;
        let sys = LinearSystemZ2::parse(cstr(text)?)?;
        *out = Box::into_raw(Box::new(LsSystem(sys)));
        Ok(())
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ls_system_magic_square(out: *mut *mut LsSystem) -> LsStatus {
    guard(|| {
        out_ptr(out)?;
        *out = Box::into_raw(Box::new(LsSystem(magic_square())));
        Ok(())
    })
}

/// # Safety
/// `sys` must be NULL or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ls_system_free(sys: *mut LsSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Number of equations, or 0 for NULL.
///
/// # Safety
/// `sys` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ls_system_rows(sys: *const LsSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.0.m())
}

/// Number of variables, or 0 for NULL.
///
/// # Safety
/// `sys` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ls_system_columns(sys: *const LsSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.0.n())
}

/// The system in its text format.
///
/// # Safety
/// `sys` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ls_system_to_text(sys: *const LsSystem, out: *mut *mut c_char) -> LsStatus {
    guard(|| put_string(out, handle(sys)?.0.to_text()))
}

/// Parse the `gens` / `inv` / `rel` presentation format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ls_presentation_parse(text: *const c_char, out: *mut *mut LsPresentation) -> LsStatus {
    guard(|| {
        out_ptr(out)?;
        let p = Presentation::parse(cstr(text)?)?;
        *out = Box::into_raw(Box::new(LsPresentation(p)));
        Ok(())
    })
}

/// # Safety
/// `p` must be NULL or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ls_presentation_free(p: *mut LsPresentation) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ls_presentation_to_text(p: *const LsPresentation, out: *mut *mut c_char) -> LsStatus {
    guard(|| put_string(out, handle(p)?.0.to_text()))
}

/// Check an area certificate; `valid` receives 1 when the factors multiply
/// out to the target and `area` the number of factors.
///
/// # Safety
/// `p` must be a live handle, `cert` a NUL-terminated string, `valid` and `area` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ls_presentation_verify_certificate(
    p: *const LsPresentation,
    cert: *const c_char,
    valid: *mut bool,
    area: *mut usize,
) -> LsStatus {
    guard(|| {
        out_ptr(valid)?;
        out_ptr(area)?;
        let p = &handle(p)?.0;
        let c = AreaCertificate::parse(p, cstr(cert)?)?;
        let check = verify_area_certificate(p, &c)?;
        *valid = check.valid;
        *area = check.area;
        Ok(())
    })
}

/// J-normalize, double and compile a presentation with an involution into a weight-3 system.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ls_compile_presentation(p: *const LsPresentation, out: *mut *mut LsSystem) -> LsStatus {
    guard(|| {
        out_ptr(out)?;
        let cp = compile_presentation(&handle(p)?.0)?;
        *out = Box::into_raw(Box::new(LsSystem(cp.compiled.system)));
        Ok(())
    })
}

/// Solution group of a system.
///
/// # Safety
/// `sys` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ls_solution_group(sys: *const LsSystem, out: *mut *mut LsPresentation) -> LsStatus {
    guard(|| {
        out_ptr(out)?;
        let gamma = solution_group(&handle(sys)?.0);
        *out = Box::into_raw(Box::new(LsPresentation(gamma)));
        Ok(())
    })
}

/// # Safety
/// `sys` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ls_game_new(sys: *const LsSystem, out: *mut *mut LsGame) -> LsStatus {
    guard(|| {
        out_ptr(out)?;
        let g = build_game(&handle(sys)?.0)?;
        *out = Box::into_raw(Box::new(LsGame(g)));
        Ok(())
    })
}

/// # Safety
/// `g` must be NULL or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ls_game_free(g: *mut LsGame) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Exact classical value as `numer / denom`.
///
/// # Safety
/// `g` must be a live handle, `numer` and `denom` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ls_game_classical_value(g: *const LsGame, numer: *mut i64, denom: *mut i64) -> LsStatus {
    guard(|| {
        out_ptr(numer)?;
        out_ptr(denom)?;
        let v = classical_value(&handle(g)?.0, DEFAULT_CLASSICAL_CAP)?.value;
        *numer = *v.numer();
        *denom = *v.denom();
        Ok(())
    })
}

/// Upper bound on the commuting-operator value at NPA level 1 or 2.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ls_game_npa_bound(g: *const LsGame, level: u32, out: *mut f64) -> LsStatus {
    guard(|| {
        out_ptr(out)?;
        *out = npa_upper_bound(&handle(g)?.0, level as usize)?.value;
        Ok(())
    })
}

/// Run the referee against the regular-representation provers of a weight-3
/// system. `digest` receives the hex SHA-256 of the transcript.
///
/// # Safety
/// `sys` must be a live handle; `accepted` and `digest` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ls_pzk_protocol(
    sys: *const LsSystem,
    rounds: u64,
    seed: u64,
    accepted: *mut u64,
    digest: *mut *mut c_char,
) -> LsStatus {
    guard(|| {
        out_ptr(accepted)?;
        out_ptr(digest)?;
        let sys = &handle(sys)?.0;
        let g = build_game(sys)?;
        let prover = CorrelationProver::new(&g, pzk_correlation(sys)?)?;
        let report = run_protocol(&g, &prover, rounds, seed)?;
        *accepted = report.accepted;
        put_string(digest, report.digest)
    })
}
