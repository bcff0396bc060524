//! C interface to the soft-layer lab.
//!
//! Curves and transverse ground states are opaque handles created by
//! `sl_*_new` style constructors and released with the matching `*_free`.
//! Every fallible call returns an [`SlStatus`]; the message of the last
//! failure on the calling thread is available from [`sl_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use softlayer::geometry::{curvatures, total_gauss_curvature};
use softlayer::profiles::ProfileCurve;
use softlayer::spectral::{assemble_pencil, build_grid, lowest_eigenpairs, GridOptions, SolverOptions};
use softlayer::transverse::{delta_ground_state, solve_ground_state, BoundedPotential, TransverseGroundState};
use softlayer::variational::{certify, CertOptions};
use softlayer::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Hypothesis = 3,
    Numerical = 4,
    CertificateNotFound = 5,
    Panic = 6,
}

/// Opaque meridian curve.
pub struct SlCurve(ProfileCurve);

/// Opaque transverse ground state.
pub struct SlGroundState(TransverseGroundState);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SlCurvatures {
    pub k1: f64,
    pub k2: f64,
    pub gauss: f64,
    pub mean: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SlCertificate {
    pub n: f64,
    pub epsilon: f64,
    pub total: f64,
    pub norm_sq: f64,
    pub analytic_bound: f64,
    /// 1 when `total` certifies a bound state, else 0.
    pub certified: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SlStatus {
    match e {
        Error::Hypothesis { .. } => SlStatus::Hypothesis,
        Error::CertificateNotFound(_) => SlStatus::CertificateNotFound,
        e if e.exit_code() == 2 => SlStatus::InvalidArgument,
        _ => SlStatus::Numerical,
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard<F: FnOnce() -> Result<(), Error>>(f: F) -> SlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SlStatus::Ok,
        Ok(Err(e)) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            SlStatus::Panic
        }
    }
}

fn null_error(what: &str) -> Error {
    Error::Invalid(format!("{what} is NULL"))
}

macro_rules! nonnull {
    ($p:expr, $name:literal) => {
        if $p.is_null() {
            set_error(format!("{} is NULL", $name));
            return SlStatus::NullPointer;
        }
    };
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

fn emit_curve(c: ProfileCurve, out: *mut *mut SlCurve) {
    // SAFETY: callers check `out` for NULL first.
    unsafe { *out = Box::into_raw(Box::new(SlCurve(c))) };
}

/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn sl_curve_plane(out: *mut *mut SlCurve) -> SlStatus {
    nonnull!(out, "out");
    guard(|| {
        emit_curve(ProfileCurve::plane(), out);
        Ok(())
    })
}

/// Spherical cap of radius `radius` joined to a cone; `theta` as in the
/// library constructor.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn sl_curve_cap_cone(radius: f64, theta: f64, out: *mut *mut SlCurve) -> SlStatus {
    nonnull!(out, "out");
    guard(|| {
        emit_curve(ProfileCurve::cap_cone(radius, theta)?, out);
        Ok(())
    })
}

/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn sl_curve_paraboloid(c: f64, out: *mut *mut SlCurve) -> SlStatus {
    nonnull!(out, "out");
    guard(|| {
        emit_curve(ProfileCurve::paraboloid(c)?, out);
        Ok(())
    })
}

/// # Safety
/// `curve` must be NULL or a handle from an `sl_curve_*` constructor that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn sl_curve_free(curve: *mut SlCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// # Safety
/// `curve` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sl_curvatures(curve: *const SlCurve, s: f64, out: *mut SlCurvatures) -> SlStatus {
    nonnull!(curve, "curve");
    nonnull!(out, "out");
    let c = &(*curve).0;
    guard(|| {
        let k = curvatures(c, s)?;
        *out = SlCurvatures { k1: k.k1, k2: k.k2, gauss: k.gauss, mean: k.mean };
        Ok(())
    })
}

/// Total Gauss curvature on `[0, s_end]` by quadrature and by the boundary
/// term.
///
/// # Safety
/// `curve` must be a live handle; the outputs valid for writes.
#[no_mangle]
pub unsafe extern "C" fn sl_total_curvature(
    curve: *const SlCurve,
    s_end: f64,
    out_quadrature: *mut f64,
    out_boundary: *mut f64,
) -> SlStatus {
    nonnull!(curve, "curve");
    nonnull!(out_quadrature, "out_quadrature");
    nonnull!(out_boundary, "out_boundary");
    let c = &(*curve).0;
    guard(|| {
        let t = total_gauss_curvature(c, s_end)?;
        *out_quadrature = t.quadrature;
        *out_boundary = t.boundary;
        Ok(())
    })
}

fn emit_state(g: TransverseGroundState, out: *mut *mut SlGroundState) {
    // SAFETY: callers check `out` for NULL first.
    unsafe { *out = Box::into_raw(Box::new(SlGroundState(g))) };
}

/// Closed-form ground state of the δ-interaction of strength `alpha < 0`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn sl_ground_state_delta(alpha: f64, out: *mut *mut SlGroundState) -> SlStatus {
    nonnull!(out, "out");
    guard(|| {
        emit_state(delta_ground_state(alpha)?, out);
        Ok(())
    })
}

/// Ground state of the square well `-depth` on `[-a, a]`, solved on
/// `[-half_width, half_width]` with step `h`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn sl_ground_state_square_well(
    depth: f64,
    a: f64,
    half_width: f64,
    h: f64,
    out: *mut *mut SlGroundState,
) -> SlStatus {
    nonnull!(out, "out");
    guard(|| {
        let w = BoundedPotential::square_well(depth, a)?;
        emit_state(solve_ground_state(&w, half_width, h)?, out);
        Ok(())
    })
}

/// # Safety
/// `gs` must be NULL or a live handle from an `sl_ground_state_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn sl_ground_state_free(gs: *mut SlGroundState) {
    if !gs.is_null() {
        drop(Box::from_raw(gs));
    }
}

/// # Safety
/// `gs` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sl_ground_state_e1(gs: *const SlGroundState, out: *mut f64) -> SlStatus {
    nonnull!(gs, "gs");
    nonnull!(out, "out");
    *out = (*gs).0.e1;
    SlStatus::Ok
}

/// Normalized ground state `ξ₁(t)`.
///
/// # Safety
/// `gs` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn sl_ground_state_xi(gs: *const SlGroundState, t: f64, out: *mut f64) -> SlStatus {
    nonnull!(gs, "gs");
    nonnull!(out, "out");
    let g = &(*gs).0;
    guard(|| {
        *out = g.xi(t);
        Ok(())
    })
}

/// Scans `schedule[0..len]` for a trial function with negative form. On
/// success `out` holds the witness; on `CERTIFICATE_NOT_FOUND` it holds the
/// last evaluated trial.
///
/// # Safety
/// Handles must be live, `schedule` readable for `len` doubles, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn sl_certify(
    curve: *const SlCurve,
    gs: *const SlGroundState,
    schedule: *const f64,
    len: usize,
    out: *mut SlCertificate,
) -> SlStatus {
    nonnull!(curve, "curve");
    nonnull!(gs, "gs");
    nonnull!(schedule, "schedule");
    nonnull!(out, "out");
    let (c, g) = (&(*curve).0, &(*gs).0);
    let sched = std::slice::from_raw_parts(schedule, len).to_vec();
    guard(|| {
        let opts = CertOptions { schedule: sched, line_search: false, ..CertOptions::default() };
        let rep = certify(c, g, &opts)?;
        let rec = match rep.witness {
            Some(i) => rep.records[i],
            None => *rep.records.last().ok_or_else(|| null_error("schedule"))?,
        };
        let f = rec.form;
        *out = SlCertificate {
            n: f.n,
            epsilon: f.epsilon,
            total: f.total,
            norm_sq: f.norm_sq,
            analytic_bound: f.analytic_bound,
            certified: rec.certified as i32,
        };
        rep.witness().map(|_| ())
    })
}

/// Lowest `k` eigenvalues of mode `m` on the uniform grid truncated at
/// `(s_end, t_half)`. Writes `k` values to `out_values` and the number below
/// `E₁` to `out_count`.
///
/// # Safety
/// Handles must be live; `out_values` writable for `k` doubles and
/// `out_count` for one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn sl_lowest_eigenvalues(
    curve: *const SlCurve,
    gs: *const SlGroundState,
    m: u32,
    s_end: f64,
    t_half: f64,
    h_s: f64,
    h_t: f64,
    k: usize,
    out_values: *mut f64,
    out_count: *mut usize,
) -> SlStatus {
    nonnull!(curve, "curve");
    nonnull!(gs, "gs");
    nonnull!(out_values, "out_values");
    nonnull!(out_count, "out_count");
    let (c, g) = (&(*curve).0, &(*gs).0);
    guard(|| {
        let grid = build_grid(c, g.profile.support(), s_end, t_half, h_s, h_t, GridOptions::default())?;
        let p = assemble_pencil(&grid, m, &g.profile)?;
        let r = lowest_eigenpairs(&p, g.e1, &SolverOptions { k, ..SolverOptions::default() })?;
        let dst = std::slice::from_raw_parts_mut(out_values, k);
        dst.iter_mut().for_each(|v| *v = f64::NAN);
        dst[..r.eigenvalues.len()].copy_from_slice(&r.eigenvalues);
        *out_count = r.count_below_e1;
        Ok(())
    })
}
