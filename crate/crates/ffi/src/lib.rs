//! C ABI for the inverted-oscillator laboratory.
//!
//! The surface follows the usual opaque-handle pattern: create a lab handle
//! from the physical constants and truncation, call measurement functions
//! that fill caller-owned buffers, free the handle. Every function returns
//! an [`IolStatus`] code; no Rust panics cross the boundary.
//!
//! The committed header `include/iol.h` mirrors this file; `cbindgen.toml`
//! is provided to regenerate it.

use iol_core::dynamics::{
    classical_trajectory, coherent_report, evolve_against_reconstruction, Propagator,
    TrajectoryMethod,
};
use iol_core::matrix::C64;
use iol_core::metric::{
    biorthonormality_gram, completeness_residual, divergence_exponent, spectrum_via_compression,
    GramMethod,
};
use iol_core::{IolError, SystemParams};
use std::os::raw::{c_char, c_double, c_int};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IolStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidDimension = 2,
    InvalidParams = 3,
    Overflow = 4,
    Conditioning = 5,
    Truncation = 6,
    RangeError = 7,
    BufferTooSmall = 8,
    Internal = 9,
}

fn status_of(err: &IolError) -> IolStatus {
    match err {
        IolError::InvalidDimension(_) | IolError::DimensionMismatch(_) => {
            IolStatus::InvalidDimension
        }
        IolError::InvalidParams(_) | IolError::Config(_) | IolError::ContourMismatch(_) => {
            IolStatus::InvalidParams
        }
        IolError::Overflow { .. } => IolStatus::Overflow,
        IolError::Conditioning { .. } => IolStatus::Conditioning,
        IolError::Truncation { .. } => IolStatus::Truncation,
        IolError::Range(_) => IolStatus::RangeError,
        _ => IolStatus::Internal,
    }
}

/// Opaque laboratory handle.
pub struct IolLab {
    params: SystemParams,
    nodes: usize,
}

/// η-weighted moments of a coherent family member (C layout).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct IolExpectation {
    pub time: c_double,
    pub x_mean: c_double,
    pub p_mean: c_double,
    pub x2_mean: c_double,
    pub p2_mean: c_double,
    pub dx: c_double,
    pub dp: c_double,
    pub product: c_double,
    pub eta_norm: c_double,
}

fn guard<F: FnOnce() -> IolStatus>(f: F) -> IolStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(IolStatus::Internal)
}

/// Creates a laboratory handle. `quadrature_nodes` controls the contour
/// rules (use 200 for the validated defaults). On success writes the handle
/// through `out` and returns `Ok`.
///
/// # Safety
/// `out` must be a valid pointer to writable handle storage.
#[no_mangle]
pub unsafe extern "C" fn iol_lab_new(
    mass: c_double,
    omega: c_double,
    hbar: c_double,
    dim: usize,
    quadrature_nodes: usize,
    out: *mut *mut IolLab,
) -> IolStatus {
    if out.is_null() {
        return IolStatus::NullArgument;
    }
    guard(|| match SystemParams::new(mass, omega, hbar, dim) {
        Ok(params) => {
            let nodes = if quadrature_nodes >= 8 { quadrature_nodes } else { 200 };
            let lab = Box::new(IolLab { params, nodes });
            unsafe { *out = Box::into_raw(lab) };
            IolStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Frees a handle created by [`iol_lab_new`]. A null handle is a no-op.
///
/// # Safety
/// `lab` must be null or a pointer previously returned by `iol_lab_new`
/// that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn iol_lab_free(lab: *mut IolLab) {
    if !lab.is_null() {
        drop(unsafe { Box::from_raw(lab) });
    }
}

/// Eigenvalue residuals `|E_n − iħω(n+1/2)|` of the laboratory's spectrum
/// measurement for `n = 0..count`.
///
/// # Safety
/// `lab` must be a live handle; `out_residuals` must point to at least
/// `count` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn iol_spectrum_residuals(
    lab: *const IolLab,
    count: usize,
    out_residuals: *mut c_double,
) -> IolStatus {
    if lab.is_null() || out_residuals.is_null() || count == 0 {
        return IolStatus::NullArgument;
    }
    let lab = unsafe { &*lab };
    guard(|| match spectrum_via_compression(count - 1, lab.nodes, &lab.params) {
        Ok(ev) => {
            let e = lab.params.energy_scale();
            for (n, v) in ev.iter().enumerate().take(count) {
                let target = C64::new(0.0, e * (n as f64 + 0.5));
                unsafe { *out_residuals.add(n) = (v - target).norm() };
            }
            IolStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Largest deviation of the bi-orthonormality Gram matrix from the
/// identity, for indices up to `n_max`, by the chosen route
/// (`contour_route` nonzero selects the quadrature route).
///
/// # Safety
/// `lab` must be a live handle; `out_deviation` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iol_gram_max_deviation(
    lab: *const IolLab,
    n_max: usize,
    contour_route: c_int,
    out_deviation: *mut c_double,
) -> IolStatus {
    if lab.is_null() || out_deviation.is_null() {
        return IolStatus::NullArgument;
    }
    let lab = unsafe { &*lab };
    let method = if contour_route != 0 { GramMethod::Contour } else { GramMethod::Fock };
    guard(|| match biorthonormality_gram(n_max, method, lab.nodes, &lab.params) {
        Ok(rep) => {
            unsafe { *out_deviation = rep.max_deviation() };
            IolStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// η-weighted moments and uncertainties of the coherent family member with
/// modulus `alpha_mod` at time `t`.
///
/// # Safety
/// `lab` must be a live handle; `out` must point to writable report
/// storage.
#[no_mangle]
pub unsafe extern "C" fn iol_coherent_expectations(
    lab: *const IolLab,
    alpha_mod: c_double,
    t: c_double,
    out: *mut IolExpectation,
) -> IolStatus {
    if lab.is_null() || out.is_null() {
        return IolStatus::NullArgument;
    }
    let lab = unsafe { &*lab };
    guard(|| match coherent_report(alpha_mod, t, lab.nodes, &lab.params) {
        Ok(r) => {
            unsafe {
                *out = IolExpectation {
                    time: r.time,
                    x_mean: r.x_mean_re,
                    p_mean: r.p_mean_re,
                    x2_mean: r.x2_mean_re,
                    p2_mean: r.p2_mean_re,
                    dx: r.dx,
                    dp: r.dp,
                    product: r.product,
                    eta_norm: r.eta_norm,
                };
            }
            IolStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Deviation of the propagator-evolved coherent state from its
/// `α(t) = αe^{ωt}` reconstruction (overlap deviation on the clean block).
///
/// # Safety
/// `lab` must be a live handle; `out_overlap_dev` and `out_eigen_residual`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn iol_evolution_check(
    lab: *const IolLab,
    alpha_mod: c_double,
    t: c_double,
    out_overlap_dev: *mut c_double,
    out_eigen_residual: *mut c_double,
) -> IolStatus {
    if lab.is_null() || out_overlap_dev.is_null() || out_eigen_residual.is_null() {
        return IolStatus::NullArgument;
    }
    let lab = unsafe { &*lab };
    guard(|| {
        let prop = match Propagator::new(&lab.params) {
            Ok(p) => p,
            Err(e) => return status_of(&e),
        };
        match evolve_against_reconstruction(alpha_mod, t, &lab.params, &prop) {
            Ok(rep) => {
                unsafe {
                    *out_overlap_dev = rep.overlap_deviation;
                    *out_eigen_residual = rep.evolved_eigen_residual;
                }
                IolStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Classical trajectory on a uniform grid of `len` points spaced `dt`,
/// starting at `t = 0`. `use_rk4` nonzero integrates with RK4 instead of
/// the closed form.
///
/// # Safety
/// `lab` must be a live handle; `out_x` and `out_p` must each point to at
/// least `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn iol_classical_trajectory(
    lab: *const IolLab,
    x0: c_double,
    p0: c_double,
    dt: c_double,
    len: usize,
    use_rk4: c_int,
    out_x: *mut c_double,
    out_p: *mut c_double,
) -> IolStatus {
    if lab.is_null() || out_x.is_null() || out_p.is_null() || len == 0 {
        return IolStatus::NullArgument;
    }
    if dt <= 0.0 {
        return IolStatus::InvalidParams;
    }
    let lab = unsafe { &*lab };
    let grid: Vec<f64> = (0..len).map(|k| k as f64 * dt).collect();
    let method = if use_rk4 != 0 { TrajectoryMethod::Rk4 } else { TrajectoryMethod::ClosedForm };
    guard(|| match classical_trajectory(x0, p0, &grid, &lab.params, method) {
        Ok(tr) => {
            for k in 0..len {
                unsafe {
                    *out_x.add(k) = tr.x_c[k];
                    *out_p.add(k) = tr.p_c[k];
                }
            }
            IolStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Fitted growth exponent of the naive norm integral of the n-th
/// generalized eigenfunction (approaches `2n+1`).
///
/// # Safety
/// `lab` must be a live handle; `out_exponent` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iol_divergence_exponent(
    lab: *const IolLab,
    n: usize,
    out_exponent: *mut c_double,
) -> IolStatus {
    if lab.is_null() || out_exponent.is_null() {
        return IolStatus::NullArgument;
    }
    let lab = unsafe { &*lab };
    guard(
        || match divergence_exponent(n, &[10.0, 20.0, 40.0, 80.0], &lab.params) {
            Ok(e) => {
                unsafe { *out_exponent = e };
                IolStatus::Ok
            }
            Err(e) => status_of(&e),
        },
    )
}

/// Sup deviation of the partial bi-completeness kernel acting on the
/// width-deformed vacuum-shaped test function, over `|x| <= 2`.
///
/// # Safety
/// `lab` must be a live handle; `out_deviation` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iol_completeness_residual(
    lab: *const IolLab,
    n_terms: usize,
    width: c_double,
    out_deviation: *mut c_double,
) -> IolStatus {
    if lab.is_null() || out_deviation.is_null() {
        return IolStatus::NullArgument;
    }
    let lab = unsafe { &*lab };
    let pts: Vec<f64> = (-8..=8).map(|k| 0.25 * k as f64).collect();
    guard(|| match completeness_residual(n_terms, width, &pts, &lab.params) {
        Ok(d) => {
            unsafe { *out_deviation = d };
            IolStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Static, NUL-terminated version string.
#[no_mangle]
pub extern "C" fn iol_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Static, NUL-terminated name for a status code.
#[no_mangle]
pub extern "C" fn iol_status_name(status: IolStatus) -> *const c_char {
    let s: &'static str = match status {
        IolStatus::Ok => "ok\0",
        IolStatus::NullArgument => "null argument\0",
        IolStatus::InvalidDimension => "invalid dimension\0",
        IolStatus::InvalidParams => "invalid parameters\0",
        IolStatus::Overflow => "overflow\0",
        IolStatus::Conditioning => "conditioning failure\0",
        IolStatus::Truncation => "truncation too small\0",
        IolStatus::RangeError => "out of range\0",
        IolStatus::BufferTooSmall => "buffer too small\0",
        IolStatus::Internal => "internal error\0",
    };
    s.as_ptr() as *const c_char
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lifecycle_and_spectrum() {
        let mut lab: *mut IolLab = std::ptr::null_mut();
        let st = unsafe { iol_lab_new(1.0, 1.0, 1.0, 64, 200, &mut lab) };
        assert_eq!(st, IolStatus::Ok);
        let mut res = [0.0f64; 6];
        let st = unsafe { iol_spectrum_residuals(lab, 6, res.as_mut_ptr()) };
        assert_eq!(st, IolStatus::Ok);
        assert!(res.iter().all(|&r| r < 1e-8), "{res:?}");
        unsafe { iol_lab_free(lab) };
    }

    #[test]
    fn rejects_bad_params_and_nulls() {
        let mut lab: *mut IolLab = std::ptr::null_mut();
        let st = unsafe { iol_lab_new(1.0, 1.0, 1.0, 7, 200, &mut lab) };
        assert_eq!(st, IolStatus::InvalidDimension);
        let st = unsafe { iol_lab_new(-1.0, 1.0, 1.0, 8, 200, &mut lab) };
        assert_eq!(st, IolStatus::InvalidParams);
        let st = unsafe {
            iol_spectrum_residuals(std::ptr::null(), 4, std::ptr::null_mut())
        };
        assert_eq!(st, IolStatus::NullArgument);
        unsafe { iol_lab_free(std::ptr::null_mut()) };
    }

    #[test]
    fn coherent_report_through_ffi() {
        let mut lab: *mut IolLab = std::ptr::null_mut();
        unsafe { iol_lab_new(1.0, 1.0, 1.0, 64, 200, &mut lab) };
        let mut rep = IolExpectation {
            time: 0.0,
            x_mean: 0.0,
            p_mean: 0.0,
            x2_mean: 0.0,
            p2_mean: 0.0,
            dx: 0.0,
            dp: 0.0,
            product: 0.0,
            eta_norm: 0.0,
        };
        let st = unsafe { iol_coherent_expectations(lab, 1.0, 0.0, &mut rep) };
        assert_eq!(st, IolStatus::Ok);
        assert!((rep.x_mean - std::f64::consts::SQRT_2).abs() < 1e-8);
        assert!((rep.product - 0.5).abs() < 1e-8);
        unsafe { iol_lab_free(lab) };
    }

    #[test]
    fn version_and_status_strings() {
        let v = iol_version();
        assert!(!v.is_null());
        let s = iol_status_name(IolStatus::Overflow);
        let c = unsafe { std::ffi::CStr::from_ptr(s) };
        assert_eq!(c.to_str().unwrap(), "overflow");
    }
}
