//! C ABI for the relay performance library.
//!
//! System parameters travel as an opaque handle so the C side never sees the
//! struct layout; every other value crosses the boundary in flat `repr(C)`
//! structs. All functions return a status code and write results through out
//! pointers. Panics are caught at the boundary and reported as
//! `WPR_STATUS_NUMERICAL_FAILURE`; they never unwind into the caller.
//!
//! The header `include/wprelay.h` is generated from this file at build time.

use std::panic::{catch_unwind, UnwindSafe};

use wprelay::analysis::{expected_error_df, PerformancePoint};
use wprelay::error::Error;
use wprelay::fbl::{fbl_error, FblPoint};
use wprelay::model::{BlockPlan, SystemParams};
use wprelay::montecarlo::{simulate, PowerModel, SimConfig};
use wprelay::optimize::{best_blocklength, min_delay};

/// Result of any API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WprStatus {
    WprStatusOk = 0,
    /// A required pointer argument was null.
    WprStatusNullPointer = 1,
    /// A parameter was out of its documented domain.
    WprStatusInvalidArgument = 2,
    /// The numerics could not produce a trustworthy result.
    WprStatusNumericalFailure = 3,
    /// No point satisfied the optimization constraints.
    WprStatusInfeasible = 4,
    /// The block error probability is 1, so the expected delay diverges.
    WprStatusInfiniteDelay = 5,
}

use WprStatus::*;

/// Opaque handle to a validated set of system parameters.
pub struct WprParams {
    inner: SystemParams,
}

/// Expected error probabilities of one operating point.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WprBreakdown {
    /// Relay decoding error probability.
    pub e_r: f64,
    /// Destination decoding error probability.
    pub e_d: f64,
    /// Probability both hops fail.
    pub e_rd: f64,
    /// End-to-end block error probability.
    pub e_df: f64,
}

/// Throughput and delay of one operating point.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WprPerformance {
    /// Delivered bits per channel use.
    pub throughput: f64,
    /// Average delay in channel uses.
    pub delay: f64,
    /// Average delay in seconds.
    pub delay_seconds: f64,
}

/// Solution of a constrained search over the block structure.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WprOptimum {
    pub n: u32,
    pub v: u32,
    /// Power-transfer share v / (2n + v).
    pub alpha: f64,
    pub tau: f64,
    pub delta: f64,
    pub eps_df: f64,
}

/// Headline statistics of a Monte Carlo run.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WprSimSummary {
    pub eps_df_hat: f64,
    pub eps_r_hat: f64,
    pub eps_d_hat: f64,
    /// 95% confidence half-width on eps_df_hat.
    pub ci_halfwidth_df: f64,
    pub throughput_hat: f64,
    pub delay_hat: f64,
    pub blocks: u64,
    pub df_errors: u64,
}

fn status_of(e: &Error) -> WprStatus {
    match e {
        Error::InvalidParameter(_) | Error::EmptyGrid | Error::BudgetParity { .. } => {
            WprStatusInvalidArgument
        }
        Error::InfiniteDelay => WprStatusInfiniteDelay,
        Error::IntegrationFailure(_) | Error::EmptySimulation(_) => WprStatusNumericalFailure,
    }
}

/// Runs `f`, converting library errors and panics into status codes.
fn guarded<F: FnOnce() -> Result<WprStatus, Error> + UnwindSafe>(f: F) -> WprStatus {
    match catch_unwind(f) {
        Ok(Ok(s)) => s,
        Ok(Err(e)) => status_of(&e),
        Err(_) => WprStatusNumericalFailure,
    }
}

/// Allocates a parameter handle with the default system setup. Never fails.
/// Free with `wpr_params_free`.
#[no_mangle]
pub extern "C" fn wpr_params_default() -> *mut WprParams {
    Box::into_raw(Box::new(WprParams {
        inner: SystemParams::default(),
    }))
}

/// Allocates a parameter handle from explicit values, writing it to `out`.
/// Returns `WPR_STATUS_INVALID_ARGUMENT` (and writes nothing) when any value
/// is outside its domain. Free with `wpr_params_free`.
///
/// # Safety
/// `out` must be a valid pointer to a `WprParams*`.
#[no_mangle]
pub unsafe extern "C" fn wpr_params_new(
    ps: f64,
    eta: f64,
    omega: f64,
    d1: f64,
    d2: f64,
    sigma2_r: f64,
    sigma2_d: f64,
    m: f64,
    tc: f64,
    out: *mut *mut WprParams,
) -> WprStatus {
    if out.is_null() {
        return WprStatusNullPointer;
    }
    match SystemParams::new(ps, eta, omega, d1, d2, sigma2_r, sigma2_d, m, tc) {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(WprParams { inner })) };
            WprStatusOk
        }
        Err(e) => status_of(&e),
    }
}

/// Releases a handle from `wpr_params_default` or `wpr_params_new`.
/// Passing null is a no-op.
///
/// # Safety
/// `params` must be null or a pointer previously returned by this library,
/// and must not be used again after this call.
#[no_mangle]
pub unsafe extern "C" fn wpr_params_free(params: *mut WprParams) {
    if !params.is_null() {
        drop(unsafe { Box::from_raw(params) });
    }
}

/// Library version as a static null-terminated string.
#[no_mangle]
pub extern "C" fn wpr_version() -> *const std::os::raw::c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const _
}

/// Block error probability of a single hop at SNR `gamma`, rate `k/n`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wpr_fbl_error(gamma: f64, k: u32, n: u32, out: *mut f64) -> WprStatus {
    if out.is_null() {
        return WprStatusNullPointer;
    }
    if n == 0 || !gamma.is_finite() || gamma < 0.0 {
        return WprStatusInvalidArgument;
    }
    let eps = fbl_error(FblPoint {
        gamma,
        r: k as f64 / n as f64,
        n,
    });
    unsafe { *out = eps };
    WprStatusOk
}

unsafe fn with_params<F>(params: *const WprParams, f: F) -> WprStatus
where
    F: FnOnce(&SystemParams) -> Result<WprStatus, Error> + UnwindSafe,
{
    if params.is_null() {
        return WprStatusNullPointer;
    }
    let p = unsafe { &(*params).inner };
    guarded(move || f(p))
}

/// Expected error probabilities at one operating point.
///
/// # Safety
/// `params` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wpr_error_breakdown(
    params: *const WprParams,
    n: u32,
    v: u32,
    k: u32,
    out: *mut WprBreakdown,
) -> WprStatus {
    if out.is_null() {
        return WprStatusNullPointer;
    }
    unsafe {
        with_params(params, move |p| {
            let b = expected_error_df(&BlockPlan::new(n, v, k)?, p)?;
            *out = WprBreakdown {
                e_r: b.e_r,
                e_d: b.e_d,
                e_rd: b.e_rd,
                e_df: b.e_df,
            };
            Ok(WprStatusOk)
        })
    }
}

/// Throughput and delay at one operating point. Returns
/// `WPR_STATUS_INFINITE_DELAY` (writing nothing) when the block error
/// probability is 1.
///
/// # Safety
/// `params` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wpr_performance(
    params: *const WprParams,
    n: u32,
    v: u32,
    k: u32,
    out: *mut WprPerformance,
) -> WprStatus {
    if out.is_null() {
        return WprStatusNullPointer;
    }
    unsafe {
        with_params(params, move |p| {
            let plan = BlockPlan::new(n, v, k)?;
            let b = expected_error_df(&plan, p)?;
            let perf = PerformancePoint::from_error(&plan, p, b.e_df)?;
            *out = WprPerformance {
                throughput: perf.throughput,
                delay: perf.delay,
                delay_seconds: perf.delay_seconds,
            };
            Ok(WprStatusOk)
        })
    }
}

/// Runs the Monte Carlo simulator. `accumulated` selects the power model:
/// 0 spends only the current block's harvest, nonzero adds the harvest
/// accumulated over the preceding failure run.
///
/// # Safety
/// `params` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wpr_simulate(
    params: *const WprParams,
    n: u32,
    v: u32,
    k: u32,
    blocks: u64,
    seed: u64,
    accumulated: i32,
    out: *mut WprSimSummary,
) -> WprStatus {
    if out.is_null() {
        return WprStatusNullPointer;
    }
    unsafe {
        with_params(params, move |p| {
            let model = if accumulated != 0 {
                PowerModel::Accumulated
            } else {
                PowerModel::Approx
            };
            let r = simulate(
                &BlockPlan::new(n, v, k)?,
                p,
                &SimConfig::new(blocks, seed, model),
            )?;
            *out = WprSimSummary {
                eps_df_hat: r.eps_df_hat,
                eps_r_hat: r.eps_r_hat,
                eps_d_hat: r.eps_d_hat,
                ci_halfwidth_df: r.ci_halfwidth_df,
                throughput_hat: r.throughput_hat,
                delay_hat: r.delay_hat,
                blocks: r.blocks,
                df_errors: r.df_errors,
            };
            Ok(WprStatusOk)
        })
    }
}

fn grid(lo: u32, hi: u32, step: u32) -> Result<Vec<u32>, Error> {
    if step == 0 || lo > hi {
        return Err(Error::InvalidParameter(
            "grid needs lo <= hi and step >= 1".into(),
        ));
    }
    Ok((lo..=hi).step_by(step as usize).collect())
}

unsafe fn search_common(
    params: *const WprParams,
    k: u32,
    eps0: f64,
    n_min: u32,
    n_max: u32,
    n_step: u32,
    v_min: u32,
    v_max: u32,
    v_step: u32,
    out: *mut WprOptimum,
    min_delay_mode: bool,
) -> WprStatus {
    if out.is_null() {
        return WprStatusNullPointer;
    }
    unsafe {
        with_params(params, move |p| {
            let n_grid = grid(n_min, n_max, n_step)?;
            let v_grid = grid(v_min, v_max, v_step)?;
            let best = if min_delay_mode {
                min_delay(k, eps0, p, &n_grid, &v_grid)?
            } else {
                best_blocklength(k, eps0, p, &n_grid, &v_grid)?.best
            };
            match best {
                Some(b) => {
                    *out = WprOptimum {
                        n: b.n,
                        v: b.v,
                        alpha: b.alpha,
                        tau: b.tau,
                        delta: b.delta,
                        eps_df: b.eps_df,
                    };
                    Ok(WprStatusOk)
                }
                None => Ok(WprStatusInfeasible),
            }
        })
    }
}

/// Maximizes throughput over the (n, v) grid subject to an error target.
/// Returns `WPR_STATUS_INFEASIBLE` (writing nothing) when no grid point
/// meets the target.
///
/// # Safety
/// `params` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn wpr_best_blocklength(
    params: *const WprParams,
    k: u32,
    eps0: f64,
    n_min: u32,
    n_max: u32,
    n_step: u32,
    v_min: u32,
    v_max: u32,
    v_step: u32,
    out: *mut WprOptimum,
) -> WprStatus {
    unsafe {
        search_common(
            params, k, eps0, n_min, n_max, n_step, v_min, v_max, v_step, out, false,
        )
    }
}

/// Minimizes average delay over the (n, v) grid subject to an error target;
/// the optimum satisfies delta = k / tau.
///
/// # Safety
/// `params` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn wpr_min_delay(
    params: *const WprParams,
    k: u32,
    eps0: f64,
    n_min: u32,
    n_max: u32,
    n_step: u32,
    v_min: u32,
    v_max: u32,
    v_step: u32,
    out: *mut WprOptimum,
) -> WprStatus {
    unsafe {
        search_common(
            params, k, eps0, n_min, n_max, n_step, v_min, v_max, v_step, out, true,
        )
    }
}
