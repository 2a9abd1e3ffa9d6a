//! Constrained grid searches over the block structure.
//!
//! Every starred quantity is the solution of "maximize throughput subject to
//! E[eps_df] <= eps0" on the given grids; minimizing delay is the same
//! problem because delta = k/tau at fixed k. Grid points evaluate
//! independently (quadrature only, never simulation) and reduce to the
//! optimum with a deterministic tie-break: highest tau, then smallest v,
//! then smallest n.

use rayon::prelude::*;

use crate::analysis::{
    expected_error_df_with, ErrorBreakdown, PerformancePoint, DEFAULT_PANEL_NODES,
};
use crate::error::{Error, Result};
use crate::model::{BlockPlan, SystemParams};

/// A feasible operating point found by a search.
///
/// Searches return `None` instead when no grid point meets the target, so a
/// constructed value always carries meaningful metrics. Points with
/// E[eps_df] = 1 are never returned: they have no finite delay and zero
/// throughput, so they cannot be an optimum of anything.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimumPoint {
    pub n: u32,
    pub v: u32,
    /// v / (2n + v).
    pub alpha: f64,
    /// Throughput in bits per channel use.
    pub tau: f64,
    /// Average delay in channel uses; tau * delta = k.
    pub delta: f64,
    pub eps_df: f64,
}

/// One row of a parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    /// The swept coordinate: v for fixed-budget sweeps, d1 for relay
    /// position sweeps.
    pub coord: f64,
    /// Operating plan behind the row; None when the row is infeasible.
    pub plan: Option<BlockPlan>,
    pub breakdown: Option<ErrorBreakdown>,
    /// None when the block error probability is 1 (infinite delay).
    pub perf: Option<PerformancePoint>,
}

/// Outcome of [`best_blocklength`]: the overall optimum plus the per-n
/// profile used for figure output.
#[derive(Debug, Clone, PartialEq)]
pub struct BlocklengthSearch {
    pub best: Option<OptimumPoint>,
    /// For each grid n, the best feasible point over the v grid.
    pub profile: Vec<(u32, Option<OptimumPoint>)>,
}

/// Outcome of [`fixed_budget_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct FixedBudgetSweep {
    pub rows: Vec<SweepRow>,
    /// Grid v minimizing E[eps_df]; with 2n+v fixed this is also the
    /// throughput maximizer.
    pub best_v: u32,
}

/// Default sweep grid for v: [0, 10000] in steps of 50.
pub fn default_v_grid() -> Vec<u32> {
    (0..=200).map(|i| i * 50).collect()
}

/// Default sweep grid for n: [100, 2000] in steps of 25.
pub fn default_n_grid() -> Vec<u32> {
    (4..=80).map(|i| i * 25).collect()
}

fn check_target(eps0: f64) -> Result<()> {
    if !(eps0 > 0.0 && eps0 <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "target error probability must lie in (0, 1], got {eps0}"
        )));
    }
    Ok(())
}

fn check_grid(name: &str, grid: &[u32]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(format!(
            "{name} grid must be strictly ascending"
        )));
    }
    Ok(())
}

/// Strict "better than" under the search order: higher tau, then smaller v,
/// then smaller n.
fn better(a: &OptimumPoint, b: &OptimumPoint) -> bool {
    if a.tau != b.tau {
        return a.tau > b.tau;
    }
    if a.v != b.v {
        return a.v < b.v;
    }
    a.n < b.n
}

fn candidate(
    n: u32,
    v: u32,
    k: u32,
    eps0: f64,
    params: &SystemParams,
    nodes: usize,
) -> Result<Option<OptimumPoint>> {
    let plan = BlockPlan::new(n, v, k)?;
    let b = expected_error_df_with(&plan, params, nodes)?;
    if b.e_df > eps0 || b.e_df >= 1.0 {
        return Ok(None);
    }
    let perf = PerformancePoint::from_error(&plan, params, b.e_df)?;
    Ok(Some(OptimumPoint {
        n,
        v,
        alpha: plan.alpha(),
        tau: perf.throughput,
        delta: perf.delay,
        eps_df: b.e_df,
    }))
}

fn best_over_v(
    n: u32,
    k: u32,
    eps0: f64,
    params: &SystemParams,
    v_grid: &[u32],
    nodes: usize,
) -> Result<Option<OptimumPoint>> {
    let mut best: Option<OptimumPoint> = None;
    for &v in v_grid {
        if let Some(p) = candidate(n, v, k, eps0, params, nodes)? {
            if best.as_ref().is_none_or(|b| better(&p, b)) {
                best = Some(p);
            }
        }
    }
    Ok(best)
}

/// Maximizes throughput over the v grid at fixed n, subject to
/// E[eps_df] <= eps0. Returns None when no grid point is feasible.
pub fn best_alpha_for_n(
    n: u32,
    k: u32,
    eps0: f64,
    params: &SystemParams,
    v_grid: &[u32],
) -> Result<Option<OptimumPoint>> {
    best_alpha_for_n_with(n, k, eps0, params, v_grid, DEFAULT_PANEL_NODES)
}

pub fn best_alpha_for_n_with(
    n: u32,
    k: u32,
    eps0: f64,
    params: &SystemParams,
    v_grid: &[u32],
    nodes: usize,
) -> Result<Option<OptimumPoint>> {
    check_target(eps0)?;
    check_grid("v", v_grid)?;
    params.validate()?;
    best_over_v(n, k, eps0, params, v_grid, nodes)
}

/// Maximizes throughput over the full (n, v) grid subject to eps0, and
/// records the per-n profile.
pub fn best_blocklength(
    k: u32,
    eps0: f64,
    params: &SystemParams,
    n_grid: &[u32],
    v_grid: &[u32],
) -> Result<BlocklengthSearch> {
    best_blocklength_with(k, eps0, params, n_grid, v_grid, DEFAULT_PANEL_NODES)
}

pub fn best_blocklength_with(
    k: u32,
    eps0: f64,
    params: &SystemParams,
    n_grid: &[u32],
    v_grid: &[u32],
    nodes: usize,
) -> Result<BlocklengthSearch> {
    check_target(eps0)?;
    check_grid("n", n_grid)?;
    check_grid("v", v_grid)?;
    params.validate()?;
    if n_grid[0] == 0 {
        return Err(Error::InvalidParameter("n grid must start at >= 1".into()));
    }
    let profile: Vec<(u32, Option<OptimumPoint>)> = n_grid
        .par_iter()
        .map(|&n| Ok((n, best_over_v(n, k, eps0, params, v_grid, nodes)?)))
        .collect::<Result<_>>()?;
    let mut best: Option<OptimumPoint> = None;
    for (_, p) in &profile {
        if let Some(p) = p {
            if best.as_ref().is_none_or(|b| better(p, b)) {
                best = Some(*p);
            }
        }
    }
    Ok(BlocklengthSearch { best, profile })
}

/// Smallest n within bounds meeting E[eps_df] <= eps0 at fixed v.
///
/// Bisects on n after probing that the error is non-increasing across the
/// bounds; probes failing that order fall back to a linear scan. Returns
/// None when even the upper bound misses the target.
pub fn min_n_for_target(
    v: u32,
    k: u32,
    eps0: f64,
    params: &SystemParams,
    n_bounds: (u32, u32),
) -> Result<Option<u32>> {
    min_n_for_target_with(v, k, eps0, params, n_bounds, DEFAULT_PANEL_NODES)
}

pub fn min_n_for_target_with(
    v: u32,
    k: u32,
    eps0: f64,
    params: &SystemParams,
    n_bounds: (u32, u32),
    nodes: usize,
) -> Result<Option<u32>> {
    check_target(eps0)?;
    params.validate()?;
    let (lo, hi) = n_bounds;
    if lo == 0 || lo > hi {
        return Err(Error::InvalidParameter(format!(
            "n bounds must satisfy 1 <= lo <= hi, got ({lo}, {hi})"
        )));
    }
    let eval = |n: u32| -> Result<f64> {
        Ok(expected_error_df_with(&BlockPlan::new(n, v, k)?, params, nodes)?.e_df)
    };
    let e_lo = eval(lo)?;
    if e_lo <= eps0 {
        return Ok(Some(lo));
    }
    if lo == hi {
        return Ok(None);
    }
    let e_hi = eval(hi)?;
    let e_mid = eval(lo + (hi - lo) / 2)?;
    if e_lo >= e_mid && e_mid >= e_hi {
        if e_hi > eps0 {
            return Ok(None);
        }
        let (mut lo, mut hi) = (lo, hi);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if eval(mid)? <= eps0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return Ok(Some(hi));
    }
    // non-monotone probes: scan for the first feasible n
    for n in lo + 1..=hi {
        if eval(n)? <= eps0 {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Minimizes delay subject to eps0. Identical to the throughput search
/// because delta = k/tau at fixed k; the identity is asserted on the result.
pub fn min_delay(
    k: u32,
    eps0: f64,
    params: &SystemParams,
    n_grid: &[u32],
    v_grid: &[u32],
) -> Result<Option<OptimumPoint>> {
    min_delay_with(k, eps0, params, n_grid, v_grid, DEFAULT_PANEL_NODES)
}

pub fn min_delay_with(
    k: u32,
    eps0: f64,
    params: &SystemParams,
    n_grid: &[u32],
    v_grid: &[u32],
    nodes: usize,
) -> Result<Option<OptimumPoint>> {
    let best = best_blocklength_with(k, eps0, params, n_grid, v_grid, nodes)?.best;
    if let Some(p) = &best {
        let kf = k as f64;
        assert!(
            (p.tau * p.delta - kf).abs() <= 1e-9 * kf,
            "tau * delta != k at the optimum: {} * {} vs {}",
            p.tau,
            p.delta,
            kf
        );
    }
    Ok(best)
}

/// E[eps_df] as a function of v under a fixed block budget 2n + v = total,
/// with n = (total - v)/2. Also reports the error-minimizing v.
pub fn fixed_budget_sweep(
    total: u64,
    k: u32,
    params: &SystemParams,
    v_grid: &[u32],
) -> Result<FixedBudgetSweep> {
    fixed_budget_sweep_with(total, k, params, v_grid, DEFAULT_PANEL_NODES)
}

pub fn fixed_budget_sweep_with(
    total: u64,
    k: u32,
    params: &SystemParams,
    v_grid: &[u32],
    nodes: usize,
) -> Result<FixedBudgetSweep> {
    check_grid("v", v_grid)?;
    params.validate()?;
    for &v in v_grid {
        if v as u64 >= total {
            return Err(Error::InvalidParameter(format!(
                "v = {v} does not leave room for transmission within a budget of {total}"
            )));
        }
        if (total - v as u64) % 2 != 0 {
            return Err(Error::BudgetParity { total, v });
        }
    }
    let rows: Vec<SweepRow> = v_grid
        .par_iter()
        .map(|&v| -> Result<SweepRow> {
            let n = ((total - v as u64) / 2) as u32;
            let plan = BlockPlan::new(n, v, k)?;
            let b = expected_error_df_with(&plan, params, nodes)?;
            let perf = if b.e_df < 1.0 {
                Some(PerformancePoint::from_error(&plan, params, b.e_df)?)
            } else {
                None
            };
            Ok(SweepRow {
                coord: v as f64,
                plan: Some(plan),
                breakdown: Some(b),
                perf,
            })
        })
        .collect::<Result<_>>()?;
    let mut best_v = v_grid[0];
    let mut best_e = f64::INFINITY;
    for row in &rows {
        let e = row.breakdown.expect("always present").e_df;
        if e < best_e {
            best_e = e;
            best_v = row.coord as u32;
        }
    }
    Ok(FixedBudgetSweep { rows, best_v })
}

/// Minimum delay as a function of relay position, with d2 = d_total - d1.
/// Infeasible positions yield rows with empty metrics.
pub fn relay_position_sweep(
    k: u32,
    eps0: f64,
    params: &SystemParams,
    d_total: f64,
    d1_grid: &[f64],
    n_grid: &[u32],
    v_grid: &[u32],
) -> Result<Vec<SweepRow>> {
    relay_position_sweep_with(
        k,
        eps0,
        params,
        d_total,
        d1_grid,
        n_grid,
        v_grid,
        DEFAULT_PANEL_NODES,
    )
}

#[allow(clippy::too_many_arguments)]
pub fn relay_position_sweep_with(
    k: u32,
    eps0: f64,
    params: &SystemParams,
    d_total: f64,
    d1_grid: &[f64],
    n_grid: &[u32],
    v_grid: &[u32],
    nodes: usize,
) -> Result<Vec<SweepRow>> {
    check_target(eps0)?;
    if d1_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for &d1 in d1_grid {
        if !(d1 > 0.0 && d1 < d_total) {
            return Err(Error::InvalidParameter(format!(
                "relay position d1 = {d1} must lie strictly inside (0, {d_total})"
            )));
        }
    }
    let mut rows = Vec::with_capacity(d1_grid.len());
    for &d1 in d1_grid {
        let local = SystemParams {
            d1,
            d2: d_total - d1,
            ..*params
        };
        local.validate()?;
        let best = min_delay_with(k, eps0, &local, n_grid, v_grid, nodes)?;
        let row = match best {
            Some(p) => {
                let plan = BlockPlan::new(p.n, p.v, k)?;
                let b = expected_error_df_with(&plan, &local, nodes)?;
                let perf = PerformancePoint::from_error(&plan, &local, b.e_df)?;
                SweepRow {
                    coord: d1,
                    plan: Some(plan),
                    breakdown: Some(b),
                    perf: Some(perf),
                }
            }
            None => SweepRow {
                coord: d1,
                plan: None,
                breakdown: None,
                perf: None,
            },
        };
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> SystemParams {
        SystemParams::default()
    }

    fn grid(lo: u32, hi: u32, step: u32) -> Vec<u32> {
        (lo..=hi).step_by(step as usize).collect()
    }

    #[test]
    fn comparator_breaks_ties_toward_small_v_then_n() {
        let p = |n: u32, v: u32, tau: f64| OptimumPoint {
            n,
            v,
            alpha: 0.0,
            tau,
            delta: 1.0,
            eps_df: 0.0,
        };
        assert!(better(&p(10, 5, 0.2), &p(1, 1, 0.1)));
        assert!(better(&p(10, 5, 0.2), &p(1, 6, 0.2)));
        assert!(better(&p(3, 5, 0.2), &p(4, 5, 0.2)));
        assert!(!better(&p(4, 5, 0.2), &p(4, 5, 0.2)));
    }

    #[test]
    fn rejects_bad_grids_and_targets() {
        let p = defaults();
        assert!(matches!(
            best_alpha_for_n(100, 160, 1e-3, &p, &[]),
            Err(Error::EmptyGrid)
        ));
        assert!(best_alpha_for_n(100, 160, 1e-3, &p, &[100, 100]).is_err());
        assert!(best_alpha_for_n(100, 160, 0.0, &p, &[100]).is_err());
        assert!(best_alpha_for_n(100, 160, 1.5, &p, &[100]).is_err());
    }

    #[test]
    fn unconstrained_target_returns_grid_maximizer() {
        let p = defaults();
        let v_grid = grid(100, 1200, 100);
        let best = best_alpha_for_n(150, 160, 1.0, &p, &v_grid)
            .unwrap()
            .unwrap();
        // brute force the same grid
        let mut want: Option<OptimumPoint> = None;
        for &v in &v_grid {
            if let Some(c) = candidate(150, v, 160, 1.0, &p, DEFAULT_PANEL_NODES).unwrap() {
                if want.as_ref().is_none_or(|w| better(&c, w)) {
                    want = Some(c);
                }
            }
        }
        assert_eq!(best, want.unwrap());
    }

    #[test]
    fn infeasible_target_returns_none() {
        let p = defaults();
        let best = best_alpha_for_n(100, 160, 1e-9, &p, &grid(100, 500, 100)).unwrap();
        assert!(best.is_none());
    }

    #[test]
    fn tighter_target_needs_more_power_transfer() {
        let p = defaults();
        let v_grid = grid(0, 4000, 100);
        let loose = best_alpha_for_n(300, 160, 1e-2, &p, &v_grid)
            .unwrap()
            .unwrap();
        let tight = best_alpha_for_n(300, 160, 1e-3, &p, &v_grid)
            .unwrap()
            .unwrap();
        assert!(
            tight.alpha > loose.alpha,
            "{} vs {}",
            tight.alpha,
            loose.alpha
        );
        assert!(tight.eps_df <= 1e-3 && loose.eps_df <= 1e-2);
    }

    #[test]
    fn blocklength_search_finds_the_reliable_optimum() {
        let p = defaults();
        let out =
            best_blocklength(160, 1e-5, &p, &grid(900, 1150, 50), &grid(5000, 7000, 200)).unwrap();
        let best = out.best.unwrap();
        assert!(best.n >= 900 && best.n <= 1150);
        assert!(best.v >= 5100 && best.v <= 6900, "v* = {}", best.v);
        assert!(best.eps_df <= 1e-5);
        assert!(
            best.delta > 6800.0 && best.delta < 9200.0,
            "delta* = {}",
            best.delta
        );
        assert_eq!(out.profile.len(), 6);
        // the recorded profile contains the winner
        assert!(out
            .profile
            .iter()
            .any(|(n, p)| p.as_ref().is_some_and(|q| *n == best.n && q == &best)));
    }

    #[test]
    fn closure_property_on_returned_points() {
        let p = defaults();
        let best = best_blocklength(160, 1e-4, &p, &grid(300, 600, 100), &grid(1000, 3000, 500))
            .unwrap()
            .best
            .unwrap();
        let plan = BlockPlan::new(best.n, best.v, 160).unwrap();
        let again = crate::analysis::expected_error_df(&plan, &p).unwrap();
        assert!((again.e_df - best.eps_df).abs() <= 1e-12 * best.eps_df.max(1e-300));
        assert!(again.e_df <= 1e-4);
    }

    #[test]
    fn refining_the_grid_never_worsens_tau() {
        let p = defaults();
        let coarse = best_blocklength(160, 1e-3, &p, &grid(100, 500, 200), &grid(0, 2000, 400))
            .unwrap()
            .best
            .unwrap();
        let fine = best_blocklength(160, 1e-3, &p, &grid(100, 500, 100), &grid(0, 2000, 200))
            .unwrap()
            .best
            .unwrap();
        assert!(fine.tau >= coarse.tau);
    }

    #[test]
    fn min_n_bisection_matches_linear_scan() {
        let p = defaults();
        let fast = min_n_for_target(6000, 160, 1e-5, &p, (850, 1150))
            .unwrap()
            .unwrap();
        let mut slow = None;
        for n in (850..=1150).step_by(10) {
            let plan = BlockPlan::new(n, 6000, 160).unwrap();
            if crate::analysis::expected_error_df(&plan, &p).unwrap().e_df <= 1e-5 {
                slow = Some(n);
                break;
            }
        }
        let slow = slow.unwrap();
        assert!(
            fast <= slow && fast > slow - 10,
            "bisect {fast} vs scan {slow}"
        );
        assert!(fast >= 850 && fast <= 1150);
    }

    #[test]
    fn min_n_edge_cases() {
        let p = defaults();
        // vacuous target: the lower bound wins
        assert_eq!(
            min_n_for_target(1000, 160, 1.0, &p, (100, 500)).unwrap(),
            Some(100)
        );
        // unattainable target within bounds
        assert_eq!(
            min_n_for_target(100, 160, 1e-9, &p, (100, 300)).unwrap(),
            None
        );
        // min n is non-increasing in v
        let a = min_n_for_target(5000, 160, 1e-5, &p, (100, 2000))
            .unwrap()
            .unwrap();
        let b = min_n_for_target(7000, 160, 1e-5, &p, (100, 2000))
            .unwrap()
            .unwrap();
        assert!(b <= a, "n_min went up with v: {a} -> {b}");
    }

    #[test]
    fn min_delay_is_k_over_tau_of_the_same_search() {
        let p = defaults();
        let n_grid = grid(300, 600, 100);
        let v_grid = grid(1000, 3000, 500);
        let d = min_delay(160, 1e-4, &p, &n_grid, &v_grid).unwrap().unwrap();
        let t = best_blocklength(160, 1e-4, &p, &n_grid, &v_grid)
            .unwrap()
            .best
            .unwrap();
        assert_eq!(d, t);
        assert!((d.tau * d.delta - 160.0).abs() < 1e-9 * 160.0);
    }

    #[test]
    fn fixed_budget_sweep_reproduces_the_budget_curve() {
        let p = defaults();
        let v_grid: Vec<u32> = (1..=19).map(|i| i * 100).collect();
        let out = fixed_budget_sweep(2000, 64, &p, &v_grid).unwrap();
        assert_eq!(out.rows.len(), 19);
        for row in &out.rows {
            let plan = row.plan.unwrap();
            assert_eq!(2 * plan.n as u64 + plan.v as u64, 2000);
        }
        let best_row = out
            .rows
            .iter()
            .find(|r| r.coord as u32 == out.best_v)
            .unwrap();
        let e = best_row.breakdown.unwrap().e_df;
        assert!(e > 1.5e-5 && e < 6e-5, "min eps_df = {e:e}");
        assert!(
            out.best_v >= 1200 && out.best_v <= 1800,
            "best v = {}",
            out.best_v
        );
    }

    #[test]
    fn fixed_budget_rejects_parity_and_overflow() {
        let p = defaults();
        assert!(matches!(
            fixed_budget_sweep(2000, 64, &p, &[100, 151]),
            Err(Error::BudgetParity {
                total: 2000,
                v: 151
            })
        ));
        assert!(fixed_budget_sweep(2000, 64, &p, &[100, 2000]).is_err());
        // v = 0 is admissible and fails completely
        let out = fixed_budget_sweep(2000, 64, &p, &[0, 1000]).unwrap();
        assert_eq!(out.rows[0].breakdown.unwrap().e_df, 1.0);
        assert!(out.rows[0].perf.is_none());
        assert_eq!(out.best_v, 1000);
    }

    #[test]
    fn relay_position_rows_flag_infeasibility() {
        let p = defaults();
        let n_grid = grid(100, 500, 100);
        let v_grid = grid(0, 2000, 250);
        let rows =
            relay_position_sweep(160, 1e-4, &p, 2.0, &[0.3, 1.0, 1.7], &n_grid, &v_grid).unwrap();
        assert_eq!(rows.len(), 3);
        // near the source: feasible and fast
        assert!(rows[0].perf.is_some());
        // far from the source: harvesting starves, infeasible at this target
        assert!(rows[2].perf.is_none() && rows[2].plan.is_none());
        // the smallest feasible d1 gives the smallest delay
        let feasible: Vec<&SweepRow> = rows.iter().filter(|r| r.perf.is_some()).collect();
        let first = feasible[0].perf.unwrap().delay;
        for r in &feasible[1..] {
            assert!(r.perf.unwrap().delay >= first);
        }
    }

    #[test]
    fn relay_position_profile_is_asymmetric() {
        let p = defaults();
        let n_grid = grid(100, 400, 100);
        let v_grid = grid(0, 1500, 250);
        let rows = relay_position_sweep(160, 1.0, &p, 2.0, &[0.5, 1.5], &n_grid, &v_grid).unwrap();
        let d_near = rows[0].perf.unwrap().delay;
        let d_far = rows[1].perf.unwrap().delay;
        assert!(
            (d_near - d_far).abs() > 1e-6 * d_near,
            "mirrored positions should differ: {d_near} vs {d_far}"
        );
    }

    #[test]
    fn relay_position_rejects_out_of_range_d1() {
        let p = defaults();
        assert!(relay_position_sweep(160, 1e-4, &p, 2.0, &[0.5, 2.0], &[100], &[100]).is_err());
        assert!(relay_position_sweep(160, 1e-4, &p, 2.0, &[], &[100], &[100]).is_err());
    }

    #[test]
    fn search_is_deterministic_across_thread_counts() {
        let p = defaults();
        let n_grid = grid(100, 400, 100);
        let v_grid = grid(0, 1500, 300);
        let run = || best_blocklength(160, 1e-3, &p, &n_grid, &v_grid).unwrap();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(run);
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(run);
        assert_eq!(single, multi);
    }
}
