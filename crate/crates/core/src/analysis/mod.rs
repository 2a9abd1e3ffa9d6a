//! Fading-averaged error probabilities, throughput and delay.
//!
//! Expectations over the Gamma-distributed squared channel gains are
//! evaluated by quadrature: a plain generalized Gauss-Laguerre rule for
//! generic expectations ([`gamma_expectation`]), and a windowed composite
//! scheme (see `integrator`) for the error-probability integrals, whose
//! step-like integrands defeat any single global rule in the 1e-5 regimes
//! this crate has to resolve.

mod integrator;
pub(crate) mod quadrature;

use crate::error::{Error, Result};
use crate::model::{BlockPlan, SystemParams};

/// Default node count per dimension for the plain Gauss-Laguerre rule.
pub const DEFAULT_LAGUERRE_NODES: usize = 96;

/// Default node count per panel for the windowed error integrals.
pub const DEFAULT_PANEL_NODES: usize = 24;

/// The four fading-averaged error terms of the decode-and-forward chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBreakdown {
    /// E[eps_r]: relay decoding error probability.
    pub e_r: f64,
    /// E[eps_d]: destination decoding error probability (unconditional).
    pub e_d: f64,
    /// E[eps_r * eps_d]: the joint term; the two SNRs share h.
    pub e_rd: f64,
    /// E[eps_df] = e_r + e_d - e_rd: end-to-end block error probability.
    pub e_df: f64,
}

impl ErrorBreakdown {
    /// Assembles a breakdown from raw integrals, restoring the algebraic
    /// invariants (all in [0,1], e_rd <= min, max <= e_df <= min(1, sum))
    /// that quadrature rounding can violate by an ulp.
    fn from_raw(e_r: f64, e_d: f64, e_rd: f64) -> Result<Self> {
        if !(e_r.is_finite() && e_d.is_finite() && e_rd.is_finite()) {
            return Err(Error::IntegrationFailure(format!(
                "non-finite error integral: e_r={e_r}, e_d={e_d}, e_rd={e_rd}"
            )));
        }
        let e_r = e_r.clamp(0.0, 1.0);
        let e_d = e_d.clamp(0.0, 1.0);
        let e_rd = e_rd.clamp(0.0, e_r.min(e_d));
        let e_df = (e_r + e_d - e_rd)
            .max(e_r.max(e_d))
            .min((e_r + e_d).min(1.0));
        Ok(ErrorBreakdown {
            e_r,
            e_d,
            e_rd,
            e_df,
        })
    }
}

/// Throughput and delay of one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerformancePoint {
    /// Effective rate tau in bits per channel use.
    pub throughput: f64,
    /// Average delay delta in channel uses; tau * delta = k.
    pub delay: f64,
    /// delta converted to seconds via the channel-use duration.
    pub delay_seconds: f64,
}

impl PerformancePoint {
    /// Builds the point from a known block error probability.
    ///
    /// Fails with a distinguished infinite-delay error when e_df = 1.
    pub fn from_error(plan: &BlockPlan, params: &SystemParams, e_df: f64) -> Result<Self> {
        if e_df >= 1.0 {
            return Err(Error::InfiniteDelay);
        }
        let total = plan.total() as f64;
        let throughput = (1.0 - e_df) * plan.k as f64 / total;
        let delay = total / (1.0 - e_df);
        Ok(PerformancePoint {
            throughput,
            delay,
            delay_seconds: delay * params.tc,
        })
    }
}

/// E[f(z)] for z ~ Gamma(m, 1/m) (unit-mean squared Nakagami-m gain), by
/// generalized Gauss-Laguerre quadrature after the substitution u = m z.
pub fn gamma_expectation<F: Fn(f64) -> f64>(f: F, m: f64, nodes: usize) -> Result<f64> {
    check_shape(m)?;
    let rule = quadrature::gauss_laguerre_prob(m - 1.0, nodes);
    let mut acc = 0.0;
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        let val = f(u / m);
        if !val.is_finite() {
            return Err(Error::IntegrationFailure(format!(
                "non-finite integrand value {val} at z = {}",
                u / m
            )));
        }
        acc += w * val;
    }
    Ok(acc)
}

/// Two-variable version of [`gamma_expectation`] over independent gains,
/// iterating the rule on a tensor grid.
pub fn gamma_expectation2<F: Fn(f64, f64) -> f64>(f: F, m: f64, nodes: usize) -> Result<f64> {
    check_shape(m)?;
    let rule = quadrature::gauss_laguerre_prob(m - 1.0, nodes);
    let mut acc = 0.0;
    for (&u1, &w1) in rule.nodes.iter().zip(&rule.weights) {
        let mut inner = 0.0;
        for (&u2, &w2) in rule.nodes.iter().zip(&rule.weights) {
            let val = f(u1 / m, u2 / m);
            if !val.is_finite() {
                return Err(Error::IntegrationFailure(format!(
                    "non-finite integrand value {val} at z = ({}, {})",
                    u1 / m,
                    u2 / m
                )));
            }
            inner += w2 * val;
        }
        acc += w1 * inner;
    }
    Ok(acc)
}

fn check_shape(m: f64) -> Result<()> {
    if !(m.is_finite() && m >= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "m must be >= 0.5, got {m}"
        )));
    }
    Ok(())
}

fn check_inputs(plan: &BlockPlan, params: &SystemParams) -> Result<()> {
    params.validate()?;
    if plan.n == 0 || plan.k == 0 {
        return Err(Error::InvalidParameter(
            "plan requires n >= 1 and k >= 1".into(),
        ));
    }
    Ok(())
}

/// E[eps_r]: relay decoding error averaged over the source-relay fading.
pub fn expected_error_relay(plan: &BlockPlan, params: &SystemParams) -> Result<f64> {
    expected_error_relay_with(plan, params, DEFAULT_PANEL_NODES)
}

pub fn expected_error_relay_with(
    plan: &BlockPlan,
    params: &SystemParams,
    panel_nodes: usize,
) -> Result<f64> {
    Ok(expected_error_df_with(plan, params, panel_nodes)?.e_r)
}

/// E[eps_d]: destination decoding error averaged over both fading gains.
pub fn expected_error_dest(plan: &BlockPlan, params: &SystemParams) -> Result<f64> {
    expected_error_dest_with(plan, params, DEFAULT_PANEL_NODES)
}

pub fn expected_error_dest_with(
    plan: &BlockPlan,
    params: &SystemParams,
    panel_nodes: usize,
) -> Result<f64> {
    Ok(expected_error_df_with(plan, params, panel_nodes)?.e_d)
}

/// E[eps_r * eps_d]: the joint error term. Both factors see the same h, so
/// this exceeds the product of the marginal expectations.
pub fn expected_error_joint(plan: &BlockPlan, params: &SystemParams) -> Result<f64> {
    expected_error_joint_with(plan, params, DEFAULT_PANEL_NODES)
}

pub fn expected_error_joint_with(
    plan: &BlockPlan,
    params: &SystemParams,
    panel_nodes: usize,
) -> Result<f64> {
    Ok(expected_error_df_with(plan, params, panel_nodes)?.e_rd)
}

/// All four error terms of one operating point in a single traversal.
pub fn expected_error_df(plan: &BlockPlan, params: &SystemParams) -> Result<ErrorBreakdown> {
    expected_error_df_with(plan, params, DEFAULT_PANEL_NODES)
}

pub fn expected_error_df_with(
    plan: &BlockPlan,
    params: &SystemParams,
    panel_nodes: usize,
) -> Result<ErrorBreakdown> {
    check_inputs(plan, params)?;
    let (e_r, e_d, e_rd, _) = integrator::breakdown(plan, params, panel_nodes);
    ErrorBreakdown::from_raw(e_r, e_d, e_rd)
}

/// Throughput tau = (1 - E[eps_df]) * k / (2n + v) in bits per channel use.
pub fn throughput(plan: &BlockPlan, params: &SystemParams) -> Result<f64> {
    let b = expected_error_df(plan, params)?;
    Ok((1.0 - b.e_df) * plan.k as f64 / plan.total() as f64)
}

/// Average delay delta = (2n + v) / (1 - E[eps_df]) in channel uses.
///
/// E[eps_df] = 1 yields the distinguished infinite-delay error.
pub fn delay(plan: &BlockPlan, params: &SystemParams) -> Result<f64> {
    Ok(performance(plan, params)?.delay)
}

/// Throughput and delay (channel uses and seconds) of one operating point.
pub fn performance(plan: &BlockPlan, params: &SystemParams) -> Result<PerformancePoint> {
    performance_with(plan, params, DEFAULT_PANEL_NODES)
}

pub fn performance_with(
    plan: &BlockPlan,
    params: &SystemParams,
    panel_nodes: usize,
) -> Result<PerformancePoint> {
    let b = expected_error_df_with(plan, params, panel_nodes)?;
    PerformancePoint::from_error(plan, params, b.e_df)
}
