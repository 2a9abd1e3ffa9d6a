//! System parameters, the block-plan geometry of the time-switching relaying
//! protocol, and the pointwise SNR/energy/power formulas.
//!
//! A transmission block spans 2n + v channel uses: v for wireless power
//! transfer, then n per information hop. All formulas work in channel uses;
//! the channel-use duration `tc` only converts reported delays to seconds.

use crate::error::{Error, Result};

/// Physical configuration of the two-hop link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Source transmit power, joule/sec.
    pub ps: f64,
    /// Energy conversion efficiency, in (0, 1).
    pub eta: f64,
    /// Path-loss exponent, >= 1.
    pub omega: f64,
    /// Source-relay distance, normalized.
    pub d1: f64,
    /// Relay-destination distance, normalized.
    pub d2: f64,
    /// Noise variance at the relay.
    pub sigma2_r: f64,
    /// Noise variance at the destination.
    pub sigma2_d: f64,
    /// Nakagami shape factor, >= 0.5; both hops share it.
    pub m: f64,
    /// Channel-use duration in seconds.
    pub tc: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            ps: 1.0,
            eta: 0.5,
            omega: 2.7,
            d1: 1.0,
            d2: 1.0,
            sigma2_r: 0.01,
            sigma2_d: 0.01,
            m: 2.0,
            tc: 2e-6,
        }
    }
}

impl SystemParams {
    pub fn new(
        ps: f64,
        eta: f64,
        omega: f64,
        d1: f64,
        d2: f64,
        sigma2_r: f64,
        sigma2_d: f64,
        m: f64,
        tc: f64,
    ) -> Result<Self> {
        let p = SystemParams {
            ps,
            eta,
            omega,
            d1,
            d2,
            sigma2_r,
            sigma2_d,
            m,
            tc,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, msg: String) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter(msg))
            }
        }
        check(
            self.ps.is_finite() && self.ps > 0.0,
            format!("ps must be > 0, got {}", self.ps),
        )?;
        check(
            self.eta.is_finite() && self.eta > 0.0 && self.eta < 1.0,
            format!("eta must lie in (0, 1), got {}", self.eta),
        )?;
        check(
            self.omega.is_finite() && self.omega >= 1.0,
            format!("omega must be >= 1, got {}", self.omega),
        )?;
        check(
            self.d1.is_finite() && self.d1 > 0.0,
            format!("d1 must be > 0, got {}", self.d1),
        )?;
        check(
            self.d2.is_finite() && self.d2 > 0.0,
            format!("d2 must be > 0, got {}", self.d2),
        )?;
        check(
            self.sigma2_r.is_finite() && self.sigma2_r > 0.0,
            format!("sigma2_r must be > 0, got {}", self.sigma2_r),
        )?;
        check(
            self.sigma2_d.is_finite() && self.sigma2_d > 0.0,
            format!("sigma2_d must be > 0, got {}", self.sigma2_d),
        )?;
        check(
            self.m.is_finite() && self.m >= 0.5,
            format!("m must be >= 0.5, got {}", self.m),
        )?;
        check(
            self.tc.is_finite() && self.tc > 0.0,
            format!("tc must be > 0, got {}", self.tc),
        )?;
        Ok(())
    }
}

/// One operating point (n, v, k) of the block structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockPlan {
    /// Channel uses per information hop, >= 1.
    pub n: u32,
    /// Channel uses for power transfer.
    pub v: u32,
    /// Information bits per message, >= 1.
    pub k: u32,
}

impl BlockPlan {
    pub fn new(n: u32, v: u32, k: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        if k == 0 {
            return Err(Error::InvalidParameter("k must be >= 1".into()));
        }
        Ok(BlockPlan { n, v, k })
    }

    /// Total block length 2n + v in channel uses.
    pub fn total(&self) -> u64 {
        2 * self.n as u64 + self.v as u64
    }

    /// Fraction of the block reserved for power transfer, v/(2n+v).
    pub fn alpha(&self) -> f64 {
        self.v as f64 / self.total() as f64
    }

    /// Coding rate r = k/n in bits per channel use.
    pub fn coding_rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }
}

/// One realization of the two squared channel gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    /// Squared source-relay gain.
    pub h: f64,
    /// Squared relay-destination gain.
    pub g: f64,
}

/// Instantaneous SNR at the relay: ps*h / (d1^omega * sigma2_r).
pub fn snr_relay(h: f64, params: &SystemParams) -> f64 {
    params.ps * h / (params.d1.powf(params.omega) * params.sigma2_r)
}

/// Energy harvested over the power-transfer slot: eta*ps*h*v*tc / d1^omega.
pub fn harvested_energy(h: f64, plan: &BlockPlan, params: &SystemParams) -> f64 {
    params.eta * params.ps * h * plan.v as f64 * params.tc / params.d1.powf(params.omega)
}

/// Relay transmit power when only the current block's harvest is spent:
/// eta*ps*v*h / (d1^omega * n).
pub fn relay_power_approx(h: f64, plan: &BlockPlan, params: &SystemParams) -> f64 {
    params.eta * params.ps * plan.v as f64 * h / (params.d1.powf(params.omega) * plan.n as f64)
}

/// Relay transmit power with the harvest of the whole failure run spent at
/// once. `h_history` lists the gains of consecutive blocks since the relay
/// last transmitted, the final entry being the currently decoded block.
///
/// Panics if the history is empty (contract violation).
pub fn relay_power_accumulated(h_history: &[f64], plan: &BlockPlan, params: &SystemParams) -> f64 {
    assert!(
        !h_history.is_empty(),
        "relay_power_accumulated: empty history"
    );
    let sum: f64 = h_history.iter().sum();
    params.eta * params.ps * plan.v as f64 * sum / (params.d1.powf(params.omega) * plan.n as f64)
}

/// Instantaneous destination SNR in the single-block power model:
/// eta*ps*h*g*v / (d1^omega * d2^omega * sigma2_d * n).
pub fn snr_dest(h: f64, g: f64, plan: &BlockPlan, params: &SystemParams) -> f64 {
    params.eta * params.ps * h * g * plan.v as f64
        / (params.d1.powf(params.omega)
            * params.d2.powf(params.omega)
            * params.sigma2_d
            * plan.n as f64)
}

/// Destination SNR for a given relay transmit power: p_r*g / (d2^omega * sigma2_d).
pub fn snr_dest_from_power(p_r: f64, g: f64, params: &SystemParams) -> f64 {
    p_r * g / (params.d2.powf(params.omega) * params.sigma2_d)
}

/// Probability that exactly `z` consecutive relay decoding failures precede
/// the next success, for per-block error probabilities `eps_r_seq` starting
/// at the block after the last transmission.
///
/// Panics on probabilities outside [0, 1] or a sequence shorter than z + 1
/// (contract violations).
pub fn pmf_failure_run(z: usize, eps_r_seq: &[f64]) -> f64 {
    assert!(
        eps_r_seq.len() > z,
        "pmf_failure_run: sequence of length {} cannot cover z = {z}",
        eps_r_seq.len()
    );
    for (i, &p) in eps_r_seq.iter().take(z + 1).enumerate() {
        assert!(
            (0.0..=1.0).contains(&p),
            "pmf_failure_run: probability out of range at index {i}: {p}"
        );
    }
    let mut prod = 1.0;
    for &p in &eps_r_seq[..z] {
        prod *= p;
    }
    prod * (1.0 - eps_r_seq[z])
}

/// Failure-run PMF for a constant per-block error probability: the geometric
/// law (1-p) p^z, returned for z = 0..=z_max.
pub fn geometric_run_pmf(p: f64, z_max: usize) -> Vec<f64> {
    assert!(
        (0.0..=1.0).contains(&p),
        "geometric_run_pmf: p out of range: {p}"
    );
    let mut out = Vec::with_capacity(z_max + 1);
    let mut pz = 1.0;
    for _ in 0..=z_max {
        out.push((1.0 - p) * pz);
        pz *= p;
    }
    out
}
