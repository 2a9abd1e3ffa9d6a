//! Block-level Monte Carlo simulation of the relay chain.
//!
//! Each block draws the two squared channel gains, decides the relay and
//! destination decoding outcomes by Bernoulli thresholding against the
//! normal-approximation error probabilities, and tracks consecutive relay
//! failure runs. Both power models are supported: the single-block
//! approximation, and exact energy accumulation where the harvest of a
//! failure run is spent in one burst.
//!
//! Blocks are processed in fixed chunks of [`CHUNK`] with one independent
//! RNG stream per chunk, so results are bit-identical for a given seed no
//! matter how many threads execute. The accumulated model's energy buffer
//! and the run-length counter are chunk-local; the trailing unfinished run
//! of each chunk is dropped, and the leading run of every chunk after the
//! first is discarded because its start is unobserved. With chunks this
//! size, the resulting truncation bias is far below Monte Carlo noise.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fbl;
use crate::model::{BlockPlan, SystemParams};

/// Blocks per RNG stream. Must stay fixed: it is part of the reproducibility
/// contract (seed + chunk layout determine every draw).
pub const CHUNK: u64 = 65536;

/// Which relay transmit power the simulation applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerModel {
    /// Spend only the current block's harvest.
    Approx,
    /// Spend the harvest accumulated over the preceding failure run too.
    Accumulated,
}

/// Simulation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Number of simulated blocks, >= 1.
    pub blocks: u64,
    /// Seed for the deterministic RNG streams.
    pub seed: u64,
    pub power_model: PowerModel,
    /// Marker for paired model comparisons. Draws are stream-aligned either
    /// way; `compare_power_models` relies on that and implies this flag.
    pub common_random_numbers: bool,
}

impl SimConfig {
    pub fn new(blocks: u64, seed: u64, power_model: PowerModel) -> Self {
        SimConfig {
            blocks,
            seed,
            power_model,
            common_random_numbers: false,
        }
    }
}

/// Empirical statistics of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    /// Empirical end-to-end block error probability.
    pub eps_df_hat: f64,
    /// Empirical relay decoding error probability.
    pub eps_r_hat: f64,
    /// Empirical probability that the relay decoded but the destination
    /// failed (so eps_df_hat = eps_r_hat + eps_d_hat).
    pub eps_d_hat: f64,
    /// (1 - eps_df_hat) * k / (2n + v).
    pub throughput_hat: f64,
    /// (2n + v) / (1 - eps_df_hat); infinite when every block failed.
    pub delay_hat: f64,
    /// 95% normal-approximation half-width on eps_df_hat.
    pub ci_halfwidth_df: f64,
    /// Counts of completed relay-failure runs by length L = 0, 1, 2, ...
    pub run_histogram: Vec<u64>,
    /// Simulated block count.
    pub blocks: u64,
    /// End-to-end error count behind eps_df_hat.
    pub df_errors: u64,
    /// Total completed runs (the histogram's sum).
    pub completed_runs: u64,
}

/// Paired outcome of running both power models on shared randomness.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelComparison {
    pub approx: SimResult,
    pub accumulated: SimResult,
    /// approx.eps_df_hat - accumulated.eps_df_hat; non-negative because the
    /// approx model's successes are a subset of the accumulated model's.
    pub diff_eps_df: f64,
}

#[derive(Default, Clone)]
struct ChunkStats {
    relay_fails: u64,
    dest_fails: u64,
    hist: Vec<u64>,
    runs: u64,
}

impl ChunkStats {
    fn record_run(&mut self, len: u64) {
        let idx = len as usize;
        if self.hist.len() <= idx {
            self.hist.resize(idx + 1, 0);
        }
        self.hist[idx] += 1;
        self.runs += 1;
    }

    fn merge(mut self, other: &ChunkStats) -> ChunkStats {
        self.relay_fails += other.relay_fails;
        self.dest_fails += other.dest_fails;
        self.runs += other.runs;
        if self.hist.len() < other.hist.len() {
            self.hist.resize(other.hist.len(), 0);
        }
        for (a, b) in self.hist.iter_mut().zip(&other.hist) {
            *a += b;
        }
        self
    }
}

/// Per-block SNR scale factors shared by both models.
struct Scales {
    r: f64,
    n: f64,
    relay: f64,
    /// gamma_d = dest * (h + buffered) * g; zero when v = 0.
    dest: f64,
}

impl Scales {
    fn new(plan: &BlockPlan, params: &SystemParams) -> Scales {
        let d1w = params.d1.powf(params.omega);
        let d2w = params.d2.powf(params.omega);
        Scales {
            r: plan.coding_rate(),
            n: plan.n as f64,
            relay: params.ps / (d1w * params.sigma2_r),
            dest: params.eta * params.ps * plan.v as f64
                / (d1w * d2w * params.sigma2_d * plan.n as f64),
        }
    }
}

fn check(plan: &BlockPlan, params: &SystemParams, config: &SimConfig) -> Result<()> {
    params.validate()?;
    if plan.n == 0 || plan.k == 0 {
        return Err(Error::InvalidParameter(
            "plan requires n >= 1 and k >= 1".into(),
        ));
    }
    if config.blocks == 0 {
        return Err(Error::InvalidParameter("blocks must be >= 1".into()));
    }
    Ok(())
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn chunk_layout(blocks: u64) -> Vec<(u64, u64)> {
    let mut chunks = Vec::new();
    let mut start = 0;
    while start < blocks {
        let len = CHUNK.min(blocks - start);
        chunks.push((chunks.len() as u64, len));
        start += len;
    }
    chunks
}

fn run_chunk(scales: &Scales, m: f64, config: &SimConfig, chunk: u64, len: u64) -> ChunkStats {
    let mut rng = chunk_rng(config.seed, chunk);
    let gain = Gamma::new(m, 1.0 / m).expect("validated shape");
    let accumulated = config.power_model == PowerModel::Accumulated;
    let mut st = ChunkStats::default();
    let mut buf = 0.0;
    let mut run_len: u64 = 0;
    // the first completed run of a later chunk may have started in the
    // previous stream; skip it so every recorded run is fully observed
    let mut skip_next_run = chunk > 0;
    for _ in 0..len {
        let h: f64 = gain.sample(&mut rng);
        let g: f64 = gain.sample(&mut rng);
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        let e_r = fbl::fbl_error_raw(scales.relay * h, scales.r, scales.n);
        if u1 < e_r {
            st.relay_fails += 1;
            run_len += 1;
            if accumulated {
                buf += h;
            }
        } else {
            if skip_next_run {
                skip_next_run = false;
            } else {
                st.record_run(run_len);
            }
            run_len = 0;
            let h_eff = if accumulated { h + buf } else { h };
            buf = 0.0;
            let e_d = fbl::fbl_error_raw(scales.dest * h_eff * g, scales.r, scales.n);
            if u2 < e_d {
                st.dest_fails += 1;
            }
        }
    }
    st
}

fn finish(plan: &BlockPlan, stats: ChunkStats, blocks: u64) -> SimResult {
    let bf = blocks as f64;
    let df_errors = stats.relay_fails + stats.dest_fails;
    let eps_df_hat = df_errors as f64 / bf;
    let eps_r_hat = stats.relay_fails as f64 / bf;
    let eps_d_hat = stats.dest_fails as f64 / bf;
    let total = plan.total() as f64;
    let throughput_hat = (1.0 - eps_df_hat) * plan.k as f64 / total;
    let delay_hat = if eps_df_hat < 1.0 {
        total / (1.0 - eps_df_hat)
    } else {
        f64::INFINITY
    };
    let ci_halfwidth_df = 1.96 * (eps_df_hat * (1.0 - eps_df_hat) / bf).sqrt();
    SimResult {
        eps_df_hat,
        eps_r_hat,
        eps_d_hat,
        throughput_hat,
        delay_hat,
        ci_halfwidth_df,
        run_histogram: stats.hist,
        blocks,
        df_errors,
        completed_runs: stats.runs,
    }
}

/// Simulates `config.blocks` transmission blocks and returns the empirical
/// error, throughput, delay and failure-run statistics.
pub fn simulate(plan: &BlockPlan, params: &SystemParams, config: &SimConfig) -> Result<SimResult> {
    check(plan, params, config)?;
    let scales = Scales::new(plan, params);
    let stats = chunk_layout(config.blocks)
        .par_iter()
        .map(|&(i, len)| run_chunk(&scales, params.m, config, i, len))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(ChunkStats::default(), |acc, s| acc.merge(&s));
    Ok(finish(plan, stats, config.blocks))
}

fn run_chunk_paired(
    scales: &Scales,
    m: f64,
    config: &SimConfig,
    chunk: u64,
    len: u64,
) -> (ChunkStats, ChunkStats) {
    let mut rng = chunk_rng(config.seed, chunk);
    let gain = Gamma::new(m, 1.0 / m).expect("validated shape");
    let mut app = ChunkStats::default();
    let mut acc = ChunkStats::default();
    let mut buf = 0.0;
    let mut run_len: u64 = 0;
    let mut skip_next_run = chunk > 0;
    for _ in 0..len {
        let h: f64 = gain.sample(&mut rng);
        let g: f64 = gain.sample(&mut rng);
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        let e_r = fbl::fbl_error_raw(scales.relay * h, scales.r, scales.n);
        if u1 < e_r {
            // the relay chain is shared, so both models fail together
            app.relay_fails += 1;
            acc.relay_fails += 1;
            run_len += 1;
            buf += h;
        } else {
            if skip_next_run {
                skip_next_run = false;
            } else {
                app.record_run(run_len);
                acc.record_run(run_len);
            }
            run_len = 0;
            let e_d_app = fbl::fbl_error_raw(scales.dest * h * g, scales.r, scales.n);
            let e_d_acc = fbl::fbl_error_raw(scales.dest * (h + buf) * g, scales.r, scales.n);
            buf = 0.0;
            let fail_app = u2 < e_d_app;
            let fail_acc = u2 < e_d_acc;
            // paired ordering: an accumulated-model failure implies an
            // approx-model failure under the shared uniform draw
            assert!(fail_app || !fail_acc, "paired ordering violated");
            if fail_app {
                app.dest_fails += 1;
            }
            if fail_acc {
                acc.dest_fails += 1;
            }
        }
    }
    (app, acc)
}

/// Runs both power models on shared randomness and reports the paired
/// difference in end-to-end error.
pub fn compare_power_models(
    plan: &BlockPlan,
    params: &SystemParams,
    config: &SimConfig,
) -> Result<ModelComparison> {
    check(plan, params, config)?;
    let scales = Scales::new(plan, params);
    let pairs = chunk_layout(config.blocks)
        .par_iter()
        .map(|&(i, len)| run_chunk_paired(&scales, params.m, config, i, len))
        .collect::<Vec<_>>();
    let (app, acc) = pairs.into_iter().fold(
        (ChunkStats::default(), ChunkStats::default()),
        |(a, b), (ca, cb)| (a.merge(&ca), b.merge(&cb)),
    );
    let approx = finish(plan, app, config.blocks);
    let accumulated = finish(plan, acc, config.blocks);
    let diff_eps_df = approx.eps_df_hat - accumulated.eps_df_hat;
    Ok(ModelComparison {
        approx,
        accumulated,
        diff_eps_df,
    })
}

/// Normalizes the failure-run histogram to a probability mass function.
pub fn empirical_run_pmf(result: &SimResult) -> Result<Vec<f64>> {
    if result.completed_runs == 0 {
        return Err(Error::EmptySimulation(
            "no completed failure runs to normalize".into(),
        ));
    }
    let total = result.completed_runs as f64;
    Ok(result
        .run_histogram
        .iter()
        .map(|&c| c as f64 / total)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis;

    fn defaults() -> SystemParams {
        SystemParams::default()
    }

    #[test]
    fn rejects_zero_blocks() {
        let plan = BlockPlan::new(100, 100, 160).unwrap();
        let cfg = SimConfig::new(0, 1, PowerModel::Approx);
        assert!(simulate(&plan, &defaults(), &cfg).is_err());
    }

    #[test]
    fn zero_power_transfer_always_fails() {
        let plan = BlockPlan::new(100, 0, 160).unwrap();
        let cfg = SimConfig::new(20_000, 7, PowerModel::Approx);
        let res = simulate(&plan, &defaults(), &cfg).unwrap();
        assert_eq!(res.eps_df_hat, 1.0);
        assert_eq!(res.throughput_hat, 0.0);
        assert!(res.delay_hat.is_infinite());
    }

    #[test]
    fn reruns_are_bit_identical() {
        let plan = BlockPlan::new(100, 200, 160).unwrap();
        let cfg = SimConfig::new(150_000, 42, PowerModel::Accumulated);
        let a = simulate(&plan, &defaults(), &cfg).unwrap();
        let b = simulate(&plan, &defaults(), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let plan = BlockPlan::new(100, 200, 160).unwrap();
        let cfg = SimConfig::new(200_000, 9, PowerModel::Accumulated);
        let p = defaults();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| simulate(&plan, &p, &cfg).unwrap());
        let multi = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| simulate(&plan, &p, &cfg).unwrap());
        assert_eq!(single, multi);
    }

    #[test]
    fn matches_quadrature_at_a_testable_point() {
        let plan = BlockPlan::new(500, 1000, 160).unwrap();
        let p = defaults();
        let cfg = SimConfig::new(1_000_000, 2024, PowerModel::Approx);
        let res = simulate(&plan, &p, &cfg).unwrap();
        let b = analysis::expected_error_df(&plan, &p).unwrap();
        assert!(
            (res.eps_df_hat - b.e_df).abs() <= 3.0 * res.ci_halfwidth_df.max(1e-9),
            "hat {:e} vs analytic {:e} (ci {:e})",
            res.eps_df_hat,
            b.e_df,
            res.ci_halfwidth_df
        );
        // consistency identities
        assert_eq!(
            res.df_errors as f64,
            (res.eps_r_hat + res.eps_d_hat) * res.blocks as f64
        );
        let k = plan.k as f64;
        assert!((res.throughput_hat * res.delay_hat - k).abs() < 1e-9 * k);
        let total: u64 = res.run_histogram.iter().sum();
        assert_eq!(total, res.completed_runs);
    }

    #[test]
    fn ci_shrinks_like_inverse_sqrt_blocks() {
        let plan = BlockPlan::new(100, 100, 160).unwrap();
        let p = defaults();
        let ci = |blocks: u64| {
            simulate(&plan, &p, &SimConfig::new(blocks, 5, PowerModel::Approx))
                .unwrap()
                .ci_halfwidth_df
        };
        let (a, b, c) = (ci(10_000), ci(100_000), ci(1_000_000));
        let s = 10f64.sqrt();
        assert!((a / b / s - 1.0).abs() < 0.2, "1e4/1e5 ratio {}", a / b);
        assert!((b / c / s - 1.0).abs() < 0.2, "1e5/1e6 ratio {}", b / c);
    }

    #[test]
    fn gamma_sampler_recovers_moments() {
        for m in [0.5, 2.0, 3.7] {
            let mut rng = chunk_rng(77, 0);
            let gain = Gamma::new(m, 1.0 / m).unwrap();
            let n = 1_000_000;
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let x: f64 = gain.sample(&mut rng);
                s1 += x;
                s2 += x * x;
            }
            let mean = s1 / n as f64;
            let var = s2 / n as f64 - mean * mean;
            let shape_hat = mean * mean / var;
            assert!((mean - 1.0).abs() < 0.01, "m={m}: mean {mean}");
            assert!(
                (shape_hat / m - 1.0).abs() < 0.05,
                "m={m}: shape {shape_hat}"
            );
        }
    }

    #[test]
    fn paired_models_agree_when_relay_never_fails() {
        // r = 0.08 at high SNR: relay errors are ~1e-30, the buffer is idle
        let plan = BlockPlan::new(2000, 500, 160).unwrap();
        let cfg = SimConfig::new(100_000, 3, PowerModel::Approx);
        let cmp = compare_power_models(&plan, &defaults(), &cfg).unwrap();
        assert_eq!(cmp.diff_eps_df, 0.0);
        assert_eq!(cmp.approx, cmp.accumulated);
    }

    #[test]
    fn paired_models_order_correctly_under_load() {
        // moderate relay failure rate so the buffer actually matters
        let plan = BlockPlan::new(100, 300, 240).unwrap();
        let cfg = SimConfig::new(400_000, 11, PowerModel::Approx);
        let cmp = compare_power_models(&plan, &defaults(), &cfg).unwrap();
        assert!(cmp.diff_eps_df >= 0.0);
        assert!(cmp.accumulated.eps_df_hat <= cmp.approx.eps_df_hat);
        // run statistics are shared
        assert_eq!(cmp.approx.run_histogram, cmp.accumulated.run_histogram);
    }

    #[test]
    fn run_pmf_normalizes_and_matches_low_error_regime() {
        // relay nearly always decodes: all mass at L = 0
        let plan = BlockPlan::new(2000, 500, 160).unwrap();
        let cfg = SimConfig::new(100_000, 13, PowerModel::Approx);
        let res = simulate(&plan, &defaults(), &cfg).unwrap();
        let pmf = empirical_run_pmf(&res).unwrap();
        let total: f64 = pmf.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(pmf[0] > 0.9999);
    }

    #[test]
    fn empty_histogram_rejected() {
        // every block fails at the relay: no run ever completes
        let plan = BlockPlan::new(100, 100, 12000).unwrap();
        let cfg = SimConfig::new(5_000, 19, PowerModel::Approx);
        let res = simulate(&plan, &defaults(), &cfg).unwrap();
        assert_eq!(res.completed_runs, 0);
        assert!(matches!(
            empirical_run_pmf(&res),
            Err(Error::EmptySimulation(_))
        ));
    }
}
