//! The five subcommands. Each one resolves its inputs from the effective
//! configuration, runs the corresponding library routines, prints a short
//! report to stdout, and (when an output directory is in play) writes CSV
//! tables plus a manifest that reproduces the run.

use std::path::Path;

use rayon::prelude::*;

use crate::analysis::{expected_error_df_with, ErrorBreakdown, PerformancePoint};
use crate::error::Error;
use crate::model::{geometric_run_pmf, BlockPlan, SystemParams};
use crate::montecarlo::{
    compare_power_models, empirical_run_pmf, simulate, PowerModel, SimConfig, SimResult,
};
use crate::optimize::{
    best_alpha_for_n_with, best_blocklength_with, fixed_budget_sweep_with, min_delay_with,
    min_n_for_target_with, relay_position_sweep_with, OptimumPoint,
};

use super::config::{ExperimentConfig, FigureId, ModelArg, OptimizeMode, PlanSection, SweepCoord};
use super::output::{eps_label, opt, sci, OutDir};
use super::CliError;

/// The normal approximation behind every error figure assumes blocks of at
/// least roughly this many channel uses per hop.
const SHORT_BLOCK_WARNING: u32 = 100;

/// Below this many expected error events the empirical error rate is mostly
/// noise.
const RARE_EVENT_THRESHOLD: f64 = 30.0;

fn warn_short_block(n: u32) {
    if n < SHORT_BLOCK_WARNING {
        eprintln!(
            "warning: n = {n} is below {SHORT_BLOCK_WARNING} channel uses; the \
             finite-blocklength approximation is only calibrated for longer blocks"
        );
    }
}

fn plan_of(p: &PlanSection) -> Result<BlockPlan, CliError> {
    BlockPlan::new(p.n, p.v, p.k).map_err(CliError::from)
}

fn breakdown_at(
    plan: &BlockPlan,
    params: &SystemParams,
    nodes: usize,
) -> Result<(ErrorBreakdown, Option<PerformancePoint>), CliError> {
    let b = expected_error_df_with(plan, params, nodes)?;
    let perf = if b.e_df < 1.0 {
        Some(PerformancePoint::from_error(plan, params, b.e_df)?)
    } else {
        None
    };
    Ok((b, perf))
}

/// Cells for an optional optimum: feasible flag, v*, alpha*, tau*, delta*,
/// delta in seconds, eps_df.
fn star_cells(p: Option<&OptimumPoint>, tc: f64) -> Vec<String> {
    match p {
        Some(p) => vec![
            "1".into(),
            p.v.to_string(),
            sci(p.alpha),
            sci(p.tau),
            sci(p.delta),
            sci(p.delta * tc),
            sci(p.eps_df),
        ],
        None => {
            let mut row = vec!["0".to_string()];
            row.extend(std::iter::repeat_n(String::new(), 6));
            row
        }
    }
}

const STAR_HEADER: [&str; 7] = [
    "feasible",
    "v_star",
    "alpha_star",
    "tau_star",
    "delta_star",
    "delta_seconds",
    "eps_df",
];

pub fn cmd_eval(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<(), CliError> {
    let spec = cfg.plan_required()?;
    let params = cfg.params()?;
    let nodes = cfg.numerics.nodes;
    warn_short_block(spec.n);
    let plan = plan_of(&spec)?;
    let (b, perf) = breakdown_at(&plan, &params, nodes)?;

    println!("n = {}", spec.n);
    println!("v = {}", spec.v);
    println!("k = {}", spec.k);
    println!("alpha = {}", sci(plan.alpha()));
    println!("rate = {}", sci(plan.coding_rate()));
    println!("e_r = {}", sci(b.e_r));
    println!("e_d = {}", sci(b.e_d));
    println!("e_rd = {}", sci(b.e_rd));
    println!("e_df = {}", sci(b.e_df));
    match &perf {
        Some(p) => {
            println!("tau = {}", sci(p.throughput));
            println!("delta = {}", sci(p.delay));
            println!("delta_seconds = {}", sci(p.delay_seconds));
            println!("tau_times_delta = {}", sci(p.throughput * p.delay));
        }
        None => {
            println!("tau = {}", sci(0.0));
            println!("delta = infinite (block error probability is 1)");
        }
    }

    if let Some(dir) = out {
        let mut out = OutDir::create(dir)?;
        let header = [
            "n",
            "v",
            "k",
            "alpha",
            "rate",
            "e_r",
            "e_d",
            "e_rd",
            "e_df",
            "tau",
            "delta",
            "delta_seconds",
        ];
        let row = vec![
            spec.n.to_string(),
            spec.v.to_string(),
            spec.k.to_string(),
            sci(plan.alpha()),
            sci(plan.coding_rate()),
            sci(b.e_r),
            sci(b.e_d),
            sci(b.e_rd),
            sci(b.e_df),
            opt(perf.as_ref().map(|p| p.throughput)),
            opt(perf.as_ref().map(|p| p.delay)),
            opt(perf.as_ref().map(|p| p.delay_seconds)),
        ];
        out.write_csv("eval.csv", &header, &[row])?;
        out.write_manifest("eval", &[], cfg)?;
    }
    Ok(())
}

pub fn cmd_sweep(cfg: &ExperimentConfig, out_dir: &Path) -> Result<(), CliError> {
    let sweep = cfg
        .sweep
        .ok_or_else(|| CliError::Config("sweep needs a [sweep] section".into()))?;
    let spec = cfg.plan_required()?;
    let params = cfg.params()?;
    let nodes = cfg.numerics.nodes;
    if !(sweep.step > 0.0) || sweep.stop < sweep.start {
        return Err(CliError::Config(
            "sweep: need start <= stop and step > 0".into(),
        ));
    }

    let count = ((sweep.stop - sweep.start) / sweep.step + 1e-9).floor() as usize + 1;
    let coords: Vec<f64> = (0..count)
        .map(|i| sweep.start + i as f64 * sweep.step)
        .collect();
    let integral = |x: f64, what: &str| -> Result<u32, CliError> {
        if x < 0.0 || x.fract() != 0.0 || x > u32::MAX as f64 {
            return Err(CliError::Config(format!(
                "sweep: {what} values must be non-negative integers, got {x}"
            )));
        }
        Ok(x as u32)
    };

    let rows: Vec<Vec<String>> = coords
        .par_iter()
        .map(|&c| -> Result<Vec<String>, CliError> {
            let (plan, local) = match sweep.coord {
                SweepCoord::V => (BlockPlan::new(spec.n, integral(c, "v")?, spec.k)?, params),
                SweepCoord::N => {
                    let n = integral(c, "n")?;
                    if n == 0 {
                        return Err(CliError::Config("sweep: n must be >= 1".into()));
                    }
                    (BlockPlan::new(n, spec.v, spec.k)?, params)
                }
                SweepCoord::D1 => {
                    if !(c > 0.0 && c < sweep.d_total) {
                        return Err(CliError::Config(format!(
                            "sweep: d1 = {c} must lie strictly inside (0, {})",
                            sweep.d_total
                        )));
                    }
                    let local = SystemParams {
                        d1: c,
                        d2: sweep.d_total - c,
                        ..params
                    };
                    local.validate()?;
                    (BlockPlan::new(spec.n, spec.v, spec.k)?, local)
                }
            };
            let (b, perf) = breakdown_at(&plan, &local, nodes)?;
            let coord_cell = match sweep.coord {
                SweepCoord::D1 => c.to_string(),
                _ => (c as u64).to_string(),
            };
            Ok(vec![
                coord_cell,
                plan.n.to_string(),
                plan.v.to_string(),
                plan.k.to_string(),
                sci(b.e_r),
                sci(b.e_d),
                sci(b.e_rd),
                sci(b.e_df),
                opt(perf.as_ref().map(|p| p.throughput)),
                opt(perf.as_ref().map(|p| p.delay)),
                opt(perf.as_ref().map(|p| p.delay_seconds)),
            ])
        })
        .collect::<Result<_, _>>()?;

    let mut out = OutDir::create(out_dir)?;
    let header = [
        "coord",
        "n",
        "v",
        "k",
        "e_r",
        "e_d",
        "e_rd",
        "e_df",
        "tau",
        "delta",
        "delta_seconds",
    ];
    out.write_csv("sweep.csv", &header, &rows)?;
    out.write_manifest("sweep", &[], cfg)?;
    println!(
        "wrote {} rows to {}",
        rows.len(),
        out.path().join("sweep.csv").display()
    );
    Ok(())
}

pub fn cmd_optimize(cfg: &ExperimentConfig, out_dir: &Path) -> Result<(), CliError> {
    let opt_cfg = cfg
        .optimize
        .ok_or_else(|| CliError::Config("optimize needs an [optimize] section".into()))?;
    let params = cfg.params()?;
    let nodes = cfg.numerics.nodes;
    let grid = cfg.grid_or_default()?;
    let n_grid = grid.n_grid();
    let v_grid = grid.v_grid();
    let k = opt_cfg.k;
    let eps0 = opt_cfg.eps0;
    let tc = params.tc;

    let mut out = OutDir::create(out_dir)?;
    let mut best: Option<OptimumPoint> = None;

    match opt_cfg.mode {
        OptimizeMode::Alpha => {
            let n = opt_cfg.n.ok_or_else(|| {
                CliError::Config("optimize: alpha mode needs n under [optimize]".into())
            })?;
            best = best_alpha_for_n_with(n, k, eps0, &params, &v_grid, nodes)?;
        }
        OptimizeMode::Blocklength | OptimizeMode::MinDelay => {
            let search = best_blocklength_with(k, eps0, &params, &n_grid, &v_grid, nodes)?;
            if let Some(p) = &search.best {
                // min-delay is the same search: delta = k / tau at fixed k
                debug_assert!((p.tau * p.delta - k as f64).abs() <= 1e-9 * k as f64);
            }
            let mut header = vec!["n"];
            header.extend_from_slice(&STAR_HEADER);
            let rows: Vec<Vec<String>> = search
                .profile
                .iter()
                .map(|(n, p)| {
                    let mut row = vec![n.to_string()];
                    row.extend(star_cells(p.as_ref(), tc));
                    row
                })
                .collect();
            out.write_csv("profile.csv", &header, &rows)?;
            best = search.best;
        }
        OptimizeMode::MinN => {
            let v = opt_cfg.v.ok_or_else(|| {
                CliError::Config("optimize: min-n mode needs v under [optimize]".into())
            })?;
            let found =
                min_n_for_target_with(v, k, eps0, &params, (grid.n_min, grid.n_max), nodes)?;
            if let Some(n) = found {
                let plan = BlockPlan::new(n, v, k)?;
                let (b, perf) = breakdown_at(&plan, &params, nodes)?;
                let perf = perf.expect("feasible point has finite delay");
                best = Some(OptimumPoint {
                    n,
                    v,
                    alpha: plan.alpha(),
                    tau: perf.throughput,
                    delta: perf.delay,
                    eps_df: b.e_df,
                });
            }
        }
    }

    let verdict = if best.is_some() {
        "feasible"
    } else {
        "infeasible"
    };
    let mode_name = match opt_cfg.mode {
        OptimizeMode::Alpha => "alpha",
        OptimizeMode::Blocklength => "blocklength",
        OptimizeMode::MinN => "min-n",
        OptimizeMode::MinDelay => "min-delay",
    };
    if let Some(p) = &best {
        let header = [
            "mode",
            "k",
            "eps0",
            "n",
            "v",
            "alpha",
            "tau",
            "delta",
            "delta_seconds",
            "eps_df",
        ];
        let row = vec![
            mode_name.to_string(),
            k.to_string(),
            sci(eps0),
            p.n.to_string(),
            p.v.to_string(),
            sci(p.alpha),
            sci(p.tau),
            sci(p.delta),
            sci(p.delta * tc),
            sci(p.eps_df),
        ];
        out.write_csv("optimum.csv", &header, &[row])?;
    }
    out.write_manifest("optimize", &[("result", verdict.into())], cfg)?;

    match &best {
        Some(p) => {
            println!(
                "optimum: n = {}, v = {}, tau = {}, delta = {}, eps_df = {}",
                p.n,
                p.v,
                sci(p.tau),
                sci(p.delta),
                sci(p.eps_df)
            );
            Ok(())
        }
        None => Err(CliError::Infeasible(format!(
            "no grid point meets eps0 = {eps0} for k = {k}"
        ))),
    }
}

pub fn cmd_simulate(cfg: &ExperimentConfig, out_dir: &Path) -> Result<(), CliError> {
    let spec = cfg.plan_required()?;
    let params = cfg.params()?;
    let nodes = cfg.numerics.nodes;
    warn_short_block(spec.n);
    let plan = plan_of(&spec)?;
    let (analytic, a_perf) = breakdown_at(&plan, &params, nodes)?;

    let expected_errors = cfg.sim.blocks as f64 * analytic.e_df;
    let rare = expected_errors < RARE_EVENT_THRESHOLD;
    if rare {
        eprintln!(
            "warning: rare-event regime: about {expected_errors:.1} errors expected in \
             {} blocks; the empirical error rate will be noisy",
            cfg.sim.blocks
        );
    }

    let both = cfg.sim.model == ModelArg::Both;
    let sim_cfg = SimConfig {
        blocks: cfg.sim.blocks,
        seed: cfg.sim.seed,
        power_model: match cfg.sim.model {
            ModelArg::Accumulated => PowerModel::Accumulated,
            _ => PowerModel::Approx,
        },
        common_random_numbers: both,
    };

    let results: Vec<(&str, SimResult, Option<f64>)> = if both {
        let cmp = compare_power_models(&plan, &params, &sim_cfg)?;
        vec![
            ("approx", cmp.approx, Some(cmp.diff_eps_df)),
            ("accumulated", cmp.accumulated, Some(cmp.diff_eps_df)),
        ]
    } else {
        let name = match sim_cfg.power_model {
            PowerModel::Approx => "approx",
            PowerModel::Accumulated => "accumulated",
        };
        vec![(name, simulate(&plan, &params, &sim_cfg)?, None)]
    };

    for (name, r, diff) in &results {
        println!("model = {name}");
        println!("blocks = {}", r.blocks);
        println!("seed = {}", cfg.sim.seed);
        println!("eps_df_hat = {}", sci(r.eps_df_hat));
        println!("eps_r_hat = {}", sci(r.eps_r_hat));
        println!("eps_d_hat = {}", sci(r.eps_d_hat));
        println!("ci95_halfwidth = {}", sci(r.ci_halfwidth_df));
        println!("analytic_eps_df = {}", sci(analytic.e_df));
        if let Some(d) = diff {
            println!("diff_eps_df = {}", sci(*d));
        }
        println!("rare_event = {rare}");
    }

    let mut out = OutDir::create(out_dir)?;
    let header = [
        "model",
        "blocks",
        "seed",
        "eps_df_hat",
        "eps_r_hat",
        "eps_d_hat",
        "ci_halfwidth_df",
        "throughput_hat",
        "delay_hat",
        "analytic_eps_df",
        "analytic_eps_r",
        "analytic_eps_d",
        "analytic_tau",
        "analytic_delta",
        "diff_eps_df",
    ];
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|(name, r, diff)| {
            vec![
                name.to_string(),
                r.blocks.to_string(),
                cfg.sim.seed.to_string(),
                sci(r.eps_df_hat),
                sci(r.eps_r_hat),
                sci(r.eps_d_hat),
                sci(r.ci_halfwidth_df),
                sci(r.throughput_hat),
                sci(r.delay_hat),
                sci(analytic.e_df),
                sci(analytic.e_r),
                sci(analytic.e_d),
                opt(a_perf.as_ref().map(|p| p.throughput)),
                opt(a_perf.as_ref().map(|p| p.delay)),
                opt(*diff),
            ]
        })
        .collect();
    out.write_csv("sim.csv", &header, &rows)?;

    let mut hist_rows: Vec<Vec<String>> = Vec::new();
    for (name, r, _) in &results {
        if r.completed_runs == 0 {
            continue;
        }
        let pmf = empirical_run_pmf(r)?;
        let analytic_pmf = geometric_run_pmf(analytic.e_r, pmf.len().saturating_sub(1));
        for (z, (&count, &p_hat)) in r.run_histogram.iter().zip(&pmf).enumerate() {
            hist_rows.push(vec![
                name.to_string(),
                z.to_string(),
                count.to_string(),
                sci(p_hat),
                sci(analytic_pmf[z]),
            ]);
        }
    }
    out.write_csv(
        "sim_runs.csv",
        &[
            "model",
            "run_length",
            "count",
            "empirical_pmf",
            "analytic_pmf",
        ],
        &hist_rows,
    )?;
    out.write_manifest("simulate", &[("rare_event", rare.to_string())], cfg)?;
    Ok(())
}

pub fn cmd_figure(id: FigureId, cfg: &ExperimentConfig, out_dir: &Path) -> Result<(), CliError> {
    let params = cfg.params()?;
    let nodes = cfg.numerics.nodes;
    let grid = cfg.grid_or_default()?;
    let fig = cfg
        .figure
        .as_ref()
        .expect("figure preset applied before dispatch")
        .clone();
    let tc = params.tc;
    let mut out = OutDir::create(out_dir)?;
    let mut notes: Vec<(&str, String)> = vec![("figure", id.name().to_string())];

    let need = |cond: bool, what: &str| -> Result<(), CliError> {
        if cond {
            Ok(())
        } else {
            Err(CliError::Config(format!("figure {}: {what}", id.name())))
        }
    };

    match id {
        // tau* (top) and alpha* (bottom) against blocklength, one curve per
        // (k, eps0) pair
        FigureId::Fig2 => {
            need(!fig.k_list.is_empty(), "k_list must not be empty")?;
            need(!fig.eps0_list.is_empty(), "eps0_list must not be empty")?;
            let n_grid = grid.n_grid();
            let v_grid = grid.v_grid();
            let mut header = vec!["n"];
            header.extend_from_slice(&STAR_HEADER);
            for &k in &fig.k_list {
                for &eps0 in &fig.eps0_list {
                    let search = best_blocklength_with(k, eps0, &params, &n_grid, &v_grid, nodes)?;
                    let rows: Vec<Vec<String>> = search
                        .profile
                        .iter()
                        .map(|(n, p)| {
                            let mut row = vec![n.to_string()];
                            row.extend(star_cells(p.as_ref(), tc));
                            row
                        })
                        .collect();
                    let name = format!("fig2_k{k}_eps{}.csv", eps_label(eps0));
                    out.write_csv(&name, &header, &rows)?;
                }
            }
        }
        // minimum n against v, with the optimum operating points marked in a
        // sidecar table
        FigureId::Fig3 => {
            need(!fig.k_list.is_empty(), "k_list must not be empty")?;
            need(!fig.eps0_list.is_empty(), "eps0_list must not be empty")?;
            let k = fig.k_list[0];
            let v_grid = grid.v_grid();
            let n_grid = grid.n_grid();
            let header = [
                "v",
                "feasible",
                "n_min",
                "total",
                "tau",
                "delta",
                "delta_seconds",
                "eps_df",
            ];
            let mut optima_rows: Vec<Vec<String>> = Vec::new();
            for &eps0 in &fig.eps0_list {
                let rows: Vec<Vec<String>> = v_grid
                    .par_iter()
                    .map(|&v| -> Result<Vec<String>, CliError> {
                        let found = min_n_for_target_with(
                            v,
                            k,
                            eps0,
                            &params,
                            (grid.n_min, grid.n_max),
                            nodes,
                        )?;
                        Ok(match found {
                            Some(n) => {
                                let plan = BlockPlan::new(n, v, k)?;
                                let (b, perf) = breakdown_at(&plan, &params, nodes)?;
                                vec![
                                    v.to_string(),
                                    "1".into(),
                                    n.to_string(),
                                    plan.total().to_string(),
                                    opt(perf.as_ref().map(|p| p.throughput)),
                                    opt(perf.as_ref().map(|p| p.delay)),
                                    opt(perf.as_ref().map(|p| p.delay_seconds)),
                                    sci(b.e_df),
                                ]
                            }
                            None => {
                                let mut row = vec![v.to_string(), "0".into()];
                                row.extend(std::iter::repeat_n(String::new(), 6));
                                row
                            }
                        })
                    })
                    .collect::<Result<_, _>>()?;
                let name = format!("fig3_eps{}.csv", eps_label(eps0));
                out.write_csv(&name, &header, &rows)?;

                let search = best_blocklength_with(k, eps0, &params, &n_grid, &v_grid, nodes)?;
                let mut row = vec![sci(eps0), k.to_string()];
                match search.best {
                    Some(p) => {
                        row.push(p.n.to_string());
                        row.extend(star_cells(Some(&p), tc));
                    }
                    None => {
                        row.push(String::new());
                        row.extend(star_cells(None, tc));
                    }
                }
                optima_rows.push(row);
            }
            let mut optima_header = vec!["eps0", "k", "n_star"];
            optima_header.extend_from_slice(&STAR_HEADER);
            out.write_csv("fig3_optima.csv", &optima_header, &optima_rows)?;
        }
        // minimum delay against message size, one curve per eps0
        FigureId::Fig4a => {
            need(!fig.eps0_list.is_empty(), "eps0_list must not be empty")?;
            let n_grid = grid.n_grid();
            let v_grid = grid.v_grid();
            let k_grid: Vec<u32> = (fig.k_min..=fig.k_max)
                .step_by(fig.k_step as usize)
                .collect();
            let mut header = vec!["k"];
            header.extend_from_slice(&STAR_HEADER);
            for &eps0 in &fig.eps0_list {
                let rows: Vec<Vec<String>> = k_grid
                    .par_iter()
                    .map(|&k| -> Result<Vec<String>, CliError> {
                        let best = min_delay_with(k, eps0, &params, &n_grid, &v_grid, nodes)?;
                        let mut row = vec![k.to_string()];
                        row.extend(star_cells(best.as_ref(), tc));
                        Ok(row)
                    })
                    .collect::<Result<_, _>>()?;
                let name = format!("fig4a_eps{}.csv", eps_label(eps0));
                out.write_csv(&name, &header, &rows)?;
            }
        }
        // minimum delay against relay position, one curve per eps0
        FigureId::Fig4b => {
            need(!fig.eps0_list.is_empty(), "eps0_list must not be empty")?;
            need(!fig.k_list.is_empty(), "k_list must not be empty")?;
            need(
                fig.d1_step > 0.0 && fig.d1_min > 0.0 && fig.d1_max < fig.d_total,
                "need 0 < d1_min <= d1_max < d_total and d1_step > 0",
            )?;
            let k = fig.k_list[0];
            let n_grid = grid.n_grid();
            let v_grid = grid.v_grid();
            let steps = ((fig.d1_max - fig.d1_min) / fig.d1_step + 1e-9).floor() as usize;
            let d1_grid: Vec<f64> = (0..=steps)
                .map(|i| fig.d1_min + i as f64 * fig.d1_step)
                .collect();
            let mut header = vec!["d1"];
            header.extend_from_slice(&STAR_HEADER);
            header.push("n_star");
            for &eps0 in &fig.eps0_list {
                let rows_data = relay_position_sweep_with(
                    k,
                    eps0,
                    &params,
                    fig.d_total,
                    &d1_grid,
                    &n_grid,
                    &v_grid,
                    nodes,
                )?;
                let rows: Vec<Vec<String>> = rows_data
                    .iter()
                    .map(|r| {
                        let mut row = vec![r.coord.to_string()];
                        match (&r.plan, &r.perf, &r.breakdown) {
                            (Some(plan), Some(perf), Some(b)) => {
                                row.push("1".into());
                                row.push(plan.v.to_string());
                                row.push(sci(plan.alpha()));
                                row.push(sci(perf.throughput));
                                row.push(sci(perf.delay));
                                row.push(sci(perf.delay_seconds));
                                row.push(sci(b.e_df));
                                row.push(plan.n.to_string());
                            }
                            _ => {
                                row.push("0".into());
                                row.extend(std::iter::repeat_n(String::new(), 7));
                            }
                        }
                        row
                    })
                    .collect();
                let name = format!("fig4b_eps{}.csv", eps_label(eps0));
                out.write_csv(&name, &header, &rows)?;
            }
        }
        // error probability against v under a fixed block budget, one curve
        // per message size
        FigureId::Fig5 => {
            need(!fig.k_list.is_empty(), "k_list must not be empty")?;
            need(fig.total >= 4, "total must be at least 4 channel uses")?;
            need(fig.v_step >= 1, "v_step must be >= 1")?;
            if fig.total > u32::MAX as u64 {
                return Err(CliError::Config(
                    "figure fig5: total exceeds the supported block budget".into(),
                ));
            }
            let v_grid: Vec<u32> = (0..=(fig.total - 2) as u32)
                .step_by(fig.v_step as usize)
                .collect();
            let header = [
                "v",
                "n",
                "alpha",
                "e_r",
                "e_d",
                "e_rd",
                "e_df",
                "tau",
                "delta",
                "delta_seconds",
            ];
            let mut best_parts: Vec<String> = Vec::new();
            for &k in &fig.k_list {
                let sweep = fixed_budget_sweep_with(fig.total, k, &params, &v_grid, nodes)?;
                let rows: Vec<Vec<String>> = sweep
                    .rows
                    .iter()
                    .map(|r| {
                        let plan = r.plan.expect("budget rows always carry a plan");
                        let b = r.breakdown.expect("budget rows always carry a breakdown");
                        vec![
                            plan.v.to_string(),
                            plan.n.to_string(),
                            sci(plan.alpha()),
                            sci(b.e_r),
                            sci(b.e_d),
                            sci(b.e_rd),
                            sci(b.e_df),
                            opt(r.perf.as_ref().map(|p| p.throughput)),
                            opt(r.perf.as_ref().map(|p| p.delay)),
                            opt(r.perf.as_ref().map(|p| p.delay_seconds)),
                        ]
                    })
                    .collect();
                let name = format!("fig5_k{k}.csv");
                out.write_csv(&name, &header, &rows)?;
                best_parts.push(format!("k{k}:{}", sweep.best_v));
            }
            notes.push(("best_v", best_parts.join(" ")));
        }
    }

    out.write_manifest("figure", &notes, cfg)?;
    for f in out.files() {
        println!("wrote {}", out.path().join(f).display());
    }
    Ok(())
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::EmptyGrid | Error::BudgetParity { .. } => {
                CliError::Config(e.to_string())
            }
            Error::IntegrationFailure(_) | Error::EmptySimulation(_) | Error::InfiniteDelay => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}
