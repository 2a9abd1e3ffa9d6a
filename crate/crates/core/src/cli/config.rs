//! Experiment configuration: plain-text `key = value` sections with every
//! physical parameter named explicitly, so a config file is a complete,
//! auditable record of an experiment.
//!
//! Loading is two-layered: a raw layer where every field is optional (and
//! unknown keys are rejected with the parser's line-anchored diagnostic),
//! then an effective layer where defaults and command-line overrides have
//! been applied. The effective layer serializes back to the same format,
//! which is how manifests embed the exact configuration they ran with; a
//! manifest can therefore be fed back in as `--config` verbatim.

use std::fs;
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::analysis::DEFAULT_PANEL_NODES;
use crate::model::SystemParams;

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelArg {
    Approx,
    Accumulated,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4a,
    Fig4b,
    Fig5,
}

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4a => "fig4a",
            FigureId::Fig4b => "fig4b",
            FigureId::Fig5 => "fig5",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizeMode {
    /// Best power-transfer share at fixed n.
    Alpha,
    /// Joint search over n and v.
    Blocklength,
    /// Smallest n meeting the target at fixed v.
    MinN,
    /// Same search as blocklength; reported as delay.
    MinDelay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepCoord {
    V,
    N,
    D1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemSection {
    pub ps: f64,
    pub eta: f64,
    pub omega: f64,
    pub d1: f64,
    pub d2: f64,
    pub sigma2_r: f64,
    pub sigma2_d: f64,
    pub m: f64,
    pub tc: f64,
}

impl Default for SystemSection {
    fn default() -> Self {
        let p = SystemParams::default();
        SystemSection {
            ps: p.ps,
            eta: p.eta,
            omega: p.omega,
            d1: p.d1,
            d2: p.d2,
            sigma2_r: p.sigma2_r,
            sigma2_d: p.sigma2_d,
            m: p.m,
            tc: p.tc,
        }
    }
}

impl SystemSection {
    pub fn params(&self) -> Result<SystemParams, CliError> {
        SystemParams::new(
            self.ps,
            self.eta,
            self.omega,
            self.d1,
            self.d2,
            self.sigma2_r,
            self.sigma2_d,
            self.m,
            self.tc,
        )
        .map_err(CliError::from)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NumericsSection {
    /// Nodes per quadrature panel.
    pub nodes: usize,
}

impl Default for NumericsSection {
    fn default() -> Self {
        NumericsSection {
            nodes: DEFAULT_PANEL_NODES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSection {
    pub n: u32,
    pub v: u32,
    pub k: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridSection {
    pub n_min: u32,
    pub n_max: u32,
    pub n_step: u32,
    pub v_min: u32,
    pub v_max: u32,
    pub v_step: u32,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            n_min: 100,
            n_max: 2000,
            n_step: 25,
            v_min: 0,
            v_max: 10000,
            v_step: 50,
        }
    }
}

impl GridSection {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.n_min == 0 || self.n_min > self.n_max || self.n_step == 0 {
            return Err(CliError::Config(format!(
                "grid: need 1 <= n_min <= n_max and n_step >= 1, got n_min={} n_max={} n_step={}",
                self.n_min, self.n_max, self.n_step
            )));
        }
        if self.v_min > self.v_max || self.v_step == 0 {
            return Err(CliError::Config(format!(
                "grid: need v_min <= v_max and v_step >= 1, got v_min={} v_max={} v_step={}",
                self.v_min, self.v_max, self.v_step
            )));
        }
        Ok(())
    }

    pub fn n_grid(&self) -> Vec<u32> {
        (self.n_min..=self.n_max)
            .step_by(self.n_step as usize)
            .collect()
    }

    pub fn v_grid(&self) -> Vec<u32> {
        (self.v_min..=self.v_max)
            .step_by(self.v_step as usize)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSection {
    pub mode: OptimizeMode,
    pub eps0: f64,
    pub k: u32,
    /// Fixed n for alpha mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    /// Fixed v for min-n mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<u32>,
}

fn default_d_total() -> f64 {
    2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub coord: SweepCoord,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    /// Source-destination distance for d1 sweeps; d2 = d_total - d1.
    #[serde(default = "default_d_total")]
    pub d_total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimSection {
    pub blocks: u64,
    pub seed: u64,
    pub model: ModelArg,
}

impl Default for SimSection {
    fn default() -> Self {
        SimSection {
            blocks: 1_000_000,
            seed: 1,
            model: ModelArg::Approx,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureSection {
    pub eps0_list: Vec<f64>,
    pub k_list: Vec<u32>,
    /// Fixed block budget 2n + v for fig5.
    pub total: u64,
    /// Step of the v coordinate for fig5.
    pub v_step: u32,
    /// Message-size grid for fig4a.
    pub k_min: u32,
    pub k_max: u32,
    pub k_step: u32,
    /// Relay-position grid for fig4b.
    pub d1_min: f64,
    pub d1_max: f64,
    pub d1_step: f64,
    pub d_total: f64,
}

/// The fully resolved configuration a command runs with. Serializing it
/// yields a config file that reproduces the run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub system: SystemSection,
    pub numerics: NumericsSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plan: Option<PlanSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    pub sim: SimSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub figure: Option<FigureSection>,
}

impl ExperimentConfig {
    pub fn params(&self) -> Result<SystemParams, CliError> {
        self.system.params()
    }

    pub fn plan_required(&self) -> Result<PlanSection, CliError> {
        self.plan.ok_or_else(|| {
            CliError::Config("this command needs a [plan] section with n, v, k".into())
        })
    }

    pub fn grid_or_default(&self) -> Result<GridSection, CliError> {
        let g = self.grid.unwrap_or_default();
        g.validate()?;
        Ok(g)
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    ps: Option<f64>,
    eta: Option<f64>,
    omega: Option<f64>,
    d1: Option<f64>,
    d2: Option<f64>,
    sigma2_r: Option<f64>,
    sigma2_d: Option<f64>,
    m: Option<f64>,
    tc: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNumerics {
    nodes: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    n_min: Option<u32>,
    n_max: Option<u32>,
    n_step: Option<u32>,
    v_min: Option<u32>,
    v_max: Option<u32>,
    v_step: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSim {
    blocks: Option<u64>,
    seed: Option<u64>,
    model: Option<ModelArg>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFigure {
    eps0_list: Option<Vec<f64>>,
    k_list: Option<Vec<u32>>,
    total: Option<u64>,
    v_step: Option<u32>,
    k_min: Option<u32>,
    k_max: Option<u32>,
    k_step: Option<u32>,
    d1_min: Option<f64>,
    d1_max: Option<f64>,
    d1_step: Option<f64>,
    d_total: Option<f64>,
}

/// A parsed config file before defaults are applied. The `manifest` table is
/// accepted and ignored so a previously emitted manifest is itself a valid
/// config.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[allow(dead_code)]
    manifest: Option<toml::Table>,
    system: Option<RawSystem>,
    numerics: Option<RawNumerics>,
    plan: Option<PlanSection>,
    grid: Option<RawGrid>,
    optimize: Option<OptimizeSection>,
    sweep: Option<SweepSection>,
    sim: Option<RawSim>,
    figure: Option<RawFigure>,
}

pub fn load_raw(path: Option<&Path>) -> Result<RawConfig, CliError> {
    let Some(path) = path else {
        return Ok(RawConfig::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Command-line overrides that take precedence over the file.
#[derive(Debug, Default, Clone, Copy)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub nodes: Option<usize>,
    pub blocks: Option<u64>,
    pub model: Option<ModelArg>,
}

pub fn resolve(raw: RawConfig, over: &Overrides) -> Result<ExperimentConfig, CliError> {
    let sd = SystemSection::default();
    let rs = raw.system.unwrap_or_default();
    let system = SystemSection {
        ps: rs.ps.unwrap_or(sd.ps),
        eta: rs.eta.unwrap_or(sd.eta),
        omega: rs.omega.unwrap_or(sd.omega),
        d1: rs.d1.unwrap_or(sd.d1),
        d2: rs.d2.unwrap_or(sd.d2),
        sigma2_r: rs.sigma2_r.unwrap_or(sd.sigma2_r),
        sigma2_d: rs.sigma2_d.unwrap_or(sd.sigma2_d),
        m: rs.m.unwrap_or(sd.m),
        tc: rs.tc.unwrap_or(sd.tc),
    };
    system.params()?;

    let nodes = over
        .nodes
        .or(raw.numerics.unwrap_or_default().nodes)
        .unwrap_or(DEFAULT_PANEL_NODES);
    if !(2..=512).contains(&nodes) {
        return Err(CliError::Config(format!(
            "numerics: nodes must lie in [2, 512], got {nodes}"
        )));
    }

    let grid = match raw.grid {
        None => None,
        Some(rg) => {
            let gd = GridSection::default();
            let g = GridSection {
                n_min: rg.n_min.unwrap_or(gd.n_min),
                n_max: rg.n_max.unwrap_or(gd.n_max),
                n_step: rg.n_step.unwrap_or(gd.n_step),
                v_min: rg.v_min.unwrap_or(gd.v_min),
                v_max: rg.v_max.unwrap_or(gd.v_max),
                v_step: rg.v_step.unwrap_or(gd.v_step),
            };
            g.validate()?;
            Some(g)
        }
    };

    let simd = SimSection::default();
    let rsim = raw.sim.unwrap_or_default();
    let sim = SimSection {
        blocks: over.blocks.or(rsim.blocks).unwrap_or(simd.blocks),
        seed: over.seed.or(rsim.seed).unwrap_or(simd.seed),
        model: over.model.or(rsim.model).unwrap_or(simd.model),
    };
    if sim.blocks == 0 {
        return Err(CliError::Config("sim: blocks must be >= 1".into()));
    }
    if sim.seed > i64::MAX as u64 {
        return Err(CliError::Config(
            "sim: seed must fit a signed 64-bit integer so the manifest can record it".into(),
        ));
    }

    if let Some(p) = &raw.plan {
        if p.n == 0 || p.k == 0 {
            return Err(CliError::Config("plan: n and k must be >= 1".into()));
        }
    }

    Ok(ExperimentConfig {
        system,
        numerics: NumericsSection { nodes },
        plan: raw.plan,
        grid,
        optimize: raw.optimize,
        sweep: raw.sweep,
        sim,
        figure: raw.figure.map(|f| partial_figure(&f)),
    })
}

/// Figure fields present in the file, with placeholder zeros elsewhere;
/// [`apply_figure_preset`] finishes the job per figure id.
fn partial_figure(f: &RawFigure) -> FigureSection {
    FigureSection {
        eps0_list: f.eps0_list.clone().unwrap_or_default(),
        k_list: f.k_list.clone().unwrap_or_default(),
        total: f.total.unwrap_or(0),
        v_step: f.v_step.unwrap_or(0),
        k_min: f.k_min.unwrap_or(0),
        k_max: f.k_max.unwrap_or(0),
        k_step: f.k_step.unwrap_or(0),
        d1_min: f.d1_min.unwrap_or(0.0),
        d1_max: f.d1_max.unwrap_or(0.0),
        d1_step: f.d1_step.unwrap_or(0.0),
        d_total: f.d_total.unwrap_or(0.0),
    }
}

struct FigurePreset {
    grid: GridSection,
    figure: FigureSection,
}

fn figure_preset(id: FigureId) -> FigurePreset {
    let base = FigureSection {
        eps0_list: vec![],
        k_list: vec![],
        total: 2000,
        v_step: 10,
        k_min: 20,
        k_max: 500,
        k_step: 40,
        d1_min: 0.1,
        d1_max: 1.9,
        d1_step: 0.1,
        d_total: 2.0,
    };
    let grid = |n_step: u32, v_min: u32, v_max: u32, v_step: u32| GridSection {
        n_min: 100,
        n_max: 2000,
        n_step,
        v_min,
        v_max,
        v_step,
    };
    match id {
        FigureId::Fig2 => FigurePreset {
            grid: grid(100, 0, 16000, 250),
            figure: FigureSection {
                eps0_list: vec![1e-2, 1e-3, 1e-4],
                k_list: vec![160, 320],
                ..base
            },
        },
        FigureId::Fig3 => FigurePreset {
            grid: grid(50, 500, 10000, 250),
            figure: FigureSection {
                eps0_list: vec![1e-3, 1e-4, 1e-5],
                k_list: vec![160],
                ..base
            },
        },
        FigureId::Fig4a => FigurePreset {
            grid: grid(100, 0, 8000, 400),
            figure: FigureSection {
                eps0_list: vec![1e-3, 1e-4],
                k_list: vec![],
                ..base
            },
        },
        FigureId::Fig4b => FigurePreset {
            grid: grid(100, 0, 10000, 500),
            figure: FigureSection {
                eps0_list: vec![1e-4, 1e-5],
                k_list: vec![160],
                ..base
            },
        },
        FigureId::Fig5 => FigurePreset {
            grid: GridSection::default(),
            figure: FigureSection {
                eps0_list: vec![],
                k_list: vec![64, 160, 320],
                ..base
            },
        },
    }
}

/// Fills grid and figure settings the file left unset with the per-figure
/// defaults, so the manifest records the exact values used.
pub fn apply_figure_preset(cfg: &mut ExperimentConfig, id: FigureId) -> Result<(), CliError> {
    let preset = figure_preset(id);
    if cfg.grid.is_none() {
        cfg.grid = Some(preset.grid);
    }
    cfg.grid.as_ref().expect("set above").validate()?;
    let f = cfg.figure.get_or_insert_with(|| preset.figure.clone());
    let p = &preset.figure;
    if f.eps0_list.is_empty() {
        f.eps0_list = p.eps0_list.clone();
    }
    if f.k_list.is_empty() {
        f.k_list = p.k_list.clone();
    }
    if f.total == 0 {
        f.total = p.total;
    }
    if f.v_step == 0 {
        f.v_step = p.v_step;
    }
    if f.k_min == 0 {
        f.k_min = p.k_min;
    }
    if f.k_max == 0 {
        f.k_max = p.k_max;
    }
    if f.k_step == 0 {
        f.k_step = p.k_step;
    }
    if f.d1_step <= 0.0 {
        f.d1_min = p.d1_min;
        f.d1_max = p.d1_max;
        f.d1_step = p.d1_step;
    }
    if f.d_total <= 0.0 {
        f.d_total = p.d_total;
    }
    for &e in &f.eps0_list {
        if !(e > 0.0 && e <= 1.0) {
            return Err(CliError::Config(format!(
                "figure: eps0_list entries must lie in (0, 1], got {e}"
            )));
        }
    }
    if f.k_min == 0 || f.k_min > f.k_max || f.k_step == 0 {
        return Err(CliError::Config(
            "figure: need 1 <= k_min <= k_max and k_step >= 1".into(),
        ));
    }
    Ok(())
}
