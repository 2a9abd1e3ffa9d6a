//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 infeasible
//! optimization, 4 numerical failure. Argument-parsing errors use clap's
//! own exit code, which is also 2.

mod commands;
pub mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{FigureId, ModelArg, Overrides};

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Config(String),
    Infeasible(String),
    Numerical(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "{m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Infeasible(m) => write!(f, "infeasible: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

#[derive(Debug, Parser)]
#[command(
    name = "wprelay",
    version,
    about = "Performance calculator for a wirelessly powered decode-and-forward relay \
             link at finite blocklength"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Experiment configuration file (TOML-style key = value sections)
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory for output tables and the manifest
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Override the simulation seed
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,

    /// Override the quadrature nodes per panel
    #[arg(long, value_name = "N")]
    nodes: Option<usize>,

    /// Override the simulated block count
    #[arg(long, value_name = "N")]
    blocks: Option<u64>,

    /// Override the simulated relay power model
    #[arg(long, value_enum, value_name = "MODEL")]
    model: Option<ModelArg>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            nodes: self.nodes,
            blocks: self.blocks,
            model: self.model,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate error breakdown and performance at a single (n, v, k)
    Eval(CommonArgs),
    /// Evaluate along one swept coordinate (v, n, or d1)
    Sweep(CommonArgs),
    /// Run a constrained optimization over the block structure
    Optimize(CommonArgs),
    /// Run the Monte Carlo simulator and compare against the analysis
    Simulate(CommonArgs),
    /// Emit the dataset behind one of the preset figures
    Figure {
        /// Which preset dataset to produce
        #[arg(value_enum)]
        id: FigureId,
        #[command(flatten)]
        args: CommonArgs,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let (args, figure) = match &cli.cmd {
        Command::Eval(a) | Command::Sweep(a) | Command::Optimize(a) | Command::Simulate(a) => {
            (a, None)
        }
        Command::Figure { id, args } => (args, Some(*id)),
    };
    let raw = config::load_raw(args.config.as_deref())?;
    let mut cfg = config::resolve(raw, &args.overrides())?;
    if let Some(id) = figure {
        config::apply_figure_preset(&mut cfg, id)?;
    }
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    match cli.cmd {
        Command::Eval(ref a) => commands::cmd_eval(&cfg, a.out.as_deref()),
        Command::Sweep(_) => commands::cmd_sweep(&cfg, &out),
        Command::Optimize(_) => commands::cmd_optimize(&cfg, &out),
        Command::Simulate(_) => commands::cmd_simulate(&cfg, &out),
        Command::Figure { id, .. } => commands::cmd_figure(id, &cfg, &out),
    }
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
