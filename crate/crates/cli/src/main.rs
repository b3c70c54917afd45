//! `pulse`: closed-form constants, pulse solves, sweeps, verification suites,
//! post-processing and time evolution.
//!
//! Exit status: 0 success, 1 usage or configuration error (nothing written),
//! 2 solver non-convergence, 3 verification failures.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "pulse", version, about = "Standing pulses of a FitzHugh-Nagumo system with cubic inhibitor")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default, Clone)]
struct Common {
    /// JSON run configuration; flags override its entries
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output directory (default: $PULSE_OUTPUT_DIR, then ./pulse-output)
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Clone)]
struct ParamArgs {
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Args, Debug, Default, Clone)]
struct GridArgs {
    #[arg(long)]
    x_max: Option<f64>,
    /// number of grid intervals
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form constants for (beta, gamma)
    Constants {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Minimize the energy from a piecewise-linear start
    Solve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// plateau end of the starting profile
        #[arg(long)]
        init_a: Option<f64>,
        /// ramp end of the starting profile
        #[arg(long)]
        init_b: Option<f64>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        gtol: Option<f64>,
        /// also write the even extension to (-x_max, x_max)
        #[arg(long)]
        mirror: bool,
    },
    /// gamma0 and gamma1 over a range of beta
    #[command(name = "sweep-gamma1")]
    SweepGamma1 {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        beta_min: Option<f64>,
        #[arg(long)]
        beta_max: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Randomized operator and energy inequality suite
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Linearization, property checks and first-integral residual of a solve
    Analyze {
        #[command(flatten)]
        common: Common,
        /// output directory of a previous `solve`
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Time integration from a solved pulse or from rest
    Evolve {
        #[command(flatten)]
        common: Common,
        /// output directory of a previous `solve`; without it the run starts
        /// from the zero state and needs full parameters and grid
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        snapshot_every: Option<usize>,
        /// relative amplitude of a smooth perturbation added to u
        #[arg(long)]
        perturb: Option<f64>,
    },
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    NotConverged(String),
    Verification(String),
    Runtime(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::NotConverged(_) | Failure::Runtime(_) => 2,
            Failure::Verification(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "configuration error: {e:#}"),
            Failure::NotConverged(m) => write!(f, "not converged: {m}"),
            Failure::Verification(m) => write!(f, "verification failures: {m}"),
            Failure::Runtime(e) => write!(f, "error: {e:#}"),
        }
    }
}

fn base_config(common: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path).map_err(Failure::Config)?,
        None => RunConfig::default(),
    };
    if let Some(dir) = &common.output_dir {
        cfg.output_dir = Some(dir.clone());
    }
    Ok(cfg)
}

fn apply_params(cfg: &mut RunConfig, p: &ParamArgs) {
    let t = &mut cfg.params;
    t.d = p.d.or(t.d);
    t.tau = p.tau.or(t.tau);
    t.gamma = p.gamma.or(t.gamma);
    t.beta = p.beta.or(t.beta);
}

fn apply_grid(cfg: &mut RunConfig, g: &GridArgs) {
    cfg.grid.x_max = g.x_max.or(cfg.grid.x_max);
    cfg.grid.n = g.n.or(cfg.grid.n);
}

fn run(cli: Cli) -> Result<PathBuf, Failure> {
    match cli.command {
        Command::Constants { common, beta, gamma } => {
            let mut cfg = base_config(&common)?;
            cfg.params.beta = beta.or(cfg.params.beta);
            cfg.params.gamma = gamma.or(cfg.params.gamma);
            commands::constants(cfg)
        }
        Command::Solve { common, params, grid, init_a, init_b, max_iters, gtol, mirror } => {
            let mut cfg = base_config(&common)?;
            apply_params(&mut cfg, &params);
            apply_grid(&mut cfg, &grid);
            if init_a.is_some() || init_b.is_some() {
                let (a, b) = match (init_a, init_b, cfg.init) {
                    (Some(a), Some(b), _) => (a, b),
                    (a, b, Some(i)) => (a.unwrap_or(i.a), b.unwrap_or(i.b)),
                    _ => return Err(Failure::Config(anyhow::anyhow!("--init-a and --init-b go together"))),
                };
                cfg.init = Some(config::InitSpec { a, b });
            }
            let mut solver = cfg.solver.unwrap_or_default();
            solver.max_iters = max_iters.unwrap_or(solver.max_iters);
            solver.gtol = gtol.unwrap_or(solver.gtol);
            cfg.solver = Some(solver);
            commands::solve(cfg, mirror)
        }
        Command::SweepGamma1 { common, beta_min, beta_max, steps, workers } => {
            let mut cfg = base_config(&common)?;
            let mut s = cfg.sweep.unwrap_or_default();
            s.beta_min = beta_min.unwrap_or(s.beta_min);
            s.beta_max = beta_max.unwrap_or(s.beta_max);
            s.steps = steps.unwrap_or(s.steps);
            s.workers = workers.unwrap_or(s.workers);
            cfg.sweep = Some(s);
            commands::sweep_gamma1(cfg)
        }
        Command::Verify { common, params, grid, samples, seed } => {
            let mut cfg = base_config(&common)?;
            apply_params(&mut cfg, &params);
            apply_grid(&mut cfg, &grid);
            cfg.samples = samples.or(cfg.samples).or(Some(100));
            cfg.seed = seed.or(cfg.seed).or(Some(7));
            commands::verify(cfg)
        }
        Command::Analyze { common, input } => {
            let mut cfg = base_config(&common)?;
            cfg.input_dir = input.or(cfg.input_dir);
            commands::analyze(cfg)
        }
        Command::Evolve { common, input, params, grid, dt, t_end, snapshot_every, perturb } => {
            let mut cfg = base_config(&common)?;
            cfg.input_dir = input.or(cfg.input_dir);
            apply_params(&mut cfg, &params);
            apply_grid(&mut cfg, &grid);
            let mut dy = cfg.dynamics.unwrap_or_default();
            dy.dt = dt.unwrap_or(dy.dt);
            dy.t_end = t_end.unwrap_or(dy.t_end);
            dy.snapshot_every = snapshot_every.unwrap_or(dy.snapshot_every);
            cfg.dynamics = Some(dy);
            commands::evolve(cfg, perturb.unwrap_or(0.0))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(dir) => {
            output::emit(&format!("outputs in {}\n", dir.display()));
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.code())
        }
    }
}
