//! Subcommand bodies. Every input is resolved and validated before the output
//! directory is created, so configuration errors leave nothing on disk.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use standing_pulse::admissible::build_q0;
use standing_pulse::analysis::{check_solution, hamiltonian_residual, linearize, verify_lemma_suite, PropertyOptions};
use standing_pulse::dynamics::evolve as run_dynamics;
use standing_pulse::minimizer::{default_initial, minimize, SolveSummary, DEFAULT_Q0_RAMP, DEFAULT_Q0_STARTS};
use standing_pulse::model::{compute_constants, gamma0, gamma1, gamma1_closed_form, Regime};
use standing_pulse::{Grid, Params, Profile};

use crate::config::{InitSpec, RunConfig};
use crate::output::{emit, OutputDir};
use crate::Failure;

type CmdResult = Result<PathBuf, Failure>;

fn config_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Config(e.into())
}

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

pub fn constants(mut cfg: RunConfig) -> CmdResult {
    let start = Instant::now();
    let beta = cfg.params.beta.ok_or_else(|| config_err(anyhow!("missing --beta")))?;
    let gamma = cfg.params.gamma.ok_or_else(|| config_err(anyhow!("missing --gamma")))?;
    let report = compute_constants(beta, gamma).map_err(config_err)?;
    let dir = cfg.output_dir();
    let mut out = OutputDir::create(dir).map_err(runtime)?;
    out.json("constants.json", &report).map_err(runtime)?;
    emit(&format!("{}\n", serde_json::to_string_pretty(&report).map_err(runtime)?));
    out.finish("constants", &cfg, start.elapsed()).map_err(runtime)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub params: Params,
    pub grid: Grid,
    pub regime: Regime,
    pub init: InitSpec,
    pub init_energy_negative: bool,
    pub warnings: Vec<String>,
    pub result: SolveSummary,
}

pub fn solve(mut cfg: RunConfig, mirror: bool) -> CmdResult {
    let start = Instant::now();
    let params = cfg.resolve_params().map_err(config_err)?;
    let grid = cfg.resolve_grid(&params).map_err(config_err)?;
    let opts = cfg.solver.unwrap_or_default();
    let mut warnings = Vec::new();
    let (init, spec) = match cfg.init {
        Some(spec) => (build_q0(spec.a, spec.b, grid).map_err(config_err)?, spec),
        None => match default_initial(&params, grid) {
            Ok(p) => {
                let a = DEFAULT_Q0_STARTS
                    .iter()
                    .copied()
                    .find(|&a| build_q0(a, a + DEFAULT_Q0_RAMP, grid).map(|q| q == p).unwrap_or(false))
                    .unwrap_or(DEFAULT_Q0_STARTS[0]);
                (p, InitSpec { a, b: a + DEFAULT_Q0_RAMP })
            }
            Err(_) => {
                let a = DEFAULT_Q0_STARTS[0];
                warnings.push(format!("no default start has negative energy; using q0({a}, {})", a + DEFAULT_Q0_RAMP));
                let spec = InitSpec { a, b: a + DEFAULT_Q0_RAMP };
                (build_q0(spec.a, spec.b, grid).map_err(config_err)?, spec)
            }
        },
    };
    cfg.init = Some(spec);
    cfg.solver = Some(opts);
    let dir = cfg.output_dir();

    let res = minimize(&params, grid, Some(init), &opts).map_err(runtime)?;
    let summary = res.summary();
    if summary.initial_energy >= 0.0 {
        warnings.push(format!("starting energy {:.6e} is not negative", summary.initial_energy));
    }
    if summary.energy.total >= 0.0 {
        warnings.push(format!("final energy {:.6e} is not negative", summary.energy.total));
    }
    let report = SolveReport {
        params,
        grid,
        regime: params.regime(),
        init: spec,
        init_energy_negative: summary.initial_energy < 0.0,
        warnings,
        result: summary,
    };

    let mut out = OutputDir::create(dir).map_err(runtime)?;
    out.json("result.json", &report).map_err(runtime)?;
    out.text("u0.csv", &res.u0.to_csv_string()).map_err(runtime)?;
    out.text("v0.csv", &res.v0.to_csv_string()).map_err(runtime)?;
    if mirror {
        let both = res.u0.mirrored().into_iter().zip(res.v0.mirrored());
        out.csv("even_extension.csv", &["x", "u", "v"], both.map(|((x, u), (_, v))| vec![x, u, v])).map_err(runtime)?;
    }
    let dir = out.finish("solve", &cfg, start.elapsed()).map_err(runtime)?;
    emit(&format!(
        "J = {:.10e}, iterations {}, stop {:?}, active fraction {}\n",
        report.result.energy.total,
        report.result.iterations,
        report.result.stop_reason,
        report.result.active_constraint_fraction
    ));
    if !res.converged {
        return Err(Failure::NotConverged(format!(
            "stopped with {:?} after {} iterations; last iterate written to {}",
            res.stop_reason,
            res.iterations,
            dir.display()
        )));
    }
    Ok(dir)
}

#[derive(Debug, Clone, Serialize)]
struct SweepReport {
    points: usize,
    /// max over the sweep of the gap between the two `gamma1` evaluations
    max_path_discrepancy: f64,
    workers: usize,
}

pub fn sweep_gamma1(mut cfg: RunConfig) -> CmdResult {
    let start = Instant::now();
    let s = cfg.sweep.unwrap_or_default();
    if !(s.beta_min > 0.0 && s.beta_min <= s.beta_max && s.beta_max < 0.5) {
        return Err(config_err(anyhow!("need 0 < beta-min <= beta-max < 0.5, got [{}, {}]", s.beta_min, s.beta_max)));
    }
    if s.steps == 0 || (s.steps == 1 && s.beta_min != s.beta_max) {
        return Err(config_err(anyhow!("steps must be >= 2 for a nonempty range (got {})", s.steps)));
    }
    if s.workers == 0 {
        return Err(config_err(anyhow!("workers must be at least 1")));
    }
    let dir = cfg.output_dir();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(s.workers).build().map_err(runtime)?;
    let span = s.beta_max - s.beta_min;
    let last = (s.steps - 1).max(1) as f64;
    // each point is independent; collect() keeps index order
    let rows: Vec<(f64, f64, f64, f64)> = pool.install(|| {
        (0..s.steps)
            .into_par_iter()
            .map(|i| {
                let beta = s.beta_min + span * i as f64 / last;
                (beta, gamma0(beta), gamma1(beta), gamma1_closed_form(beta))
            })
            .collect()
    });
    let discrepancy = rows.iter().fold(0.0_f64, |m, r| m.max((r.2 - r.3).abs()));

    let mut out = OutputDir::create(dir).map_err(runtime)?;
    out.csv("gamma1.csv", &["beta", "gamma0", "gamma1"], rows.iter().map(|r| vec![r.0, r.1, r.2])).map_err(runtime)?;
    let report = SweepReport { points: rows.len(), max_path_discrepancy: discrepancy, workers: s.workers };
    out.json("sweep.json", &report).map_err(runtime)?;
    let dir = out.finish("sweep-gamma1", &cfg, start.elapsed()).map_err(runtime)?;
    if discrepancy > 1e-12 {
        return Err(Failure::Verification(format!("gamma1 evaluations disagree by {discrepancy:.3e}")));
    }
    Ok(dir)
}

pub fn verify(mut cfg: RunConfig) -> CmdResult {
    let start = Instant::now();
    let params = cfg.resolve_params().map_err(config_err)?;
    let grid = cfg.resolve_grid(&params).map_err(config_err)?;
    let samples = cfg.samples.unwrap_or(100);
    let seed = cfg.seed.unwrap_or(7);
    let dir = cfg.output_dir();
    let report = verify_lemma_suite(&params, grid, samples, seed).map_err(runtime)?;
    let mut out = OutputDir::create(dir).map_err(runtime)?;
    out.json("suite.json", &report).map_err(runtime)?;
    let text = report.to_text();
    out.text("suite.txt", &text).map_err(runtime)?;
    emit(&text);
    let dir = out.finish("verify", &cfg, start.elapsed()).map_err(runtime)?;
    if !report.all_pass {
        return Err(Failure::Verification(format!("{} failed evaluations", report.total_failed)));
    }
    Ok(dir)
}

fn read_profile(path: &Path) -> anyhow::Result<Profile> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Profile::read_csv(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

/// Parameters, profiles and solver report of a previous `solve` output.
struct StoredSolve {
    config: RunConfig,
    params: Params,
    u0: Profile,
    v0: Profile,
    report: SolveReport,
}

fn load_solve(dir: &Path) -> anyhow::Result<StoredSolve> {
    let mut config = RunConfig::load(&dir.join("config.json"))?;
    let params = config.resolve_params()?;
    let text = std::fs::read_to_string(dir.join("result.json")).context("reading result.json")?;
    let report: SolveReport = serde_json::from_str(&text).context("parsing result.json")?;
    let u0 = read_profile(&dir.join("u0.csv"))?;
    let v0 = read_profile(&dir.join("v0.csv"))?;
    if u0.grid() != v0.grid() {
        bail!("u0.csv and v0.csv are on different grids");
    }
    Ok(StoredSolve { config, params, u0, v0, report })
}

pub fn analyze(mut cfg: RunConfig) -> CmdResult {
    let start = Instant::now();
    let input = cfg.input_dir.clone().ok_or_else(|| config_err(anyhow!("analyze needs --input <solve output dir>")))?;
    let stored = load_solve(&input).map_err(config_err)?;
    cfg.params = stored.config.params.clone();
    cfg.grid = stored.config.grid.clone();
    let params = stored.params;
    let dir = cfg.output_dir();
    if !stored.report.result.converged {
        return Err(Failure::NotConverged(format!(
            "input solve stopped with {:?}; properties are only checked on converged pulses",
            stored.report.result.stop_reason
        )));
    }

    let lin = linearize(&params);
    let props = check_solution(
        &stored.u0,
        &stored.v0,
        &params,
        stored.report.result.el_residual_max,
        stored.report.result.active_constraint_fraction,
        &PropertyOptions::default(),
    )
    .map_err(runtime)?;
    let ham = hamiltonian_residual(&stored.u0, &stored.v0, &params).map_err(runtime)?;

    let mut out = OutputDir::create(dir).map_err(runtime)?;
    out.json("linearization.json", &lin).map_err(runtime)?;
    out.json("properties.json", &props).map_err(runtime)?;
    out.text("properties.txt", &props.to_text()).map_err(runtime)?;
    let grid = *ham.grid();
    out.csv("hamiltonian.csv", &["x", "residual"], (0..grid.len()).map(|i| vec![grid.x(i), ham.values()[i]]))
        .map_err(runtime)?;
    emit(&props.to_text());
    let dir = out.finish("analyze", &cfg, start.elapsed()).map_err(runtime)?;
    if !props.all_pass {
        let names: Vec<&str> = props.failures().map(|c| c.name.as_str()).collect();
        return Err(Failure::Verification(names.join(", ")));
    }
    Ok(dir)
}

#[derive(Debug, Clone, Serialize)]
struct EvolveReport {
    source: String,
    perturbation: f64,
    dt: f64,
    t_end: f64,
    steps: usize,
    times: Vec<f64>,
    snapshots: Vec<String>,
    /// max-norm of `u(T) - u(0)`
    drift: f64,
    /// max-norm distance of each snapshot from the unperturbed initial `u`
    distance_to_start: Vec<f64>,
}

pub fn evolve(mut cfg: RunConfig, perturb: f64) -> CmdResult {
    let start = Instant::now();
    let dy = cfg.dynamics.unwrap_or_default();
    let (params, u0, v0, source) = match cfg.input_dir.clone() {
        Some(input) => {
            let stored = load_solve(&input).map_err(config_err)?;
            let tau_override = cfg.params.tau;
            cfg.params = stored.config.params.clone();
            if tau_override.is_some() {
                cfg.params.tau = tau_override;
            }
            cfg.grid = stored.config.grid.clone();
            let params = cfg.resolve_params().map_err(config_err)?;
            (params, stored.u0, stored.v0, format!("solve output {}", input.display()))
        }
        None => {
            let params = cfg.resolve_params().map_err(config_err)?;
            let grid = cfg.resolve_grid(&params).map_err(config_err)?;
            (params, Profile::zeros(grid), Profile::zeros(grid), "zero state".to_string())
        }
    };
    if !(dy.dt > 0.0 && dy.t_end >= dy.dt && dy.snapshot_every >= 1) {
        return Err(config_err(anyhow!("need dt > 0, t_end >= dt and snapshot_every >= 1")));
    }
    if !perturb.is_finite() {
        return Err(config_err(anyhow!("perturbation must be finite")));
    }
    let dir = cfg.output_dir();

    let scale = perturb * u0.max_abs().max(1.0);
    let u_start = if perturb != 0.0 {
        let bump = Profile::from_fn(*u0.grid(), |x| scale * (-x * x).exp());
        u0.zip_map(&bump, |a, b| a + b).map_err(runtime)?
    } else {
        u0.clone()
    };
    let tr = run_dynamics(&u_start, &v0, &params, dy.dt, dy.t_end, dy.snapshot_every).map_err(runtime)?;

    let mut out = OutputDir::create(dir).map_err(runtime)?;
    let mut names = Vec::new();
    let mut distance = Vec::new();
    for (k, (u, v)) in tr.snapshots.iter().enumerate() {
        let name = format!("snapshots/snapshot_{k:05}.csv");
        let grid = *u.grid();
        out.csv(&name, &["x", "u", "v"], (0..grid.len()).map(|i| vec![grid.x(i), u.values()[i], v.values()[i]]))
            .map_err(runtime)?;
        names.push(name);
        distance.push(u.zip_map(&u0, |a, b| a - b).map_err(runtime)?.max_abs());
    }
    let report = EvolveReport {
        source,
        perturbation: perturb,
        dt: dy.dt,
        t_end: dy.t_end,
        steps: tr.steps,
        times: tr.times.clone(),
        snapshots: names,
        drift: tr.drift,
        distance_to_start: distance,
    };
    out.json("trajectory.json", &report).map_err(runtime)?;
    emit(&format!("drift {:.6e} over {} steps\n", tr.drift, tr.steps));
    out.finish("evolve", &cfg, start.elapsed()).map_err(runtime)
}
