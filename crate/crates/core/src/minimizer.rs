//! Projected steepest descent of `J` over the admissible class.
//!
//! Each trial point is `project(w - s g)` with crossing indices detected on the
//! unprojected trial. Steps come from a Barzilai-Borwein estimate and are
//! accepted under the projected Armijo rule
//! `J(w+) <= J(w) - (c / s) ||w+ - w||^2`, so accepted energies never increase.

use serde::{Deserialize, Serialize};

use crate::admissible::{build_q0, detect_crossings, project, Bands, CrossingSummary};
use crate::energy::{evaluate, gradient_from, EnergyReport, Evaluation};
use crate::error::{PulseError, Result};
use crate::grid::{Grid, Profile};
use crate::model::{tail_cutoff, Params};
use crate::operators::InhibitorOptions;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MinimizeOptions {
    /// stop when the `L^2` norm of the projected gradient is below this
    pub gtol: f64,
    /// required max-norm of the Euler-Lagrange residual on the inactive set
    pub rtol: f64,
    pub max_iters: usize,
    pub armijo: f64,
    pub backtrack: f64,
    pub step_min: f64,
    pub step_max: f64,
    /// line search gives up below this step
    pub step_floor: f64,
    pub inhibitor: InhibitorOptions,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            gtol: 1e-8,
            rtol: 1e-6,
            max_iters: 50_000,
            armijo: 1e-4,
            backtrack: 0.5,
            step_min: 1e-6,
            step_max: 1e2,
            step_floor: 1e-14,
            inhibitor: InhibitorOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    MaxIterations,
    LineSearchFailed,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub u0: Profile,
    pub v0: Profile,
    pub energy: EnergyReport,
    pub iterations: usize,
    pub final_gradient_norm: f64,
    /// max `|d u'' + f(u) - v|` over inactive nodes
    pub el_residual_max: f64,
    pub active_constraint_fraction: f64,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub crossings: CrossingSummary,
    /// steps where no node reached `beta` and the previous indices were reused
    pub collapse_warnings: usize,
    /// accepted steps that increased `J`; zero by the line-search contract
    pub energy_increases: usize,
    pub initial_energy: f64,
}

/// Scalar part of a [`SolveResult`], the JSON side of its serialization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveSummary {
    pub energy: EnergyReport,
    pub iterations: usize,
    pub final_gradient_norm: f64,
    pub el_residual_max: f64,
    pub active_constraint_fraction: f64,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub crossings: CrossingSummary,
    pub collapse_warnings: usize,
    pub energy_increases: usize,
    pub initial_energy: f64,
}

impl SolveResult {
    pub fn summary(&self) -> SolveSummary {
        SolveSummary {
            energy: self.energy,
            iterations: self.iterations,
            final_gradient_norm: self.final_gradient_norm,
            el_residual_max: self.el_residual_max,
            active_constraint_fraction: self.active_constraint_fraction,
            converged: self.converged,
            stop_reason: self.stop_reason,
            crossings: self.crossings,
            collapse_warnings: self.collapse_warnings,
            energy_increases: self.energy_increases,
            initial_energy: self.initial_energy,
        }
    }
}

/// Breakpoints tried for the default competitor, in order.
pub const DEFAULT_Q0_STARTS: [f64; 4] = [1.0, 0.5, 2.0, 4.0];
/// Width of the linear ramp of the default competitor.
pub const DEFAULT_Q0_RAMP: f64 = 0.8;

/// First competitor `q0(a, a + 0.8)` with negative energy.
pub fn default_initial(params: &Params, grid: Grid) -> Result<Profile> {
    for &a in &DEFAULT_Q0_STARTS {
        let b = a + DEFAULT_Q0_RAMP;
        if b > grid.x_max() {
            continue;
        }
        let q = build_q0(a, b, grid)?;
        let e = evaluate(&q, params, &InhibitorOptions::default(), None)?;
        if e.report.total < 0.0 {
            return Ok(q);
        }
    }
    Err(PulseError::InvalidParameter("no default competitor has negative energy at these parameters".into()))
}

struct Iterate {
    w: Profile,
    eval: Evaluation,
    g: Profile,
    bands: Bands,
}

impl Iterate {
    fn new(w: Profile, bands: Bands, params: &Params, opts: &MinimizeOptions, warm: Option<&Profile>) -> Result<Self> {
        let eval = evaluate(&w, params, &opts.inhibitor, warm)?;
        let g = gradient_from(&w, eval.v(), params);
        Ok(Self { w, eval, g, bands })
    }

    fn energy(&self) -> f64 {
        self.eval.report.total
    }
}

/// Projected gradient, active-node count and inactive Euler-Lagrange residual.
fn stationarity(it: &Iterate, rtol: f64) -> (f64, usize, f64) {
    let grid = *it.w.grid();
    let n = grid.n();
    let mut pg = vec![0.0; n + 1];
    let mut active = 0;
    let mut el = 0.0_f64;
    for k in 0..n {
        let w = it.w.values()[k];
        let g = it.g.values()[k];
        let free = w - g;
        let clamped = it.bands.clamp(k, free);
        pg[k] = w - clamped;
        if (clamped - free).abs() > rtol {
            active += 1;
        } else {
            el = el.max(g.abs());
        }
    }
    (Profile::from_raw(grid, pg).l2_norm(), active, el)
}

pub fn minimize(params: &Params, grid: Grid, init: Option<Profile>, opts: &MinimizeOptions) -> Result<SolveResult> {
    params.validate()?;
    let m = tail_cutoff(params.beta, params.gamma)?;
    let init = match init {
        Some(p) => {
            if p.grid() != &grid {
                return Err(PulseError::GridMismatch("initial profile is on a different grid".into()));
            }
            p
        }
        None => default_initial(params, grid)?,
    };
    let mut start = init;
    start.values_mut()[grid.n()] = 0.0;
    let (i1, i2) = detect_crossings(&start, params.beta);
    if i1.is_none() {
        return Err(PulseError::InvalidParameter("initial profile never reaches beta".into()));
    }
    let projected = project(&start, i1, i2, params.beta, m)?;
    let mut it = Iterate::new(projected.profile, Bands::new(i1, i2, params.beta, m), params, opts, None)?;
    let initial_energy = it.energy();

    let h = grid.h();
    let lipschitz = 4.0 * params.d / (h * h) + 1.0 + 1.0 / params.gamma;
    let mut step = (1.0 / lipschitz).clamp(opts.step_min, opts.step_max);

    let mut collapse_warnings = 0;
    let mut energy_increases = 0;
    let mut iterations = 0;
    let stop_reason;
    loop {
        let (pg_norm, _, el) = stationarity(&it, opts.rtol);
        if pg_norm <= opts.gtol && el <= opts.rtol {
            stop_reason = StopReason::Converged;
            break;
        }
        if iterations >= opts.max_iters {
            stop_reason = StopReason::MaxIterations;
            break;
        }

        let mut s = step;
        let next = loop {
            let trial = it.w.zip_map(&it.g, |w, g| w - s * g)?;
            let (t1, t2) = match detect_crossings(&trial, params.beta) {
                (Some(a), b) => (Some(a), b),
                (None, _) => {
                    collapse_warnings += 1;
                    (it.bands.i1, it.bands.i2)
                }
            };
            let candidate = project(&trial, t1, t2, params.beta, m)?.profile;
            let moved = candidate.zip_map(&it.w, |a, b| a - b)?;
            let dist2 = moved.dot(&moved);
            let cand = Iterate::new(candidate, Bands::new(t1, t2, params.beta, m), params, opts, Some(it.eval.v()))?;
            if cand.energy() <= it.energy() - opts.armijo / s * dist2 {
                break Some((cand, moved));
            }
            s *= opts.backtrack;
            if s < opts.step_floor {
                break None;
            }
        };
        let Some((cand, moved)) = next else {
            stop_reason = StopReason::LineSearchFailed;
            break;
        };
        if cand.energy() > it.energy() {
            energy_increases += 1;
        }

        let dg = cand.g.zip_map(&it.g, |a, b| a - b)?;
        let sy = moved.dot(&dg);
        step = if sy > 0.0 { moved.dot(&moved) / sy } else { opts.step_max };
        step = step.clamp(opts.step_min, opts.step_max);

        it = cand;
        iterations += 1;
    }

    let (pg_norm, active, el) = stationarity(&it, opts.rtol);
    let state = crate::admissible::AdmissibleState {
        profile: it.w.clone(),
        i1: it.bands.i1,
        i2: it.bands.i2,
        bounds_ok: it.bands.contains(&it.w),
    };
    Ok(SolveResult {
        u0: it.w,
        v0: it.eval.inhibitor.v.clone(),
        energy: it.eval.report,
        iterations,
        final_gradient_norm: pg_norm,
        el_residual_max: el,
        active_constraint_fraction: active as f64 / grid.n() as f64,
        converged: stop_reason == StopReason::Converged,
        stop_reason,
        crossings: state.summary(),
        collapse_warnings,
        energy_increases,
        initial_energy,
    })
}
