//! Qualitative-property oracle for a computed pulse: crossing points, sign
//! bands, monotone front, unique negative minimum, positivity of `v0` and of
//! the eigen-contractions `psi1 = u0 + alpha2 v0`, `psi2 = u0 + alpha1 v0`,
//! slow tail decay and the first-integral residual.

use serde::{Deserialize, Serialize};

use super::linearize::linearize;
use super::tail::{fit_decay, hamiltonian_residual, max_interior};
use crate::error::{PulseError, Result};
use crate::grid::Profile;
use crate::minimizer::SolveResult;
use crate::model::Params;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropertyOptions {
    /// comparison slack is `tol_coeff * (h^2 + solver_tol)`
    pub tol_coeff: f64,
    pub solver_tol: f64,
    /// tail nodes with `|u| <` this are treated as numerical zero
    pub tail_floor: f64,
    /// allowed relative error of the fitted decay rate
    pub decay_rel_tol: f64,
    /// Hamiltonian residual bound is `hamiltonian_coeff * h^2`
    pub hamiltonian_coeff: f64,
    /// Euler-Lagrange residual bound on inactive nodes
    pub el_tol: f64,
}

impl Default for PropertyOptions {
    fn default() -> Self {
        Self {
            tol_coeff: 10.0,
            solver_tol: 1e-11,
            tail_floor: 1e-7,
            decay_rel_tol: 0.05,
            hamiltonian_coeff: 1e3,
            el_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub witness: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub checks: Vec<Check>,
    pub all_pass: bool,
    /// interpolated crossing points of `beta` and `0`
    pub x1: Option<f64>,
    pub x2: Option<f64>,
    /// right end of the region where tail signs are checked
    pub tail_end: f64,
    pub decay_rate: Option<f64>,
    pub slow_rate: f64,
    pub tol: f64,
}

impl PropertyReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{:<28} {}  witness {:.6e}  tol {:.3e}  {}\n",
                c.name,
                if c.pass { "pass" } else { "FAIL" },
                c.witness,
                c.tolerance,
                c.detail
            ));
        }
        out
    }
}

/// Level crossings of `values - level` on `0..=end`, zeros skipped:
/// `(index before, index after, downward)`.
fn crossings(values: &[f64], level: f64, end: usize) -> Vec<(usize, usize, bool)> {
    let mut out = Vec::new();
    let mut last: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate().take(end + 1) {
        let s = v - level;
        if s == 0.0 {
            continue;
        }
        if let Some((j, prev)) = last {
            if prev.signum() != s.signum() {
                out.push((j, i, s < 0.0));
            }
        }
        last = Some((i, s));
    }
    out
}

fn interpolate_crossing(u: &Profile, level: f64, (j, i, _): (usize, usize, bool)) -> f64 {
    let g = u.grid();
    let (a, b) = (u.values()[j] - level, u.values()[i] - level);
    g.x(j) + (g.x(i) - g.x(j)) * a / (a - b)
}

fn check(name: &str, pass: bool, witness: f64, tolerance: f64, detail: impl Into<String>) -> Check {
    Check { name: name.into(), pass, witness, tolerance, detail: detail.into() }
}

fn range_fold(values: &[f64], lo: usize, hi: usize, init: f64, f: impl Fn(f64, f64) -> f64) -> f64 {
    if lo > hi {
        return init;
    }
    values[lo..=hi].iter().fold(init, |acc, &v| f(acc, v))
}

/// Runs every property check on a converged result.
pub fn check_theorem2(result: &SolveResult, params: &Params) -> Result<PropertyReport> {
    check_theorem2_with(result, params, &PropertyOptions::default())
}

pub fn check_theorem2_with(result: &SolveResult, params: &Params, opts: &PropertyOptions) -> Result<PropertyReport> {
    if !result.converged {
        return Err(PulseError::NotConverged(format!(
            "refusing to check an unconverged result (stop: {:?}, gradient norm {:.3e})",
            result.stop_reason, result.final_gradient_norm
        )));
    }
    check_solution(&result.u0, &result.v0, params, result.el_residual_max, result.active_constraint_fraction, opts)
}

/// Property checks for a stored solution: the profile checks plus the
/// requirement that no band constraint is active.
pub fn check_solution(
    u: &Profile,
    v: &Profile,
    params: &Params,
    el_residual: f64,
    active_fraction: f64,
    opts: &PropertyOptions,
) -> Result<PropertyReport> {
    let mut report = check_profiles(u, v, params, el_residual, opts)?;
    report.checks.push(check(
        "no_active_constraints",
        active_fraction == 0.0,
        active_fraction,
        0.0,
        "fraction of nodes held by a band bound",
    ));
    report.all_pass = report.checks.iter().all(|c| c.pass);
    Ok(report)
}

/// The property checks on a bare pair `(u, v)`; `el_residual` is the caller's
/// Euler-Lagrange residual.
pub fn check_profiles(
    u: &Profile,
    v: &Profile,
    params: &Params,
    el_residual: f64,
    opts: &PropertyOptions,
) -> Result<PropertyReport> {
    u.check_grid(v)?;
    let grid = *u.grid();
    let n = grid.n();
    let h = grid.h();
    let tol = opts.tol_coeff * (h * h + opts.solver_tol);
    let lin = linearize(params);
    let slow_rate = lin.slow_rate;
    let margin = if slow_rate.is_finite() && slow_rate > 0.0 { 2.0 / slow_rate } else { 2.0 };
    let uv = u.values();
    let vv = v.values();
    let du = u.derivative();
    let dv = v.derivative();
    let mut checks = Vec::new();

    // tail region: before the truncation margin and above the noise floor
    let argmin = (0..=n).fold(0, |m, i| if uv[i] < uv[m] { i } else { m });
    let floor_end = (argmin..=n).find(|&i| uv[i].abs() < opts.tail_floor).map_or(n, |i| i.saturating_sub(1));
    let margin_end = grid.nearest((grid.x_max() - margin).max(0.0));
    let end = floor_end.min(margin_end).max(1);
    let tail_end = grid.x(end);

    let c1 = crossings(uv, params.beta, end);
    let c2 = crossings(uv, 0.0, end);
    let x1 = c1.first().map(|&c| interpolate_crossing(u, params.beta, c));
    let x2 = c2.first().map(|&c| interpolate_crossing(u, 0.0, c));
    checks.push(check(
        "x1_unique",
        c1.len() == 1 && c1[0].2,
        c1.len() as f64,
        0.0,
        format!("crossings of beta on [0, {tail_end:.4}]"),
    ));
    checks.push(check(
        "x2_unique_sign_change",
        c2.len() == 1 && c2[0].2,
        c2.len() as f64,
        0.0,
        format!("sign changes of u0 on [0, {tail_end:.4}]"),
    ));

    let (Some(x1v), Some(x2v)) = (x1, x2) else {
        let failed = check("crossings_exist", false, 0.0, 0.0, "missing x1 or x2");
        checks.push(failed);
        return Ok(PropertyReport { checks, all_pass: false, x1, x2, tail_end, decay_rate: None, slow_rate, tol });
    };
    checks.push(check("crossing_order", x1v < x2v, x2v - x1v, 0.0, "x2 - x1"));

    let slope = du.interpolate(x1v).max(du.interpolate(x2v));
    checks.push(check("crossing_slopes_negative", slope <= tol, slope, tol, "max of u0' at x1, x2"));

    let j1 = (0..=n).take_while(|&i| grid.x(i) < x1v).last();
    let above = j1.map_or(f64::INFINITY, |j| range_fold(uv, 0, j, f64::INFINITY, |a, b| a.min(b - params.beta)));
    checks.push(check("band_above_beta", above >= -tol, above, tol, "min of u0 - beta on [0, x1)"));

    let mid: Vec<usize> = (0..=n).filter(|&i| grid.x(i) > x1v && grid.x(i) < x2v).collect();
    let middle = mid.iter().fold(f64::INFINITY, |a, &i| a.min(uv[i]).min(params.beta - uv[i]));
    checks.push(check("band_middle", middle >= -tol, middle, tol, "min of u0 and beta - u0 on (x1, x2)"));

    let k2 = (0..=n).find(|&i| grid.x(i) > x2v).unwrap_or(n);
    let tail_max = range_fold(uv, k2, end, f64::NEG_INFINITY, f64::max);
    checks.push(check(
        "band_negative_tail",
        tail_max <= tol,
        tail_max,
        tol,
        format!("max of u0 on (x2, {tail_end:.4}]"),
    ));

    let lo = ((x1v / h).floor() as usize).min(n);
    let hi = ((x2v / h).ceil() as usize).min(n);
    let front_slope = range_fold(du.values(), lo, hi, f64::NEG_INFINITY, f64::max);
    checks.push(check("front_monotone", front_slope <= tol, front_slope, tol, "max of u0' on [x1, x2]"));

    let minima: Vec<usize> = (k2.max(1)..end).filter(|&i| uv[i - 1] > uv[i] && uv[i] <= uv[i + 1]).collect();
    let global_from_x1 = (lo..=n).fold(f64::INFINITY, |a, i| a.min(uv[i]));
    let min_value = minima.first().map_or(f64::NAN, |&i| uv[i]);
    checks.push(check(
        "unique_negative_minimum",
        minima.len() == 1 && min_value <= tol && (min_value - global_from_x1).abs() <= tol,
        minima.len() as f64,
        tol,
        format!("local minima on (x2, {tail_end:.4}); value {min_value:.6e}, global min {global_from_x1:.6e}"),
    ));

    let v_min = range_fold(vv, 0, n - 1, f64::INFINITY, f64::min);
    checks.push(check("v0_positive", v_min >= -tol, v_min, tol, "min of v0 on [0, x_max)"));

    let psi = |alpha: f64| (0..=n).fold(f64::INFINITY, |a, i| a.min(uv[i] + alpha * vv[i]));
    let (psi1, psi2) = if lin.real_eigenvalues { (psi(lin.alpha2), psi(lin.alpha1)) } else { (f64::NAN, f64::NAN) };
    checks.push(check("psi1_nonnegative", psi1 >= -tol, psi1, tol, "min of u0 + alpha2 v0"));
    checks.push(check("psi2_nonnegative", psi2 >= -tol, psi2, tol, "min of u0 + alpha1 v0"));

    let k2v = (0..=n).find(|&i| grid.x(i) >= x2v).unwrap_or(n);
    let v_slope = range_fold(dv.values(), k2v, end, f64::NEG_INFINITY, f64::max);
    checks.push(check(
        "v0_decreasing_tail",
        v_slope <= tol,
        v_slope,
        tol,
        format!("max of v0' on [x2, {tail_end:.4}]"),
    ));

    let window = (x2v + margin, tail_end);
    let decay_rate = fit_decay(u, window).ok();
    let rel = decay_rate.map_or(f64::INFINITY, |r| (r - slow_rate).abs() / slow_rate);
    checks.push(check(
        "slow_decay",
        rel <= opts.decay_rel_tol,
        rel,
        opts.decay_rel_tol,
        format!(
            "fit on [{:.4}, {:.4}] gives {}, sqrt(lambda1) = {slow_rate:.6}",
            window.0,
            window.1,
            decay_rate.map_or("no fit".to_string(), |r| format!("{r:.6}"))
        ),
    ));

    let ham = max_interior(&hamiltonian_residual(u, v, params)?);
    let ham_tol = opts.hamiltonian_coeff * h * h;
    checks.push(check("hamiltonian_residual", ham <= ham_tol, ham, ham_tol, "max over interior nodes"));

    checks.push(check(
        "euler_lagrange_residual",
        el_residual <= opts.el_tol,
        el_residual,
        opts.el_tol,
        "max over inactive nodes",
    ));

    let all_pass = checks.iter().all(|c| c.pass);
    Ok(PropertyReport { checks, all_pass, x1, x2, tail_end, decay_rate, slow_rate, tol })
}
