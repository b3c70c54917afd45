//! Linear resolvents `L = (gamma - D^2)^-1`, `L0 = (gamma + 1 - D^2)^-1` and the
//! nonlinear inhibitor map `N: u -> v` with `v'' - gamma v - v^3 + u = 0`,
//! `v'(0) = 0`, `v(x_max) = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{PulseError, Result};
use crate::grid::Profile;
use crate::stencil::{neg_laplacian, solve_shifted};

/// Which resolvent to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GreenKind {
    /// shift `gamma`
    L,
    /// shift `gamma + 1`
    L0,
}

impl GreenKind {
    pub fn shift(self, gamma: f64) -> f64 {
        match self {
            GreenKind::L => gamma,
            GreenKind::L0 => gamma + 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GreenMethod {
    /// trapezoid quadrature against the half-line kernel
    Quadrature,
    /// tridiagonal solve with Neumann at 0 and Dirichlet at `x_max`
    Solve,
}

/// Half-line Neumann kernel of `(k^2 - D^2)^-1`:
/// `G(x, s) = (e^{-k|x-s|} + e^{-k(x+s)}) / (2k)`, which equals
/// `e^{-k max} cosh(k min) / k` without overflowing for large arguments.
pub fn green_kernel(k: f64, x: f64, s: f64) -> f64 {
    ((-k * (x - s).abs()).exp() + (-k * (x + s)).exp()) / (2.0 * k)
}

pub fn apply_green(kind: GreenKind, w: &Profile, gamma: f64, method: GreenMethod) -> Result<Profile> {
    if !(gamma > 0.0) {
        return Err(PulseError::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    let shift = kind.shift(gamma);
    let grid = *w.grid();
    let values = match method {
        GreenMethod::Solve => {
            let shifts = vec![shift; grid.len()];
            solve_shifted(1.0, grid.h(), &shifts, w.values())
        }
        GreenMethod::Quadrature => {
            let n = grid.n();
            let k = shift.sqrt();
            let h = grid.h();
            // exp(-k h m) for every lag m; x_i = i h on a uniform grid
            let decay: Vec<f64> = (0..=2 * n).map(|m| (-k * h * m as f64).exp()).collect();
            let weighted: Vec<f64> = w.values().iter().enumerate().map(|(j, &wj)| grid.weight(j) * wj).collect();
            (0..=n)
                .map(|i| {
                    let sum: f64 =
                        weighted.iter().enumerate().map(|(j, &wj)| wj * (decay[i.abs_diff(j)] + decay[i + j])).sum();
                    sum / (2.0 * k)
                })
                .collect()
        }
    };
    Ok(Profile::from_raw(grid, values))
}

/// Controls for the inhibitor Newton iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InhibitorOptions {
    /// max-norm tolerance on the strong-form residual
    pub tol: f64,
    pub max_iter: usize,
    /// Armijo constant for the backtracking on the convex energy
    pub armijo: f64,
}

impl Default for InhibitorOptions {
    fn default() -> Self {
        Self { tol: 1e-11, max_iter: 50, armijo: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InhibitorSolution {
    pub v: Profile,
    /// max-norm of `v'' - gamma v - v^3 + u` over nodes `0..n`
    pub residual_max: f64,
    pub newton_iters: usize,
    pub converged: bool,
    /// tolerance actually applied (the requested one, raised to the
    /// round-off floor of the stencil on fine grids)
    pub tol_used: f64,
}

/// Strong-form residual `-v'' + gamma v + v^3 - u`; entry `n` is zero.
fn inhibitor_residual(u: &[f64], v: &[f64], gamma: f64, h: f64) -> Vec<f64> {
    let mut r = neg_laplacian(v, h);
    let n = v.len() - 1;
    for i in 0..n {
        r[i] += gamma * v[i] + v[i] * v[i] * v[i] - u[i];
    }
    r
}

/// Discrete convex energy `K(z) = int z'^2/2 + gamma z^2/2 + z^4/4 - u z`.
pub fn inhibitor_energy(u: &Profile, z: &Profile, gamma: f64) -> f64 {
    let grid = z.grid();
    let pointwise: f64 = (0..grid.len())
        .map(|i| {
            let (zi, ui) = (z.values()[i], u.values()[i]);
            grid.weight(i) * (0.5 * gamma * zi * zi + 0.25 * zi.powi(4) - ui * zi)
        })
        .sum();
    0.5 * z.gradient_energy() + pointwise
}

/// `v = N u`, started from `L u`.
pub fn solve_inhibitor(u: &Profile, gamma: f64, opts: &InhibitorOptions) -> Result<InhibitorSolution> {
    solve_inhibitor_from(u, gamma, opts, None)
}

/// `v = N u` by damped Newton on the discrete energy `K`, started from
/// `init` when given (warm start) and from `L u` otherwise.
pub fn solve_inhibitor_from(
    u: &Profile,
    gamma: f64,
    opts: &InhibitorOptions,
    init: Option<&Profile>,
) -> Result<InhibitorSolution> {
    if !(gamma > 0.0) {
        return Err(PulseError::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    let grid = *u.grid();
    let h = grid.h();
    let n = grid.n();
    let mut v = match init {
        Some(v0) => {
            u.check_grid(v0)?;
            let mut v = v0.clone();
            v.values_mut()[n] = 0.0;
            v
        }
        None => apply_green(GreenKind::L, u, gamma, GreenMethod::Solve)?,
    };

    let u_max = u.max_abs();
    let mut iters = 0;
    loop {
        let r = inhibitor_residual(u.values(), v.values(), gamma, h);
        let res = r.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let v_max = v.max_abs();
        let floor = 64.0 * f64::EPSILON * ((4.0 / (h * h) + gamma + 3.0 * v_max * v_max) * v_max + u_max);
        let tol_used = opts.tol.max(floor);
        if res <= tol_used {
            return Ok(InhibitorSolution { v, residual_max: res, newton_iters: iters, converged: true, tol_used });
        }
        if iters >= opts.max_iter {
            return Ok(InhibitorSolution { v, residual_max: res, newton_iters: iters, converged: false, tol_used });
        }
        iters += 1;

        let shift: Vec<f64> = v.values().iter().map(|&x| gamma + 3.0 * x * x).collect();
        let neg_r: Vec<f64> = r.iter().map(|x| -x).collect();
        let step = solve_shifted(1.0, h, &shift, &neg_r);

        // slope of K along the step in the trapezoid inner product
        let slope: f64 = (0..n).map(|i| grid.weight(i) * r[i] * step[i]).sum();
        let k0 = inhibitor_energy(u, &v, gamma);
        let mut t = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = v.values().iter().zip(&step).map(|(a, s)| a + t * s).collect();
            let trial = Profile::from_raw(grid, trial);
            let k1 = inhibitor_energy(u, &trial, gamma);
            if k1 <= k0 + opts.armijo * t * slope {
                break Some(trial);
            }
            // at round-off level K cannot resolve progress; fall back to the residual
            let r1 = inhibitor_residual(u.values(), trial.values(), gamma, h);
            let res1 = r1.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            if res1 < 0.5 * res {
                break Some(trial);
            }
            t *= 0.5;
            if t < 1e-10 {
                break None;
            }
        };
        match accepted {
            Some(next) => v = next,
            None => {
                return Ok(InhibitorSolution { v, residual_max: res, newton_iters: iters, converged: false, tol_used });
            }
        }
    }
}

/// `N u`, failing when the Newton iteration does not converge.
pub fn inhibitor(u: &Profile, gamma: f64, opts: &InhibitorOptions) -> Result<Profile> {
    let sol = solve_inhibitor(u, gamma, opts)?;
    if !sol.converged {
        return Err(PulseError::InhibitorNotConverged { iterations: sol.newton_iters, residual: sol.residual_max });
    }
    Ok(sol.v)
}

/// Frechet derivative of `N` at `w` applied to `w_hat`: solves
/// `v_hat'' - gamma v_hat - 3 v^2 v_hat = -w_hat` with `v = N w`.
pub fn inhibitor_derivative(w: &Profile, v: &Profile, w_hat: &Profile, gamma: f64) -> Result<Profile> {
    w.check_grid(v)?;
    w.check_grid(w_hat)?;
    if !(gamma > 0.0) {
        return Err(PulseError::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    let grid = *w.grid();
    let shift: Vec<f64> = v.values().iter().map(|&x| gamma + 3.0 * x * x).collect();
    Ok(Profile::from_raw(grid, solve_shifted(1.0, grid.h(), &shift, w_hat.values())))
}
