//! The reduced energy `J(w) = int d w'^2/2 + F(w) + w N(w)/2 + N(w)^4/4` and its
//! `L^2` gradient.
//!
//! The discrete energy is built from the same trapezoid weights and the same
//! Dirichlet form as the discrete inhibitor energy `K`, so `N w` is the exact
//! minimizer of a discrete convex problem and the gradient below is the exact
//! derivative of the discrete `J` (the `v`-variation drops out at `v = N w`).

use serde::{Deserialize, Serialize};

use crate::error::{PulseError, Result};
use crate::grid::Profile;
use crate::model::{potential_f, reaction_f, Params};
use crate::operators::{solve_inhibitor_from, InhibitorOptions, InhibitorSolution};
use crate::stencil::neg_laplacian;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub total: f64,
    /// `int d w'^2 / 2`
    pub gradient_term: f64,
    /// `int F(w)`
    pub potential_term: f64,
    /// `int w N(w)/2 + N(w)^4/4`
    pub nonlocal_term: f64,
    /// `int d w'^2/2 - v'^2/2 - gamma v^2/2 - v^4/4 + w v + F(w)`
    pub alt_total: f64,
    pub form_gap: f64,
}

/// Energy, inhibitor state and diagnostics for one profile.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub report: EnergyReport,
    pub inhibitor: InhibitorSolution,
}

impl Evaluation {
    pub fn v(&self) -> &Profile {
        &self.inhibitor.v
    }
}

/// Evaluates `J(w)`, warm-starting the inhibitor solve from `warm` when given.
pub fn evaluate(w: &Profile, params: &Params, opts: &InhibitorOptions, warm: Option<&Profile>) -> Result<Evaluation> {
    let inhibitor = solve_inhibitor_from(w, params.gamma, opts, warm)?;
    if !inhibitor.converged {
        return Err(PulseError::InhibitorNotConverged {
            iterations: inhibitor.newton_iters,
            residual: inhibitor.residual_max,
        });
    }
    let report = energy_terms(w, &inhibitor.v, params);
    Ok(Evaluation { report, inhibitor })
}

/// Both forms of `J` for a given pair `(w, v)` with `v = N w`.
pub fn energy_terms(w: &Profile, v: &Profile, params: &Params) -> EnergyReport {
    let grid = w.grid();
    let (d, gamma, beta) = (params.d, params.gamma, params.beta);
    let wv = w.values();
    let vv = v.values();

    let gradient_term = 0.5 * d * w.gradient_energy();
    let mut potential_term = 0.0;
    let mut nonlocal_term = 0.0;
    let mut alt_pointwise = 0.0;
    for i in 0..grid.len() {
        let weight = grid.weight(i);
        let (wi, vi) = (wv[i], vv[i]);
        let v4 = vi * vi * vi * vi;
        potential_term += weight * potential_f(wi, beta);
        nonlocal_term += weight * (0.5 * wi * vi + 0.25 * v4);
        alt_pointwise += weight * (-0.5 * gamma * vi * vi - 0.25 * v4 + wi * vi);
    }
    let total = gradient_term + potential_term + nonlocal_term;
    let alt_total = gradient_term - 0.5 * v.gradient_energy() + alt_pointwise + potential_term;
    EnergyReport { total, gradient_term, potential_term, nonlocal_term, alt_total, form_gap: (total - alt_total).abs() }
}

pub fn energy(w: &Profile, params: &Params) -> Result<EnergyReport> {
    Ok(evaluate(w, params, &InhibitorOptions::default(), None)?.report)
}

/// Mass-normalized gradient `g = -d w'' - f(w) + v`; the entry at `x_max` is
/// zero because that node is held at the Dirichlet value.
pub fn gradient_from(w: &Profile, v: &Profile, params: &Params) -> Profile {
    let grid = *w.grid();
    let n = grid.n();
    let mut g = neg_laplacian(w.values(), grid.h());
    for i in 0..n {
        g[i] = params.d * g[i] - reaction_f(w.values()[i], params.beta) + v.values()[i];
    }
    g[n] = 0.0;
    Profile::from_raw(grid, g)
}

pub fn energy_gradient(w: &Profile, params: &Params) -> Result<Profile> {
    let eval = evaluate(w, params, &InhibitorOptions::default(), None)?;
    Ok(gradient_from(w, eval.v(), params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::model::Params;

    fn params() -> Params {
        Params::new(0.01, 1.0, 0.3, 0.4).unwrap()
    }

    #[test]
    fn zero_profile_has_zero_energy_and_gradient() {
        let g = Grid::new(10.0, 256).unwrap();
        let w = Profile::zeros(g);
        let e = energy(&w, &params()).unwrap();
        assert_eq!(e.total, 0.0);
        assert_eq!(e.alt_total, 0.0);
        assert_eq!(energy_gradient(&w, &params()).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn terms_sum_to_total() {
        let g = Grid::new(10.0, 512).unwrap();
        let w = Profile::from_fn(g, |x| (1.0 - x / 3.0).clamp(-0.5, 1.0) * (-(x / 6.0).powi(4)).exp());
        let e = energy(&w, &params()).unwrap();
        assert_eq!(e.total, e.gradient_term + e.potential_term + e.nonlocal_term);
        assert!(e.nonlocal_term >= 0.0);
        assert!(e.form_gap < 1e-10, "gap {}", e.form_gap);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let g = Grid::new(12.0, 400).unwrap();
        let p = params();
        let w = Profile::from_fn(g, |x| 0.9 * (-(x / 2.0).powi(2)).exp() - 0.3 * (-(x - 4.0).powi(2)).exp());
        let mut dir = Profile::from_fn(g, |x| (0.8 * x).sin() * (-(x / 5.0).powi(2)).exp());
        let n = g.n();
        dir.values_mut()[n] = 0.0;
        let grad = energy_gradient(&w, &p).unwrap();
        let eps = 1e-6;
        let plus = w.zip_map(&dir, |a, b| a + eps * b).unwrap();
        let minus = w.zip_map(&dir, |a, b| a - eps * b).unwrap();
        let fd = (energy(&plus, &p).unwrap().total - energy(&minus, &p).unwrap().total) / (2.0 * eps);
        let analytic = grad.dot(&dir);
        assert!(((fd - analytic) / analytic).abs() < 1e-5, "fd {fd} analytic {analytic}");
    }
}
