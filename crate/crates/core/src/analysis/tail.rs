//! Tail decay fits and the first integral of the steady system.

use crate::error::{PulseError, Result};
use crate::grid::Profile;
use crate::model::{potential_f, Params};

/// Least-squares decay rate of `|u|` on `[x_lo, x_hi]`: minus the slope of
/// `log |u|` against `x` over the window nodes.
pub fn fit_decay(u: &Profile, window: (f64, f64)) -> Result<f64> {
    let (x_lo, x_hi) = window;
    let grid = u.grid();
    if !(x_lo < x_hi) || x_lo < 0.0 || x_hi > grid.x_max() {
        return Err(PulseError::Window(format!("invalid window [{x_lo}, {x_hi}]")));
    }
    let nodes: Vec<usize> = (0..grid.len()).filter(|&i| (x_lo..=x_hi).contains(&grid.x(i))).collect();
    if nodes.len() < 3 {
        return Err(PulseError::Window(format!("window [{x_lo}, {x_hi}] holds fewer than 3 nodes")));
    }
    let sign = u.values()[nodes[0]].signum();
    if let Some(&bad) = nodes.iter().find(|&&i| {
        let v = u.values()[i];
        v == 0.0 || v.signum() != sign
    }) {
        return Err(PulseError::Window(format!(
            "profile vanishes or changes sign at x = {} inside the window",
            grid.x(bad)
        )));
    }
    let m = nodes.len() as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for &i in &nodes {
        sx += grid.x(i);
        sy += u.values()[i].abs().ln();
    }
    let (mx, my) = (sx / m, sy / m);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &i in &nodes {
        let dx = grid.x(i) - mx;
        sxy += dx * (u.values()[i].abs().ln() - my);
        sxx += dx * dx;
    }
    Ok(-sxy / sxx)
}

/// Pointwise `v'^2/2 - gamma v^2/2 - v^4/4 + u v - d u'^2/2 + F(u)`, which
/// vanishes identically on solutions decaying at infinity.
pub fn hamiltonian_residual(u: &Profile, v: &Profile, params: &Params) -> Result<Profile> {
    u.check_grid(v)?;
    let du = u.derivative();
    let dv = v.derivative();
    let values = (0..u.len())
        .map(|i| {
            let (ui, vi) = (u.values()[i], v.values()[i]);
            let (dui, dvi) = (du.values()[i], dv.values()[i]);
            0.5 * dvi * dvi - 0.5 * params.gamma * vi * vi - 0.25 * vi.powi(4) + ui * vi - 0.5 * params.d * dui * dui
                + potential_f(ui, params.beta)
        })
        .collect();
    Ok(Profile::from_raw(*u.grid(), values))
}

/// Max of `|r|` over interior nodes.
pub fn max_interior(r: &Profile) -> f64 {
    let n = r.grid().n();
    r.values()[1..n].iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}
