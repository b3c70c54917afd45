//! Time integration of
//! `u_t = d u_xx + f(u) - v`, `tau v_t = v_xx - gamma v - v^3 + u`
//! by a first-order IMEX step: diffusion and linear decay implicit, the
//! remaining reaction terms explicit. Uses the same stencil as the steady
//! solver, so discrete steady states are discrete fixed points.

use serde::{Deserialize, Serialize};

use crate::error::{PulseError, Result};
use crate::grid::Profile;
use crate::model::{reaction_f, tail_cutoff, Params};
use crate::stencil::solve_shifted;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub snapshots: Vec<(Profile, Profile)>,
    /// max-norm of `u(T) - u(0)`
    pub drift: f64,
    pub steps: usize,
}

/// JSON side of a trajectory; profiles go to CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryIndex {
    pub times: Vec<f64>,
    pub drift: f64,
    pub steps: usize,
    pub dt: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &(Profile, Profile) {
        self.snapshots.last().expect("a trajectory holds at least the initial state")
    }

    pub fn index(&self, dt: f64) -> TrajectoryIndex {
        TrajectoryIndex { times: self.times.clone(), drift: self.drift, steps: self.steps, dt }
    }
}

/// One IMEX step of size `dt`.
pub fn imex_step(u: &Profile, v: &Profile, params: &Params, dt: f64) -> (Profile, Profile) {
    let grid = *u.grid();
    let h = grid.h();
    let len = grid.len();
    let (uv, vv) = (u.values(), v.values());

    let rhs_u: Vec<f64> = (0..len).map(|i| uv[i] + dt * (reaction_f(uv[i], params.beta) - vv[i])).collect();
    let u_next = solve_shifted(dt * params.d, h, &vec![1.0; len], &rhs_u);

    let rhs_v: Vec<f64> = (0..len).map(|i| params.tau * vv[i] + dt * (uv[i] - vv[i].powi(3))).collect();
    let v_next = solve_shifted(dt, h, &vec![params.tau + dt * params.gamma; len], &rhs_v);

    (Profile::from_raw(grid, u_next), Profile::from_raw(grid, v_next))
}

/// Integrates to `t_end` with a fixed step, keeping every `snapshot_every`-th
/// state plus the first and the last.
pub fn evolve(
    u_init: &Profile,
    v_init: &Profile,
    params: &Params,
    dt: f64,
    t_end: f64,
    snapshot_every: usize,
) -> Result<Trajectory> {
    params.validate()?;
    u_init.check_grid(v_init)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(PulseError::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if !(t_end >= dt && t_end.is_finite()) {
        return Err(PulseError::InvalidParameter(format!("need t_end >= dt, got t_end = {t_end}, dt = {dt}")));
    }
    if snapshot_every == 0 {
        return Err(PulseError::InvalidParameter("snapshot_every must be at least 1".into()));
    }
    let limit = 10.0 * (tail_cutoff(params.beta, params.gamma)? + 2.0);
    let steps = (t_end / dt).round() as usize;

    let mut u = u_init.clone();
    let mut v = v_init.clone();
    let mut times = vec![0.0];
    let mut snapshots = vec![(u.clone(), v.clone())];
    for k in 1..=steps {
        let (un, vn) = imex_step(&u, &v, params, dt);
        u = un;
        v = vn;
        let t = k as f64 * dt;
        let peak = u.max_abs().max(v.max_abs());
        if !(peak <= limit) {
            return Err(PulseError::BlowUp { time: t, value: peak });
        }
        if k % snapshot_every == 0 || k == steps {
            times.push(t);
            snapshots.push((u.clone(), v.clone()));
        }
    }
    let drift = u.zip_map(u_init, |a, b| a - b)?.max_abs();
    Ok(Trajectory { times, snapshots, drift, steps })
}
