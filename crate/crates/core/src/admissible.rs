//! The constraint class: `beta <= w <= 1` on `[0, x1]`, `0 <= w <= beta` on
//! `(x1, x2)`, `-(M+1) <= w <= 0` from `x2` on, with `x1`, `x2` tracked as node
//! indices. Node `i1` is the last node at or above `beta` and node `i2` the
//! first node at or below zero, so each crossing lies inside a cell.

use serde::{Deserialize, Serialize};

use crate::error::{PulseError, Result};
use crate::grid::{Grid, Profile};

/// Slack on band comparisons so nodes sitting exactly on `beta` or `0` do not flicker.
pub const BAND_TOL: f64 = 1e-12;

/// Band layout of the admissible class for fixed crossing indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bands {
    /// last node of the `[beta, 1]` band; `None` when that band is empty
    pub i1: Option<usize>,
    /// first node of the `[-(M+1), 0]` band; `None` encodes `x2 = infinity`
    pub i2: Option<usize>,
    pub beta: f64,
    /// tail cutoff `M`; the lowest admissible value is `-(M + 1)`
    pub m: f64,
}

impl Bands {
    pub fn new(i1: Option<usize>, i2: Option<usize>, beta: f64, m: f64) -> Self {
        Self { i1, i2, beta, m }
    }

    /// `(lower, upper)` bound at node `k`.
    pub fn bounds(&self, k: usize) -> (f64, f64) {
        if self.i1.is_some_and(|i1| k <= i1) {
            (self.beta, 1.0)
        } else if self.i2.is_none_or(|i2| k < i2) {
            (0.0, self.beta)
        } else {
            (-(self.m + 1.0), 0.0)
        }
    }

    pub fn clamp(&self, k: usize, value: f64) -> f64 {
        let (lo, hi) = self.bounds(k);
        value.clamp(lo, hi)
    }

    pub fn contains(&self, w: &Profile) -> bool {
        w.values().iter().enumerate().all(|(k, &v)| {
            let (lo, hi) = self.bounds(k);
            v >= lo - BAND_TOL && v <= hi + BAND_TOL
        })
    }
}

/// A profile together with its crossing indices.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleState {
    pub profile: Profile,
    pub i1: Option<usize>,
    pub i2: Option<usize>,
    pub bounds_ok: bool,
}

/// Serialized summary of an [`AdmissibleState`] in physical units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingSummary {
    pub i1: Option<usize>,
    pub i2: Option<usize>,
    pub x1: Option<f64>,
    pub x2: Option<f64>,
    pub bounds_ok: bool,
}

impl AdmissibleState {
    pub fn summary(&self) -> CrossingSummary {
        let grid = self.profile.grid();
        CrossingSummary {
            i1: self.i1,
            i2: self.i2,
            x1: self.i1.map(|i| grid.x(i)),
            x2: self.i2.map(|i| grid.x(i)),
            bounds_ok: self.bounds_ok,
        }
    }
}

/// Left-to-right scan: `i1` is the end of the initial block with
/// `w >= beta - tol`, `i2` the first later node with `w <= tol`.
pub fn detect_crossings(w: &Profile, beta: f64) -> (Option<usize>, Option<usize>) {
    let values = w.values();
    let i1 = values
        .iter()
        .position(|&v| v < beta - BAND_TOL)
        .map_or(Some(values.len() - 1), |first_below| first_below.checked_sub(1));
    let start = i1.map_or(0, |i| i + 1);
    let i2 = values[start..].iter().position(|&v| v <= BAND_TOL).map(|k| start + k);
    (i1, i2)
}

/// Euclidean projection onto the band box for fixed `(i1, i2)`: a pointwise clamp.
pub fn project(w: &Profile, i1: Option<usize>, i2: Option<usize>, beta: f64, m: f64) -> Result<AdmissibleState> {
    let n = w.grid().n();
    if let (Some(a), Some(b)) = (i1, i2) {
        if a >= b {
            return Err(PulseError::InvalidParameter(format!("need i1 < i2, got {a} >= {b}")));
        }
    }
    if i1.is_some_and(|i| i > n) || i2.is_some_and(|i| i > n) {
        return Err(PulseError::InvalidParameter(format!("crossing index beyond node {n}")));
    }
    let bands = Bands::new(i1, i2, beta, m);
    let values: Vec<f64> = w.values().iter().enumerate().map(|(k, &v)| bands.clamp(k, v)).collect();
    let profile = Profile::from_raw(*w.grid(), values);
    Ok(AdmissibleState { profile, i1, i2, bounds_ok: true })
}

/// Detects crossings and checks the band bounds without modifying `w`.
pub fn classify(w: &Profile, beta: f64, m: f64) -> AdmissibleState {
    let (i1, i2) = detect_crossings(w, beta);
    let bounds_ok = Bands::new(i1, i2, beta, m).contains(w);
    AdmissibleState { profile: w.clone(), i1, i2, bounds_ok }
}

/// Piecewise-linear competitor: 1 on `[0, a]`, linear to 0 on `[a, b]`, 0 after.
pub fn build_q0(a: f64, b: f64, grid: Grid) -> Result<Profile> {
    if !(a > 0.0 && a < b && b <= grid.x_max() && b - a <= 1.0) {
        return Err(PulseError::InvalidParameter(format!(
            "q0 needs 0 < a < b <= x_max and b - a <= 1, got a = {a}, b = {b}"
        )));
    }
    Ok(Profile::from_fn(grid, |x| q0_value(a, b, x)))
}

pub fn q0_value(a: f64, b: f64, x: f64) -> f64 {
    if x <= a {
        1.0
    } else if x >= b {
        0.0
    } else {
        (b - x) / (b - a)
    }
}
