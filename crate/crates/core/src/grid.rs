//! Uniform grid on the truncated half-line `[0, x_max]` and grid functions.
//!
//! Trapezoid weights (`h/2` at both ends) define the discrete `L^2` inner
//! product used everywhere else in the crate.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{PulseError, Result};

/// Smallest number of intervals accepted by [`Grid::new`].
pub const MIN_INTERVALS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid {
    x_max: f64,
    n: usize,
    h: f64,
}

/// Serialized form of a [`Grid`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_max: f64,
    pub n: usize,
}

impl TryFrom<GridSpec> for Grid {
    type Error = PulseError;

    fn try_from(spec: GridSpec) -> Result<Self> {
        Grid::new(spec.x_max, spec.n)
    }
}

impl From<Grid> for GridSpec {
    fn from(g: Grid) -> Self {
        GridSpec { x_max: g.x_max, n: g.n }
    }
}

impl Grid {
    pub fn new(x_max: f64, n: usize) -> Result<Self> {
        if !(x_max.is_finite() && x_max > 0.0) {
            return Err(PulseError::InvalidParameter(format!("x_max must be positive, got {x_max}")));
        }
        if n < MIN_INTERVALS {
            return Err(PulseError::InvalidParameter(format!("need at least {MIN_INTERVALS} intervals, got {n}")));
        }
        Ok(Self { x_max, n, h: x_max / n as f64 })
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// Number of intervals; there are `n + 1` nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.n {
            self.x_max
        } else {
            i as f64 * self.h
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(move |i| self.x(i))
    }

    /// Trapezoid weight of node `i`.
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i == self.n {
            0.5 * self.h
        } else {
            self.h
        }
    }

    /// Same interval count, twice as many intervals.
    pub fn refined(&self) -> Self {
        Self::new(self.x_max, 2 * self.n).expect("refinement of a valid grid")
    }

    /// Index of the node nearest to `x`, clamped to the grid.
    pub fn nearest(&self, x: f64) -> usize {
        ((x / self.h).round().max(0.0) as usize).min(self.n)
    }

    fn same_as(&self, other: &Grid) -> bool {
        self.n == other.n && self.x_max == other.x_max
    }
}

/// A real grid function.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    grid: Grid,
    values: Vec<f64>,
}

impl Profile {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(PulseError::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(PulseError::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self { grid, values: vec![c; grid.len()] }
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64) -> f64) -> Self {
        Self { grid, values: grid.nodes().map(&mut f).collect() }
    }

    /// Builds a profile without the finiteness check; used on solver output
    /// whose entries are finite by construction.
    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &Profile, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_grid(other)?;
        Ok(Self { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect() })
    }

    pub fn check_grid(&self, other: &Profile) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(PulseError::GridMismatch(format!(
                "n = {} / {}, x_max = {} / {}",
                self.grid.n, other.grid.n, self.grid.x_max, other.grid.x_max
            )))
        }
    }

    /// Trapezoid rule over `[0, x_max]`.
    pub fn integrate(&self) -> f64 {
        let n = self.grid.n;
        let inner: f64 = self.values[1..n].iter().sum();
        self.grid.h * (inner + 0.5 * (self.values[0] + self.values[n]))
    }

    /// Discrete `L^2` inner product with trapezoid weights.
    pub fn dot(&self, other: &Profile) -> f64 {
        debug_assert!(self.grid.same_as(&other.grid));
        let n = self.grid.n;
        let inner: f64 = (1..n).map(|i| self.values[i] * other.values[i]).sum();
        self.grid.h * (inner + 0.5 * (self.values[0] * other.values[0] + self.values[n] * other.values[n]))
    }

    pub fn l2_norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Sum of squared forward differences over `h`: the exact integral of the
    /// squared slope of the piecewise-linear interpolant.
    pub fn gradient_energy(&self) -> f64 {
        self.values.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum::<f64>() / self.grid.h
    }

    /// Discrete `H^1` norm: `(||z'||^2 + ||z||^2)^(1/2)`.
    pub fn h1_norm(&self) -> f64 {
        (self.gradient_energy() + self.dot(self)).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Central differences inside, second-order one-sided at both ends.
    pub fn derivative(&self) -> Profile {
        let n = self.grid.n;
        let h = self.grid.h;
        let p = &self.values;
        let mut out = vec![0.0; n + 1];
        out[0] = (-3.0 * p[0] + 4.0 * p[1] - p[2]) / (2.0 * h);
        for i in 1..n {
            out[i] = (p[i + 1] - p[i - 1]) / (2.0 * h);
        }
        out[n] = (3.0 * p[n] - 4.0 * p[n - 1] + p[n - 2]) / (2.0 * h);
        Profile { grid: self.grid, values: out }
    }

    /// Linear interpolation at `x`, clamped to `[0, x_max]`.
    pub fn interpolate(&self, x: f64) -> f64 {
        let h = self.grid.h;
        let t = (x / h).clamp(0.0, self.grid.n as f64);
        let i = (t.floor() as usize).min(self.grid.n - 1);
        let frac = t - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    /// Even extension to `[-x_max, x_max]` as `(x, value)` pairs.
    pub fn mirrored(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(2 * self.len() - 1);
        for i in (1..=self.grid.n).rev() {
            out.push((-self.grid.x(i), self.values[i]));
        }
        for i in 0..=self.grid.n {
            out.push((self.grid.x(i), self.values[i]));
        }
        out
    }

    /// Two-column CSV (`x,value`) with 17 significant digits.
    pub fn to_csv_string(&self) -> String {
        let mut s = String::with_capacity(48 * self.len());
        s.push_str("x,value\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(s, "{},{}", fmt_f64(self.grid.x(i)), fmt_f64(*v));
        }
        s
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_csv_string().as_bytes())?;
        Ok(())
    }

    /// Reads a CSV written by [`Profile::write_csv`]; the grid is rebuilt from
    /// the node count and the last abscissa.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            if lineno == 0 {
                if line.trim() != "x,value" {
                    return Err(PulseError::Parse(format!("unexpected header {line:?}")));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let mut next = || -> Result<f64> {
                cols.next()
                    .ok_or_else(|| PulseError::Parse(format!("line {}: missing column", lineno + 1)))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| PulseError::Parse(format!("line {}: {e}", lineno + 1)))
            };
            xs.push(next()?);
            vs.push(next()?);
        }
        if xs.len() < MIN_INTERVALS + 1 {
            return Err(PulseError::Parse(format!("too few rows ({})", xs.len())));
        }
        let grid = Grid::new(*xs.last().unwrap(), xs.len() - 1)?;
        for (i, &x) in xs.iter().enumerate() {
            if (x - grid.x(i)).abs() > 1e-9 * grid.x_max().max(1.0) {
                return Err(PulseError::Parse(format!("row {i}: abscissa {x} is not on a uniform grid")));
            }
        }
        Profile::new(grid, vs)
    }
}

/// Fixed 17-significant-digit scientific format used by every CSV writer.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
