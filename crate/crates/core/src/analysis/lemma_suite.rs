//! Randomized verification of the operator and energy inequalities on seeded
//! samples. Failures are reported as data with worst-case witnesses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::admissible::{detect_crossings, project, q0_value};
use crate::energy::evaluate;
use crate::error::Result;
use crate::grid::{Grid, Profile};
use crate::model::{compute_constants, potential_f, tail_cutoff, Params};
use crate::operators::{apply_green, green_kernel, inhibitor, GreenKind, GreenMethod, InhibitorOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteOptions {
    /// slack on every inequality
    pub tol: f64,
    /// samples used for the Green-method refinement study
    pub richardson_samples: usize,
    /// accepted band for successive error ratios under halving of `h`
    pub richardson_band: (f64, f64),
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { tol: 1e-6, richardson_samples: 4, richardson_band: (2.5, 6.0) }
    }
}

/// Aggregate of one inequality over all samples; `margin >= -tolerance` passes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteCheck {
    pub name: String,
    pub evaluated: usize,
    pub passed: usize,
    pub failed: usize,
    pub worst_margin: f64,
    pub worst_sample: Option<usize>,
    pub tolerance: f64,
}

impl SuiteCheck {
    fn new(name: &str, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            evaluated: 0,
            passed: 0,
            failed: 0,
            worst_margin: f64::INFINITY,
            worst_sample: None,
            tolerance,
        }
    }

    fn record(&mut self, sample: usize, margin: f64) {
        self.evaluated += 1;
        if margin >= -self.tolerance {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        if margin < self.worst_margin || self.worst_sample.is_none() {
            self.worst_margin = margin;
            self.worst_sample = Some(sample);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub n_samples: usize,
    pub params: Params,
    pub grid: Grid,
    pub options: SuiteOptions,
    pub checks: Vec<SuiteCheck>,
    /// successive error ratios of the Green-method comparison per sample
    pub richardson_ratios: Vec<[f64; 2]>,
    pub total_failed: usize,
    pub all_pass: bool,
}

impl SuiteReport {
    pub fn check(&self, name: &str) -> Option<&SuiteCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "seed {} samples {} grid x_max={} n={}\n",
            self.seed,
            self.n_samples,
            self.grid.x_max(),
            self.grid.n()
        );
        for c in &self.checks {
            out.push_str(&format!(
                "{:<28} {:>4}/{:<4} worst margin {:+.3e} (sample {}) tol {:.1e}\n",
                c.name,
                c.passed,
                c.evaluated,
                c.worst_margin,
                c.worst_sample.map_or("-".into(), |s| s.to_string()),
                c.tolerance
            ));
        }
        out
    }
}

/// Independent stream per sample so samples can be drawn in any order.
fn sample_rng(seed: u64, sample: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample as u64);
    rng
}

struct Bump {
    center: f64,
    width: f64,
    amp: f64,
}

fn random_bumps(rng: &mut ChaCha8Rng, reach: f64, amp: f64) -> Vec<Bump> {
    let count = rng.gen_range(2..=5);
    (0..count)
        .map(|_| Bump {
            center: rng.gen_range(0.0..reach),
            width: rng.gen_range(0.3..1.5),
            amp: rng.gen_range(-amp..amp),
        })
        .collect()
}

fn eval_bumps(bumps: &[Bump], x: f64) -> f64 {
    bumps.iter().map(|b| b.amp * (-((x - b.center) / b.width).powi(2)).exp()).sum()
}

/// Smooth signed sample, concentrated in `[0, reach]` so the far boundary
/// sees only exponentially small data.
fn smooth_sample(grid: Grid, rng: &mut ChaCha8Rng, reach: f64) -> Profile {
    let bumps = random_bumps(rng, reach, 1.5);
    Profile::from_fn(grid, |x| eval_bumps(&bumps, x))
}

/// Nonnegative sample with values in `[0, 1]`.
fn nonnegative_sample(grid: Grid, rng: &mut ChaCha8Rng, reach: f64) -> Profile {
    let bumps: Vec<Bump> = random_bumps(rng, reach, 1.0).into_iter().map(|b| Bump { amp: b.amp.abs(), ..b }).collect();
    Profile::from_fn(grid, |x| eval_bumps(&bumps, x).clamp(0.0, 1.0))
}

/// Admissible sample: a plateau above `beta`, a front, a negative well and
/// smooth noise, projected onto the band box of its own crossings.
fn admissible_sample(grid: Grid, rng: &mut ChaCha8Rng, params: &Params, m: f64) -> Result<Profile> {
    let plateau = rng.gen_range(0.3..4.0);
    let front = rng.gen_range(0.2..1.5);
    let height = rng.gen_range(params.beta + 0.05..1.2);
    let depth = rng.gen_range(0.0..m + 1.5);
    let well = rng.gen_range(0.5..3.0);
    let noise = random_bumps(rng, plateau + 4.0, 0.15);
    let mut w = Profile::from_fn(grid, |x| {
        let core = height / (1.0 + ((x - plateau) / (0.25 * front)).exp());
        let trough = -depth * (-((x - plateau - front - well) / well).powi(2)).exp();
        core + trough + eval_bumps(&noise, x)
    });
    w.values_mut()[grid.n()] = 0.0;
    let (mut i1, i2) = detect_crossings(&w, params.beta);
    if i1.is_none() {
        w.values_mut()[0] = params.beta;
        i1 = Some(0);
    }
    let i2 = i2.filter(|&k| Some(k) > i1);
    Ok(project(&w, i1, i2, params.beta, m)?.profile)
}

fn max_diff_on(a: &Profile, b: &Profile, upto: f64) -> f64 {
    let g = a.grid();
    (0..g.len()).take_while(|&i| g.x(i) <= upto).fold(0.0_f64, |m, i| m.max((a.values()[i] - b.values()[i]).abs()))
}

fn pointwise_min(a: &Profile, b: &Profile, f: impl Fn(f64, f64) -> f64) -> f64 {
    a.values().iter().zip(b.values()).fold(f64::INFINITY, |m, (&x, &y)| m.min(f(x, y)))
}

fn sub(a: &Profile, b: &Profile) -> Result<Profile> {
    a.zip_map(b, |x, y| x - y)
}

/// Upper bound `d0/(2(b-a)) + int F(q0) + 3/4 int q0 L q0` on `J(q0)` for the
/// constructive competitor at `d = d0`, evaluated on `[0, b]` where `q0` lives.
pub fn competitor_energy_bound(beta: f64, gamma: f64, nodes: usize) -> Result<(f64, f64)> {
    let c = compute_constants(beta, gamma)?;
    let (a, b) = (c.a_q0, c.b_q0);
    let h = b / nodes as f64;
    let k = gamma.sqrt();
    let xs: Vec<f64> = (0..=nodes).map(|i| i as f64 * h).collect();
    let w = |i: usize| if i == 0 || i == nodes { 0.5 * h } else { h };
    let q: Vec<f64> = xs.iter().map(|&x| q0_value(a, b, x)).collect();
    let potential: f64 = (0..=nodes).map(|i| w(i) * potential_f(q[i], beta)).sum();
    let mut quadratic = 0.0;
    for i in 0..=nodes {
        let inner: f64 = (0..=nodes).map(|j| w(j) * green_kernel(k, xs[i], xs[j]) * q[j]).sum();
        quadratic += w(i) * q[i] * inner;
    }
    let bound = c.d0 / (2.0 * (b - a)) + potential + 0.75 * quadratic;
    Ok((bound, -c.m0))
}

pub fn verify_lemma_suite(params: &Params, grid: Grid, n_samples: usize, seed: u64) -> Result<SuiteReport> {
    verify_lemma_suite_with(params, grid, n_samples, seed, &SuiteOptions::default())
}

pub fn verify_lemma_suite_with(
    params: &Params,
    grid: Grid,
    n_samples: usize,
    seed: u64,
    opts: &SuiteOptions,
) -> Result<SuiteReport> {
    params.validate()?;
    let gamma = params.gamma;
    let tol = opts.tol;
    let m = tail_cutoff(params.beta, gamma)?;
    let lip = 1.0_f64.max(1.0 / gamma);
    let inh = InhibitorOptions::default();
    let n_of = |p: &Profile| inhibitor(p, gamma, &inh);
    let green = |kind, p: &Profile| apply_green(kind, p, gamma, GreenMethod::Solve);
    let reach = grid.x_max() / 6.0;

    let names = [
        "green_agreement",
        "green_richardson",
        "self_adjoint",
        "sandwich_l0_n_l",
        "inhibitor_bounds",
        "monotonicity",
        "lipschitz_h1",
        "h1_bound",
        "nonlocal_positivity",
        "nonlocal_monotone",
        "nonlocal_identity",
        "decomposition",
        "energy_two_forms",
        "energy_lower_bound",
        "competitor_energy",
    ];
    let mut checks: Vec<SuiteCheck> = names.iter().map(|n| SuiteCheck::new(n, tol)).collect();
    let idx = |name: &str| names.iter().position(|n| *n == name).expect("known check");
    let mut richardson_ratios = Vec::new();
    let h2 = grid.h() * grid.h();
    checks[idx("green_agreement")].tolerance = 100.0 * h2;
    checks[idx("green_richardson")].tolerance = 0.0;

    for s in 0..n_samples {
        let mut rng = sample_rng(seed, s);
        // sample 0 is the zero profile
        let (w1, w2, pos, adm) = if s == 0 {
            let z = Profile::zeros(grid);
            let mut adm = z.clone();
            adm.values_mut()[0] = params.beta;
            (z.clone(), z.clone(), z, adm)
        } else {
            let w1 = smooth_sample(grid, &mut rng, reach);
            let w2 = smooth_sample(grid, &mut rng, reach);
            let pos = nonnegative_sample(grid, &mut rng, reach);
            let adm = admissible_sample(grid, &mut rng, params, m)?;
            (w1, w2, pos, adm)
        };

        for kind in [GreenKind::L, GreenKind::L0] {
            let q = apply_green(kind, &w1, gamma, GreenMethod::Quadrature)?;
            let v = green(kind, &w1)?;
            checks[idx("green_agreement")].record(s, -max_diff_on(&q, &v, grid.x_max() / 2.0));
        }
        if s >= 1 && s <= opts.richardson_samples && grid.n() >= 64 {
            let errs: Vec<f64> = [4usize, 2, 1]
                .iter()
                .map(|&f| {
                    let g = Grid::new(grid.x_max(), grid.n() / f)?;
                    let mut r2 = sample_rng(seed, s);
                    let w = smooth_sample(g, &mut r2, reach);
                    let q = apply_green(GreenKind::L, &w, gamma, GreenMethod::Quadrature)?;
                    let v = apply_green(GreenKind::L, &w, gamma, GreenMethod::Solve)?;
                    Ok(max_diff_on(&q, &v, grid.x_max() / 2.0))
                })
                .collect::<Result<_>>()?;
            let ratios = [errs[0] / errs[1], errs[1] / errs[2]];
            richardson_ratios.push(ratios);
            let (lo, hi) = opts.richardson_band;
            let margin = ratios.iter().fold(f64::INFINITY, |a, &r| a.min(r - lo).min(hi - r));
            checks[idx("green_richardson")].record(s, margin);
        }

        let l1 = green(GreenKind::L, &w1)?;
        let l2 = green(GreenKind::L, &w2)?;
        checks[idx("self_adjoint")].record(s, -(w1.dot(&l2) - w2.dot(&l1)).abs());

        let n_pos = n_of(&pos)?;
        let lo = green(GreenKind::L0, &pos)?;
        let hi = green(GreenKind::L, &pos)?;
        let sandwich = pointwise_min(&n_pos, &lo, |n, l| n - l).min(pointwise_min(&hi, &n_pos, |l, n| l - n));
        checks[idx("sandwich_l0_n_l")].record(s, sandwich);

        let n_adm = n_of(&adm)?;
        let bounds = (1.0 - n_adm.max()).min(n_adm.min() + m + 1.0);
        checks[idx("inhibitor_bounds")].record(s, bounds);

        // w_hi >= w_lo by a nonnegative smooth increment
        let bump_center = rng.gen_range(0.0..reach);
        let incr = Profile::from_fn(grid, |x| 0.1 * (-((x - bump_center) / 0.7).powi(2)).exp());
        let w_hi = w1.zip_map(&incr, |a, b| a + b)?;
        let n_w1 = n_of(&w1)?;
        let n_hi = n_of(&w_hi)?;
        checks[idx("monotonicity")].record(s, pointwise_min(&n_hi, &n_w1, |a, b| a - b));

        let n_w2 = n_of(&w2)?;
        let dn = sub(&n_w2, &n_w1)?;
        let dw = sub(&w2, &w1)?;
        checks[idx("lipschitz_h1")].record(s, lip * dw.l2_norm() - dn.h1_norm());
        checks[idx("h1_bound")].record(s, lip * w1.l2_norm() - n_w1.h1_norm());

        checks[idx("nonlocal_positivity")].record(s, w1.dot(&n_w1));
        checks[idx("nonlocal_monotone")].record(s, dw.dot(&dn));
        let rhs = n_w1.gradient_energy() + gamma * n_w1.dot(&n_w1) + n_w1.map(|v| v.powi(4)).integrate();
        checks[idx("nonlocal_identity")].record(s, -(w1.dot(&n_w1) - rhs).abs());

        let f = adm.map(|v| v.max(0.0));
        let g = adm.map(|v| (-v).max(0.0));
        let nf = n_of(&f)?;
        let ng = n_of(&g)?;
        let lf = green(GreenKind::L, &f)?;
        let lg = green(GreenKind::L, &g)?;
        let lhs = adm.dot(&n_adm);
        let bound = sub(&f, &g)?.dot(&sub(&nf, &ng)?) - 4.0 * lf.dot(&lg);
        checks[idx("decomposition")].record(s, lhs - bound);

        let e = evaluate(&adm, params, &inh, None)?;
        checks[idx("energy_two_forms")].record(s, -e.report.form_gap);
        if let Ok(c) = compute_constants(params.beta, gamma) {
            checks[idx("energy_lower_bound")].record(s, e.report.total + c.m1);
        }
    }

    if let Ok((bound, target)) = competitor_energy_bound(params.beta, gamma, 400) {
        checks[idx("competitor_energy")].record(0, target - bound);
    }

    let total_failed = checks.iter().map(|c| c.failed).sum();
    Ok(SuiteReport {
        seed,
        n_samples,
        params: *params,
        grid,
        options: *opts,
        checks,
        richardson_ratios,
        total_failed,
        all_pass: total_failed == 0,
    })
}
