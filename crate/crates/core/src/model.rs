//! Model coefficients, the cubic reaction and its potential, and the closed-form
//! constants attached to the admissible class and to the existence regime.

use serde::{Deserialize, Serialize};

use crate::error::{PulseError, Result};

/// Activator reaction `f(u) = u (1 - u) (u - beta)`.
pub fn reaction_f(u: f64, beta: f64) -> f64 {
    u * (1.0 - u) * (u - beta)
}

/// Derivative of [`reaction_f`] with respect to `u`.
pub fn reaction_f_prime(u: f64, beta: f64) -> f64 {
    -3.0 * u * u + 2.0 * (1.0 + beta) * u - beta
}

/// Potential `F(u) = u^4/4 - (1+beta) u^3/3 + beta u^2/2`, so that `F' = -f`.
pub fn potential_f(u: f64, beta: f64) -> f64 {
    let u2 = u * u;
    u2 * u2 / 4.0 - (1.0 + beta) * u2 * u / 3.0 + beta * u2 / 2.0
}

/// Analytic derivative of [`potential_f`].
pub fn potential_f_prime(u: f64, beta: f64) -> f64 {
    u * u * u - (1.0 + beta) * u * u + beta * u
}

/// The two positive roots `beta1 < 1 < beta2` of `F`, i.e. the roots of
/// `3 xi^2 - 4 (1 + beta) xi + 6 beta = 0`.
pub fn potential_roots(beta: f64) -> Result<(f64, f64)> {
    if !(beta > 0.0 && beta < 0.5) {
        return Err(PulseError::InvalidParameter(format!("potential roots need 0 < beta < 1/2, got {beta}")));
    }
    let p = 2.0 * (1.0 + beta);
    let discriminant = p * p - 18.0 * beta;
    if discriminant <= 0.0 {
        return Err(PulseError::NoRealRoots { beta, discriminant });
    }
    // larger root first, smaller from the product of roots (= 2 beta)
    let beta2 = (p + discriminant.sqrt()) / 3.0;
    let beta1 = 2.0 * beta / beta2;
    Ok((beta1, beta2))
}

/// `gamma0 = 3 beta^2 / (1 - 2 beta) - 1`.
pub fn gamma0(beta: f64) -> f64 {
    3.0 * beta * beta / (1.0 - 2.0 * beta) - 1.0
}

/// `gamma1 = min{gamma0, 2 (beta + F(beta)) - 1/2}`.
pub fn gamma1(beta: f64) -> f64 {
    gamma0(beta).min(2.0 * (beta + potential_f(beta, beta)) - 0.5)
}

/// `gamma1` from the expanded polynomial `2 beta + beta^3/3 - beta^4/6 - 1/2`
/// for the second branch, without going through `F`.
pub fn gamma1_closed_form(beta: f64) -> f64 {
    let b2 = beta * beta;
    let first = 3.0 * b2 / (1.0 - 2.0 * beta) - 1.0;
    let second = 2.0 * beta + b2 * beta / 3.0 - b2 * b2 / 6.0 - 0.5;
    first.min(second)
}

/// Smallest `M >= 0` with `f(xi) >= 1 + 1/gamma` for every `xi <= -M`.
///
/// `f` is strictly decreasing on `(-inf, 0]`, so the crossing is unique.
/// Bisection on `[0, 10]` to an absolute width of `1e-12`; the returned value
/// is the upper end of the final bracket.
pub fn tail_cutoff(beta: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(PulseError::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    let target = 1.0 + 1.0 / gamma;
    let excess = |m: f64| reaction_f(-m, beta) - target;
    let (mut lo, mut hi) = (0.0_f64, 10.0_f64);
    if excess(lo) >= 0.0 || excess(hi) < 0.0 {
        return Err(PulseError::Bracketing { lo, hi });
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Model coefficients of the activator-inhibitor system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// activator diffusivity
    pub d: f64,
    /// inhibitor time constant; only the time-dependent problem reads it
    pub tau: f64,
    /// inhibitor linear decay rate
    pub gamma: f64,
    /// middle root of the cubic
    pub beta: f64,
}

/// Where a parameter triple sits relative to the existence theorem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub beta_in_range: bool,
    pub gamma_below_gamma1: bool,
    /// `d <= beta^2 / (4 (1 + beta gamma))`, the linearization part of `d1`
    pub d_below_linear_bound: bool,
    /// `d <= d1 = min{d0, beta^2 / (4 (1 + beta gamma))}` with the constructive `d0`
    pub d_below_d1: bool,
    /// all hypotheses of the theorem, including the constructive `d0`
    pub in_theorem_regime: bool,
    /// hypotheses with `d0` dropped; the practical regime the solver targets
    pub in_practical_regime: bool,
}

impl Params {
    pub fn new(d: f64, tau: f64, gamma: f64, beta: f64) -> Result<Self> {
        let p = Self { d, tau, gamma, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad =
            |name: &str, value: f64| Err(PulseError::InvalidParameter(format!("{name} = {value} is out of range")));
        if !(self.d.is_finite() && self.d > 0.0) {
            return bad("d", self.d);
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return bad("tau", self.tau);
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return bad("gamma", self.gamma);
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return bad("beta", self.beta);
        }
        Ok(())
    }

    /// Upper bound on `d` used by the linearization at the rest state.
    pub fn linear_d_bound(&self) -> f64 {
        self.beta * self.beta / (4.0 * (1.0 + self.beta * self.gamma))
    }

    pub fn regime(&self) -> Regime {
        let beta_in_range = self.beta > 1.0 / 3.0 && self.beta < 0.5;
        let gamma_below_gamma1 = beta_in_range && self.gamma < gamma1(self.beta);
        let d_below_linear_bound = self.d <= self.linear_d_bound();
        let d_below_d1 = if beta_in_range {
            compute_constants(self.beta, self.gamma).map(|c| self.d <= c.d1).unwrap_or(false)
        } else {
            false
        };
        Regime {
            beta_in_range,
            gamma_below_gamma1,
            d_below_linear_bound,
            d_below_d1,
            in_theorem_regime: beta_in_range && gamma_below_gamma1 && d_below_d1,
            in_practical_regime: beta_in_range && gamma_below_gamma1 && d_below_linear_bound,
        }
    }
}

/// Every closed-form constant attached to `(beta, gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub beta: f64,
    pub gamma: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma0: f64,
    pub gamma1: f64,
    /// negative-tail cutoff `M`
    #[serde(rename = "M")]
    pub m: f64,
    /// competitor constant `11/20 - (1+beta)/12 + beta/6`
    pub c0_competitor: f64,
    pub a_q0: f64,
    pub b_q0: f64,
    pub d0: f64,
    #[serde(rename = "M0")]
    pub m0: f64,
    #[serde(rename = "M1")]
    pub m1: f64,
    #[serde(rename = "M2")]
    pub m2_upper: f64,
    /// lower bracket for `x1`; kept exactly as printed, diagnostic only
    #[serde(rename = "m2")]
    pub m2_lower: f64,
    pub d1: f64,
}

/// Evaluates the constants for `beta` in `(1/3, 1/2)` and `gamma > 0`.
///
/// `d0`, `M0`, `M1`, `M2`, `m2` are conservative proof constants; they are
/// reported, not used to gate a solve.
pub fn compute_constants(beta: f64, gamma: f64) -> Result<ConstantsReport> {
    let g0 = gamma0(beta);
    if !(beta > 1.0 / 3.0 && beta < 0.5) || g0 <= 0.0 {
        return Err(PulseError::OutsideTheoremRange { beta, gamma0: g0 });
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(PulseError::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    let (beta1, beta2) = potential_roots(beta)?;
    let m = tail_cutoff(beta, gamma)?;

    let one_m2b = 1.0 - 2.0 * beta;
    let c0 = 11.0 / 20.0 - (1.0 + beta) / 12.0 + beta / 6.0;
    let shape = 1.0 + one_m2b / (48.0 * c0);
    let inv_gamma_factor = (1.0 + 1.0 / gamma).powi(-2);
    let r = one_m2b / 24.0;

    let a_q0 = 2.0 / 9.0 * r * r * inv_gamma_factor * shape.powi(-3);
    let width = one_m2b / (24.0 * c0) * a_q0;
    let b_q0 = a_q0 + width;
    let d0 = width * width;
    let m0 = r * r * r / 9.0 * inv_gamma_factor * shape.powi(-3);

    let m1 = beta * beta / (8.0 * (gamma + 1.0).powf(1.5))
        + (m + 1.0) / (2.0 * gamma.powf(1.5))
        + 2.0 * (m + 1.0) / gamma.powf(2.5);
    let x1_coefficient = -one_m2b / 12.0 + beta * beta / (4.0 * (gamma + 1.0));
    let m2_upper = m1 / x1_coefficient;
    let m2_lower = 6.0 * m0 / one_m2b;
    let d1 = d0.min(beta * beta / (4.0 * (1.0 + beta * gamma)));

    Ok(ConstantsReport {
        beta,
        gamma,
        beta1,
        beta2,
        gamma0: g0,
        gamma1: gamma1(beta),
        m,
        c0_competitor: c0,
        a_q0,
        b_q0,
        d0,
        m0,
        m1,
        m2_upper,
        m2_lower,
        d1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn reaction_examples() {
        assert_eq!(reaction_f(0.0, 0.4), 0.0);
        assert_eq!(reaction_f(1.0, 0.4), 0.0);
        assert_abs_diff_eq!(reaction_f(0.7, 0.4), 0.063, epsilon = 1e-15);
    }

    #[test]
    fn potential_examples() {
        assert_eq!(potential_f(0.0, 0.4), 0.0);
        // (2 beta^3 - beta^4) / 12
        let fb = (2.0 * 0.4f64.powi(3) - 0.4f64.powi(4)) / 12.0;
        assert_abs_diff_eq!(potential_f(0.4, 0.4), fb, epsilon = 1e-15);
        assert_abs_diff_eq!(potential_f(0.4, 0.4), 0.008533333333333333, epsilon = 1e-12);
        // F(1) = -(1 - 2 beta) / 12
        assert_abs_diff_eq!(potential_f(1.0, 0.4), -(1.0 - 0.8) / 12.0, epsilon = 1e-15);
    }

    #[test]
    fn roots_match_quadratic_formula() {
        let quad = |b: f64| {
            let s = (4.0 * (1.0 + b) * (1.0 + b) - 18.0 * b).sqrt();
            ((2.0 * (1.0 + b) - s) / 3.0, (2.0 * (1.0 + b) + s) / 3.0)
        };
        let (r1, r2) = potential_roots(0.4).unwrap();
        assert_abs_diff_eq!(r1, 2.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r2, 1.2, epsilon = 1e-14);
        let (r1, r2) = potential_roots(0.35).unwrap();
        let (q1, q2) = quad(0.35);
        assert_abs_diff_eq!(r1, q1, epsilon = 1e-14);
        assert_abs_diff_eq!(r2, q2, epsilon = 1e-14);
        assert_abs_diff_eq!(r1, 0.5683375209644599, epsilon = 1e-12);
        assert_abs_diff_eq!(r2, 1.2316624790355401, epsilon = 1e-12);
    }

    #[test]
    fn roots_reject_out_of_range() {
        assert!(potential_roots(0.6).is_err());
        assert!(potential_roots(0.0).is_err());
    }

    #[test]
    fn constants_at_reference_point() {
        let c = compute_constants(0.4, 0.3).unwrap();
        assert_abs_diff_eq!(c.gamma0, 1.4, epsilon = 1e-12);
        assert_abs_diff_eq!(c.gamma1, 0.3170666666666667, epsilon = 1e-12);
        assert_abs_diff_eq!(c.c0_competitor, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(c.m, 1.213, epsilon = 1e-3);
        // M solves M^3 + 1.4 M^2 + 0.4 M = 1 + 1/0.3
        let m = c.m;
        assert_abs_diff_eq!(m * m * m + 1.4 * m * m + 0.4 * m, 1.0 + 1.0 / 0.3, epsilon = 1e-10);
        assert!((c.m0 - 3.34e-9).abs() < 0.01e-9, "M0 = {}", c.m0);
        // brentq reference: M = 1.213419614648669, M1 = 96.55166661363246
        assert_abs_diff_eq!(c.m, 1.213419614648669, epsilon = 1e-11);
        assert_abs_diff_eq!(c.m1, 96.55166661363246, epsilon = 1e-8);
        assert!(c.d0 < 1e-15 && c.d0 > 0.0);
        assert!(c.b_q0 - c.a_q0 <= 1.0);
        assert_eq!(c.d1, c.d0);
        assert!(c.beta1 < 1.0 && c.beta2 > 1.0);
    }

    #[test]
    fn constants_reject_outside_theorem_range() {
        assert!(matches!(compute_constants(0.3, 0.1), Err(PulseError::OutsideTheoremRange { .. })));
        assert!(compute_constants(0.5, 0.1).is_err());
        assert!(compute_constants(0.4, 0.0).is_err());
    }

    #[test]
    fn tail_cutoff_is_tight() {
        for &gamma in &[1e-3, 0.1, 0.3, 1.0, 5.0] {
            let m = tail_cutoff(0.4, gamma).unwrap();
            let target = 1.0 + 1.0 / gamma;
            // f' is O(1..300) on this range, so a 1e-12 bracket gives < 1e-9 in f
            assert!((reaction_f(-m, 0.4) - target).abs() < 1e-9);
            assert!(reaction_f(-m - 0.1, 0.4) - target > 0.0);
            assert!(reaction_f(-m, 0.4) >= target);
        }
    }

    #[test]
    fn regime_flags() {
        let p = Params::new(0.005, 1.0, 0.1, 0.4).unwrap();
        let r = p.regime();
        assert!(r.in_practical_regime);
        assert!(!r.in_theorem_regime, "d0 is astronomically small");
        assert!(!Params::new(0.005, 1.0, 0.5, 0.4).unwrap().regime().gamma_below_gamma1);
        assert!(Params::new(0.005, 1.0, 0.1, 1.5).is_err());
        assert!(Params::new(-1.0, 1.0, 0.1, 0.4).is_err());
    }

    proptest! {
        #[test]
        fn potential_is_antiderivative(xi in -3.0f64..3.0, beta in 0.01f64..0.99) {
            prop_assert!((potential_f_prime(xi, beta) + reaction_f(xi, beta)).abs() < 1e-10);
        }

        #[test]
        fn roots_are_zeros_of_potential(beta in 0.01f64..0.49) {
            let (b1, b2) = potential_roots(beta).unwrap();
            prop_assert!(potential_f(b1, beta).abs() < 1e-12);
            prop_assert!(potential_f(b2, beta).abs() < 1e-12);
            prop_assert!(0.0 < b1 && b1 < 1.0 && 1.0 < b2);
        }

        #[test]
        fn gamma1_is_min_of_two_branches(beta in 0.3334f64..0.4999) {
            let g0 = gamma0(beta);
            let g1 = gamma1(beta);
            prop_assert!(g0 > 0.0);
            prop_assert!(g1 <= g0);
            prop_assert_eq!(g1, g0.min(2.0 * (beta + potential_f(beta, beta)) - 0.5));
            prop_assert!((g1 - gamma1_closed_form(beta)).abs() < 1e-14);
        }
    }
}
