//! Eigen-data of the linearization at the rest state,
//! `(u, v)'' = A (u, v)` with `A = [[beta/d, 1/d], [-1, gamma]]`.

use serde::{Deserialize, Serialize};

use crate::model::Params;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearizationReport {
    pub lambda1: f64,
    pub lambda2: f64,
    /// `beta/d - lambda1`
    pub alpha2: f64,
    /// `1 / (d alpha2)`
    pub alpha1: f64,
    /// right eigenvector for `lambda1`: `(-1, d alpha2)`
    pub a_vec: [f64; 2],
    /// right eigenvector for `lambda2`: `(-alpha2, 1)`
    pub b_vec: [f64; 2],
    /// left eigenvector for `lambda1`: `(1, alpha2)`
    pub l1_vec: [f64; 2],
    /// left eigenvector for `lambda2`: `(1, alpha1)`
    pub l2_vec: [f64; 2],
    /// `trace^2 - 4 det`
    pub discriminant: f64,
    pub real_eigenvalues: bool,
    /// `0 < l1 < beta/2d < (gamma + beta/d)/2 < l2 < beta/d`
    pub ordering_ok: bool,
    /// `0 < alpha1 < lambda1 < beta/2d < alpha2 < lambda2 < beta/d`
    pub alpha_ordering_ok: bool,
    /// `(l1 . a, l2 . b)`
    pub sign_products: (f64, f64),
    pub sign_products_ok: bool,
    /// slow decay rate `sqrt(lambda1)`
    pub slow_rate: f64,
    /// fast decay rate `sqrt(lambda2)`
    pub fast_rate: f64,
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn linearize(params: &Params) -> LinearizationReport {
    let Params { d, gamma, beta, .. } = *params;
    let trace = beta / d + gamma;
    let det = beta * gamma / d + 1.0 / d;
    let discriminant = trace * trace - 4.0 * det;
    let real_eigenvalues = discriminant > 0.0;

    // larger root by the quadratic formula, smaller one from the product
    let (lambda1, lambda2) = if real_eigenvalues {
        let lambda2 = 0.5 * (trace + discriminant.sqrt());
        (det / lambda2, lambda2)
    } else {
        (f64::NAN, f64::NAN)
    };
    let alpha2 = beta / d - lambda1;
    let alpha1 = 1.0 / (d * alpha2);
    let a_vec = [-1.0, d * alpha2];
    let b_vec = [-alpha2, 1.0];
    let l1_vec = [1.0, alpha2];
    let l2_vec = [1.0, alpha1];
    let sign_products = (dot(l1_vec, a_vec), dot(l2_vec, b_vec));

    let half = beta / (2.0 * d);
    let mid = 0.5 * (gamma + beta / d);
    let ordering_ok =
        real_eigenvalues && 0.0 < lambda1 && lambda1 < half && half < mid && mid < lambda2 && lambda2 < beta / d;
    let alpha_ordering_ok = real_eigenvalues
        && 0.0 < alpha1
        && alpha1 < lambda1
        && lambda1 < half
        && half < alpha2
        && alpha2 < lambda2
        && lambda2 < beta / d;

    LinearizationReport {
        lambda1,
        lambda2,
        alpha2,
        alpha1,
        a_vec,
        b_vec,
        l1_vec,
        l2_vec,
        discriminant,
        real_eigenvalues,
        ordering_ok,
        alpha_ordering_ok,
        sign_products,
        sign_products_ok: real_eigenvalues && sign_products.0 > 0.0 && sign_products.1 < 0.0,
        slow_rate: lambda1.sqrt(),
        fast_rate: lambda2.sqrt(),
    }
}
