//! Second-difference stencil with the problem's boundary conventions and the
//! tridiagonal solver built on it.
//!
//! Unknowns live on nodes `0..n`; node `n` carries the homogeneous Dirichlet
//! value. Node `0` uses ghost-node elimination for `z'(0) = 0`, which is the
//! Euler-Lagrange row of the trapezoid-weighted Dirichlet energy.

/// `(-z'')_i` in strong form. Entry `n` is set to zero.
pub fn neg_laplacian(z: &[f64], h: f64) -> Vec<f64> {
    let n = z.len() - 1;
    let inv_h2 = 1.0 / (h * h);
    let mut out = vec![0.0; n + 1];
    out[0] = 2.0 * (z[0] - z[1]) * inv_h2;
    for i in 1..n {
        // z[n] enters as stored; callers keep it at zero
        out[i] = (2.0 * z[i] - z[i - 1] - z[i + 1]) * inv_h2;
    }
    out
}

/// Solves `(kappa * (-D^2) + diag(shift)) z = rhs` on nodes `0..n` with
/// `z_n = 0`. `shift` and `rhs` have `n + 1` entries; the last is ignored.
///
/// Thomas algorithm without pivoting; the matrix is an M-matrix whenever
/// `kappa > 0` and `shift >= 0` with at least one positive entry.
pub fn solve_shifted(kappa: f64, h: f64, shift: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len() - 1;
    debug_assert_eq!(shift.len(), n + 1);
    let off = -kappa / (h * h);
    let diag = 2.0 * kappa / (h * h);

    // upper coefficient of row i and modified rhs after forward sweep
    let mut c_star = vec![0.0; n];
    let mut d_star = vec![0.0; n];

    let b0 = diag + shift[0];
    c_star[0] = 2.0 * off / b0;
    d_star[0] = rhs[0] / b0;
    for i in 1..n {
        let denom = diag + shift[i] - off * c_star[i - 1];
        c_star[i] = if i + 1 < n { off / denom } else { 0.0 };
        d_star[i] = (rhs[i] - off * d_star[i - 1]) / denom;
    }

    let mut z = vec![0.0; n + 1];
    z[n - 1] = d_star[n - 1];
    for i in (0..n - 1).rev() {
        z[i] = d_star[i] - c_star[i] * z[i + 1];
    }
    z
}
