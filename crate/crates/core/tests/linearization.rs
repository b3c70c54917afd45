use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use standing_pulse::analysis::linearize;
use standing_pulse::model::gamma1;
use standing_pulse::Params;

/// Roots of the characteristic polynomial of the rest-state matrix,
/// computed from its entries.
fn eigen_oracle(d: f64, gamma: f64, beta: f64) -> (f64, f64) {
    let m = [[beta / d, 1.0 / d], [-1.0, gamma]];
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let s = (tr * tr - 4.0 * det).sqrt();
    ((tr - s) / 2.0, (tr + s) / 2.0)
}

#[test]
fn random_in_regime_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut tested = 0;
    while tested < 1000 {
        let beta = rng.gen_range(1.0 / 3.0 + 1e-6..0.5 - 1e-6);
        let gamma = rng.gen_range(1e-4..1.0) * gamma1(beta);
        let p = Params::new(1.0, 1.0, gamma, beta).unwrap();
        let d = p.linear_d_bound() * 10f64.powf(rng.gen_range(-4.0..0.0));
        let p = Params { d, ..p };
        let r = linearize(&p);
        if r.discriminant <= 0.0 {
            continue;
        }
        tested += 1;
        let (o1, o2) = eigen_oracle(d, gamma, beta);
        assert!((r.lambda1 - o1).abs() <= 1e-8 * o2, "{p:?}");
        assert!((r.lambda2 - o2).abs() <= 1e-10 * o2, "{p:?}");
        assert!(r.ordering_ok, "eigen ordering at {p:?}");
        assert!(r.alpha_ordering_ok, "alpha ordering at {p:?}");
        assert!(r.sign_products_ok, "sign products at {p:?}: {:?}", r.sign_products);
        assert!(r.sign_products.0 > 0.0 && r.sign_products.1 < 0.0);
    }
}

#[test]
fn reference_values() {
    let r = linearize(&Params::new(0.01, 1.0, 0.3, 0.4).unwrap());
    let (o1, o2) = eigen_oracle(0.01, 0.3, 0.4);
    assert!((r.lambda1 - o1).abs() < 1e-10);
    assert!((r.lambda2 - o2).abs() < 1e-10);
    assert!((r.slow_rate - o1.sqrt()).abs() < 1e-10);
}
