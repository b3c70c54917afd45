use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use standing_pulse::operators::{
    apply_green, inhibitor, inhibitor_derivative, GreenKind, GreenMethod, InhibitorOptions,
};
use standing_pulse::{Grid, Profile};

const GAMMA: f64 = 0.3;

fn bumps(grid: Grid, rng: &mut ChaCha8Rng, count: usize, reach: f64) -> Profile {
    let terms: Vec<(f64, f64, f64)> =
        (0..count).map(|_| (rng.gen_range(0.0..reach), rng.gen_range(0.2..1.5), rng.gen_range(-1.0..1.0))).collect();
    Profile::from_fn(grid, |x| terms.iter().map(|&(c, s, a)| a * (-((x - c) / s).powi(2)).exp()).sum())
}

fn opts() -> InhibitorOptions {
    InhibitorOptions::default()
}

#[test]
fn sandwich_for_nonnegative_inputs() {
    let grid = Grid::new(20.0, 2048).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let w = bumps(grid, &mut rng, 4, 6.0).map(|x| x.abs().min(1.0));
        let nw = inhibitor(&w, GAMMA, &opts()).unwrap();
        let lw = apply_green(GreenKind::L, &w, GAMMA, GreenMethod::Solve).unwrap();
        let l0w = apply_green(GreenKind::L0, &w, GAMMA, GreenMethod::Solve).unwrap();
        for k in 0..grid.len() {
            assert!(nw.values()[k] <= lw.values()[k] + 1e-9);
            assert!(l0w.values()[k] <= nw.values()[k] + 1e-9);
        }
    }
}

#[test]
fn inhibitor_is_monotone() {
    let grid = Grid::new(20.0, 2048).unwrap();
    let w1 = Profile::from_fn(grid, |x| (-x * x / 4.0).exp());
    let w2 = Profile::from_fn(grid, |x| (-x * x / 4.0).exp() - 0.1 * (-(x - 1.0).powi(2)).exp());
    let n1 = inhibitor(&w1, GAMMA, &opts()).unwrap();
    let n2 = inhibitor(&w2, GAMMA, &opts()).unwrap();
    for k in 0..grid.n() {
        assert!(n1.values()[k] > n2.values()[k], "node {k}");
    }
}

#[test]
fn green_methods_agree_at_second_order() {
    let w_of = |grid: Grid| Profile::from_fn(grid, |x| (-(x - 2.0).powi(2)).exp() + 0.5 * (-x * x).exp());
    let mut errors = Vec::new();
    for n in [512, 1024, 2048] {
        let grid = Grid::new(30.0, n).unwrap();
        let w = w_of(grid);
        let q = apply_green(GreenKind::L, &w, GAMMA, GreenMethod::Quadrature).unwrap();
        let s = apply_green(GreenKind::L, &w, GAMMA, GreenMethod::Solve).unwrap();
        let err = (0..=n / 2).map(|k| (q.values()[k] - s.values()[k]).abs()).fold(0.0, f64::max);
        errors.push(err);
    }
    for pair in errors.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!((2.5..=6.0).contains(&ratio), "ratio {ratio}, errors {errors:?}");
    }
}

#[test]
fn frechet_derivative_remainder_is_second_order() {
    let grid = Grid::new(20.0, 2048).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let w = bumps(grid, &mut rng, 3, 6.0);
        let w_hat = bumps(grid, &mut rng, 3, 6.0);
        let v = inhibitor(&w, GAMMA, &opts()).unwrap();
        let dv = inhibitor_derivative(&w, &v, &w_hat, GAMMA).unwrap();
        let remainder = |eps: f64| {
            let shifted = w.zip_map(&w_hat, |a, b| a + eps * b).unwrap();
            let ve = inhibitor(&shifted, GAMMA, &opts()).unwrap();
            (0..grid.len()).map(|k| (ve.values()[k] - v.values()[k] - eps * dv.values()[k]).abs()).fold(0.0, f64::max)
        };
        let (r1, r2) = (remainder(1e-2), remainder(5e-3));
        let order = (r1 / r2).log2();
        assert!(order >= 1.8, "observed order {order}");
    }
}

#[test]
fn zero_maps_to_zero() {
    let grid = Grid::new(10.0, 256).unwrap();
    let z = Profile::zeros(grid);
    assert_eq!(inhibitor(&z, GAMMA, &opts()).unwrap().max_abs(), 0.0);
}
