//! Grid refinement of one pulse: each level is seeded by interpolating the
//! previous solution, and the first-integral residual is tracked.
//!
//! cargo run --release -p standing-pulse --example refinement -- n0 levels x_max d gamma beta a b

use std::time::Instant;

use standing_pulse::admissible::build_q0;
use standing_pulse::analysis::{hamiltonian_residual, max_interior};
use standing_pulse::minimizer::{minimize, MinimizeOptions};
use standing_pulse::{Grid, Params, Profile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let (n0, levels, x_max) = (args[0] as usize, args[1] as usize, args[2]);
    let params = Params::new(args[3], 1.0, args[4], args[5])?;
    let mut grid = Grid::new(x_max, n0)?;
    let mut init = build_q0(args[6], args[7], grid)?;
    let mut prev: Option<f64> = None;
    for _ in 0..levels {
        let t = Instant::now();
        let res = minimize(&params, grid, Some(init.clone()), &MinimizeOptions::default())?;
        let ham = max_interior(&hamiltonian_residual(&res.u0, &res.v0, &params)?);
        println!(
            "n {:7} J {:.10e} iters {:5} {:?} active {:.1e} ham {:.4e} ratio {:.3} ({:.1?})",
            grid.n(),
            res.energy.total,
            res.iterations,
            res.stop_reason,
            res.active_constraint_fraction,
            ham,
            prev.map_or(f64::NAN, |p| p / ham),
            t.elapsed()
        );
        prev = Some(ham);
        let fine = grid.refined();
        init = Profile::from_fn(fine, |x| res.u0.interpolate(x));
        grid = fine;
    }
    Ok(())
}
