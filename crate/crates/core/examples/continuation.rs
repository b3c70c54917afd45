//! Follows a pulse in `d` on a fixed grid, seeding each solve with the previous
//! profile, and prints energy, constraint contact and the first-integral residual.
//!
//! cargo run --release -p standing-pulse --example continuation -- n x_max gamma beta d1 d2 ...

use std::time::Instant;

use standing_pulse::admissible::build_q0;
use standing_pulse::analysis::{hamiltonian_residual, max_interior};
use standing_pulse::minimizer::{minimize, MinimizeOptions};
use standing_pulse::{Grid, Params};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let grid = Grid::new(args[1], args[0] as usize)?;
    let (gamma, beta) = (args[2], args[3]);
    let mut init = build_q0(0.02, 0.04, grid)?;
    let opts = MinimizeOptions::default();
    for &d in &args[4..] {
        let params = Params::new(d, 1.0, gamma, beta)?;
        let t = Instant::now();
        let res = minimize(&params, grid, Some(init.clone()), &opts)?;
        let ham = hamiltonian_residual(&res.u0, &res.v0, &params)?;
        let arg = (1..grid.n()).max_by(|&a, &b| ham.values()[a].abs().total_cmp(&ham.values()[b].abs())).unwrap_or(0);
        println!(
            "d {d:.3e} J {:.6e} iters {} {:?} active {:.2e} x1 {:.5} x2 {:.5} u(0) {:.5} min {:.5} ham {:.3e} at {:.5} ({:.1?})",
            res.energy.total,
            res.iterations,
            res.stop_reason,
            res.active_constraint_fraction,
            res.crossings.x1.unwrap_or(f64::NAN),
            res.crossings.x2.unwrap_or(f64::NAN),
            res.u0.values()[0],
            res.u0.min(),
            max_interior(&ham),
            grid.x(arg),
            t.elapsed()
        );
        if !(res.converged && res.energy.total < 0.0) {
            break;
        }
        init = res.u0;
    }
    Ok(())
}
