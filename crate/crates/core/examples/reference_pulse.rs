//! Solves one pulse from a q0 competitor and prints a short summary.
//!
//! cargo run --release -p standing-pulse --example reference_pulse -- n x_max d gamma beta a b max_iters t_end
//!
//! A converged pulse is run through the property checks and, when `t_end > 0`,
//! evolved in time with `dt = 1e-3`.

use std::time::Instant;

use standing_pulse::admissible::build_q0;
use standing_pulse::analysis::check_theorem2;
use standing_pulse::dynamics::evolve;
use standing_pulse::minimizer::{minimize, MinimizeOptions};
use standing_pulse::{Grid, Params};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let get = |i: usize, default: f64| args.get(i).copied().unwrap_or(default);
    let n = get(0, 4096.0) as usize;
    let x_max = get(1, 20.0);
    let params = Params::new(get(2, 0.005), 1.0, get(3, 0.1), get(4, 0.4))?;
    let grid = Grid::new(x_max, n)?;
    let init = build_q0(get(5, 1.0), get(6, 1.8), grid)?;
    let opts = MinimizeOptions { max_iters: get(7, 50_000.0) as usize, ..Default::default() };
    let t = Instant::now();
    let res = minimize(&params, grid, Some(init), &opts)?;
    let s = res.summary();
    println!(
        "J0 {:.6e} J {:.6e} iters {} pg {:.2e} el {:.2e} active {:.4} stop {:?} x1 {:?} x2 {:?} collapse {}",
        s.initial_energy,
        s.energy.total,
        s.iterations,
        s.final_gradient_norm,
        s.el_residual_max,
        s.active_constraint_fraction,
        s.stop_reason,
        s.crossings.x1,
        s.crossings.x2,
        s.collapse_warnings
    );
    println!(
        "u(0) = {}, min u = {}, min v = {}, max v = {}",
        res.u0.values()[0],
        res.u0.min(),
        res.v0.min(),
        res.v0.max()
    );
    println!("elapsed {:.2?}", t.elapsed());
    if res.converged {
        print!("{}", check_theorem2(&res, &params)?.to_text());
    }
    let t_end = get(8, 0.0);
    if t_end > 0.0 {
        let t = Instant::now();
        let tr = evolve(&res.u0, &res.v0, &params, 1e-3, t_end, 1000)?;
        for ((u, _), time) in tr.snapshots.iter().zip(&tr.times) {
            let d = u.zip_map(&res.u0, |a, b| a - b)?.max_abs();
            println!("t {time:.1} drift {d:.3e}");
        }
        println!("evolve elapsed {:.2?}", t.elapsed());
    }
    Ok(())
}
