//! Grid-refinement study for the 2-D minimizer: prints the energy
//! breakdown, virial defects, and wall time per solve.
//!
//! Usage: cargo run --release -p bosatom --example gridscan [lambda] [beta]

use bosatom::grid::Grid2D;
use bosatom::solver::{minimize, MhParams, SolverOptions};
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let lambda: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let beta: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(0.0);
    let rmax: f64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(14.0);
    let zmax: f64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(rmax);
    let zeta: f64 = args.get(5).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let alpha: f64 = args.get(6).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let params = MhParams::extended(lambda, beta, zeta, alpha);
    let opts = SolverOptions::default();
    println!("lambda={lambda} beta={beta} rmax={rmax} zmax={zmax}");
    println!("nr x nz      E            K            A            R            mu        |K-|E||/|E|  |2K-(A-R)|/|E|  iters  bmass     secs");
    for &(nr, nz) in &[
        (49usize, 97usize),
        (65, 129),
        (97, 193),
        (129, 257),
        (161, 321),
        (193, 385),
    ] {
        let grid = Grid2D::build(rmax, zmax, nr, nz).unwrap();
        let t0 = Instant::now();
        match minimize(&params, &grid, &opts) {
            Ok(sol) => {
                let b = &sol.breakdown;
                let v1 = (b.kinetic - b.energy.abs()).abs() / b.energy.abs();
                let v2 = (2.0 * b.kinetic - (b.attraction - b.repulsion)).abs() / b.energy.abs();
                println!(
                    "{nr:3} x {nz:3}  {:+.9}  {:+.9}  {:+.9}  {:+.9}  {:+.6}  {:.4e}   {:.4e}      {:5}  {:.1e}  {:.1}",
                    b.energy,
                    b.kinetic,
                    b.attraction,
                    b.repulsion,
                    b.mu,
                    v1,
                    v2,
                    sol.iterations,
                    sol.boundary_mass_fraction,
                    t0.elapsed().as_secs_f64()
                );
            }
            Err(e) => println!("{nr:3} x {nz:3}  FAILED: {e}"),
        }
    }
}
