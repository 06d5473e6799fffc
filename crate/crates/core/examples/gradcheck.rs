//! Finite-difference check of the discrete energy gradient against the
//! variational operator on a tiny grid.

use bosatom::coulomb::AziKernel;
use bosatom::grid::{Density2D, Grid2D};
use bosatom::solver::{evaluate, MhParams};

fn main() {
    let grid = Grid2D::build(3.0, 3.0, 9, 9).unwrap();
    let kern = AziKernel::build(&grid);
    let p = MhParams::plain(1.0, 0.4);
    let (n_r, n_z) = (grid.n_r(), grid.n_z());

    // random-ish interior field, zero on the Dirichlet boundary
    let mut psi = vec![0.0; grid.len()];
    for i in 0..n_r - 1 {
        for j in 1..n_z - 1 {
            let x = (i * 7 + j * 13) % 17;
            psi[grid.idx(i, j)] = 0.3 + 0.05 * x as f64;
        }
    }

    let energy = |w: &[f64]| -> f64 {
        let rho =
            Density2D::new(grid.clone(), w.iter().map(|&x| x * x).collect()).unwrap();
        evaluate(&rho, &p, &kern).unwrap().energy
    };

    // operator route: gradient_n = 2 w_n [(T + v_static + alpha*phi) psi]_n
    let rho = Density2D::new(grid.clone(), psi.iter().map(|&x| x * x).collect()).unwrap();
    let phi = kern.potential(&rho).unwrap();
    let nuc = grid.nuclear_potential();
    let mut worst: f64 = 0.0;
    let eps = 1e-5;
    for i in 0..n_r - 1 {
        for j in 1..n_z - 1 {
            let n = grid.idx(i, j);
            let mut wp = psi.clone();
            wp[n] += eps;
            let mut wm = psi.clone();
            wm[n] -= eps;
            let g_fd = (energy(&wp) - energy(&wm)) / (2.0 * eps);
            // operator application at node n
            let mut t = 0.0;
            let g_face = |i: usize| {
                2.0 * std::f64::consts::PI * 0.5 * (grid.r[i] + grid.r[i + 1]) / grid.dr
            };
            if i > 0 {
                t += g_face(i - 1) * (psi[n] - psi[n - n_z]);
            }
            if i < n_r - 1 {
                t += g_face(i) * (psi[n] - psi[n + n_z]);
            }
            t /= grid.cell_area[i];
            let tz = (2.0 * psi[n] - psi[n - 1] - psi[n + 1]) / (grid.dz * grid.dz);
            let conf = 0.25 * p.beta * p.beta * grid.r[i] * grid.r[i] - p.beta;
            let v = conf - p.zeta * nuc[n] + p.alpha * phi.values[n];
            let g_op = 2.0 * grid.weights[n] * (t + tz + v * psi[n]);
            let rel = (g_fd - g_op).abs() / g_fd.abs().max(1e-12);
            if rel > worst {
                worst = rel;
                println!(
                    "node ({i},{j}): fd {g_fd:+.8e}  op {g_op:+.8e}  rel {rel:.2e}"
                );
            }
        }
    }
    println!("worst relative gradient mismatch: {worst:.3e}");
}
