//! Independent spherical (β = 0) reference solver: reduces the functional
//! to the radial amplitude u(s) = s √(4π ρ) on a fine uniform grid and
//! minimizes by preconditioned descent. Cross-checks the 2-D solver.
//!
//! Usage: cargo run --release -p bosatom --example radial_oracle [lambda] [zeta] [alpha]

fn main() {
    let args: Vec<String> = std::env::args().collect();
    if args.get(1).map(|s| s.as_str()) == Some("hydrogen-check") {
        // evaluate the fixed hydrogen amplitude: expect K=1/4, A=1/2, R=5/32
        let (s_max, n) = (40.0, 40_000usize);
        let h = s_max / n as f64;
        let s: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
        let mut u: Vec<f64> = s.iter().map(|&x| x * (-0.5 * x).exp() / (2.0f64).sqrt()).collect();
        normalize(&mut u, h, 1.0);
        let mut phi = vec![0.0; n + 1];
        hartree_phi(&u, &s, h, &mut phi);
        let (k, a, r) = parts(&u, &s, h, 1.0, 1.0, &phi);
        println!("hydrogen check: K = {k:.9} (1/4)  A = {a:.9} (1/2)  R = {r:.9} (5/32 = 0.15625)");
        return;
    }
    let lambda: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let zeta: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let alpha: f64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let (e, k, a, r, u, h) = radial_hartree(lambda, zeta, alpha, 40.0, 40_000);
    println!("lambda={lambda} zeta={zeta} alpha={alpha}");
    println!("E = {e:+.9}\nK = {k:+.9}\nA = {a:+.9}\nR = {r:+.9}");
    println!("virial |K-|E||/|E| = {:.3e}", (k - e.abs()).abs() / e.abs());

    if args.get(4).map(|s| s.as_str()) == Some("cross2d") {
        // interpolate the radial density onto 2-D grids and evaluate the
        // 2-D breakdown: every piece must converge to the radial values
        use bosatom::coulomb::AziKernel;
        use bosatom::grid::{Density2D, Grid2D};
        use bosatom::solver::{evaluate, residual, MhParams};
        let rho_of = |s_val: f64| -> f64 {
            let t = s_val / h;
            let i = (t.floor() as usize).min(u.len() - 2);
            let f = t - i as f64;
            let ui = u[i] * (1.0 - f) + u[i + 1] * f;
            if s_val < 1e-12 {
                let u1 = u[1] / h;
                u1 * u1 / (4.0 * std::f64::consts::PI)
            } else {
                ui * ui / (4.0 * std::f64::consts::PI * s_val * s_val)
            }
        };
        let p = MhParams::extended(lambda, 0.0, zeta, alpha);
        for &(nr, nz) in &[(65usize, 129usize), (97, 193), (129, 257), (161, 321)] {
            let grid = Grid2D::build(14.0, 14.0, nr, nz).unwrap();
            let kern = AziKernel::build(&grid);
            let rho = Density2D::from_fn(&grid, |rr, zz| rho_of(rr.hypot(zz))).unwrap();
            let b = evaluate(&rho, &p, &kern).unwrap();
            let res = residual(&rho, &p, &kern).unwrap();
            println!(
                "{nr:3}x{nz:3}  E {:+.7} (d {:+.1e})  K {:+.7} (d {:+.1e})  A {:+.7} (d {:+.1e})  R {:+.7} (d {:+.1e})  res {:.2e}",
                b.energy, b.energy - e, b.kinetic, b.kinetic - k,
                b.attraction, b.attraction - a, b.repulsion, b.repulsion - r, res
            );
        }
    }
}

/// Minimizes K[u] − ζ∫u²/s + (α/2)∫u²Φ_u over ∫u² = λ with
/// Φ_u(s) = (1/s)∫_0^s u² dt + ∫_s^∞ u²/t dt.
fn radial_hartree(lambda: f64, zeta: f64, alpha: f64, s_max: f64, n: usize) -> (f64, f64, f64, f64, Vec<f64>, f64) {
    let h = s_max / n as f64;
    let s: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    // u(0) = 0 and u(s_max) = 0 are Dirichlet ends
    let mut u: Vec<f64> = s.iter().map(|&x| x * (-0.5 * x).exp()).collect();
    u[0] = 0.0;
    u[n] = 0.0;
    normalize(&mut u, h, lambda);
    let mut dt: f64 = 1e-3;
    let mut energy = f64::INFINITY;
    let mut phi = vec![0.0; n + 1];
    for _iter in 0..200_000 {
        hartree_phi(&u, &s, h, &mut phi);
        let v: Vec<f64> = (0..=n)
            .map(|i| {
                let nuc = if i == 0 { 0.0 } else { -zeta / s[i] };
                nuc + alpha * phi[i]
            })
            .collect();
        let (k, a, r) = parts(&u, &s, h, zeta, alpha, &phi);
        let e_new = k - a + r;
        if e_new > energy + 1e-14 * energy.abs() {
            dt *= 0.5;
        } else {
            dt = (dt * 1.3).min(2.0);
        }
        energy = e_new;
        let m: f64 = u.iter().map(|x| x * x).sum::<f64>() * h;
        let mu = (k + u
            .iter()
            .zip(&v)
            .map(|(x, vv)| x * x * vv)
            .sum::<f64>()
            * h)
            / m;
        // defect = (T + v - mu) u, T = -d²/ds²
        let mut defect = vec![0.0; n + 1];
        let mut worst = 0.0f64;
        for i in 1..n {
            let t = (2.0 * u[i] - u[i - 1] - u[i + 1]) / (h * h);
            defect[i] = t + (v[i] - mu) * u[i];
            worst = worst.max(defect[i].abs());
        }
        if worst * h.sqrt() < 1e-9 {
            break;
        }
        // preconditioned step: (I + dt(T + v - mu)) x = dt * defect
        let mut diag: Vec<f64> = (1..n)
            .map(|i| 1.0 + dt * (2.0 / (h * h) + v[i] - mu))
            .collect();
        let sub = vec![-dt / (h * h); n - 1];
        let sup = vec![-dt / (h * h); n - 1];
        let mut rhs: Vec<f64> = (1..n).map(|i| dt * defect[i]).collect();
        thomas(&sub, &mut diag, &sup, &mut rhs);
        for i in 1..n {
            u[i] -= rhs[i - 1];
        }
        normalize(&mut u, h, lambda);
    }
    hartree_phi(&u, &s, h, &mut phi);
    let (k, a, r) = parts(&u, &s, h, zeta, alpha, &phi);
    (k - a + r, k, a, r, u, h)
}

fn normalize(u: &mut [f64], h: f64, lambda: f64) {
    let m: f64 = u.iter().map(|x| x * x).sum::<f64>() * h;
    let sc = (lambda / m).sqrt();
    for x in u.iter_mut() {
        *x *= sc;
    }
}

fn hartree_phi(u: &[f64], s: &[f64], h: f64, phi: &mut [f64]) {
    let n = u.len() - 1;
    // inner charge M(s) = ∫_0^s u² dt, outer integral ∫_s^∞ u²/t dt
    let mut inner = vec![0.0; n + 1];
    for i in 1..=n {
        inner[i] = inner[i - 1] + 0.5 * (u[i] * u[i] + u[i - 1] * u[i - 1]) * h;
    }
    let mut outer = vec![0.0; n + 1];
    for i in (0..n).rev() {
        let f1 = if s[i] > 0.0 { u[i] * u[i] / s[i] } else { 0.0 };
        let f2 = u[i + 1] * u[i + 1] / s[i + 1];
        outer[i] = outer[i + 1] + 0.5 * (f1 + f2) * h;
    }
    for i in 0..=n {
        phi[i] = if s[i] > 0.0 {
            inner[i] / s[i] + outer[i]
        } else {
            outer[0]
        };
    }
}

fn parts(u: &[f64], s: &[f64], h: f64, zeta: f64, alpha: f64, phi: &[f64]) -> (f64, f64, f64) {
    let n = u.len() - 1;
    let mut k = 0.0;
    for i in 0..n {
        let d = (u[i + 1] - u[i]) / h;
        k += d * d * h;
    }
    let mut a = 0.0;
    let mut rr = 0.0;
    for i in 1..=n {
        a += u[i] * u[i] / s[i] * h;
        rr += u[i] * u[i] * phi[i] * h;
    }
    (k, zeta * a, 0.5 * alpha * rr)
}

fn thomas(sub: &[f64], diag: &mut [f64], sup: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    for k in 1..n {
        let w = sub[k] / diag[k - 1];
        diag[k] -= w * sup[k - 1];
        rhs[k] -= w * rhs[k - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for k in (0..n - 1).rev() {
        rhs[k] = (rhs[k] - sup[k] * rhs[k + 1]) / diag[k];
    }
}
