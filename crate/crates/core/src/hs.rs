//! The 1-D hyper-strong theory: closed-form minimizer, exact energies by
//! quadrature, a gradient-flow minimizer, and the linearized operator.
//!
//! The functional is
//!
//! ```text
//! E[ρ] = ∫ (d√ρ/dz)² dz − ζ ρ(0) + (α/2) ∫ ρ² dz,    ∫ρ ≤ λ,
//! ```
//!
//! with the physical theory at ζ = α = 1. Its minimizer is known in closed
//! form: for λ < 2 a squared hyperbolic cosecant profile with offset
//! tanh c = (2−λ)/2, and for λ ≥ 2 the fixed algebraic profile
//! ρ(z) = 2(2+|z|)^{−2} — the critical charge of this theory is exactly 2,
//! and adding more charge changes nothing.
//!
//! The delta attraction is realized on the grid as the node-value coupling
//! −ζ ψ(0)²; in the operator this is the same thing as the derivative-jump
//! condition ψ′(0⁺) − ψ′(0⁻) = −ζ ψ(0) assembled through the link
//! Laplacian with a point source at the z = 0 node.
//!
//! The same descent loop also serves the lowest-Landau-band confined
//! theory, with tabulated attraction/repulsion kernels in place of the
//! delta and contact terms (see the `confined` module).

use crate::quad::panel_quad;
use crate::solver::EnergyBreakdown;
use crate::tridiag;
use crate::{Error, Result};
use std::sync::Arc;

/// Symmetric 1-D grid with geometric clustering near z = 0 (the closed-form
/// density has a kink there) and trapezoid weights.
#[derive(Debug, Clone)]
pub struct Grid1D {
    pub z: Vec<f64>,
    /// trapezoid weights
    pub w: Vec<f64>,
    /// index of the z = 0 node
    pub i0: usize,
}

impl Grid1D {
    /// Graded grid: spacing starts at `h0` at the origin and grows by
    /// `ratio` per cell until `z_max` is covered; mirrored bitwise onto
    /// negative z.
    pub fn graded(z_max: f64, h0: f64, ratio: f64) -> Result<Arc<Grid1D>> {
        if !(z_max > 0.0) || !(h0 > 0.0) || !(ratio >= 1.0) {
            return Err(Error::InvalidGrid(format!(
                "graded grid needs z_max>0, h0>0, ratio>=1; got {z_max}, {h0}, {ratio}"
            )));
        }
        let mut pos = vec![0.0f64];
        let mut h = h0;
        while *pos.last().unwrap() < z_max {
            let next = pos.last().unwrap() + h;
            pos.push(next);
            h *= ratio;
        }
        let n_half = pos.len() - 1;
        let n = 2 * n_half + 1;
        let mut z = vec![0.0; n];
        for k in 0..=n_half {
            z[n_half + k] = pos[k];
            z[n_half - k] = -pos[k];
        }
        let mut w = vec![0.0; n];
        for k in 0..n {
            let left = if k > 0 { z[k] - z[k - 1] } else { 0.0 };
            let right = if k + 1 < n { z[k + 1] - z[k] } else { 0.0 };
            w[k] = 0.5 * (left + right);
        }
        Ok(Arc::new(Grid1D { z, w, i0: n_half }))
    }

    /// Uniform grid, for tests and tabulation ranges.
    pub fn uniform(z_max: f64, n_half: usize) -> Result<Arc<Grid1D>> {
        Self::graded(z_max, z_max / n_half as f64, 1.0)
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }
}

/// 1-D density ρ(z) ≥ 0 on a symmetric grid.
#[derive(Debug, Clone)]
pub struct HsDensity {
    pub grid: Arc<Grid1D>,
    pub values: Vec<f64>,
}

impl HsDensity {
    pub fn mass(&self) -> f64 {
        self.grid
            .w
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v)
            .sum()
    }
}

/// Offset parameter of the closed form: tanh c = (2−λ)/2 for λ < 2.
pub fn hs_offset(lambda: f64) -> f64 {
    0.5 * ((4.0 - lambda) / lambda).ln()
}

/// Closed-form minimizing density, evaluated pointwise. The λ ≥ 2 branch
/// is the fixed critical profile.
pub fn hs_exact_density(lambda: f64, z: f64) -> f64 {
    assert!(lambda > 0.0, "charge must be positive");
    if lambda >= 2.0 {
        let d = 2.0 + z.abs();
        return 2.0 / (d * d);
    }
    let a = 0.25 * (2.0 - lambda);
    let c = hs_offset(lambda);
    // 2a²/sinh²(a|z|+c), written in e^{-u} for stability at large u
    let t = (-(a * z.abs() + c)).exp();
    let t2 = t * t;
    let inv_sinh2 = 4.0 * t2 / ((1.0 - t2) * (1.0 - t2));
    2.0 * a * a * inv_sinh2
}

/// d√ρ/dz of the closed form for z > 0 (odd continuation for z < 0).
fn hs_exact_amplitude_slope(lambda: f64, z: f64) -> f64 {
    if lambda >= 2.0 {
        let d = 2.0 + z;
        return -std::f64::consts::SQRT_2 / (d * d);
    }
    let a = 0.25 * (2.0 - lambda);
    let c = hs_offset(lambda);
    let t = (-(a * z + c)).exp();
    let t2 = t * t;
    // cosh/sinh² = 2t(1+t²)/(1−t²)²
    let cosh_over_sinh2 = 2.0 * t * (1.0 + t2) / ((1.0 - t2) * (1.0 - t2));
    -std::f64::consts::SQRT_2 * a * a * cosh_over_sinh2
}

/// Breakdown of the exact theory at charge min(λ, 2), by adaptive
/// quadrature of the closed form.
pub fn hs_exact_breakdown(lambda: f64) -> EnergyBreakdown {
    let lam = lambda.min(2.0);
    let z_cut = if lam >= 2.0 {
        1e6
    } else {
        let a = 0.25 * (2.0 - lam);
        (45.0 / a).min(1e7)
    };
    let tol = 1e-12;
    let k = 2.0
        * panel_quad(
            &|z| {
                let s = hs_exact_amplitude_slope(lam, z);
                s * s
            },
            0.0,
            z_cut,
            1.0,
            tol,
        );
    let a_term = hs_exact_density(lam, 0.0);
    let r = panel_quad(
        &|z| {
            let rho = hs_exact_density(lam, z);
            rho * rho
        },
        0.0,
        z_cut,
        1.0,
        tol,
    );
    let e = k - a_term + r;
    EnergyBreakdown {
        kinetic: k,
        attraction: a_term,
        repulsion: r,
        energy: e,
        mu: (e + r) / lam,
    }
}

/// Ground-state energy of the hyper-strong theory; constant for λ ≥ 2.
pub fn hs_energy_exact(lambda: f64) -> f64 {
    hs_exact_breakdown(lambda).energy
}

/// Mass of the closed form by quadrature (a self-test of the formulas).
pub fn hs_exact_mass(lambda: f64) -> f64 {
    let lam = lambda.min(2.0);
    let z_cut = if lam >= 2.0 {
        1e9
    } else {
        let a = 0.25 * (2.0 - lam);
        (45.0 / a).min(1e9)
    };
    2.0 * panel_quad(&|z| hs_exact_density(lam, z), 0.0, z_cut, 1.0, 1e-12)
}

/// Interaction content of the 1-D flow: the hyper-strong delta/contact
/// pair, or tabulated kernels from the confined theory.
pub enum Interaction1D<'a> {
    /// −ζ ρ(0) attraction with (α/2)∫ρ² contact repulsion
    HyperStrong { zeta: f64, alpha: f64 },
    /// −∫V_A ρ attraction with ½∫∫V_R(z−z′)ρρ′ repulsion; `va` holds
    /// V_A at the nodes, `vr` the dense node-pair matrix V_R(z_i − z_j)
    Kernels { va: &'a [f64], vr: &'a [f64] },
}

/// Options of the 1-D descent.
#[derive(Debug, Clone)]
pub struct Hs1dOptions {
    pub tol: f64,
    pub energy_tol: f64,
    pub max_iter: usize,
    pub dt_max: f64,
}

impl Default for Hs1dOptions {
    fn default() -> Self {
        Hs1dOptions {
            tol: 1e-8,
            energy_tol: 1e-12,
            max_iter: 200_000,
            dt_max: 8.0,
        }
    }
}

pub struct Flow1dResult {
    pub density: HsDensity,
    pub breakdown: EnergyBreakdown,
    pub residual: f64,
    pub iterations: usize,
}

/// Shared 1-D ground-state descent: preconditioned defect steps with
/// renormalization, energy backtracking and adaptive step, Dirichlet ends.
pub fn minimize_1d(
    grid: &Arc<Grid1D>,
    interaction: &Interaction1D,
    lambda: f64,
    opts: &Hs1dOptions,
) -> Result<Flow1dResult> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "charge must be positive, got {lambda}"
        )));
    }
    let n = grid.len();
    let mut psi: Vec<f64> = grid.z.iter().map(|&z| (-(z.abs())).exp()).collect();
    psi[0] = 0.0;
    psi[n - 1] = 0.0;
    normalize_1d(grid, &mut psi, lambda);

    let mut v = vec![0.0; n];
    refresh_potential(grid, interaction, &psi, &mut v);
    let mut energy = energy_1d(grid, interaction, &psi).energy;
    let mut dt: f64 = {
        let depth = v.iter().cloned().fold(0.0f64, |m, x| m.max(-x));
        0.5 / depth.max(1.0)
    };
    let mut psi_prev = psi.clone();
    let mut rises = 0usize;
    let mut accepted = 0usize;
    let mut last_res = f64::INFINITY;

    for iter in 1..=opts.max_iter {
        psi_prev.copy_from_slice(&psi);
        let mu = rayleigh_1d(grid, &psi, &v);
        step_1d(grid, &mut psi, &v, mu, dt);
        psi[0] = 0.0;
        psi[n - 1] = 0.0;
        normalize_1d(grid, &mut psi, lambda);
        refresh_potential(grid, interaction, &psi, &mut v);
        let new_energy = energy_1d(grid, interaction, &psi).energy;
        if new_energy > energy + 1e-13 * energy.abs() {
            psi.copy_from_slice(&psi_prev);
            refresh_potential(grid, interaction, &psi, &mut v);
            dt *= 0.5;
            rises += 1;
            accepted = 0;
            if rises >= 10 {
                return Err(Error::Unstable(rises));
            }
            if dt < 1e-14 {
                return Err(Error::NoConvergence {
                    iterations: iter,
                    residual: last_res,
                });
            }
            continue;
        }
        rises = 0;
        accepted += 1;
        if accepted % 6 == 0 && dt < opts.dt_max {
            dt = (dt * 2.0).min(opts.dt_max);
        }
        let stalled =
            (new_energy - energy).abs() <= opts.energy_tol * new_energy.abs().max(1e-300);
        energy = new_energy;
        if stalled || iter % 10 == 0 || iter == opts.max_iter {
            last_res = residual_1d(grid, &psi, &v);
            if last_res <= opts.tol && stalled {
                let density = HsDensity {
                    grid: grid.clone(),
                    values: psi.iter().map(|&x| x * x).collect(),
                };
                let breakdown = energy_1d(grid, interaction, &psi);
                return Ok(Flow1dResult {
                    density,
                    breakdown,
                    residual: last_res,
                    iterations: iter,
                });
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual: last_res,
    })
}

fn normalize_1d(grid: &Grid1D, psi: &mut [f64], lambda: f64) {
    let m: f64 = grid
        .w
        .iter()
        .zip(psi.iter())
        .map(|(w, p)| w * p * p)
        .sum();
    let s = (lambda / m).sqrt();
    for p in psi.iter_mut() {
        *p *= s;
    }
}

/// v(z) = attraction potential + repulsion mean field for the current ρ.
fn refresh_potential(grid: &Grid1D, inter: &Interaction1D, psi: &[f64], v: &mut [f64]) {
    let n = grid.len();
    match inter {
        Interaction1D::HyperStrong { zeta, alpha } => {
            for k in 0..n {
                v[k] = alpha * psi[k] * psi[k];
            }
            v[grid.i0] -= zeta / grid.w[grid.i0];
        }
        Interaction1D::Kernels { va, vr } => {
            for k in 0..n {
                let mut conv = 0.0;
                for m in 0..n {
                    conv += vr[k * n + m] * grid.w[m] * psi[m] * psi[m];
                }
                v[k] = conv - va[k];
            }
        }
    }
}

fn kinetic_1d(grid: &Grid1D, psi: &[f64]) -> f64 {
    let mut k = 0.0;
    for q in 0..grid.len() - 1 {
        let d = psi[q + 1] - psi[q];
        k += d * d / (grid.z[q + 1] - grid.z[q]);
    }
    k
}

/// Full breakdown of the 1-D functional at ψ.
pub fn energy_1d(grid: &Grid1D, inter: &Interaction1D, psi: &[f64]) -> EnergyBreakdown {
    let n = grid.len();
    let k = kinetic_1d(grid, psi);
    let (a, r) = match inter {
        Interaction1D::HyperStrong { zeta, alpha } => {
            let a = zeta * psi[grid.i0] * psi[grid.i0];
            let r = 0.5
                * alpha
                * grid
                    .w
                    .iter()
                    .zip(psi)
                    .map(|(w, p)| w * p.powi(4))
                    .sum::<f64>();
            (a, r)
        }
        Interaction1D::Kernels { va, vr } => {
            let mut a = 0.0;
            let mut r = 0.0;
            for q in 0..n {
                let wrho = grid.w[q] * psi[q] * psi[q];
                a += va[q] * wrho;
                let mut conv = 0.0;
                for m in 0..n {
                    conv += vr[q * n + m] * grid.w[m] * psi[m] * psi[m];
                }
                r += 0.5 * wrho * conv;
            }
            (a, r)
        }
    };
    let e = k - a + r;
    let m: f64 = grid.w.iter().zip(psi).map(|(w, p)| w * p * p).sum();
    EnergyBreakdown {
        kinetic: k,
        attraction: a,
        repulsion: r,
        energy: e,
        mu: if m > 0.0 { (e + r) / m } else { 0.0 },
    }
}

fn rayleigh_1d(grid: &Grid1D, psi: &[f64], v: &[f64]) -> f64 {
    let k = kinetic_1d(grid, psi);
    let mut pot = 0.0;
    let mut m = 0.0;
    for q in 0..grid.len() {
        let wp = grid.w[q] * psi[q] * psi[q];
        pot += v[q] * wp;
        m += wp;
    }
    (k + pot) / m
}

/// (T + v − μ)ψ on the interior nodes; T is the link Laplacian of the
/// graded grid (the delta is inside v as the point source at z = 0).
fn apply_defect_1d(grid: &Grid1D, psi: &[f64], v: &[f64], mu: f64, out: &mut [f64]) {
    let n = grid.len();
    out[0] = 0.0;
    out[n - 1] = 0.0;
    for q in 1..n - 1 {
        let hl = grid.z[q] - grid.z[q - 1];
        let hr = grid.z[q + 1] - grid.z[q];
        let t = ((psi[q] - psi[q - 1]) / hl + (psi[q] - psi[q + 1]) / hr) / grid.w[q];
        out[q] = t + (v[q] - mu) * psi[q];
    }
}

fn residual_1d(grid: &Grid1D, psi: &[f64], v: &[f64]) -> f64 {
    let mu = rayleigh_1d(grid, psi, v);
    let n = grid.len();
    let mut defect = vec![0.0; n];
    apply_defect_1d(grid, psi, v, mu, &mut defect);
    let mut num = 0.0;
    let mut den = 0.0;
    for q in 0..n {
        num += grid.w[q] * defect[q] * defect[q];
        den += grid.w[q] * psi[q] * psi[q];
    }
    (num / den).sqrt()
}

fn step_1d(grid: &Grid1D, psi: &mut [f64], v: &[f64], mu: f64, dt: f64) {
    let n = grid.len();
    let mut defect = vec![0.0; n];
    apply_defect_1d(grid, psi, v, mu, &mut defect);
    // solve (I + dt (T + v − μ)) x = dt·defect on the interior
    let ni = n - 2;
    let mut sub = vec![0.0; ni];
    let mut sup = vec![0.0; ni];
    let mut diag = vec![0.0; ni];
    let mut rhs = vec![0.0; ni];
    for (q, k) in (1..n - 1).enumerate() {
        let hl = grid.z[k] - grid.z[k - 1];
        let hr = grid.z[k + 1] - grid.z[k];
        let td = (1.0 / hl + 1.0 / hr) / grid.w[k];
        sub[q] = if q > 0 { -dt / (hl * grid.w[k]) } else { 0.0 };
        sup[q] = if q + 1 < ni { -dt / (hr * grid.w[k]) } else { 0.0 };
        diag[q] = 1.0 + dt * (td + v[k] - mu);
        rhs[q] = dt * defect[k];
    }
    tridiag::solve_in_place(&sub, &mut diag, &sup, &mut rhs);
    for (q, k) in (1..n - 1).enumerate() {
        psi[k] -= rhs[q];
    }
}

/// Default graded grid for the hyper-strong flow.
pub fn default_hs_grid(lambda: f64) -> Result<Arc<Grid1D>> {
    // the critical profile decays like z^{-2}; subcritical profiles decay
    // exponentially but slowly near λ = 2
    let z_max = if lambda >= 1.8 { 600.0 } else { 400.0 };
    Grid1D::graded(z_max, 2e-3, 1.05)
}

/// Minimizes the hyper-strong functional; the charge is clamped to the
/// critical value 2, beyond which the minimizer no longer changes.
pub fn hs_minimize(
    lambda: f64,
    grid: &Arc<Grid1D>,
    opts: &Hs1dOptions,
) -> Result<(HsDensity, EnergyBreakdown)> {
    hs_minimize_scaled(lambda, 1.0, 1.0, grid, opts)
}

/// Hyper-strong minimization with attraction strength ζ and repulsion
/// weight α (the scaling self-test needs them free); the critical charge
/// becomes 2ζ/α.
pub fn hs_minimize_scaled(
    lambda: f64,
    zeta: f64,
    alpha: f64,
    grid: &Arc<Grid1D>,
    opts: &Hs1dOptions,
) -> Result<(HsDensity, EnergyBreakdown)> {
    if !(zeta > 0.0) || !(alpha > 0.0) {
        return Err(Error::InvalidParameter(
            "hyper-strong flow needs zeta > 0 and alpha > 0".into(),
        ));
    }
    let clamped = lambda.min(2.0 * zeta / alpha);
    let inter = Interaction1D::HyperStrong { zeta, alpha };
    let out = minimize_1d(grid, &inter, clamped, opts)?;
    Ok((out.density, out.breakdown))
}

/// Residual of the linearized operator p_z² − ζδ(z) + ρ(z) acting on √ρ,
/// with the delta realized as the derivative-jump condition at z = 0 on
/// the discrete stencil. Also returns the Rayleigh eigenvalue for
/// comparison with (E + ½∫ρ²)/λ.
pub fn hs_linear_residual(rho: &HsDensity, zeta: f64) -> (f64, f64) {
    let grid = &rho.grid;
    let psi: Vec<f64> = rho.values.iter().map(|&x| x.sqrt()).collect();
    let mut v: Vec<f64> = rho.values.clone();
    v[grid.i0] -= zeta / grid.w[grid.i0];
    let mu = rayleigh_1d(grid, &psi, &v);
    (residual_1d(grid, &psi, &v), mu)
}

/// Samples the closed form on a grid.
pub fn hs_exact_on_grid(lambda: f64, grid: &Arc<Grid1D>) -> HsDensity {
    HsDensity {
        grid: grid.clone(),
        values: grid
            .z
            .iter()
            .map(|&z| hs_exact_density(lambda, z))
            .collect(),
    }
}

/// L¹ distance between two densities on the same grid.
pub fn l1_distance(a: &HsDensity, b: &HsDensity) -> f64 {
    a.grid
        .w
        .iter()
        .zip(a.values.iter().zip(&b.values))
        .map(|(w, (x, y))| w * (x - y).abs())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_density_values() {
        // critical branch at the origin
        assert_eq!(hs_exact_density(2.0, 0.0), 0.5);
        // offset at λ = 1 is artanh(1/2)
        assert!((hs_offset(1.0) - 0.5493061443340549).abs() < 1e-15);
    }

    #[test]
    fn exact_mass_by_quadrature() {
        for &lam in &[0.3, 0.5, 1.0, 1.5, 1.9] {
            let m = hs_exact_mass(lam);
            assert!((m - lam).abs() < 1e-8, "mass({lam}) = {m}");
        }
    }

    #[test]
    fn branch_continuity_at_two() {
        for &z in &[0.0, 0.7, 3.0, 10.0] {
            let below = hs_exact_density(2.0 - 1e-6, z);
            let above = hs_exact_density(2.0 + 1e-6, z);
            assert!(
                (below - above).abs() < 1e-4,
                "branches at z={z}: {below} vs {above}"
            );
        }
    }

    #[test]
    fn exact_energy_critical_value() {
        // analytic integration of the critical branch gives K = 1/6,
        // A = 1/2, R = 1/6, E = −1/6
        let b = hs_exact_breakdown(2.0);
        assert!((b.energy - (-1.0 / 6.0)).abs() < 1e-8, "E = {}", b.energy);
        assert!((b.kinetic - 1.0 / 6.0).abs() < 1e-8);
        assert!((b.attraction - 0.5).abs() < 1e-12);
        assert!((b.repulsion - 1.0 / 6.0).abs() < 1e-8);
        // constant for λ ≥ 2
        assert_eq!(hs_energy_exact(3.0), hs_energy_exact(2.0));
    }

    #[test]
    fn exact_energy_closed_form_cross_check() {
        // independent closed form E(λ) = (2−λ)³/48 − 1/6, obtained by
        // integrating the profile analytically
        for &lam in &[0.25, 0.5, 1.0, 1.5, 1.99] {
            let analytic = (2.0 - lam).powi(3) / 48.0 - 1.0 / 6.0;
            let quad = hs_energy_exact(lam);
            assert!(
                (quad - analytic).abs() < 1e-9,
                "λ={lam}: quadrature {quad} vs closed form {analytic}"
            );
        }
    }

    #[test]
    fn hydrogen_limit_small_lambda() {
        let e = hs_energy_exact(0.01);
        assert!((e / 0.01 - (-0.25)).abs() < 1e-2, "E/λ = {}", e / 0.01);
    }

    #[test]
    fn exact_virial_equality() {
        for &lam in &[0.5, 1.0, 1.7, 2.0] {
            let b = hs_exact_breakdown(lam);
            assert!((b.kinetic - b.energy.abs()).abs() < 1e-8, "λ={lam}: {b:?}");
            assert!(
                (2.0 * b.kinetic - (b.attraction - b.repulsion)).abs() < 1e-8,
                "λ={lam}"
            );
        }
    }

    #[test]
    fn minimizer_matches_closed_form() {
        let grid = default_hs_grid(1.0).unwrap();
        let opts = Hs1dOptions::default();
        let (density, breakdown) = hs_minimize(1.0, &grid, &opts).unwrap();
        let exact_e = hs_energy_exact(1.0);
        assert!(
            (breakdown.energy - exact_e).abs() < 1e-4,
            "E = {} vs exact {exact_e}",
            breakdown.energy
        );
        let exact = hs_exact_on_grid(1.0, &grid);
        assert!(
            l1_distance(&density, &exact) < 1e-3,
            "L1 = {}",
            l1_distance(&density, &exact)
        );
    }

    #[test]
    fn minimizer_critical_ratios() {
        let grid = default_hs_grid(2.0).unwrap();
        let (_, b) = hs_minimize(2.0, &grid, &Hs1dOptions::default()).unwrap();
        let e = b.energy.abs();
        assert!((b.kinetic / e - 1.0).abs() < 1e-3, "{b:?}");
        assert!((b.attraction / e - 3.0).abs() < 1e-3, "{b:?}");
        assert!((b.repulsion / e - 1.0).abs() < 1e-3, "{b:?}");
    }

    #[test]
    fn overcritical_charge_clamps() {
        let grid = default_hs_grid(2.0).unwrap();
        let opts = Hs1dOptions::default();
        let (d2, b2) = hs_minimize(2.0, &grid, &opts).unwrap();
        let (d4, b4) = hs_minimize(4.0, &grid, &opts).unwrap();
        assert!((b2.energy - b4.energy).abs() < 1e-12);
        assert!(l1_distance(&d2, &d4) < 1e-12);
    }

    #[test]
    fn linearized_operator_on_exact_density() {
        let grid = Grid1D::graded(200.0, 5e-4, 1.05).unwrap();
        let rho = hs_exact_on_grid(1.0, &grid);
        let (res, mu) = hs_linear_residual(&rho, 1.0);
        assert!(res < 5e-3, "residual {res}");
        // eigenvalue equals (E + ½∫ρ²)/λ, which is −(2−λ)²/16
        let b = hs_exact_breakdown(1.0);
        let mu_ref = (b.energy + b.repulsion) / 1.0;
        assert!((mu - mu_ref).abs() < 1e-3, "mu {mu} vs {mu_ref}");
        assert!((mu_ref - (-(1.0f64 / 16.0))).abs() < 1e-10);
    }

    #[test]
    fn linearized_mu_vanishes_at_critical() {
        let grid = Grid1D::graded(400.0, 5e-4, 1.05).unwrap();
        let rho = hs_exact_on_grid(2.0, &grid);
        let (_, mu) = hs_linear_residual(&rho, 1.0);
        assert!(mu.abs() < 1e-3, "mu at critical = {mu}");
    }

    #[test]
    fn perturbation_raises_linear_residual() {
        let grid = Grid1D::graded(100.0, 1e-3, 1.05).unwrap();
        let exact = hs_exact_on_grid(1.0, &grid);
        let (res0, _) = hs_linear_residual(&exact, 1.0);
        let perturbed = HsDensity {
            grid: grid.clone(),
            values: exact
                .values
                .iter()
                .zip(&grid.z)
                .map(|(v, z)| v * (1.0 + 0.1 * (z * z / 4.0).tanh()))
                .collect(),
        };
        let (res1, _) = hs_linear_residual(&perturbed, 1.0);
        assert!(res1 > 5.0 * res0, "{res1} vs {res0}");
    }

    #[test]
    fn energy_ladder_monotone_convex_then_flat() {
        let lams = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0];
        let es: Vec<f64> = lams.iter().map(|&l| hs_energy_exact(l)).collect();
        for k in 1..es.len() {
            assert!(es[k] < es[k - 1], "decreasing at {k}");
        }
        for k in 1..es.len() - 1 {
            let second = es[k + 1] - 2.0 * es[k] + es[k - 1];
            assert!(second > -1e-12, "convex at {k}: {second}");
        }
        assert!((hs_energy_exact(2.5) - hs_energy_exact(2.0)).abs() < 1e-12);
        assert!((hs_energy_exact(3.0) - hs_energy_exact(2.0)).abs() < 1e-12);
    }

    #[test]
    fn scaling_identity_numeric() {
        // E(λ; ζ, α) = (ζ³/α) E(αλ/ζ; 1, 1): the delta interaction scales
        // like the Coulomb one
        let grid = default_hs_grid(1.0).unwrap();
        let opts = Hs1dOptions::default();
        let (zeta, alpha, lam) = (1.5, 0.8, 1.0);
        let (_, b) = hs_minimize_scaled(lam, zeta, alpha, &grid, &opts).unwrap();
        let mapped = alpha * lam / zeta;
        let expect = zeta.powi(3) / alpha * hs_energy_exact(mapped);
        assert!(
            (b.energy - expect).abs() < 2e-4 * expect.abs(),
            "E {} vs scaled exact {expect}",
            b.energy
        );
    }

    #[test]
    fn graded_grid_symmetry() {
        let grid = Grid1D::graded(50.0, 1e-3, 1.05).unwrap();
        let n = grid.len();
        assert_eq!(grid.z[grid.i0], 0.0);
        for k in 0..n {
            assert_eq!(grid.z[k].to_bits(), (-grid.z[n - 1 - k]).to_bits());
        }
    }
}
