//! Coulomb quantities for axisymmetric densities: the azimuthally averaged
//! kernel, the nuclear attraction ∫ρ/|x|, the convolution ρ∗1/|x|, and the
//! direct (self-repulsion) energy D[ρ,ρ].
//!
//! The azimuthal average of 1/|x−y| over the angle between two rings is
//!
//! ```text
//! K(r, r', Δz) = (2/π) K(k) / √((r+r')² + Δz²),   k² = 4 r r' / ((r+r')² + Δz²)
//! ```
//!
//! evaluated through the AGM with the complementary modulus computed
//! directly from the geometry (no cancellation near coincidence). The
//! coincident node, where the ring self-interaction diverges
//! logarithmically, is replaced by the average of 1/|x−y| over the local
//! quadrature cell, which keeps the discretization second order.
//!
//! The kernel is translation invariant in z, so the potential is a batch of
//! 1-D convolutions along z — one per radial pair — carried out with padded
//! FFTs. A direct Toeplitz multiply is kept as a cross-check path.

use crate::elliptic::agm;
use crate::grid::{cell_average_inverse_radius, Density2D, Grid2D};
use crate::{Error, Result};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

/// Hartree potential Φ(r, z) = (ρ∗1/|x|)(r, z) on a grid.
#[derive(Debug, Clone)]
pub struct Potential2D {
    pub grid: Arc<Grid2D>,
    pub values: Vec<f64>,
}

/// Tabulated azimuthally averaged Coulomb kernel for one grid, organized as
/// one Δz-vector per unordered radial pair.
pub struct AziKernel {
    grid: Arc<Grid2D>,
    /// K(r_i, r_ip, k·Δz) for i ≤ ip, pair-major; length n_pairs × n_z.
    vals: Vec<f64>,
    /// padded convolution length (5-smooth, ≥ 2 n_z − 1)
    m: usize,
    /// real spectra of the even-extended kernel rows, n_pairs × m
    spec: Vec<f64>,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for AziKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AziKernel")
            .field("n_r", &self.grid.n_r())
            .field("n_z", &self.grid.n_z())
            .field("m", &self.m)
            .finish()
    }
}

#[inline]
fn pair_index(n_r: usize, i: usize, ip: usize) -> usize {
    debug_assert!(i <= ip && ip < n_r);
    i * n_r - i * (i + 1) / 2 + ip
}

fn n_pairs(n_r: usize) -> usize {
    n_r * (n_r + 1) / 2
}

/// Smallest integer ≥ n with no prime factor larger than 5.
fn next_fast_len(n: usize) -> usize {
    let mut c = n.max(1);
    loop {
        let mut x = c;
        for p in [2usize, 3, 5] {
            while x % p == 0 {
                x /= p;
            }
        }
        if x == 1 {
            return c;
        }
        c += 1;
    }
}

/// Azimuthal Coulomb average for two rings at (r, z) and (r', z').
pub fn ring_kernel(r: f64, rp: f64, dz: f64) -> f64 {
    let sum = r + rp;
    let diff = r - rp;
    let d2 = sum * sum + dz * dz;
    let kc2 = (diff * diff + dz * dz) / d2;
    1.0 / (agm(1.0, kc2.sqrt()) * d2.sqrt())
}

/// Mean of ln √(u²+v²) over the rectangle [−a,a]×[−b,b].
fn mean_log_distance(a: f64, b: f64) -> f64 {
    0.5 * ((a * a + b * b).ln() - 3.0 + (a / b) * (b / a).atan() + (b / a) * (a / b).atan())
}

/// Cell-averaged self-interaction of the ring at radius r > 0: the
/// logarithmic divergence ln(8r/d) of the azimuthal average, averaged over
/// the quadrature cell in the (r, z) plane.
fn ring_self_average(r: f64, half_dr: f64, half_dz: f64) -> f64 {
    ((8.0 * r).ln() - mean_log_distance(half_dr, half_dz)) / (std::f64::consts::PI * r)
}

impl AziKernel {
    /// Tabulates the kernel for all node pairs of `grid`.
    pub fn build(grid: &Arc<Grid2D>) -> AziKernel {
        let (n_r, n_z) = (grid.n_r(), grid.n_z());
        let np = n_pairs(n_r);
        let mut vals = vec![0.0; np * n_z];
        let half_dr = 0.5 * grid.dr;
        let half_dz = 0.5 * grid.dz;
        for i in 0..n_r {
            for ip in i..n_r {
                let row = pair_index(n_r, i, ip) * n_z;
                for k in 0..n_z {
                    let dz = k as f64 * grid.dz;
                    vals[row + k] = if i == ip && k == 0 {
                        if i == 0 {
                            cell_average_inverse_radius(half_dr, half_dz)
                        } else {
                            ring_self_average(grid.r[i], half_dr, half_dz)
                        }
                    } else {
                        ring_kernel(grid.r[i], grid.r[ip], dz)
                    };
                }
            }
        }
        Self::from_vals(grid.clone(), vals)
    }

    fn from_vals(grid: Arc<Grid2D>, vals: Vec<f64>) -> AziKernel {
        let n_z = grid.n_z();
        let np = n_pairs(grid.n_r());
        let m = next_fast_len(2 * n_z - 1);
        let mut planner = FftPlanner::new();
        let fft_fwd = planner.plan_fft_forward(m);
        let fft_inv = planner.plan_fft_inverse(m);
        // spectra of the even extensions; real because the input is real-even
        let mut spec = vec![0.0; np * m];
        let mut buf = vec![Complex::new(0.0, 0.0); m];
        let mut scratch = vec![Complex::new(0.0, 0.0); fft_fwd.get_inplace_scratch_len()];
        for p in 0..np {
            buf.fill(Complex::new(0.0, 0.0));
            let row = &vals[p * n_z..(p + 1) * n_z];
            buf[0].re = row[0];
            for k in 1..n_z {
                buf[k].re = row[k];
                buf[m - k].re = row[k];
            }
            fft_fwd.process_with_scratch(&mut buf, &mut scratch);
            for (s, b) in spec[p * m..(p + 1) * m].iter_mut().zip(&buf) {
                *s = b.re;
            }
        }
        AziKernel {
            grid,
            vals,
            m,
            spec,
            fft_fwd,
            fft_inv,
        }
    }

    /// Builds the kernel, consulting a disk cache keyed by the grid
    /// fingerprint when `cache_dir` is given.
    pub fn build_cached(grid: &Arc<Grid2D>, cache_dir: Option<&Path>) -> Result<AziKernel> {
        let Some(dir) = cache_dir else {
            return Ok(Self::build(grid));
        };
        let path = dir.join(format!("kernel-{:016x}.bin", grid.fingerprint()));
        if let Ok(kern) = Self::load(grid, &path) {
            return Ok(kern);
        }
        let kern = Self::build(grid);
        std::fs::create_dir_all(dir)?;
        kern.store(&path)?;
        Ok(kern)
    }

    const CACHE_MAGIC: &'static [u8; 8] = b"BAKERN1\0";

    fn store(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(Self::CACHE_MAGIC)?;
        f.write_all(&self.grid.fingerprint().to_le_bytes())?;
        f.write_all(&(self.grid.n_r() as u64).to_le_bytes())?;
        f.write_all(&(self.grid.n_z() as u64).to_le_bytes())?;
        let mut bytes = Vec::with_capacity(self.vals.len() * 8);
        for v in &self.vals {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        f.write_all(&bytes)?;
        Ok(())
    }

    fn load(grid: &Arc<Grid2D>, path: &Path) -> Result<AziKernel> {
        let mut f = std::fs::File::open(path)?;
        let mut head = [0u8; 8 + 8 + 8 + 8];
        f.read_exact(&mut head)?;
        if &head[0..8] != Self::CACHE_MAGIC {
            return Err(Error::Format("kernel cache: bad magic".into()));
        }
        let fp = u64::from_le_bytes(head[8..16].try_into().unwrap());
        let n_r = u64::from_le_bytes(head[16..24].try_into().unwrap()) as usize;
        let n_z = u64::from_le_bytes(head[24..32].try_into().unwrap()) as usize;
        if fp != grid.fingerprint() || n_r != grid.n_r() || n_z != grid.n_z() {
            return Err(Error::Format("kernel cache: grid mismatch".into()));
        }
        let count = n_pairs(n_r) * n_z;
        let mut bytes = vec![0u8; count * 8];
        f.read_exact(&mut bytes)?;
        let vals: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Self::from_vals(grid.clone(), vals))
    }

    pub fn grid(&self) -> &Arc<Grid2D> {
        &self.grid
    }

    /// Tabulated kernel value K(r_i, r_ip, k Δz); symmetric in i ↔ ip and
    /// even in the signed z-offset.
    pub fn value(&self, i: usize, ip: usize, k: isize) -> f64 {
        let (lo, hi) = if i <= ip { (i, ip) } else { (ip, i) };
        let p = pair_index(self.grid.n_r(), lo, hi);
        self.vals[p * self.grid.n_z() + k.unsigned_abs()]
    }

    fn check_grid(&self, rho: &Density2D) -> Result<()> {
        if !self.grid.same_geometry(&rho.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// (ρ∗1/|x|)(r, z) through padded FFT convolutions along z.
    pub fn potential(&self, rho: &Density2D) -> Result<Potential2D> {
        self.check_grid(rho)?;
        let g = &self.grid;
        let (n_r, n_z, m) = (g.n_r(), g.n_z(), self.m);
        // forward transforms of the weighted source rows
        let mut src = vec![Complex::new(0.0, 0.0); n_r * m];
        let mut scratch =
            vec![Complex::new(0.0, 0.0); self.fft_fwd.get_inplace_scratch_len().max(1)];
        for i in 0..n_r {
            let row = &mut src[i * m..(i + 1) * m];
            for j in 0..n_z {
                row[j].re = g.weights[i * n_z + j] * rho.values[i * n_z + j];
            }
            self.fft_fwd.process_with_scratch(row, &mut scratch);
        }
        // accumulate spectra: acc_i += spec(i,ip) ⊙ src_ip for all ip
        let mut acc = vec![Complex::new(0.0, 0.0); n_r * m];
        for i in 0..n_r {
            for ip in i..n_r {
                let sp = &self.spec[pair_index(n_r, i, ip) * m..][..m];
                {
                    let (a, s) = (&mut acc[i * m..(i + 1) * m], &src[ip * m..(ip + 1) * m]);
                    for k in 0..m {
                        a[k].re += sp[k] * s[k].re;
                        a[k].im += sp[k] * s[k].im;
                    }
                }
                if ip != i {
                    let (a, s) = (&mut acc[ip * m..(ip + 1) * m], &src[i * m..(i + 1) * m]);
                    for k in 0..m {
                        a[k].re += sp[k] * s[k].re;
                        a[k].im += sp[k] * s[k].im;
                    }
                }
            }
        }
        // inverse transforms, unnormalized: divide by m
        let mut scratch_inv =
            vec![Complex::new(0.0, 0.0); self.fft_inv.get_inplace_scratch_len().max(1)];
        let mut values = vec![0.0; n_r * n_z];
        let inv_m = 1.0 / m as f64;
        for i in 0..n_r {
            let row = &mut acc[i * m..(i + 1) * m];
            self.fft_inv.process_with_scratch(row, &mut scratch_inv);
            for j in 0..n_z {
                values[i * n_z + j] = row[j].re * inv_m;
            }
        }
        Ok(Potential2D {
            grid: g.clone(),
            values,
        })
    }

    /// Direct Toeplitz multiply, O(n_r² n_z²); cross-check path for small
    /// grids.
    pub fn potential_direct(&self, rho: &Density2D) -> Result<Potential2D> {
        self.check_grid(rho)?;
        let g = &self.grid;
        let (n_r, n_z) = (g.n_r(), g.n_z());
        let mut values = vec![0.0; n_r * n_z];
        for i in 0..n_r {
            for ip in 0..n_r {
                let (lo, hi) = if i <= ip { (i, ip) } else { (ip, i) };
                let krow = &self.vals[pair_index(n_r, lo, hi) * n_z..][..n_z];
                for j in 0..n_z {
                    let mut s = 0.0;
                    for jp in 0..n_z {
                        let d = j.abs_diff(jp);
                        s += krow[d] * g.weights[ip * n_z + jp] * rho.values[ip * n_z + jp];
                    }
                    values[i * n_z + j] += s;
                }
            }
        }
        Ok(Potential2D {
            grid: g.clone(),
            values,
        })
    }
}

/// ∫ ρ/|x| with the nucleus at the origin; the origin cell uses the
/// analytic cell average of 1/|x|.
pub fn attraction_energy(rho: &Density2D) -> f64 {
    let g = &rho.grid;
    let j0 = g.j_zero();
    let origin = g.origin_inverse_radius();
    let mut acc = 0.0;
    for i in 0..g.n_r() {
        for j in 0..g.n_z() {
            let n = g.idx(i, j);
            let inv = if i == 0 && j == j0 {
                origin
            } else {
                1.0 / g.radius(i, j)
            };
            acc += g.weights[n] * rho.values[n] * inv;
        }
    }
    acc
}

/// ∫ ρ(x)/|x − (0,0,z₀)| for a nucleus displaced to the on-axis node z₀;
/// used to probe the repulsion-by-attraction bound.
pub fn attraction_at(rho: &Density2D, j_nucleus: usize) -> f64 {
    let g = &rho.grid;
    let z0 = g.z[j_nucleus];
    let origin = g.origin_inverse_radius();
    let mut acc = 0.0;
    for i in 0..g.n_r() {
        for j in 0..g.n_z() {
            let n = g.idx(i, j);
            let inv = if i == 0 && j == j_nucleus {
                origin
            } else {
                1.0 / g.r[i].hypot(g.z[j] - z0)
            };
            acc += g.weights[n] * rho.values[n] * inv;
        }
    }
    acc
}

/// D[ρ,ρ] = ½ ∫ ρ Φ; strictly positive for ρ ≢ 0.
pub fn direct_energy(rho: &Density2D, kern: &AziKernel) -> Result<f64> {
    let phi = kern.potential(rho)?;
    Ok(0.5 * crate::grid::inner(&rho.grid, &rho.values, &phi.values))
}

/// Worst relative deviation of Φ from mass/|x| over the four domain
/// corners; the far-field (Newton) diagnostic.
pub fn newton_corner_deviation(phi: &Potential2D, total_mass: f64) -> f64 {
    let g = &phi.grid;
    let (n_r, n_z) = (g.n_r(), g.n_z());
    let mut worst = 0.0f64;
    for &(i, j) in &[(n_r - 1, 0), (n_r - 1, n_z - 1)] {
        let expect = total_mass / g.radius(i, j);
        let got = phi.values[g.idx(i, j)];
        worst = worst.max((got - expect).abs() / expect);
    }
    worst
}
