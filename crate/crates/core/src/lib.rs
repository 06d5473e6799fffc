//! Ground-state solvers for the mean-field theory of an atom with bosonic
//! "electrons" in a homogeneous magnetic field.
//!
//! The library minimizes an energy functional of the one-particle density
//! `rho` on an axisymmetric cylindrical grid,
//!
//! ```text
//! E[rho] = ∫ ( |∇√rho|² + (β²/4) r² rho − β rho − ζ rho/|x| ) d³x + α D[rho,rho]
//! ```
//!
//! under the charge constraint `∫ rho ≤ λ`, where `D` is the Coulomb
//! self-repulsion and `r` the radial distance from the field axis. Companion
//! solvers cover the two limiting regimes: the 1-D hyper-strong theory with
//! delta-function attraction (exact ground state known in closed form) and
//! the lowest-Landau-band confined theory that bridges the two.
//!
//! Modules:
//! - [`grid`] — cylindrical grids, quadrature, discrete kinetic energy
//! - [`coulomb`] — azimuthally averaged Coulomb kernel, Hartree potential,
//!   attraction and repulsion energies
//! - [`solver`] — evaluation and minimization of the 2-D functional
//! - [`hs`] — hyper-strong 1-D theory, closed form and numeric
//! - [`confined`] — lowest-Landau-band effective 1-D theory for large β
//! - [`scan`] — parameter scans, critical charge, regime checks
//! - [`dump`] — density dump format and CSV/JSON export

pub mod config;
pub mod confined;
pub mod coulomb;
pub mod dump;
pub mod elliptic;
pub mod grid;
pub mod hs;
pub mod quad;
pub mod scan;
pub mod solver;
mod tridiag;

pub use grid::{Density2D, Grid2D, Wave2D};
pub use solver::{EnergyBreakdown, MhParams, Solution, SolverOptions};

use thiserror::Error;

/// Errors shared by all solver modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("density has negative entries (min {0:.3e})")]
    NegativeDensity(f64),
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("time-step instability: energy increased over {0} consecutive steps")]
    Unstable(usize),
    #[error("critical charge exceeds search ceiling {0}")]
    CriticalCeiling(f64),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Prints a float with 17 significant digits (lossless f64 round-trip).
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}
