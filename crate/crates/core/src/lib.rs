//! Stationary scattering states of ballistic electrons in 1-D semiconductor
//! nanostructures.
//!
//! The crate solves the open boundary-value problem on a finite device
//! domain [0, L] for two band models: the second-order effective-mass
//! Schrödinger equation and its fourth-order extension carrying the
//! first-order non-parabolic correction of the Kane dispersion. Transparent
//! boundary conditions couple the device to semi-infinite contacts, a
//! high-order adaptive Runge-Kutta scheme propagates the fundamental
//! solutions (restarting exactly at potential breakpoints), and a
//! generalized probability current with a third-derivative term is evaluated
//! along the solution. An analytic piecewise-plane-wave solver provides
//! ground truth on piecewise-constant potentials, and bias sweeps produce
//! current-voltage characteristics.

pub mod cli;
pub mod config;
pub mod dispersion;
pub mod error;
pub mod oracle;
pub mod potential;
pub mod propagator;
mod rk;
pub mod scattering;
pub mod tbc;
pub mod units;

pub use dispersion::{ContactSide, Direction, Model};
pub use error::{Error, Result};
pub use potential::{build_profile, PotentialProfile, ProfileSpec, Segment};
pub use propagator::{FundamentalBasis, SolverOpts};
pub use rk::SolverStats;
pub use scattering::{
    iv_sweep, probability_current, residual_check, solve_scattering, Diagnostics,
    ScatteringSolution, SweepPoint, SweepResult,
};
pub use tbc::ScatteringCoefficients;
pub use units::{derive_material, MaterialParams};
