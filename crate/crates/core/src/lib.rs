//! Pseudospectral Fornberg–Whitham solver on the periodic line together with a
//! Littlewood–Paley toolkit for measuring Besov norms `B^s_{2,r}`.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`]: the torus grid, Fourier transforms and Fourier multipliers.
//! * [`littlewood_paley`]: smooth dyadic cutoffs, block operators and norms.
//! * [`solver`]: RK4 time stepping of `u_t + (3/2) u u_x = (1 - ∂²)⁻¹ ∂ u`,
//!   linear transport, the Picard-type iteration and blow-up diagnostics.
//! * [`experiments`]: approximate-solution families, peakon checks, time-Taylor
//!   series and exponent fitting.

pub mod error;
pub mod experiments;
pub mod littlewood_paley;
pub mod smooth;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use littlewood_paley::{BesovParams, DyadicSystem, Summability};
pub use solver::{RunStatus, SolverConfig, Trajectory};
pub use spectral::{SpectralField, TorusGrid};
