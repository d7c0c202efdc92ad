//! Weyl conformal geometrodynamics of one and two spin-1/2 tops.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: Euler-angle quadrature, finite-difference stencils, RK4 stepping.
//! - [`geometry`]: Euler metric, triads, block metrics, spin operators, Weyl
//!   connection and curvature, gauge rescaling.
//! - [`wavefield`]: Wigner components, free Gaussian packets, single-top and
//!   two-top scalar wavefunctions, Hamilton-Jacobi and continuity residuals,
//!   the angular Hamiltonian.
//! - [`dynamics`]: velocity fields, trajectory integration, seeded ensembles and
//!   equivariance diagnostics.
//! - [`measurement`]: far-field Stern-Gerlach transform, EPR coefficients,
//!   coincidence tables, correlations and the Redhead/CHSH functionals.
//! - [`cli`]: the command-line front end.
//!
//! Internal units are `hbar = m = a = 1` unless a [`geometry::TopParams`] says
//! otherwise.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod measurement;
pub mod numerics;
pub mod wavefield;

pub use error::{Error, Result};
pub use exec::Execution;

/// Version string embedded in every output artifact.
pub const VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));
