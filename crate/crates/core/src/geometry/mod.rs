//! Configuration-space geometry of one and two spinning tops.
//!
//! A top lives in `R^3 x SU(2)`: three centre-of-mass coordinates followed by
//! the Euler angles `(alpha, beta, gamma)` in the z-y-z convention, so a
//! two-top configuration is the 12-vector
//! `(x_A, y_A, z_A, alpha_A, beta_A, gamma_A, x_B, ..., gamma_B)`.

mod curvature;
mod euler;
mod metric;
mod spin;

pub use curvature::{
    christoffel, christoffel_analytic, christoffel_from_derivatives, grad_norm_sq, laplacian,
    phi_from_rho, riemann_scalar, weyl_connection, weyl_curvature_from_density, weyl_curvature_from_phi,
    weyl_curvature_parts_from_density, Connection, WeylCurvature, WeylField, WeylPotential,
};
pub use euler::{euler_metric, triad, Axis, EulerAngles, Triad, CHART_EPS};
pub use metric::{
    gauge_rescale, xi, BlockMetric, EulerBlockMetric, FlatMetric, MetricField, TopParams,
    TopSystem,
};
pub use spin::{commutator_defect, spin_apply, spin_matrix_action};
