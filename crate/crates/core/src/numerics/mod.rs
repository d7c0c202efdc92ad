//! Shared numerical kernels: Euler-angle quadrature, central finite
//! differences and classical Runge-Kutta stepping.

mod fit;
mod ode;
mod quadrature;
mod stencil;

pub use fit::{fit_line, LineFit};
pub use ode::{ode_step, rk4_step};
pub use quadrature::{
    gauss_legendre, integrate_angular, integrate_angular_pair, AngularGrid, AngularNode,
};
pub use stencil::{
    fd_gradient, fd_partial, fd_second_partial, CoordKind, FdOrder, StencilSpec,
    DEFAULT_ANGLE_STEP, DEFAULT_SPACE_STEP,
};
