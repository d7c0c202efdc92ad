use std::f64::consts::{PI, TAU};
use std::fmt;

use nalgebra::{Matrix3, Quaternion};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `|sin(beta)|` below which the Euler chart is treated as singular.
pub const CHART_EPS: f64 = 1e-9;

/// Orientation of a top as z-y-z Euler angles, `R = R_z(alpha) R_y(beta) R_z(gamma)`.
///
/// [`EulerAngles::new`] reduces `alpha` and `gamma` into `[0, 2 pi)`;
/// trajectories keep unwrapped copies built with [`EulerAngles::unwrapped`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return Err(Error::invalid("Euler angles must be finite"));
        }
        if !(0.0..=PI).contains(&beta) {
            return Err(Error::invalid(format!("beta = {beta} outside [0, pi]")));
        }
        Ok(Self {
            alpha: alpha.rem_euclid(TAU),
            beta,
            gamma: gamma.rem_euclid(TAU),
        })
    }

    pub fn unwrapped(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::unwrapped(a[0], a[1], a[2])
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    pub fn reduced(&self) -> Self {
        Self {
            alpha: self.alpha.rem_euclid(TAU),
            beta: self.beta,
            gamma: self.gamma.rem_euclid(TAU),
        }
    }

    /// Unit quaternion `(w, x, y, z)` of the SU(2) element `U(alpha, beta, gamma)`.
    pub fn to_quaternion(&self) -> Quaternion<f64> {
        let (sb, cb) = (0.5 * self.beta).sin_cos();
        let sum = 0.5 * (self.alpha + self.gamma);
        let diff = 0.5 * (self.alpha - self.gamma);
        Quaternion::new(cb * sum.cos(), -sb * diff.sin(), sb * diff.cos(), cb * sum.sin())
    }

    /// Euler angles of a unit quaternion, `alpha`, `gamma` reduced to `[0, 2 pi)`.
    ///
    /// On the chart edges only `alpha + gamma` (or `alpha - gamma`) is
    /// determined; the free combination is set to zero.
    pub fn from_quaternion(q: &Quaternion<f64>) -> Self {
        let (up_re, up_im) = (q.w, q.k);
        let (down_re, down_im) = (q.j, q.i);
        // |D_up| = cos(beta/2), |D_down| = sin(beta/2)
        let beta = 2.0 * down_re.hypot(down_im).atan2(up_re.hypot(up_im));
        let s = up_im.atan2(up_re);
        let d = down_im.atan2(down_re);
        Self::unwrapped(s - d, beta, s + d).reduced()
    }

    /// As [`EulerAngles::from_quaternion`], but `alpha` and `gamma` are moved
    /// by multiples of `2 pi` to the branch nearest `previous`.
    pub fn from_quaternion_near(q: &Quaternion<f64>, previous: &EulerAngles) -> Self {
        let e = Self::from_quaternion(q);
        Self::unwrapped(
            nearest_branch(e.alpha, previous.alpha),
            e.beta,
            nearest_branch(e.gamma, previous.gamma),
        )
    }

    /// Body z-axis in the laboratory frame, `R e_z`.
    pub fn body_axis(&self) -> [f64; 3] {
        let (sb, cb) = self.beta.sin_cos();
        let (sa, ca) = self.alpha.sin_cos();
        [sb * ca, sb * sa, cb]
    }
}

impl fmt::Display for EulerAngles {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(alpha={:.6}, beta={:.6}, gamma={:.6})", self.alpha, self.beta, self.gamma)
    }
}

fn nearest_branch(value: f64, target: f64) -> f64 {
    value + TAU * ((target - value) / TAU).round()
}

/// Laboratory axes for spin components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Euler metric `gamma_ab` in `(alpha, beta, gamma)` ordering; `det = sin^2 beta`.
pub fn euler_metric(beta: f64) -> Matrix3<f64> {
    let c = beta.cos();
    Matrix3::new(1.0, 0.0, c, 0.0, 1.0, 0.0, c, 0.0, 1.0)
}

/// The congruence parameters `lambda^i_a` and their duals `mu^a_i`.
///
/// `lambda` maps Euler-angle rates to laboratory angular velocity,
/// `omega^i = lambda^i_a d(zeta^a)/dt`; rows are `i`, columns are `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triad {
    pub lambda: Matrix3<f64>,
    pub mu: Matrix3<f64>,
}

pub fn triad(angles: &EulerAngles) -> Result<Triad> {
    let (sa, ca) = angles.alpha.sin_cos();
    let (sb, cb) = angles.beta.sin_cos();
    if sb.abs() < CHART_EPS {
        return Err(Error::SingularChart { sin_beta: sb });
    }
    #[rustfmt::skip]
    let lambda = Matrix3::new(
        0.0, -sa, ca * sb,
        0.0,  ca, sa * sb,
        1.0, 0.0, cb,
    );
    let cot = cb / sb;
    #[rustfmt::skip]
    let mu = Matrix3::new(
        -cot * ca, -cot * sa, 1.0,
        -sa,        ca,       0.0,
        ca / sb,    sa / sb,  0.0,
    );
    Ok(Triad { lambda, mu })
}
