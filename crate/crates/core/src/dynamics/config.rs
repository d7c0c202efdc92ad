use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::EulerAngles;

/// A point of the 12-dimensional two-top configuration space.
///
/// Array layout: `[x_A, y_A, z_A, alpha_A, beta_A, gamma_A, x_B, ..., gamma_B]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoTopConfig {
    pub r_a: [f64; 3],
    pub euler_a: EulerAngles,
    pub r_b: [f64; 3],
    pub euler_b: EulerAngles,
}

impl TwoTopConfig {
    pub fn new(r_a: [f64; 3], euler_a: EulerAngles, r_b: [f64; 3], euler_b: EulerAngles) -> Result<Self> {
        let c = Self {
            r_a,
            euler_a,
            r_b,
            euler_b,
        };
        if c.to_array().iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("configuration coordinates must be finite"));
        }
        Ok(c)
    }

    pub fn to_array(&self) -> [f64; 12] {
        let (a, b) = (self.euler_a.as_array(), self.euler_b.as_array());
        [
            self.r_a[0], self.r_a[1], self.r_a[2], a[0], a[1], a[2], self.r_b[0], self.r_b[1], self.r_b[2],
            b[0], b[1], b[2],
        ]
    }

    pub fn from_slice(q: &[f64]) -> Self {
        Self {
            r_a: [q[0], q[1], q[2]],
            euler_a: EulerAngles::unwrapped(q[3], q[4], q[5]),
            r_b: [q[6], q[7], q[8]],
            euler_b: EulerAngles::unwrapped(q[9], q[10], q[11]),
        }
    }

    /// `cos` of the angle between the two body axes.
    pub fn cos_relative(&self) -> f64 {
        let (a, b) = (self.euler_a.body_axis(), self.euler_b.body_axis());
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }
}
