use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::EulerAngles;
use crate::wavefield::{d_down, d_up, SpinorCoeffs};

/// Orientation of a Stern-Gerlach analyser in the x-z plane, measured from z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SgaSetting {
    theta: f64,
}

impl SgaSetting {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::invalid("analyser angle must be finite"));
        }
        Ok(Self {
            theta: theta.rem_euclid(TAU),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Angular profile of the up channel, coefficients of `(D_up, D_down)`.
    pub fn up_profile(&self) -> [f64; 2] {
        let (s, c) = (0.5 * self.theta).sin_cos();
        [c, s]
    }

    pub fn down_profile(&self) -> [f64; 2] {
        let (s, c) = (0.5 * self.theta).sin_cos();
        [s, -c]
    }
}

/// One output channel of the far-field transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SgaChannel {
    pub amplitude: Complex64,
    pub profile: [f64; 2],
}

impl SgaChannel {
    pub fn probability(&self) -> f64 {
        self.amplitude.norm_sqr()
    }

    pub fn angular(&self, e: &EulerAngles) -> Complex64 {
        d_up(e) * self.profile[0] + d_down(e) * self.profile[1]
    }
}

/// Far-field transform of `a D_up + b D_down`: up amplitude `a cos(t/2) + b sin(t/2)` with
/// profile `(cos(t/2), sin(t/2))`, down amplitude `a sin(t/2) - b cos(t/2)` with profile
/// `(sin(t/2), -cos(t/2))`.
pub fn sga_transform(coeffs: &SpinorCoeffs, setting: SgaSetting) -> (SgaChannel, SgaChannel) {
    let up = setting.up_profile();
    let down = setting.down_profile();
    (
        SgaChannel {
            amplitude: coeffs.a * up[0] + coeffs.b * up[1],
            profile: up,
        },
        SgaChannel {
            amplitude: coeffs.a * down[0] + coeffs.b * down[1],
            profile: down,
        },
    )
}

/// `P_u(theta) = |a cos(theta/2) + b sin(theta/2)|^2`.
pub fn probability_up(coeffs: &SpinorCoeffs, theta: f64) -> f64 {
    let (s, c) = (0.5 * theta).sin_cos();
    (coeffs.a * c + coeffs.b * s).norm_sqr()
}

/// `A_uu, A_ud, A_du, A_dd` for the singlet behind analysers at `theta_a`, `theta_b`,
/// with `chi(t) = e^{-2 i Omega t} / sqrt 2` and `dv = (theta_b - theta_a) / 2`.
pub fn epr_coefficients(
    ea: &EulerAngles,
    eb: &EulerAngles,
    theta_a: f64,
    theta_b: f64,
    t: f64,
    omega: f64,
) -> [Complex64; 4] {
    let chi = Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, -2.0 * omega * t);
    let (sa, ca) = (0.5 * theta_a).sin_cos();
    let (sb, cb) = (0.5 * theta_b).sin_cos();
    let (ua, da) = (d_up(ea), d_down(ea));
    let (ub, db) = (d_up(eb), d_down(eb));
    let up_a = ua * ca + da * sa;
    let dn_a = -ua * sa + da * ca;
    let up_b = ub * cb + db * sb;
    let dn_b = -ub * sb + db * cb;
    let (s, c) = (0.5 * (theta_b - theta_a)).sin_cos();
    [
        chi * up_a * up_b * s,
        chi * up_a * dn_b * c,
        chi * dn_a * up_b * c,
        chi * dn_a * dn_b * s,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn transform_examples() {
        let (u, d) = sga_transform(&SpinorCoeffs::up(), SgaSetting::new(0.0).unwrap());
        assert!((u.amplitude - 1.0).norm() < 1e-15 && d.amplitude.norm() < 1e-15);
        let (u, d) = sga_transform(&SpinorCoeffs::up(), SgaSetting::new(PI).unwrap());
        assert!(u.amplitude.norm() < 1e-15 && (d.amplitude - 1.0).norm() < 1e-15);
        let c = SpinorCoeffs::new(Complex64::from(FRAC_1_SQRT_2), Complex64::from(FRAC_1_SQRT_2)).unwrap();
        assert!((probability_up(&c, PI / 2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn transform_is_unitary() {
        let c = SpinorCoeffs::normalized(Complex64::new(0.3, -0.2), Complex64::new(0.5, 0.9)).unwrap();
        for k in 0..20 {
            let (u, d) = sga_transform(&c, SgaSetting::new(0.37 * k as f64).unwrap());
            assert!((u.probability() + d.probability() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn setting_reduces() {
        assert!((SgaSetting::new(-0.5).unwrap().theta() - (TAU - 0.5)).abs() < 1e-15);
        assert!(SgaSetting::new(f64::INFINITY).is_err());
    }

    #[test]
    fn aligned_analysers_and_identity_orientation() {
        let e = EulerAngles::unwrapped(0.4, 1.1, -0.3);
        let f = EulerAngles::unwrapped(2.0, 0.5, 1.0);
        let a = epr_coefficients(&e, &f, 0.8, 0.8, 1.0, 0.525);
        assert!(a[0].norm() < 1e-15 && a[3].norm() < 1e-15);
        let z = EulerAngles::unwrapped(0.0, 0.0, 0.0);
        let (ta, tb) = (0.6, 1.9);
        let a = epr_coefficients(&z, &z, ta, tb, 0.0, 0.525);
        let expect = FRAC_1_SQRT_2 * (ta / 2.0).cos() * (tb / 2.0).cos() * ((tb - ta) / 2.0).sin();
        assert!((a[0] - expect).norm() < 1e-15);
    }
}
