use num_complex::Complex64;

use super::packet::GaussianPacket;
use super::state::{ConfigurationWave, SpinorCoeffs};
use super::wigner::{d_down, d_down_partials, d_up, d_up_partials};
use crate::error::{Error, Result};
use crate::geometry::{EulerAngles, TopSystem};

/// `psi = e^{-i Omega t} [a D_up psi_1(x, t) + b D_down psi_2(x, t)]` on `[x, y, z, alpha, beta, gamma]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleTopState {
    system: TopSystem,
    pub coeffs: SpinorCoeffs,
    pub packet_up: GaussianPacket,
    pub packet_down: GaussianPacket,
}

impl SingleTopState {
    pub fn new(
        system: TopSystem,
        coeffs: SpinorCoeffs,
        packet_up: GaussianPacket,
        packet_down: GaussianPacket,
    ) -> Result<Self> {
        if system.particles != 1 {
            return Err(Error::invalid("single-top state needs a one-particle system"));
        }
        Ok(Self {
            system,
            coeffs,
            packet_up,
            packet_down,
        })
    }

    fn phase(&self, t: f64) -> Complex64 {
        Complex64::from_polar(1.0, -self.system.omega() * t)
    }
}

impl ConfigurationWave for SingleTopState {
    fn system(&self) -> &TopSystem {
        &self.system
    }

    fn psi(&self, q: &[f64], t: f64) -> Result<Complex64> {
        let e = EulerAngles::unwrapped(q[3], q[4], q[5]);
        let x = &q[..3];
        Ok(self.phase(t)
            * (self.coeffs.a * d_up(&e) * self.packet_up.value(x, t)
                + self.coeffs.b * d_down(&e) * self.packet_down.value(x, t)))
    }

    fn gradient(&self, q: &[f64], t: f64) -> Result<Vec<Complex64>> {
        let e = EulerAngles::unwrapped(q[3], q[4], q[5]);
        let x = &q[..3];
        let (p1, p2) = (self.packet_up.value(x, t), self.packet_down.value(x, t));
        let (g1, g2) = (self.packet_up.gradient(x, t), self.packet_down.gradient(x, t));
        let (u, d) = (self.coeffs.a * d_up(&e), self.coeffs.b * d_down(&e));
        let (du, dd) = (d_up_partials(&e), d_down_partials(&e));
        let ph = self.phase(t);
        let mut out = Vec::with_capacity(6);
        for i in 0..3 {
            out.push(ph * (u * g1[i] + d * g2[i]));
        }
        for a in 0..3 {
            out.push(ph * (self.coeffs.a * du[a] * p1 + self.coeffs.b * dd[a] * p2));
        }
        Ok(out)
    }

    fn angular_density(&self, q: &[f64]) -> f64 {
        // the packets do not depend on t for this ratio's purpose; use t = 0 scale
        let x = &q[..3];
        let scale = self.packet_up.density(x, 0.0).max(self.packet_down.density(x, 0.0));
        let e = EulerAngles::unwrapped(q[3], q[4], q[5]);
        let v = self.coeffs.a * d_up(&e) * self.packet_up.value(x, 0.0)
            + self.coeffs.b * d_down(&e) * self.packet_down.value(x, 0.0);
        if scale > 0.0 {
            v.norm_sqr() / scale
        } else {
            0.0
        }
    }
}
