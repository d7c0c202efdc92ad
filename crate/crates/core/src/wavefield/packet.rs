use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Free Gaussian wavepacket in three dimensions with analytic time evolution.
///
/// Per axis
/// `psi = (2 pi s^2)^(-1/4) (1 + i tau)^(-1/2) exp(-u^2 / (4 s^2 (1 + i tau)) + i k (x - x0) - i hbar k^2 t / 2m)`
/// with `u = x - x0 - v t`, `tau = hbar t / (2 m s^2)` and `k = m v / hbar`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    pub center: [f64; 3],
    pub velocity: [f64; 3],
    pub sigma: f64,
    pub phase: f64,
    pub mass: f64,
    pub hbar: f64,
}

/// Default packet width in units of the gyration radius.
pub const DEFAULT_SIGMA: f64 = 10.0;
/// Default distance of each packet centre from the source along `y`.
pub const DEFAULT_OFFSET: f64 = 120.0;

impl GaussianPacket {
    pub fn new(center: [f64; 3], velocity: [f64; 3], sigma: f64, mass: f64, hbar: f64) -> Result<Self> {
        if !(sigma > 0.0 && mass > 0.0 && hbar > 0.0) {
            return Err(Error::invalid("packet width, mass and hbar must be positive"));
        }
        if center.iter().chain(&velocity).any(|v| !v.is_finite()) {
            return Err(Error::invalid("packet centre and velocity must be finite"));
        }
        Ok(Self {
            center,
            velocity,
            sigma,
            phase: 0.0,
            mass,
            hbar,
        })
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    /// Packets for particles A and B leaving the origin back to back along `y`.
    pub fn default_pair(mass: f64, hbar: f64) -> Result<(Self, Self)> {
        Ok((
            Self::new([0.0, -DEFAULT_OFFSET, 0.0], [0.0, -1.0, 0.0], DEFAULT_SIGMA, mass, hbar)?,
            Self::new([0.0, DEFAULT_OFFSET, 0.0], [0.0, 1.0, 0.0], DEFAULT_SIGMA, mass, hbar)?,
        ))
    }

    fn tau(&self, t: f64) -> f64 {
        self.hbar * t / (2.0 * self.mass * self.sigma * self.sigma)
    }

    /// Width of `|psi|^2` along each axis at time `t`.
    pub fn width(&self, t: f64) -> f64 {
        self.sigma * (1.0 + self.tau(t).powi(2)).sqrt()
    }

    pub fn mean(&self, t: f64) -> [f64; 3] {
        std::array::from_fn(|i| self.center[i] + self.velocity[i] * t)
    }

    pub fn value(&self, x: &[f64], t: f64) -> Complex64 {
        let s2 = self.sigma * self.sigma;
        let one_it = Complex64::new(1.0, self.tau(t));
        let norm = (2.0 * std::f64::consts::PI * s2).powf(-0.25);
        let pref = one_it.sqrt().inv() * norm;
        let mut exponent = Complex64::new(0.0, self.phase);
        let mut amp = Complex64::new(1.0, 0.0);
        for i in 0..3 {
            let k = self.mass * self.velocity[i] / self.hbar;
            let u = x[i] - self.center[i] - self.velocity[i] * t;
            exponent += -u * u / (4.0 * s2 * one_it)
                + Complex64::new(0.0, k * (x[i] - self.center[i]) - self.hbar * k * k * t / (2.0 * self.mass));
            amp *= pref;
        }
        amp * exponent.exp()
    }

    /// `grad psi / psi`.
    pub fn log_gradient(&self, x: &[f64], t: f64) -> [Complex64; 3] {
        let s2 = self.sigma * self.sigma;
        let one_it = Complex64::new(1.0, self.tau(t));
        std::array::from_fn(|i| {
            let u = x[i] - self.center[i] - self.velocity[i] * t;
            -u / (2.0 * s2 * one_it) + Complex64::new(0.0, self.mass * self.velocity[i] / self.hbar)
        })
    }

    pub fn gradient(&self, x: &[f64], t: f64) -> [Complex64; 3] {
        let v = self.value(x, t);
        self.log_gradient(x, t).map(|g| g * v)
    }

    pub fn density(&self, x: &[f64], t: f64) -> f64 {
        self.value(x, t).norm_sqr()
    }

    /// Probability current `(hbar / m) Im(psi* grad psi)`.
    pub fn current(&self, x: &[f64], t: f64) -> [f64; 3] {
        let rho = self.density(x, t);
        self.log_gradient(x, t).map(|g| rho * self.hbar / self.mass * g.im)
    }

    /// `int |psi_1| |psi_2| d^3x`, the overlap of two packets at time `t`.
    pub fn overlap(&self, other: &GaussianPacket, t: f64) -> f64 {
        let (s1, s2) = (self.width(t), other.width(t));
        let (m1, m2) = (self.mean(t), other.mean(t));
        let v = s1 * s1 + s2 * s2;
        (0..3)
            .map(|i| (2.0 * s1 * s2 / v).sqrt() * (-(m1[i] - m2[i]).powi(2) / (4.0 * v)).exp())
            .product()
    }
}
