use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{MetricField, TopSystem};

/// Angular density below which `S`, `v` and `R_W` are treated as undefined.
pub const NODE_FLOOR: f64 = 1e-8;

/// Amplitudes of `a D_up + b D_down`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinorCoeffs {
    pub a: Complex64,
    pub b: Complex64,
}

impl SpinorCoeffs {
    /// Requires `|a|^2 + |b|^2 = 1` within `1e-12`.
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        let n = a.norm_sqr() + b.norm_sqr();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("spinor coefficients not normalized: |a|^2+|b|^2 = {n}")));
        }
        Ok(Self { a, b })
    }

    pub fn normalized(a: Complex64, b: Complex64) -> Result<Self> {
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::invalid("spinor coefficients must not both vanish"));
        }
        Ok(Self { a: a / n, b: b / n })
    }

    pub fn up() -> Self {
        Self {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    pub fn down() -> Self {
        Self {
            a: Complex64::new(0.0, 0.0),
            b: Complex64::new(1.0, 0.0),
        }
    }
}

/// Wavefunction value with the derived density and action at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarWaveSample {
    pub psi: Complex64,
    pub rho: f64,
    /// `hbar arg(psi)`, principal branch.
    pub action: f64,
    /// `d_mu S`; zeros when `valid` is false.
    pub grad_action: Vec<f64>,
    pub valid: bool,
}

/// Continuous phase along a path: each update moves to the branch nearest the previous one.
///
/// One tracker per path; it carries mutable state and is not meant to be shared.
#[derive(Debug, Clone)]
pub struct PhaseTracker {
    last: f64,
}

impl PhaseTracker {
    pub fn new(seed: f64) -> Self {
        Self { last: seed }
    }

    pub fn current(&self) -> f64 {
        self.last
    }

    pub fn update(&mut self, principal: f64) -> f64 {
        let d = (principal - self.last + PI).rem_euclid(TAU) - PI;
        self.last += d;
        self.last
    }

    pub fn update_psi(&mut self, psi: Complex64) -> f64 {
        self.update(psi.arg())
    }
}

/// A closed-form scalar wavefunction on the configuration space of a [`TopSystem`].
pub trait ConfigurationWave: Sync {
    fn system(&self) -> &TopSystem;

    fn dim(&self) -> usize {
        self.system().dim()
    }

    fn psi(&self, q: &[f64], t: f64) -> Result<Complex64>;

    /// Analytic partials `d_mu psi`.
    fn gradient(&self, q: &[f64], t: f64) -> Result<Vec<Complex64>>;

    /// Angular factor of `rho`, compared against [`NODE_FLOOR`].
    fn angular_density(&self, q: &[f64]) -> f64;

    fn sample(&self, q: &[f64], t: f64) -> Result<ScalarWaveSample> {
        let psi = self.psi(q, t)?;
        let hbar = self.system().params.hbar;
        let valid = self.angular_density(q) >= NODE_FLOOR;
        let grad_action = if valid {
            self.gradient(q, t)?.iter().map(|g| hbar * (g / psi).im).collect()
        } else {
            vec![0.0; self.dim()]
        };
        Ok(ScalarWaveSample {
            psi,
            rho: psi.norm_sqr(),
            action: hbar * psi.arg(),
            grad_action,
            valid,
        })
    }

    /// `d_mu S`, failing near the nodal set.
    fn action_gradient(&self, q: &[f64], t: f64) -> Result<Vec<f64>> {
        let density = self.angular_density(q);
        if !(density >= NODE_FLOOR) {
            return Err(Error::NearNode {
                density,
                floor: NODE_FLOOR,
            });
        }
        let psi = self.psi(q, t)?;
        let hbar = self.system().params.hbar;
        Ok(self.gradient(q, t)?.iter().map(|g| hbar * (g / psi).im).collect())
    }

    /// `v^mu = g^mn d_n S / m` in the coordinate chart.
    fn velocity(&self, q: &[f64], t: f64) -> Result<Vec<f64>> {
        let grad = self.action_gradient(q, t)?;
        let ginv = self.system().metric().inverse(q)?;
        let m = self.system().params.mass;
        Ok((0..grad.len())
            .map(|i| (0..grad.len()).map(|j| ginv[(i, j)] * grad[j]).sum::<f64>() / m)
            .collect())
    }
}

/// `psi * exp(i epsilon q_axis)`: a wave whose action is shifted by `hbar epsilon q_axis`.
///
/// Not a solution of the dynamics; used as a negative control.
pub struct PhasePerturbed<W> {
    pub inner: W,
    pub axis: usize,
    pub epsilon: f64,
}

impl<W: ConfigurationWave> ConfigurationWave for PhasePerturbed<W> {
    fn system(&self) -> &TopSystem {
        self.inner.system()
    }

    fn psi(&self, q: &[f64], t: f64) -> Result<Complex64> {
        Ok(self.inner.psi(q, t)? * Complex64::from_polar(1.0, self.epsilon * q[self.axis]))
    }

    fn gradient(&self, q: &[f64], t: f64) -> Result<Vec<Complex64>> {
        let phase = Complex64::from_polar(1.0, self.epsilon * q[self.axis]);
        let psi = self.inner.psi(q, t)?;
        let mut g = self.inner.gradient(q, t)?;
        g[self.axis] += Complex64::new(0.0, self.epsilon) * psi;
        Ok(g.into_iter().map(|v| v * phase).collect())
    }

    fn angular_density(&self, q: &[f64]) -> f64 {
        self.inner.angular_density(q)
    }
}
