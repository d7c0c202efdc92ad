use crate::error::{Error, Result};
use crate::geometry::{weyl_curvature_parts_from_density, xi, MetricField, WeylCurvature};
use crate::numerics::{fd_partial, FdOrder};

use super::state::{ConfigurationWave, NODE_FLOOR};

/// Time step for the finite-difference time derivatives in the residuals.
pub const TIME_STEP: f64 = 1e-3;

/// The terms of `-d_t S = (1/2m) g^mn d_m S d_n S + (hbar^2/m) [xi_n (R_W - R) + xi_6 R]`.
///
/// For one top this is `(xi hbar^2 / m) R_W` with `xi = 1/10`. For two tops
/// the constant part keeps the per-particle coupling of the wave equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HjeTerms {
    /// `-d_t S`.
    pub time: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub curvature: WeylCurvature,
}

impl HjeTerms {
    pub fn residual(&self) -> f64 {
        (self.time - self.kinetic - self.potential).abs()
    }
}

fn guard<W: ConfigurationWave + ?Sized>(wave: &W, q: &[f64]) -> Result<()> {
    let density = wave.angular_density(q);
    if !(density >= NODE_FLOOR) {
        return Err(Error::NearNode {
            density,
            floor: NODE_FLOOR,
        });
    }
    Ok(())
}

pub fn hje_terms<W: ConfigurationWave + ?Sized>(wave: &W, q: &[f64], t: f64) -> Result<HjeTerms> {
    guard(wave, q)?;
    let sys = wave.system();
    let (m, hbar) = (sys.params.mass, sys.params.hbar);
    let metric = sys.metric();

    let psi0 = wave.psi(q, t)?;
    let phase = |s: &[f64]| -> Result<f64> { Ok(hbar * (wave.psi(q, s[0])? / psi0).arg()) };
    let dt_s: f64 = fd_partial(&phase, &[t], 0, TIME_STEP, FdOrder::Four)?;

    let grad = wave.action_gradient(q, t)?;
    let ginv = metric.inverse(q)?;
    let n = grad.len();
    let mut kinetic = 0.0;
    for i in 0..n {
        for j in 0..n {
            kinetic += ginv[(i, j)] * grad[i] * grad[j];
        }
    }
    kinetic /= 2.0 * m;

    let rho = |p: &[f64]| -> Result<f64> { Ok(wave.psi(p, t)?.norm_sqr()) };
    let curvature = weyl_curvature_parts_from_density(&metric, &rho, q, 0.0)?;
    let potential = hbar * hbar / m * (xi(n) * curvature.weyl_part + xi(6) * curvature.riemann);
    Ok(HjeTerms {
        time: -dt_s,
        kinetic,
        potential,
        curvature,
    })
}

/// `|d_t S + (1/2m) |grad S|^2 + Q|`, with time derivatives of the phase by central differences
/// and the Weyl curvature from finite differences of `rho`.
pub fn hje_residual<W: ConfigurationWave + ?Sized>(wave: &W, q: &[f64], t: f64) -> Result<f64> {
    hje_terms(wave, q, t).map(|h| h.residual())
}

/// `|d_t rho + (1/sqrt g) d_mu (sqrt g rho v^mu)| / rho` with the analytic current
/// `rho v^mu = (hbar/m) g^mn Im(psi* d_n psi)`.
pub fn continuity_residual<W: ConfigurationWave + ?Sized>(wave: &W, q: &[f64], t: f64) -> Result<f64> {
    guard(wave, q)?;
    let sys = wave.system();
    let (m, hbar) = (sys.params.mass, sys.params.hbar);
    let metric = sys.metric();
    let spec = metric.stencil();
    let n = q.len();

    let rho0 = wave.psi(q, t)?.norm_sqr();
    let rho_t = |s: &[f64]| -> Result<f64> { Ok(wave.psi(q, s[0])?.norm_sqr()) };
    let dt_rho: f64 = fd_partial(&rho_t, &[t], 0, TIME_STEP, FdOrder::Four)?;

    let mut div = 0.0;
    for mu in 0..n {
        let flux = |p: &[f64]| -> Result<f64> {
            let psi = wave.psi(p, t)?;
            let grad = wave.gradient(p, t)?;
            let ginv = metric.inverse(p)?;
            let mut j = 0.0;
            for (nu, g) in grad.iter().enumerate() {
                j += ginv[(mu, nu)] * (psi.conj() * g).im;
            }
            Ok(metric.sqrt_det(p)? * hbar / m * j)
        };
        div += fd_partial(&flux, q, mu, spec.step(mu), spec.order())?;
    }
    div /= metric.sqrt_det(q)?;
    Ok((dt_rho + div).abs() / rho0)
}
