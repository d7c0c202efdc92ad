use num_complex::Complex64;

use super::sga::SgaChannel;
use crate::error::{Error, Result};
use crate::geometry::TopSystem;
use crate::numerics::{gauss_legendre, integrate_angular, AngularGrid};
use crate::wavefield::{d_down, d_up, GaussianPacket, SingleTopState};

/// Planar rectangular detector `center + s u + r v`, `s, r` in `[-1, 1]`, oriented by `u x v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorPatch {
    pub center: [f64; 3],
    pub u: [f64; 3],
    pub v: [f64; 3],
    pub nodes: usize,
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

impl DetectorPatch {
    pub fn new(center: [f64; 3], u: [f64; 3], v: [f64; 3], nodes: usize) -> Result<Self> {
        let n = cross(&u, &v);
        if n.iter().map(|c| c * c).sum::<f64>() <= 0.0 {
            return Err(Error::invalid("detector edges are degenerate"));
        }
        if nodes < 2 {
            return Err(Error::invalid("detector quadrature needs at least 2 nodes per edge"));
        }
        Ok(Self { center, u, v, nodes })
    }

    /// Square patch of half-width `half` in the plane `y = y0`, normal along `+y`.
    pub fn plane_y(y0: f64, half: f64, nodes: usize) -> Result<Self> {
        Self::new([0.0, y0, 0.0], [0.0, 0.0, half], [half, 0.0, 0.0], nodes)
    }

    /// Unit normal and the area element `|u x v|`.
    pub fn normal(&self) -> ([f64; 3], f64) {
        let n = cross(&self.u, &self.v);
        let len = n.iter().map(|c| c * c).sum::<f64>().sqrt();
        (n.map(|c| c / len), len)
    }
}

/// A single-top wave of the product form `psi(x, t) (c_0 D_up + c_1 D_down)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorizedWave {
    pub system: TopSystem,
    pub packet: GaussianPacket,
    pub angular: [Complex64; 2],
}

impl FactorizedWave {
    pub fn new(system: TopSystem, packet: GaussianPacket, angular: [Complex64; 2]) -> Result<Self> {
        let m = system.spatial_mass();
        if ((packet.mass - m) / m).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "packet mass {} differs from the system's spatial mass {m}",
                packet.mass
            )));
        }
        Ok(Self { system, packet, angular })
    }

    /// Output channel of an analyser carried by `packet`.
    pub fn from_channel(system: TopSystem, channel: &SgaChannel, packet: GaussianPacket) -> Result<Self> {
        let p = channel.profile;
        Self::new(system, packet, [channel.amplitude * p[0], channel.amplitude * p[1]])
    }

    /// Rejects states whose spatial and angular parts are entangled.
    pub fn from_single_top(state: &SingleTopState) -> Result<Self> {
        let sys = *crate::wavefield::ConfigurationWave::system(state);
        let (a, b) = (state.coeffs.a, state.coeffs.b);
        if b.norm() == 0.0 {
            return Self::new(sys, state.packet_up, [a, Complex64::new(0.0, 0.0)]);
        }
        if a.norm() == 0.0 {
            return Self::new(sys, state.packet_down, [Complex64::new(0.0, 0.0), b]);
        }
        if state.packet_up == state.packet_down {
            return Self::new(sys, state.packet_up, [a, b]);
        }
        Err(Error::ContractViolation(
            "detector flux requires a factorized wave; the spin components ride on different packets".into(),
        ))
    }
}

/// `int_patch j . n dA * int |angular|^2 dmu`, with `j = (hbar / (m s)) Im(psi* grad psi)`.
pub fn detector_flux(wave: &FactorizedWave, patch: &DetectorPatch, t: f64, grid: &AngularGrid) -> Result<f64> {
    let [c0, c1] = wave.angular;
    let angular = integrate_angular(grid, |e| Complex64::from((c0 * d_up(e) + c1 * d_down(e)).norm_sqr()))?.re;
    let (nodes, weights) = gauss_legendre(patch.nodes);
    let (normal, area) = patch.normal();
    let coupling = wave.system.params.hbar / (wave.system.params.mass * wave.system.spatial_scale);
    let mut spatial = 0.0;
    for (s, ws) in nodes.iter().zip(&weights) {
        for (r, wr) in nodes.iter().zip(&weights) {
            let x: [f64; 3] = std::array::from_fn(|i| patch.center[i] + s * patch.u[i] + r * patch.v[i]);
            let psi = wave.packet.value(&x, t);
            let grad = wave.packet.gradient(&x, t);
            let jn: f64 = (0..3).map(|i| coupling * (psi.conj() * grad[i]).im * normal[i]).sum();
            spatial += ws * wr * jn * area;
        }
    }
    let flux = spatial * angular;
    if !flux.is_finite() {
        return Err(Error::non_finite("detector flux"));
    }
    Ok(flux)
}
