use nalgebra::Quaternion;
use num_complex::Complex64;

use super::packet::GaussianPacket;
use super::state::{ConfigurationWave, ScalarWaveSample, SpinorCoeffs, NODE_FLOOR};
use super::wigner::{d_down, d_down_partials, d_up, d_up_partials, wigner_from_quaternion};
use crate::dynamics::TwoTopConfig;
use crate::error::{Error, Result};
use crate::geometry::{weyl_curvature_parts_from_density, EulerAngles, TopSystem, WeylCurvature};

/// Largest packet overlap accepted for a two-top state.
pub const MAX_PACKET_OVERLAP: f64 = 1e-6;

/// `psi = e^{-2 i Omega t} psi_A(r_A, t) psi_B(r_B, t) sum_ij C_ij D_i(A) D_j(B)`, with
/// `D_0 = D_up`, `D_1 = D_down`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoTopState {
    system: TopSystem,
    amplitudes: [[Complex64; 2]; 2],
    pub packet_a: GaussianPacket,
    pub packet_b: GaussianPacket,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl TwoTopState {
    pub fn new(
        system: TopSystem,
        amplitudes: [[Complex64; 2]; 2],
        packet_a: GaussianPacket,
        packet_b: GaussianPacket,
    ) -> Result<Self> {
        if system.particles != 2 {
            return Err(Error::invalid("two-top state needs a two-particle system"));
        }
        let n: f64 = amplitudes.iter().flatten().map(|a| a.norm_sqr()).sum();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("amplitudes not normalized: sum |C|^2 = {n}")));
        }
        let overlap = packet_a.overlap(&packet_b, 0.0);
        if overlap >= MAX_PACKET_OVERLAP {
            return Err(Error::invalid(format!("packets not separated: overlap {overlap:e}")));
        }
        Ok(Self {
            system,
            amplitudes,
            packet_a,
            packet_b,
        })
    }

    /// `(|up, down> - |down, up>) / sqrt 2`.
    pub fn singlet(system: TopSystem, packet_a: GaussianPacket, packet_b: GaussianPacket) -> Result<Self> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(system, [[c(0.0), c(h)], [c(-h), c(0.0)]], packet_a, packet_b)
    }

    pub fn product(
        system: TopSystem,
        spin_a: SpinorCoeffs,
        spin_b: SpinorCoeffs,
        packet_a: GaussianPacket,
        packet_b: GaussianPacket,
    ) -> Result<Self> {
        let (a, b) = ([spin_a.a, spin_a.b], [spin_b.a, spin_b.b]);
        let amps = [[a[0] * b[0], a[0] * b[1]], [a[1] * b[0], a[1] * b[1]]];
        Self::new(system, amps, packet_a, packet_b)
    }

    /// Singlet with the default back-to-back packets.
    pub fn default_singlet(system: TopSystem) -> Result<Self> {
        let (a, b) = GaussianPacket::default_pair(system.spatial_mass(), system.params.hbar)?;
        Self::singlet(system, a, b)
    }

    /// `|up_z, down_z>` with the default packets.
    pub fn default_product(system: TopSystem) -> Result<Self> {
        let (a, b) = GaussianPacket::default_pair(system.spatial_mass(), system.params.hbar)?;
        Self::product(system, SpinorCoeffs::up(), SpinorCoeffs::down(), a, b)
    }

    pub fn amplitudes(&self) -> &[[Complex64; 2]; 2] {
        &self.amplitudes
    }

    /// Same spin state and packets on a different (e.g. gauge-rescaled) system.
    pub fn with_system(&self, system: TopSystem) -> Result<Self> {
        Self::new(system, self.amplitudes, self.packet_a, self.packet_b)
    }

    pub fn bilinear(&self, a: [Complex64; 2], b: [Complex64; 2]) -> Complex64 {
        let m = &self.amplitudes;
        a[0] * (m[0][0] * b[0] + m[0][1] * b[1]) + a[1] * (m[1][0] * b[0] + m[1][1] * b[1])
    }

    /// `sum_ij C_ij D_i(A) D_j(B)`.
    pub fn angular_amplitude(&self, ea: &EulerAngles, eb: &EulerAngles) -> Complex64 {
        self.bilinear([d_up(ea), d_down(ea)], [d_up(eb), d_down(eb)])
    }

    pub fn angular_amplitude_quat(&self, qa: &Quaternion<f64>, qb: &Quaternion<f64>) -> Complex64 {
        let (ua, da) = wigner_from_quaternion(qa);
        let (ub, db) = wigner_from_quaternion(qb);
        self.bilinear([ua, da], [ub, db])
    }

    /// Largest singular value squared of `C`; bounds `|angular amplitude|^2`.
    pub fn max_angular_density(&self) -> f64 {
        let m = &self.amplitudes;
        let fro: f64 = m.iter().flatten().map(|a| a.norm_sqr()).sum();
        let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm_sqr();
        0.5 * fro + (0.25 * fro * fro - det).max(0.0).sqrt()
    }

    pub fn time_phase(&self, t: f64) -> Complex64 {
        Complex64::from_polar(1.0, -2.0 * self.system.omega() * t)
    }

    pub fn sample_config(&self, config: &TwoTopConfig, t: f64) -> Result<ScalarWaveSample> {
        self.sample(&config.to_array(), t)
    }

    /// Random configuration within one width of both packet centres at time `t`,
    /// with angles away from the poles and angular density above `min_density`.
    pub fn offnode_point<R: rand::Rng + ?Sized>(&self, rng: &mut R, t: f64, min_density: f64) -> TwoTopConfig {
        use std::f64::consts::{PI, TAU};
        loop {
            let mut q = [0.0; 12];
            for (off, p) in [(0usize, &self.packet_a), (6, &self.packet_b)] {
                let (m, w) = (p.mean(t), p.width(t));
                for i in 0..3 {
                    q[off + i] = m[i] + rng.random_range(-w..w);
                }
                q[off + 3] = rng.random_range(0.0..TAU);
                q[off + 4] = rng.random_range(0.2..PI - 0.2);
                q[off + 5] = rng.random_range(0.0..TAU);
            }
            if self.angular_density(&q) > min_density {
                return TwoTopConfig::from_slice(&q);
            }
        }
    }

    /// Weyl curvature on the full 12-dimensional metric of the angular density
    /// `|sum C_ij D_i(A) D_j(B)|^2`.
    pub fn angular_curvature(&self, config: &TwoTopConfig) -> Result<WeylCurvature> {
        let rho = |p: &[f64]| -> Result<f64> {
            let ea = EulerAngles::unwrapped(p[3], p[4], p[5]);
            let eb = EulerAngles::unwrapped(p[9], p[10], p[11]);
            Ok(self.angular_amplitude(&ea, &eb).norm_sqr())
        };
        let floor = NODE_FLOOR * self.max_angular_density();
        weyl_curvature_parts_from_density(&self.system.metric(), &rho, &config.to_array(), floor)
    }
}

/// `1 - cos b_A cos b_B - cos(a_B - a_A) sin b_A sin b_B`.
pub fn singlet_overlap_term(ea: &EulerAngles, eb: &EulerAngles) -> f64 {
    4.0 * singlet_angular_factor(ea, eb)
}

fn split(q: &[f64]) -> (&[f64], EulerAngles, &[f64], EulerAngles) {
    (
        &q[0..3],
        EulerAngles::unwrapped(q[3], q[4], q[5]),
        &q[6..9],
        EulerAngles::unwrapped(q[9], q[10], q[11]),
    )
}

impl ConfigurationWave for TwoTopState {
    fn system(&self) -> &TopSystem {
        &self.system
    }

    fn psi(&self, q: &[f64], t: f64) -> Result<Complex64> {
        let (ra, ea, rb, eb) = split(q);
        Ok(self.time_phase(t)
            * self.packet_a.value(ra, t)
            * self.packet_b.value(rb, t)
            * self.angular_amplitude(&ea, &eb))
    }

    fn gradient(&self, q: &[f64], t: f64) -> Result<Vec<Complex64>> {
        let (ra, ea, rb, eb) = split(q);
        let (pa, pb) = (self.packet_a.value(ra, t), self.packet_b.value(rb, t));
        let (la, lb) = (self.packet_a.log_gradient(ra, t), self.packet_b.log_gradient(rb, t));
        let pre = self.time_phase(t) * pa * pb;
        let da = [d_up(&ea), d_down(&ea)];
        let db = [d_up(&eb), d_down(&eb)];
        let ang = self.bilinear(da, db);
        let (pua, pda) = (d_up_partials(&ea), d_down_partials(&ea));
        let (pub_, pdb) = (d_up_partials(&eb), d_down_partials(&eb));
        let mut out = Vec::with_capacity(12);
        for l in la {
            out.push(pre * ang * l);
        }
        for k in 0..3 {
            out.push(pre * self.bilinear([pua[k], pda[k]], db));
        }
        for l in lb {
            out.push(pre * ang * l);
        }
        for k in 0..3 {
            out.push(pre * self.bilinear(da, [pub_[k], pdb[k]]));
        }
        Ok(out)
    }

    fn angular_density(&self, q: &[f64]) -> f64 {
        let (_, ea, _, eb) = split(q);
        self.angular_amplitude(&ea, &eb).norm_sqr()
    }
}

/// Angular factor of the singlet density,
/// `(1 - cos b_A cos b_B - cos(a_B - a_A) sin b_A sin b_B) / 4`.
pub fn singlet_angular_factor(ea: &EulerAngles, eb: &EulerAngles) -> f64 {
    let (sa, ca) = ea.beta.sin_cos();
    let (sb, cb) = eb.beta.sin_cos();
    0.25 * (1.0 - ca * cb - (eb.alpha - ea.alpha).cos() * sa * sb)
}

/// Singlet sample at a configuration.
pub fn singlet_psi(state: &TwoTopState, config: &TwoTopConfig, t: f64) -> Result<ScalarWaveSample> {
    state.sample_config(config, t)
}

fn singlet_action_parts(state: &TwoTopState, config: &TwoTopConfig, t: f64) -> Result<(f64, f64, f64)> {
    let density = singlet_angular_factor(&config.euler_a, &config.euler_b);
    if !(density >= NODE_FLOOR) {
        return Err(Error::NearNode {
            density,
            floor: NODE_FLOOR,
        });
    }
    let (ea, eb) = (&config.euler_a, &config.euler_b);
    let base = -2.0 * state.system().omega() * t
        + 0.5 * (ea.gamma + eb.gamma)
        + state.packet_a.value(&config.r_a, t).arg()
        + state.packet_b.value(&config.r_b, t).arg();
    let half_da = 0.5 * (eb.alpha - ea.alpha);
    let num = (0.5 * (ea.beta + eb.beta)).sin() * half_da.sin();
    let den = (0.5 * (ea.beta - eb.beta)).sin() * half_da.cos();
    Ok((base, num, den))
}

/// The printed closed form
/// `S = hbar [-2 Omega t + (g_A + g_B)/2 + arctan(csc((b_A - b_B)/2) sin((b_A + b_B)/2) tan((a_B - a_A)/2)) + arg psi_A + arg psi_B]`.
///
/// The one-argument arctan drops the quadrant, so this equals `hbar arg psi` only modulo `hbar pi`.
pub fn singlet_action_printed(state: &TwoTopState, config: &TwoTopConfig, t: f64) -> Result<f64> {
    let (base, num, den) = singlet_action_parts(state, config, t)?;
    let s = base + (num / den).atan();
    if !s.is_finite() {
        return Err(Error::Domain("singlet action undefined at this configuration".into()));
    }
    Ok(state.system().params.hbar * s)
}

/// Quadrant-correct singlet action: the printed form with `atan2`; equals `hbar arg psi` modulo `2 pi hbar`.
pub fn singlet_action(state: &TwoTopState, config: &TwoTopConfig, t: f64) -> Result<f64> {
    let (base, num, den) = singlet_action_parts(state, config, t)?;
    // bracket = cos(da/2) sin((b_B - b_A)/2) - i sin(da/2) sin((b_A + b_B)/2)
    Ok(state.system().params.hbar * (base + (-num).atan2(-den)))
}
