use std::f64::consts::PI;
use std::io::Write;

use nalgebra::Quaternion;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::TwoTopConfig;
use crate::error::{Error, Result};
use crate::geometry::{Axis, EulerAngles};
use crate::numerics::rk4_step;
use crate::wavefield::{wigner_from_quaternion, ConfigurationWave, TwoTopState, NODE_FLOOR};

/// Default integration step in internal time units.
pub const DEFAULT_DT: f64 = 1e-3;
/// Distance from the poles at which Euler-chart integration gives up.
pub const CHART_GUARD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrajectoryStatus {
    Completed,
    AbortedNearNode,
    AbortedChart,
}

impl TrajectoryStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            TrajectoryStatus::Completed => "completed",
            TrajectoryStatus::AbortedNearNode => "aborted-near-node",
            TrajectoryStatus::AbortedChart => "aborted-chart",
        }
    }
}

/// How orientations are advanced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartMode {
    /// Unit quaternions driven by the laboratory angular velocity; no coordinate singularity.
    Group,
    /// Euler coordinates directly; stops within [`CHART_GUARD`] of the poles.
    Euler,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    pub dt: f64,
    /// Keep every `record_every`-th step; the final point is always kept.
    pub record_every: usize,
    pub chart: ChartMode,
    /// Multiplies every velocity; `1.0` is the physical flow.
    pub velocity_scale: f64,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            record_every: 1,
            chart: ChartMode::Group,
            velocity_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub config: TwoTopConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub status: TrajectoryStatus,
    /// Set when an unwrapped `alpha` or `gamma` left `[0, 2 pi)`.
    pub wrapped: bool,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectories hold at least the initial point")
    }

    pub fn is_completed(&self) -> bool {
        self.status == TrajectoryStatus::Completed
    }
}

/// `v^mu = g^mn d_n S / m` at a configuration, in Euler coordinates.
pub fn velocity_field<W: ConfigurationWave + ?Sized>(wave: &W, q: &TwoTopConfig, t: f64) -> Result<[f64; 12]> {
    let v = wave.velocity(&q.to_array(), t)?;
    Ok(std::array::from_fn(|i| v[i]))
}

/// Coefficients of `X_i D` in the `(D_up, D_down)` basis: `(i/2) (D_up, D_down) sigma_i`.
fn frame_action(axis: Axis, d: [Complex64; 2]) -> [Complex64; 2] {
    let h = Complex64::new(0.0, 0.5);
    let i = Complex64::i();
    match axis {
        Axis::X => [h * d[1], h * d[0]],
        Axis::Y => [h * i * d[1], -h * i * d[0]],
        Axis::Z => [h * d[0], -h * d[1]],
    }
}

/// Spatial velocities and laboratory angular velocities `omega_i = X_i S / I` of both tops.
///
/// Works on unit quaternions, so it is regular at `beta = 0, pi`.
pub fn group_velocity(
    state: &TwoTopState,
    r_a: &[f64],
    q_a: &Quaternion<f64>,
    r_b: &[f64],
    q_b: &Quaternion<f64>,
    t: f64,
) -> Result<([f64; 3], [f64; 3], [f64; 3], [f64; 3])> {
    let sys = state.system();
    let hbar = sys.params.hbar;
    let (ua, da) = wigner_from_quaternion(q_a);
    let (ub, db) = wigner_from_quaternion(q_b);
    let (da, db) = ([ua, da], [ub, db]);
    let amp = state.bilinear(da, db);
    let density = amp.norm_sqr();
    if !(density >= NODE_FLOOR) {
        return Err(Error::NearNode {
            density,
            floor: NODE_FLOOR,
        });
    }
    let inertia = sys.inertia();
    let ms = sys.spatial_mass();
    let la = state.packet_a.log_gradient(r_a, t);
    let lb = state.packet_b.log_gradient(r_b, t);
    let va = la.map(|g| hbar * g.im / ms);
    let vb = lb.map(|g| hbar * g.im / ms);
    let wa = Axis::ALL.map(|ax| hbar * (state.bilinear(frame_action(ax, da), db) / amp).im / inertia);
    let wb = Axis::ALL.map(|ax| hbar * (state.bilinear(da, frame_action(ax, db)) / amp).im / inertia);
    Ok((va, wa, vb, wb))
}

fn quat(y: &[f64]) -> Quaternion<f64> {
    Quaternion::new(y[0], y[1], y[2], y[3])
}

/// `dq/dt = (0, omega) q / 2`.
fn quat_rate(w: [f64; 3], q: &Quaternion<f64>) -> [f64; 4] {
    let r = Quaternion::new(0.0, w[0], w[1], w[2]) * q * 0.5;
    [r.w, r.i, r.j, r.k]
}

fn wrapped(e: &EulerAngles) -> bool {
    !(0.0..2.0 * PI).contains(&e.alpha) || !(0.0..2.0 * PI).contains(&e.gamma)
}

fn status_for(err: &Error) -> Option<TrajectoryStatus> {
    match err {
        Error::NearNode { .. } => Some(TrajectoryStatus::AbortedNearNode),
        Error::SingularChart { .. } => Some(TrajectoryStatus::AbortedChart),
        _ => None,
    }
}

/// RK4 integration of the Hamilton-Jacobi flow from `t0` to `t1`.
///
/// Node and chart guards end the trajectory with a tagged status; other
/// failures (non-finite velocities) are returned as errors.
pub fn integrate_trajectory(
    state: &TwoTopState,
    q0: &TwoTopConfig,
    t0: f64,
    t1: f64,
    opts: &IntegrationOptions,
) -> Result<Trajectory> {
    if !(opts.dt > 0.0 && opts.dt.is_finite()) || opts.record_every == 0 {
        return Err(Error::invalid("dt must be positive and record_every at least 1"));
    }
    if !(t1 >= t0) {
        return Err(Error::invalid("t1 must not precede t0"));
    }
    let steps = ((t1 - t0) / opts.dt).round().max(if t1 > t0 { 1.0 } else { 0.0 }) as usize;
    let dt = if steps > 0 { (t1 - t0) / steps as f64 } else { 0.0 };
    match opts.chart {
        ChartMode::Group => integrate_group(state, q0, t0, steps, dt, opts),
        ChartMode::Euler => integrate_euler(state, q0, t0, steps, dt, opts),
    }
}

fn integrate_group(
    state: &TwoTopState,
    q0: &TwoTopConfig,
    t0: f64,
    steps: usize,
    dt: f64,
    opts: &IntegrationOptions,
) -> Result<Trajectory> {
    let scale = opts.velocity_scale;
    let (qa0, qb0) = (q0.euler_a.to_quaternion(), q0.euler_b.to_quaternion());
    let mut y = [0.0; 14];
    y[0..3].copy_from_slice(&q0.r_a);
    y[3..7].copy_from_slice(&[qa0.w, qa0.i, qa0.j, qa0.k]);
    y[7..10].copy_from_slice(&q0.r_b);
    y[10..14].copy_from_slice(&[qb0.w, qb0.i, qb0.j, qb0.k]);

    let rhs = |t: f64, y: &[f64; 14]| -> Result<[f64; 14]> {
        let (qa, qb) = (quat(&y[3..7]), quat(&y[10..14]));
        let (va, wa, vb, wb) = group_velocity(state, &y[0..3], &qa, &y[7..10], &qb, t)?;
        let (ra, rb) = (quat_rate(wa, &qa), quat_rate(wb, &qb));
        let mut out = [0.0; 14];
        out[0..3].copy_from_slice(&va);
        out[3..7].copy_from_slice(&ra);
        out[7..10].copy_from_slice(&vb);
        out[10..14].copy_from_slice(&rb);
        Ok(out.map(|v| v * scale))
    };

    let mut samples = vec![TrajectorySample { t: t0, config: *q0 }];
    let mut current = *q0;
    let mut any_wrapped = false;
    let mut status = TrajectoryStatus::Completed;
    for k in 0..steps {
        let t = t0 + k as f64 * dt;
        match rk4_step(t, &y, dt, rhs) {
            Ok(next) => y = next,
            Err(e) => match status_for(&e) {
                Some(s) => {
                    status = s;
                    break;
                }
                None => return Err(e),
            },
        }
        for range in [3..7, 10..14] {
            let n = quat(&y[range.clone()]).norm();
            y[range].iter_mut().for_each(|v| *v /= n);
        }
        let ea = EulerAngles::from_quaternion_near(&quat(&y[3..7]), &current.euler_a);
        let eb = EulerAngles::from_quaternion_near(&quat(&y[10..14]), &current.euler_b);
        current = TwoTopConfig {
            r_a: [y[0], y[1], y[2]],
            euler_a: ea,
            r_b: [y[7], y[8], y[9]],
            euler_b: eb,
        };
        any_wrapped |= wrapped(&ea) || wrapped(&eb);
        if (k + 1) % opts.record_every == 0 || k + 1 == steps {
            samples.push(TrajectorySample {
                t: t0 + (k + 1) as f64 * dt,
                config: current,
            });
        }
    }
    Ok(Trajectory {
        samples,
        status,
        wrapped: any_wrapped,
    })
}

fn integrate_euler(
    state: &TwoTopState,
    q0: &TwoTopConfig,
    t0: f64,
    steps: usize,
    dt: f64,
    opts: &IntegrationOptions,
) -> Result<Trajectory> {
    let in_chart = |y: &[f64; 12]| [y[4], y[10]].iter().all(|b| *b > CHART_GUARD && *b < PI - CHART_GUARD);
    let rhs = |t: f64, y: &[f64; 12]| -> Result<[f64; 12]> {
        if !in_chart(y) {
            return Err(Error::SingularChart {
                sin_beta: y[4].sin().min(y[10].sin()),
            });
        }
        let v = velocity_field(state, &TwoTopConfig::from_slice(y), t)?;
        Ok(v.map(|x| x * opts.velocity_scale))
    };
    let mut y = q0.to_array();
    let mut samples = vec![TrajectorySample { t: t0, config: *q0 }];
    let mut status = TrajectoryStatus::Completed;
    let mut any_wrapped = false;
    for k in 0..steps {
        let t = t0 + k as f64 * dt;
        match rk4_step(t, &y, dt, rhs) {
            Ok(next) => y = next,
            Err(e) => match status_for(&e) {
                Some(s) => {
                    status = s;
                    break;
                }
                None => return Err(e),
            },
        }
        if !in_chart(&y) {
            status = TrajectoryStatus::AbortedChart;
            break;
        }
        let c = TwoTopConfig::from_slice(&y);
        any_wrapped |= wrapped(&c.euler_a) || wrapped(&c.euler_b);
        if (k + 1) % opts.record_every == 0 || k + 1 == steps {
            samples.push(TrajectorySample {
                t: t0 + (k + 1) as f64 * dt,
                config: c,
            });
        }
    }
    Ok(Trajectory {
        samples,
        status,
        wrapped: any_wrapped,
    })
}

/// Largest deviation of `p_gamma_A`, `p_gamma_B` from `hbar / 2` over the recorded samples.
pub fn momentum_drift<W: ConfigurationWave + ?Sized>(wave: &W, traj: &Trajectory) -> Result<f64> {
    let half = 0.5 * wave.system().params.hbar;
    let mut worst = 0.0f64;
    for s in &traj.samples {
        let g = wave.action_gradient(&s.config.to_array(), s.t)?;
        worst = worst.max((g[5] - half).abs()).max((g[11] - half).abs());
    }
    Ok(worst)
}

pub const CSV_HEADER: &str = "t,x_A,y_A,z_A,alpha_A,beta_A,gamma_A,x_B,y_B,z_B,alpha_B,beta_B,gamma_B,status";

/// One row per sample; the status column repeats the trajectory status.
pub fn write_trajectory_csv<W: Write>(out: &mut W, traj: &Trajectory) -> Result<()> {
    for s in &traj.samples {
        write!(out, "{:.16e}", s.t)?;
        for v in s.config.to_array() {
            write!(out, ",{v:.16e}")?;
        }
        writeln!(out, ",{}", traj.status.as_str())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{gauge_rescale, TopParams, TopSystem};

    fn system() -> TopSystem {
        TopSystem::new(TopParams::unit(), 2).unwrap()
    }

    fn start() -> TwoTopConfig {
        TwoTopConfig {
            r_a: [0.5, -118.0, -1.0],
            euler_a: EulerAngles::unwrapped(0.3, 0.3, 1.0),
            r_b: [-2.0, 121.0, 0.7],
            euler_b: EulerAngles::unwrapped(0.3 + PI, 2.8, 4.0),
        }
    }

    #[test]
    fn group_velocity_matches_euler_velocity() {
        let s = TwoTopState::default_singlet(system()).unwrap();
        let q = start();
        let v = velocity_field(&s, &q, 0.4).unwrap();
        let (va, wa, vb, wb) = group_velocity(
            &s,
            &q.r_a,
            &q.euler_a.to_quaternion(),
            &q.r_b,
            &q.euler_b.to_quaternion(),
            0.4,
        )
        .unwrap();
        let la = crate::geometry::triad(&q.euler_a).unwrap().lambda;
        let lb = crate::geometry::triad(&q.euler_b).unwrap().lambda;
        let oa = la * nalgebra::Vector3::new(v[3], v[4], v[5]);
        let ob = lb * nalgebra::Vector3::new(v[9], v[10], v[11]);
        for i in 0..3 {
            assert!((va[i] - v[i]).abs() < 1e-12 && (vb[i] - v[6 + i]).abs() < 1e-12);
            assert!((wa[i] - oa[i]).abs() < 1e-10 && (wb[i] - ob[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn spatial_velocity_is_group_velocity_at_centre() {
        let s = TwoTopState::default_singlet(system()).unwrap();
        let mut q = start();
        q.r_a = s.packet_a.mean(0.0);
        q.r_b = s.packet_b.mean(0.0);
        let v = velocity_field(&s, &q, 0.0).unwrap();
        assert!((v[1] + 1.0).abs() < 1e-6 && (v[7] - 1.0).abs() < 1e-6);
        let g = crate::geometry::MetricField::metric(&s.system().metric(), &q.to_array());
        let vv = nalgebra::DVector::from_row_slice(&v);
        assert!(vv.dot(&(g * &vv)) >= 0.0);
    }

    #[test]
    fn singlet_conserves_gamma_momenta() {
        let s = TwoTopState::default_singlet(system()).unwrap();
        let opts = IntegrationOptions {
            record_every: 100,
            ..Default::default()
        };
        let tr = integrate_trajectory(&s, &start(), 0.0, 2.0, &opts).unwrap();
        assert!(tr.is_completed());
        assert!(momentum_drift(&s, &tr).unwrap() < 1e-6);
        for smp in &tr.samples {
            assert!(smp.config.to_array().iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn product_state_keeps_beta() {
        let s = TwoTopState::default_product(system()).unwrap();
        let opts = IntegrationOptions {
            record_every: 50,
            ..Default::default()
        };
        let q = start();
        let tr = integrate_trajectory(&s, &q, 0.0, 2.0, &opts).unwrap();
        assert!(tr.is_completed());
        for smp in &tr.samples {
            assert!((smp.config.euler_a.beta - q.euler_a.beta).abs() < 1e-6);
            assert!((smp.config.euler_b.beta - q.euler_b.beta).abs() < 1e-6);
        }
    }

    #[test]
    fn charts_agree_away_from_poles() {
        let s = TwoTopState::default_singlet(system()).unwrap();
        let mut q = start();
        q.euler_a.beta = 1.2;
        q.euler_b.beta = 2.0;
        let g = integrate_trajectory(&s, &q, 0.0, 0.5, &IntegrationOptions::default()).unwrap();
        let e = integrate_trajectory(
            &s,
            &q,
            0.0,
            0.5,
            &IntegrationOptions {
                chart: ChartMode::Euler,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(e.is_completed());
        let (a, b) = (g.last().config.to_array(), e.last().config.to_array());
        for i in 0..12 {
            assert!((a[i] - b[i]).abs() < 1e-8, "{i}: {} vs {}", a[i], b[i]);
        }
    }

    #[test]
    fn euler_chart_aborts_near_pole() {
        let s = TwoTopState::default_singlet(system()).unwrap();
        let mut q = start();
        q.euler_a.beta = 0.04;
        let tr = integrate_trajectory(
            &s,
            &q,
            0.0,
            0.1,
            &IntegrationOptions {
                chart: ChartMode::Euler,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(tr.status, TrajectoryStatus::AbortedChart);
        let g = integrate_trajectory(&s, &q, 0.0, 0.1, &IntegrationOptions::default()).unwrap();
        assert!(g.is_completed());
    }

    #[test]
    fn fourth_order_convergence() {
        let s = TwoTopState::default_singlet(system()).unwrap();
        let q = start();
        let run = |dt: f64| {
            integrate_trajectory(&s, &q, 0.0, 1.0, &IntegrationOptions { dt, ..Default::default() })
                .unwrap()
                .last()
                .config
                .to_array()
        };
        let (a, b, c) = (run(0.1), run(0.05), run(0.025));
        let d1: f64 = a.iter().zip(&c).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let d2: f64 = b.iter().zip(&c).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(d1 / d2 > 10.0, "{d1} {d2}");
    }

    #[test]
    fn gauge_rescaled_trajectories_coincide() {
        let s = TwoTopState::default_singlet(system()).unwrap();
        let q = start();
        let opts = IntegrationOptions {
            dt: 0.01,
            record_every: 10,
            ..Default::default()
        };
        let base = integrate_trajectory(&s, &q, 0.0, 1.0, &opts).unwrap();
        for lambda in [0.25, 4.0] {
            let g = s.with_system(gauge_rescale(lambda, s.system()).unwrap()).unwrap();
            let tr = integrate_trajectory(&g, &q, 0.0, 1.0, &opts).unwrap();
            for (x, y) in base.samples.iter().zip(&tr.samples) {
                for (u, v) in x.config.to_array().iter().zip(y.config.to_array()) {
                    assert!((u - v).abs() <= 1e-10 * u.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn csv_rows() {
        let s = TwoTopState::default_singlet(system()).unwrap();
        let tr = integrate_trajectory(
            &s,
            &start(),
            0.0,
            0.01,
            &IntegrationOptions {
                dt: 0.005,
                ..Default::default()
            },
        )
        .unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &tr).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().all(|l| l.split(',').count() == 14 && l.ends_with("completed")));
    }
}
