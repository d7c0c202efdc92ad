use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal as NormalDist};

use super::config::TwoTopConfig;
use super::trajectory::{integrate_trajectory, momentum_drift, ChartMode, IntegrationOptions, TrajectoryStatus};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::EulerAngles;
use crate::wavefield::TwoTopState;

/// Largest fraction of aborted members an equivariance run accepts.
pub const MAX_ABORT_FRACTION: f64 = 0.01;

/// Initial configurations drawn from `rho(t0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub seed: u64,
    pub t0: f64,
    pub members: Vec<TwoTopConfig>,
}

/// Generator of member `index`: stream `index` of the ChaCha8 sequence seeded with `seed`.
pub fn member_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn haar_angles<R: Rng>(rng: &mut R) -> EulerAngles {
    EulerAngles::unwrapped(rng.random_range(0.0..TAU), rng.random_range(-1.0f64..1.0).acos(), rng.random_range(0.0..TAU))
}

/// Draws one configuration: rejection sampling of the angular factor against the
/// Haar measure, Gaussian spatial coordinates from the packet densities.
pub fn sample_member<R: Rng>(state: &TwoTopState, t0: f64, rng: &mut R) -> Result<TwoTopConfig> {
    let bound = state.max_angular_density();
    let (ea, eb) = loop {
        let (ea, eb) = (haar_angles(rng), haar_angles(rng));
        let accept = state.angular_amplitude(&ea, &eb).norm_sqr() / bound;
        if rng.random::<f64>() < accept {
            break (ea, eb);
        }
    };
    let draw = |rng: &mut R, p: &crate::wavefield::GaussianPacket| -> Result<[f64; 3]> {
        let m = p.mean(t0);
        let normal = Normal::new(0.0, p.width(t0)).map_err(|e| Error::invalid(e.to_string()))?;
        Ok([m[0] + normal.sample(rng), m[1] + normal.sample(rng), m[2] + normal.sample(rng)])
    };
    let r_a = draw(rng, &state.packet_a)?;
    let r_b = draw(rng, &state.packet_b)?;
    Ok(TwoTopConfig {
        r_a,
        euler_a: ea,
        r_b,
        euler_b: eb,
    })
}

pub fn sample_ensemble(state: &TwoTopState, n: usize, seed: u64, t0: f64, exec: Execution) -> Result<Ensemble> {
    if n == 0 {
        return Err(Error::invalid("ensemble size must be at least 1"));
    }
    let members = exec.try_map(n, |i| sample_member(state, t0, &mut member_rng(seed, i as u64)))?;
    Ok(Ensemble { seed, t0, members })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Largest `|observed - expected|` bin probability.
    pub max_deviation: f64,
}

fn chi_square(counts: &[u64], expected_prob: &[f64]) -> Result<ChiSquareResult> {
    let n: u64 = counts.iter().sum();
    let n = n as f64;
    let mut stat = 0.0;
    let mut dev = 0.0f64;
    for (&c, &p) in counts.iter().zip(expected_prob) {
        let e = n * p;
        if e > 0.0 {
            stat += (c as f64 - e).powi(2) / e;
        }
        dev = dev.max((c as f64 / n - p).abs());
    }
    let dof = counts.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::invalid(e.to_string()))?;
    Ok(ChiSquareResult {
        statistic: stat,
        dof,
        p_value: dist.sf(stat),
        max_deviation: dev,
    })
}

fn histogram(values: impl Iterator<Item = f64>, edges: &[f64]) -> Vec<u64> {
    let mut counts = vec![0u64; edges.len() + 1];
    for v in values {
        let k = edges.partition_point(|e| *e <= v);
        counts[k] += 1;
    }
    counts
}

fn probs_from_cdf(edges: &[f64], cdf: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(edges.len() + 1);
    let mut prev = 0.0;
    for &e in edges {
        let c = cdf(e);
        out.push(c - prev);
        prev = c;
    }
    out.push(1.0 - prev);
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivarianceOptions {
    pub t1: f64,
    pub dt: f64,
    pub bins: usize,
    pub velocity_scale: f64,
    pub chart: ChartMode,
    pub exec: Execution,
}

impl Default for EquivarianceOptions {
    fn default() -> Self {
        Self {
            t1: 5.0,
            dt: 1e-2,
            bins: 20,
            velocity_scale: 1.0,
            chart: ChartMode::Group,
            exec: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivarianceReport {
    pub members: usize,
    pub aborted_near_node: usize,
    pub aborted_chart: usize,
    pub wrapped: usize,
    pub t1: f64,
    /// `cos` of the angle between the body axes against the density `(1 - u) / 2`.
    pub cos_relative: ChiSquareResult,
    /// `cos beta_A` against the uniform marginal.
    pub cos_beta_a: ChiSquareResult,
    /// `y_A` against the packet marginal at `t1`.
    pub y_a: ChiSquareResult,
    pub max_momentum_drift: f64,
    /// Angular histograms at `t1` equal those at `t0` bin for bin.
    pub angular_histograms_unchanged: bool,
}

impl EquivarianceReport {
    pub fn min_p_value(&self) -> f64 {
        self.cos_relative.p_value.min(self.cos_beta_a.p_value).min(self.y_a.p_value)
    }
}

/// Pushes every member to `t1` and compares the empirical marginals with those of `rho(t1)`.
///
/// The angular reference marginals are those of the singlet, whose angular
/// density is stationary and rotation invariant.
pub fn equivariance_check(
    state: &TwoTopState,
    ensemble: &Ensemble,
    opts: &EquivarianceOptions,
) -> Result<EquivarianceReport> {
    if opts.bins < 2 {
        return Err(Error::invalid("need at least two bins"));
    }
    let iopts = IntegrationOptions {
        dt: opts.dt,
        record_every: usize::MAX,
        chart: opts.chart,
        velocity_scale: opts.velocity_scale,
    };
    let results = opts.exec.try_map(ensemble.members.len(), |i| {
        let tr = integrate_trajectory(state, &ensemble.members[i], ensemble.t0, opts.t1, &iopts)?;
        let drift = if tr.is_completed() {
            momentum_drift(state, &tr)?
        } else {
            0.0
        };
        Ok::<_, Error>((tr.status, tr.wrapped, tr.last().config, drift))
    })?;

    let members = results.len();
    let count = |s: TrajectoryStatus| results.iter().filter(|r| r.0 == s).count();
    let aborted_near_node = count(TrajectoryStatus::AbortedNearNode);
    let aborted_chart = count(TrajectoryStatus::AbortedChart);
    let aborted = aborted_near_node + aborted_chart;
    if aborted as f64 > MAX_ABORT_FRACTION * members as f64 {
        return Err(Error::Config(format!(
            "{aborted} of {members} trajectories aborted (limit {:.0}%)",
            100.0 * MAX_ABORT_FRACTION
        )));
    }
    let finals: Vec<&TwoTopConfig> = results.iter().filter(|r| r.0 == TrajectoryStatus::Completed).map(|r| &r.2).collect();

    let bins = opts.bins;
    let unit_edges: Vec<f64> = (1..bins).map(|k| -1.0 + 2.0 * k as f64 / bins as f64).collect();
    let rel_probs = probs_from_cdf(&unit_edges, |u| (u - 0.5 * u * u + 1.5) / 2.0);
    let uni_probs = probs_from_cdf(&unit_edges, |u| (u + 1.0) / 2.0);

    let p = &state.packet_a;
    let (m, w) = (p.mean(opts.t1)[1], p.width(opts.t1));
    let y_edges: Vec<f64> = (0..=bins).map(|k| m - 3.0 * w + 6.0 * w * k as f64 / bins as f64).collect();
    let normal = NormalDist::new(m, w).map_err(|e| Error::invalid(e.to_string()))?;
    let y_probs = probs_from_cdf(&y_edges, |y| normal.cdf(y));

    let rel1 = histogram(finals.iter().map(|c| c.cos_relative()), &unit_edges);
    let beta1 = histogram(finals.iter().map(|c| c.euler_a.beta.cos()), &unit_edges);
    let y1 = histogram(finals.iter().map(|c| c.r_a[1]), &y_edges);

    let rel0 = histogram(ensemble.members.iter().map(|c| c.cos_relative()), &unit_edges);
    let beta0 = histogram(ensemble.members.iter().map(|c| c.euler_a.beta.cos()), &unit_edges);

    Ok(EquivarianceReport {
        members,
        aborted_near_node,
        aborted_chart,
        wrapped: results.iter().filter(|r| r.1).count(),
        t1: opts.t1,
        cos_relative: chi_square(&rel1, &rel_probs)?,
        cos_beta_a: chi_square(&beta1, &uni_probs)?,
        y_a: chi_square(&y1, &y_probs)?,
        max_momentum_drift: results.iter().map(|r| r.3).fold(0.0, f64::max),
        angular_histograms_unchanged: rel0 == rel1 && beta0 == beta1,
    })
}
