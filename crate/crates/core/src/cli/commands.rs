use std::f64::consts::{PI, TAU};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use serde::Serialize;

use super::config::{Format, RunConfig, Slice, StateKind};
use super::meta::Metadata;
use super::verify::run_suite;
use super::{Exit, Failure};
use crate::dynamics::{
    equivariance_check, integrate_trajectory, momentum_drift, sample_ensemble, write_trajectory_csv,
    EquivarianceOptions, EquivarianceReport, IntegrationOptions, Trajectory, TrajectoryStatus, TwoTopConfig,
    CHART_GUARD, CSV_HEADER, MAX_ABORT_FRACTION,
};
use crate::error::Error;
use crate::geometry::{weyl_curvature_parts_from_density, EulerAngles, TopParams, TopSystem};
use crate::measurement::{bell_scan as scan, coincidence_fluxes, correlation, write_bell_csv, CoincidenceRecord};
use crate::numerics::AngularGrid;
use crate::wavefield::TwoTopState;

fn create(config: &RunConfig, name: &str) -> Result<(PathBuf, BufWriter<File>), Failure> {
    let path = config.out.join(name);
    let file = File::create(&path).map_err(|e| Failure::usage(format!("cannot create {}: {e}", path.display())))?;
    Ok((path, BufWriter::new(file)))
}

fn write_json<T: Serialize>(config: &RunConfig, name: &str, data: &T) -> Result<PathBuf, Failure> {
    let (path, mut w) = create(config, name)?;
    serde_json::to_writer_pretty(&mut w, &Metadata::new(config).wrap(data)?).map_err(Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(path)
}

fn grid(config: &RunConfig) -> Result<AngularGrid, Failure> {
    let [b, a, g] = config.grid;
    Ok(AngularGrid::new(b, a, g)?)
}

fn two_top_state(kind: StateKind) -> Result<TwoTopState, Failure> {
    let system = TopSystem::new(TopParams::unit(), 2)?;
    match kind {
        StateKind::Singlet => Ok(TwoTopState::default_singlet(system)?),
        StateKind::Product => Ok(TwoTopState::default_product(system)?),
        StateKind::Constant => Err(Failure::usage("the constant state has no wavefunction; use it with curvature-map")),
    }
}

pub fn verify(config: &RunConfig) -> Result<Exit, Failure> {
    let report = run_suite(config.seed, config.tolerance_scale, &grid(config)?, config.exec());
    let path = write_json(config, "verify_report.json", &report)?;
    for c in &report.checks {
        println!(
            "{} {:<40} value {:>+.10e} residual {:.3e} (tol {:.1e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.residual,
            c.tolerance
        );
    }
    println!("report: {}", path.display());
    Ok(if report.passed { Exit::Ok } else { Exit::CheckFailure })
}

pub fn bell_scan(config: &RunConfig) -> Result<Exit, Failure> {
    let deltas: Vec<f64> = config.scan_degrees().iter().map(|d| d.to_radians()).collect();
    let result = scan(&deltas, &grid(config)?, config.exec())?;
    let path = match config.format {
        Format::Csv => {
            let (path, mut w) = create(config, "bell_scan.csv")?;
            Metadata::new(config).write_comments(&mut w)?;
            write_bell_csv(&mut w, &result)?;
            w.flush()?;
            path
        }
        Format::Json => write_json(config, "bell_scan.json", &result)?,
    };
    println!("max F = {:.12}", result.max);
    println!("argmax = {:.6} deg", result.argmax.to_degrees());
    match result.violation_interval {
        Some((a, b)) => println!("violated on [{:.6}, {:.6}] deg", a.to_degrees(), b.to_degrees()),
        None => println!("no violation in range"),
    }
    println!("output: {}", path.display());
    Ok(Exit::Ok)
}

pub fn coincidence(config: &RunConfig) -> Result<Exit, Failure> {
    let table = coincidence_fluxes(config.theta_a.to_radians(), config.theta_b.to_radians(), &grid(config)?, config.exec())?;
    let record = CoincidenceRecord::from(&table);
    let path = match config.format {
        Format::Json => write_json(config, "coincidence.json", &record)?,
        Format::Csv => {
            let (path, mut w) = create(config, "coincidence.csv")?;
            Metadata::new(config).write_comments(&mut w)?;
            writeln!(w, "theta_A,theta_B,phi_uu,phi_ud,phi_du,phi_dd,E")?;
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                table.theta_a,
                table.theta_b,
                table.phi_uu,
                table.phi_ud,
                table.phi_du,
                table.phi_dd,
                correlation(&table)
            )?;
            w.flush()?;
            path
        }
    };
    println!("E = {:.12}", record.e);
    println!("output: {}", path.display());
    Ok(Exit::Ok)
}

#[derive(Debug, Serialize)]
struct TrajectorySummary {
    state: StateKind,
    members: usize,
    completed: usize,
    aborted_near_node: usize,
    aborted_chart: usize,
    t1: f64,
    max_p_gamma_drift: f64,
    max_beta_drift: f64,
    dumped: Vec<String>,
    equivariance: Option<EquivarianceReport>,
    warning: Option<String>,
}

fn beta_drift(tr: &Trajectory) -> f64 {
    let first = &tr.samples[0].config;
    tr.samples
        .iter()
        .map(|s| {
            (s.config.euler_a.beta - first.euler_a.beta)
                .abs()
                .max((s.config.euler_b.beta - first.euler_b.beta).abs())
        })
        .fold(0.0, f64::max)
}

pub fn trajectories(config: &RunConfig) -> Result<Exit, Failure> {
    let state = two_top_state(config.state)?;
    let exec = config.exec();
    let ensemble = sample_ensemble(&state, config.ensemble, config.seed, 0.0, exec)?;
    let opts = IntegrationOptions {
        dt: config.dt,
        record_every: config.record_every,
        ..IntegrationOptions::default()
    };
    let dump = config.dump.min(config.ensemble);
    let results = exec.try_map(ensemble.members.len(), |i| {
        let tr = integrate_trajectory(&state, &ensemble.members[i], 0.0, config.t1, &opts)?;
        let drift = if tr.is_completed() { momentum_drift(&state, &tr)? } else { 0.0 };
        let beta = beta_drift(&tr);
        let status = tr.status;
        Ok::<_, Error>((if i < dump { Some(tr) } else { None }, status, drift, beta))
    })?;

    let meta = Metadata::new(config);
    let mut dumped = Vec::new();
    for (i, (tr, ..)) in results.iter().enumerate() {
        if let Some(tr) = tr {
            let name = format!("trajectory_{i:05}.csv");
            let (_, mut w) = create(config, &name)?;
            meta.write_comments(&mut w)?;
            writeln!(w, "# member: {i}")?;
            writeln!(w, "{CSV_HEADER}")?;
            write_trajectory_csv(&mut w, tr)?;
            w.flush()?;
            dumped.push(name);
        }
    }

    let count = |s: TrajectoryStatus| results.iter().filter(|r| r.1 == s).count();
    let aborted_near_node = count(TrajectoryStatus::AbortedNearNode);
    let aborted_chart = count(TrajectoryStatus::AbortedChart);
    let aborted = aborted_near_node + aborted_chart;
    let mut warning = None;
    if aborted as f64 > MAX_ABORT_FRACTION * config.ensemble as f64 {
        warning = Some(format!("{aborted} of {} trajectories aborted", config.ensemble));
    }
    let equivariance = match (config.state, &warning) {
        (StateKind::Singlet, None) => {
            let eopts = EquivarianceOptions {
                t1: config.t1,
                dt: config.dt,
                exec,
                ..EquivarianceOptions::default()
            };
            match equivariance_check(&state, &ensemble, &eopts) {
                Ok(r) => Some(r),
                Err(Error::Config(m)) => {
                    warning = Some(m);
                    None
                }
                Err(e) => return Err(e.into()),
            }
        }
        _ => None,
    };
    let summary = TrajectorySummary {
        state: config.state,
        members: config.ensemble,
        completed: count(TrajectoryStatus::Completed),
        aborted_near_node,
        aborted_chart,
        t1: config.t1,
        max_p_gamma_drift: results.iter().map(|r| r.2).fold(0.0, f64::max),
        max_beta_drift: results.iter().map(|r| r.3).fold(0.0, f64::max),
        dumped,
        equivariance,
        warning,
    };
    let path = write_json(config, "trajectories_summary.json", &summary)?;
    println!("members {} completed {} aborted {}", summary.members, summary.completed, aborted);
    println!("max p_gamma drift {:.3e}", summary.max_p_gamma_drift);
    if let Some(e) = &summary.equivariance {
        println!("equivariance min p-value {:.4}", e.min_p_value());
    }
    println!("summary: {}", path.display());
    if let Some(w) = &summary.warning {
        eprintln!("warning: {w}");
        return Ok(Exit::CheckFailure);
    }
    Ok(Exit::Ok)
}

#[derive(Debug, Serialize)]
struct CurvatureRow {
    beta_a: f64,
    second: f64,
    r_w: Option<f64>,
}

fn linspace(a: f64, b: f64, n: usize, closed: bool) -> Vec<f64> {
    let div = if closed { n - 1 } else { n } as f64;
    (0..n).map(|k| a + (b - a) * k as f64 / div).collect()
}

pub fn curvature_map(config: &RunConfig) -> Result<Exit, Failure> {
    let n = config.resolution;
    let betas = linspace(CHART_GUARD, PI - CHART_GUARD, n, true);
    let (second, second_name) = match config.slice {
        Slice::BetaAlpha => (linspace(0.0, TAU, n, false), "delta_alpha"),
        Slice::BetaBeta => (betas.clone(), "beta_B"),
    };
    let fixed = config.fixed.to_radians();
    let system = TopSystem::new(TopParams::unit(), 2)?;
    let state = match config.state {
        StateKind::Constant => None,
        k => Some(two_top_state(k)?),
    };
    let metric = system.metric();
    let rows = config.exec().try_map(n * n, |idx| {
        let (ba, s2) = (betas[idx / n], second[idx % n]);
        let (bb, da) = match config.slice {
            Slice::BetaAlpha => (fixed, s2),
            Slice::BetaBeta => (s2, fixed),
        };
        let q = TwoTopConfig::new(
            [0.0; 3],
            EulerAngles::unwrapped(0.0, ba, 0.0),
            [0.0; 3],
            EulerAngles::unwrapped(da, bb, 0.0),
        )?;
        let value = match &state {
            Some(s) => s.angular_curvature(&q),
            None => weyl_curvature_parts_from_density(&metric, &|_: &[f64]| Ok(1.0), &q.to_array(), 0.0),
        };
        let r_w = match value {
            Ok(w) => Some(w.total()),
            Err(Error::NearNode { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(CurvatureRow { beta_a: ba, second: s2, r_w })
    })?;
    let invalid = rows.iter().filter(|r| r.r_w.is_none()).count();
    let path = match config.format {
        Format::Csv => {
            let (path, mut w) = create(config, "curvature_map.csv")?;
            Metadata::new(config).write_comments(&mut w)?;
            writeln!(w, "beta_A,{second_name},R_W,valid")?;
            for r in &rows {
                match r.r_w {
                    Some(v) => writeln!(w, "{:.16e},{:.16e},{v:.16e},1", r.beta_a, r.second)?,
                    None => writeln!(w, "{:.16e},{:.16e},nan,0", r.beta_a, r.second)?,
                }
            }
            w.flush()?;
            path
        }
        Format::Json => write_json(config, "curvature_map.json", &rows)?,
    };
    println!("{} points, {invalid} near the nodal set", rows.len());
    println!("output: {}", path.display());
    Ok(Exit::Ok)
}
