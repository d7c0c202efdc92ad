use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::sga::epr_coefficients;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::numerics::AngularGrid;

/// Margin above 2 for a Redhead value to count as a violation.
pub const VIOLATION_EPS: f64 = 1e-9;

/// Joint detector fluxes for one pair of analyser angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceTable {
    pub theta_a: f64,
    pub theta_b: f64,
    pub phi_uu: f64,
    pub phi_ud: f64,
    pub phi_du: f64,
    pub phi_dd: f64,
}

impl CoincidenceTable {
    pub fn total(&self) -> f64 {
        self.phi_uu + self.phi_ud + self.phi_du + self.phi_dd
    }

    /// `1/2 sin^2 dv` and `1/2 cos^2 dv` with `dv = (theta_b - theta_a) / 2`.
    pub fn closed_form(theta_a: f64, theta_b: f64) -> Self {
        let (s, c) = (0.5 * (theta_b - theta_a)).sin_cos();
        Self {
            theta_a,
            theta_b,
            phi_uu: 0.5 * s * s,
            phi_ud: 0.5 * c * c,
            phi_du: 0.5 * c * c,
            phi_dd: 0.5 * s * s,
        }
    }

    pub fn max_abs_diff(&self, other: &CoincidenceTable) -> f64 {
        [
            self.phi_uu - other.phi_uu,
            self.phi_ud - other.phi_ud,
            self.phi_du - other.phi_du,
            self.phi_dd - other.phi_dd,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }
}

fn check_grid(grid: &AngularGrid) -> Result<()> {
    if grid.n_alpha() < 4 || grid.n_gamma() < 4 || grid.n_beta() < 3 {
        return Err(Error::Resolution(format!(
            "coincidence quadrature needs n_beta >= 3 and n_alpha, n_gamma >= 4, got ({}, {}, {})",
            grid.n_beta(),
            grid.n_alpha(),
            grid.n_gamma()
        )));
    }
    Ok(())
}

/// `Phi_ij = int int |A_ij|^2 dmu_A dmu_B` by product quadrature, spatial fluxes normalized to 1.
pub fn coincidence_fluxes(theta_a: f64, theta_b: f64, grid: &AngularGrid, exec: Execution) -> Result<CoincidenceTable> {
    check_grid(grid)?;
    if !(theta_a.is_finite() && theta_b.is_finite()) {
        return Err(Error::invalid("analyser angles must be finite"));
    }
    let nodes = grid.nodes();
    let partials = exec.map(nodes.len(), |i| {
        let a = &nodes[i];
        let mut acc = [0.0; 4];
        for b in nodes {
            // time dependence is a global phase of chi(t); t = 0
            let c = epr_coefficients(&a.angles, &b.angles, theta_a, theta_b, 0.0, 0.0);
            for k in 0..4 {
                acc[k] += c[k].norm_sqr() * b.weight;
            }
        }
        acc.map(|v| v * a.weight)
    });
    let mut sum = [0.0; 4];
    for p in partials {
        for k in 0..4 {
            sum[k] += p[k];
        }
    }
    if sum.iter().any(|v| !v.is_finite()) {
        return Err(Error::non_finite("coincidence quadrature"));
    }
    Ok(CoincidenceTable {
        theta_a,
        theta_b,
        phi_uu: sum[0],
        phi_ud: sum[1],
        phi_du: sum[2],
        phi_dd: sum[3],
    })
}

/// `E = Phi_uu + Phi_dd - Phi_ud - Phi_du`.
pub fn correlation(table: &CoincidenceTable) -> f64 {
    table.phi_uu + table.phi_dd - table.phi_ud - table.phi_du
}

/// Redhead's `F(dv) = |1 + 2 cos 2dv - cos 4dv|`, assembled as
/// `|1 - 2 E(0, 2 dv) + E(0, 4 dv)|` from quadrature correlations.
pub fn redhead_functional(delta: f64, grid: &AngularGrid, exec: Execution) -> Result<f64> {
    let e1 = correlation(&coincidence_fluxes(0.0, 2.0 * delta, grid, exec)?);
    let e2 = correlation(&coincidence_fluxes(0.0, 4.0 * delta, grid, exec)?);
    Ok((1.0 - 2.0 * e1 + e2).abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellScanResult {
    /// `(dv, F(dv))`, `dv` in radians.
    pub points: Vec<(f64, f64)>,
    pub max: f64,
    pub argmax: f64,
    /// First and last violating `dv`, if any.
    pub violation_interval: Option<(f64, f64)>,
}

impl BellScanResult {
    pub fn violated(&self, index: usize) -> bool {
        self.points[index].1 > 2.0 + VIOLATION_EPS
    }
}

/// `F` over a strictly increasing grid of `dv` within `[0, pi/2]`.
pub fn bell_scan(deltas: &[f64], grid: &AngularGrid, exec: Execution) -> Result<BellScanResult> {
    if deltas.is_empty() {
        return Err(Error::invalid("empty scan grid"));
    }
    if deltas.iter().any(|d| !(0.0..=FRAC_PI_2 + 1e-12).contains(d)) {
        return Err(Error::invalid("scan grid must lie within [0, pi/2]"));
    }
    if deltas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("scan grid must be strictly increasing"));
    }
    let mut points = Vec::with_capacity(deltas.len());
    for &d in deltas {
        points.push((d, redhead_functional(d, grid, exec)?));
    }
    let (argmax, max) = points
        .iter()
        .copied()
        .fold((f64::NAN, f64::NEG_INFINITY), |acc, p| if p.1 > acc.1 { p } else { acc });
    let viol: Vec<f64> = points.iter().filter(|p| p.1 > 2.0 + VIOLATION_EPS).map(|p| p.0).collect();
    let violation_interval = match (viol.first(), viol.last()) {
        (Some(a), Some(b)) => Some((*a, *b)),
        _ => None,
    };
    Ok(BellScanResult {
        points,
        max,
        argmax,
        violation_interval,
    })
}

/// `S = |E(a, b) - E(a, b') + E(a', b) + E(a', b')|`.
pub fn chsh(a: f64, a2: f64, b: f64, b2: f64, grid: &AngularGrid, exec: Execution) -> Result<f64> {
    let e = |x: f64, y: f64| coincidence_fluxes(x, y, grid, exec).map(|t| correlation(&t));
    Ok((e(a, b)? - e(a, b2)? + e(a2, b)? + e(a2, b2)?).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> AngularGrid {
        AngularGrid::new(4, 4, 4).unwrap()
    }

    #[test]
    fn examples() {
        let t = coincidence_fluxes(0.0, PI / 2.0, &grid(), Execution::Sequential).unwrap();
        assert!((t.phi_uu - 0.25).abs() < 1e-12);
        let t = coincidence_fluxes(1.0, 1.0, &grid(), Execution::Sequential).unwrap();
        assert!(t.phi_uu.abs() < 1e-15 && (t.phi_ud - 0.5).abs() < 1e-12);
        assert!((correlation(&t) + 1.0).abs() < 1e-12);
        let t = coincidence_fluxes(0.3, 0.3 + PI, &grid(), Execution::Sequential).unwrap();
        assert!((correlation(&t) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn resolution_guard() {
        let g = AngularGrid::new(2, 8, 8).unwrap();
        assert!(matches!(coincidence_fluxes(0.0, 1.0, &g, Execution::Sequential), Err(Error::Resolution(_))));
        let g = AngularGrid::new(8, 3, 8).unwrap();
        assert!(matches!(coincidence_fluxes(0.0, 1.0, &g, Execution::Sequential), Err(Error::Resolution(_))));
    }

    #[test]
    fn redhead_values() {
        let g = grid();
        for (d, f) in [(0.0, 2.0), (PI / 4.0, 2.0), (PI / 6.0, 2.5)] {
            assert!((redhead_functional(d, &g, Execution::Sequential).unwrap() - f).abs() < 1e-12);
        }
    }

    #[test]
    fn scan_validation() {
        let g = grid();
        assert!(bell_scan(&[0.1, 0.1], &g, Execution::Sequential).is_err());
        assert!(bell_scan(&[0.1, 2.0], &g, Execution::Sequential).is_err());
        let r = bell_scan(&[0.2, 0.5, 0.9], &g, Execution::Sequential).unwrap();
        assert_eq!(r.violation_interval, Some((0.2, 0.5)));
        assert!(!r.violated(2));
    }

    #[test]
    fn chsh_maximum() {
        let s = chsh(0.0, PI / 2.0, PI / 4.0, 3.0 * PI / 4.0, &grid(), Execution::Sequential).unwrap();
        assert!((s - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }
}
