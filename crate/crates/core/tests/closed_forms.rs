//! Closed-form values quoted for one and two tops, reproduced numerically.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use weyltop::dynamics::TwoTopConfig;
use weyltop::geometry::{riemann_scalar, BlockMetric, EulerAngles, TopParams, TopSystem};
use weyltop::measurement::{coincidence_fluxes, probability_up, redhead_functional, CoincidenceTable};
use weyltop::numerics::{fit_line, AngularGrid};
use weyltop::wavefield::{
    apply_hamiltonian, d_down, d_up, rayleigh_quotient, singlet_overlap_term, AngularField, SpinorCoeffs,
    TwoTopState,
};
use weyltop::Execution;

fn unit(particles: usize) -> TopSystem {
    TopSystem::new(TopParams::unit(), particles).unwrap()
}

#[test]
fn internal_curvature_is_three_over_two_a_squared() {
    for a in [1.0, 2.0, 0.7] {
        let m = BlockMetric::new(1, a).unwrap();
        let r = riemann_scalar(&m, &[0.1, 0.2, 0.3, 0.9, 1.2, -0.4]).unwrap();
        let expect = 3.0 / (2.0 * a * a);
        assert!((r - expect).abs() / expect < 1e-4, "a = {a}: {r}");
    }
    let m = BlockMetric::new(2, 1.0).unwrap();
    let mut q = [0.0; 12];
    q[4] = 1.0;
    q[10] = 2.0;
    assert!((riemann_scalar(&m, &q).unwrap() - 3.0).abs() < 3e-4);
}

#[test]
fn frequency_is_21_over_40() {
    let params = TopParams::unit();
    assert!((params.omega() - 21.0 / 40.0).abs() < 1e-15);
    let grid = AngularGrid::new(32, 16, 16).unwrap();
    for f in [d_up, d_down] {
        let field = AngularField::from_fn(grid.clone(), true, f);
        let image = apply_hamiltonian(&field, &params).unwrap();
        assert!((rayleigh_quotient(&field, &image) - 0.525).abs() < 1e-10);
    }
}

#[test]
fn singlet_curvature_constant_and_coefficient() {
    let s = TwoTopState::default_singlet(unit(2)).unwrap();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for k in 0..10 {
        let x = k as f64;
        let q = TwoTopConfig::new(
            [0.0; 3],
            EulerAngles::unwrapped(0.1 * x, 0.4 + 0.2 * x, 0.3),
            [0.0; 3],
            EulerAngles::unwrapped(2.0 - 0.3 * x, 2.5 - 0.15 * x, -0.2),
        )
        .unwrap();
        xs.push(1.0 / singlet_overlap_term(&q.euler_a, &q.euler_b));
        ys.push(s.angular_curvature(&q).unwrap().total());
    }
    let fit = fit_line(&xs, &ys).unwrap();
    assert!((fit.intercept - 48.0 / 5.0).abs() < 1e-4, "{}", fit.intercept);
    assert!((fit.slope.abs() - 22.0 / 5.0).abs() < 1e-4, "{}", fit.slope);
    assert!(fit.max_residual < 1e-4);
}

#[test]
fn analyser_probabilities() {
    assert!((probability_up(&SpinorCoeffs::up(), 0.0) - 1.0).abs() < 1e-15);
    assert!(probability_up(&SpinorCoeffs::up(), PI).abs() < 1e-15);
    let x = SpinorCoeffs::new(Complex64::from(FRAC_1_SQRT_2), Complex64::from(FRAC_1_SQRT_2)).unwrap();
    assert!((probability_up(&x, PI / 2.0) - 1.0).abs() < 1e-15);
}

#[test]
fn coincidence_closed_forms() {
    let grid = AngularGrid::new(4, 4, 4).unwrap();
    for (a, b) in [(0.0, PI / 2.0), (0.3, 2.9), (5.0, 1.0)] {
        let t = coincidence_fluxes(a, b, &grid, Execution::Sequential).unwrap();
        assert!(t.max_abs_diff(&CoincidenceTable::closed_form(a, b)) < 1e-12);
    }
}

#[test]
fn redhead_violation_between_0_and_45_degrees() {
    let grid = AngularGrid::new(4, 4, 4).unwrap();
    for d in 1..45 {
        let f = redhead_functional((d as f64).to_radians(), &grid, Execution::Sequential).unwrap();
        assert!(f > 2.0, "{d}: {f}");
    }
    for d in 45..=90 {
        let f = redhead_functional((d as f64).to_radians(), &grid, Execution::Sequential).unwrap();
        assert!(f <= 2.0 + 1e-9, "{d}: {f}");
    }
    let peak = redhead_functional(PI / 6.0, &grid, Execution::Sequential).unwrap();
    assert!((peak - 2.5).abs() < 1e-12);
}
