use std::f64::consts::{PI, TAU};

use nalgebra::{Quaternion, UnitQuaternion, Vector3};
use num_complex::Complex64;
use proptest::prelude::*;
use weyltop::dynamics::{integrate_trajectory, momentum_drift, IntegrationOptions, TwoTopConfig};
use weyltop::geometry::{gauge_rescale, spin_matrix_action, Axis, EulerAngles, TopParams, TopSystem};
use weyltop::measurement::{
    coincidence_fluxes, correlation, probability_up, redhead_functional, sga_transform, SgaSetting,
};
use weyltop::numerics::AngularGrid;
use weyltop::wavefield::{d_down, d_up, wigner_from_quaternion, SpinorCoeffs, TwoTopState};
use weyltop::Execution;

fn angles() -> impl Strategy<Value = EulerAngles> {
    (0.0..TAU, 0.05..PI - 0.05, 0.0..TAU).prop_map(|(a, b, g)| EulerAngles::unwrapped(a, b, g))
}

fn same_rotation(p: &Quaternion<f64>, q: &Quaternion<f64>) -> bool {
    (p.coords - q.coords).norm() < 1e-10 || (p.coords + q.coords).norm() < 1e-10
}

fn grid() -> AngularGrid {
    AngularGrid::new(4, 4, 4).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quaternion_round_trip(e in angles()) {
        let q = e.to_quaternion();
        prop_assert!((q.norm() - 1.0).abs() < 1e-14);
        let back = EulerAngles::from_quaternion(&q);
        prop_assert!(same_rotation(&back.to_quaternion(), &q));
    }

    #[test]
    fn wigner_row_is_unit(e in angles()) {
        prop_assert!((d_up(&e).norm_sqr() + d_down(&e).norm_sqr() - 1.0).abs() < 1e-14);
        let (u, d) = wigner_from_quaternion(&e.to_quaternion());
        prop_assert!((u - d_up(&e)).norm() < 1e-13 && (d - d_down(&e)).norm() < 1e-13);
    }

    #[test]
    fn singlet_density_invariant_under_common_rotation(
        ea in angles(), eb in angles(), axis in (-1.0..1.0f64, -1.0..1.0f64, 0.1..1.0f64), angle in 0.0..TAU
    ) {
        let s = TwoTopState::default_singlet(TopSystem::new(TopParams::unit(), 2).unwrap()).unwrap();
        let r = *UnitQuaternion::from_axis_angle(&nalgebra::Unit::new_normalize(Vector3::new(axis.0, axis.1, axis.2)), angle).quaternion();
        let (qa, qb) = (ea.to_quaternion(), eb.to_quaternion());
        let before = s.angular_amplitude_quat(&qa, &qb).norm_sqr();
        let after = s.angular_amplitude_quat(&(r * qa), &(r * qb)).norm_sqr();
        prop_assert!((before - after).abs() < 1e-13);
    }

    #[test]
    fn spin_action_is_hermitian(a in (-1.0..1.0f64, -1.0..1.0f64), b in (-1.0..1.0f64, -1.0..1.0f64)) {
        let c = [Complex64::new(a.0, a.1), Complex64::new(b.0, b.1)];
        for axis in Axis::ALL {
            let s = spin_matrix_action(axis, 1.0, c);
            let expect = c[0].conj() * s[0] + c[1].conj() * s[1];
            prop_assert!(expect.im.abs() < 1e-14);
            let s2 = spin_matrix_action(axis, 1.0, s);
            for k in 0..2 {
                prop_assert!((s2[k] - c[k] * 0.25).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn analyser_conserves_probability(a in (-1.0..1.0f64, -1.0..1.0f64), b in (-1.0..1.0f64, -1.0..1.0f64), theta in -10.0..10.0f64) {
        prop_assume!(a.0.abs() + a.1.abs() + b.0.abs() + b.1.abs() > 1e-3);
        let c = SpinorCoeffs::normalized(Complex64::new(a.0, a.1), Complex64::new(b.0, b.1)).unwrap();
        let (u, d) = sga_transform(&c, SgaSetting::new(theta).unwrap());
        prop_assert!((u.probability() + d.probability() - 1.0).abs() < 1e-13);
        prop_assert!((probability_up(&c, theta) - u.probability()).abs() < 1e-13);
    }

    #[test]
    fn coincidence_closure_and_correlation(a in -TAU..TAU, b in -TAU..TAU) {
        let t = coincidence_fluxes(a, b, &grid(), Execution::Sequential).unwrap();
        prop_assert!((t.total() - 1.0).abs() < 1e-12);
        prop_assert!((correlation(&t) + (b - a).cos()).abs() < 1e-12);
        prop_assert!(t.phi_uu >= -1e-15 && t.phi_ud >= -1e-15);
        prop_assert!((t.phi_ud - t.phi_du).abs() < 1e-14 && (t.phi_uu - t.phi_dd).abs() < 1e-14);
    }

    #[test]
    fn redhead_matches_trigonometric_form(d in 0.0..PI / 2.0) {
        let f = redhead_functional(d, &grid(), Execution::Sequential).unwrap();
        let expect = (1.0 + 2.0 * (2.0 * d).cos() - (4.0 * d).cos()).abs();
        prop_assert!((f - expect).abs() < 1e-12);
        prop_assert!(f <= 2.5 + 1e-12);
    }

    #[test]
    fn gauge_leaves_observables(lambda in 0.05..20.0f64) {
        let sys = TopSystem::new(TopParams::new(1.3, 0.8, 1.0).unwrap(), 2).unwrap();
        let s = gauge_rescale(lambda, &sys).unwrap();
        prop_assert!(((s.omega() - sys.omega()) / sys.omega()).abs() < 1e-12);
        prop_assert!(((s.spatial_mass() - sys.spatial_mass()) / sys.spatial_mass()).abs() < 1e-12);
        prop_assert!(((s.inertia() - sys.inertia()) / sys.inertia()).abs() < 1e-12);
    }

    #[test]
    fn config_round_trip(v in proptest::array::uniform12(-100.0..100.0f64)) {
        let c = TwoTopConfig::from_slice(&v);
        prop_assert_eq!(c.to_array(), v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn p_gamma_conserved_along_flow(seed in 0u64..1000) {
        use rand::SeedableRng;
        let s = TwoTopState::default_singlet(TopSystem::new(TopParams::unit(), 2).unwrap()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let q0 = s.offnode_point(&mut rng, 0.0, 0.05);
        let opts = IntegrationOptions { dt: 1e-2, record_every: 10, ..IntegrationOptions::default() };
        let tr = integrate_trajectory(&s, &q0, 0.0, 2.0, &opts).unwrap();
        if tr.is_completed() {
            prop_assert!(momentum_drift(&s, &tr).unwrap() < 1e-6);
        }
    }
}
