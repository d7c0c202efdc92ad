//! Regression values computed by this implementation and frozen.

use weyltop::dynamics::{integrate_trajectory, sample_ensemble, velocity_field, IntegrationOptions, TwoTopConfig};
use weyltop::geometry::{EulerAngles, TopParams, TopSystem};
use weyltop::wavefield::TwoTopState;
use weyltop::Execution;

fn singlet() -> TwoTopState {
    TwoTopState::default_singlet(TopSystem::new(TopParams::unit(), 2).unwrap()).unwrap()
}

fn start() -> TwoTopConfig {
    TwoTopConfig::new(
        [0.0, -120.0, 0.0],
        EulerAngles::unwrapped(0.4, 1.0, 0.3),
        [0.0, 120.0, 0.0],
        EulerAngles::unwrapped(2.1, 2.0, -0.5),
    )
    .unwrap()
}

fn close(a: &[f64], b: &[f64], tol: f64) {
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() < tol * y.abs().max(1.0), "{x} vs {y}");
    }
}

#[test]
fn velocity_at_reference_point() {
    let v = velocity_field(&singlet(), &start(), 0.0).unwrap();
    close(
        &v,
        &[
            0.0, -1.0, 0.0, 0.1288018779501876, -0.3406746767935856, 0.4304080483433669, 0.0, 1.0, 0.0,
            -0.18538325758568674, 0.31526302321271865, 0.4228533438069124,
        ],
        1e-12,
    );
}

#[test]
fn trajectory_endpoint() {
    let tr = integrate_trajectory(&singlet(), &start(), 0.0, 1.0, &IntegrationOptions::default()).unwrap();
    assert!(tr.is_completed());
    close(
        &tr.last().config.to_array(),
        &[
            0.0, -121.0, 0.0, 0.6348069662717074, 0.6882065465115361, 0.6389321967595419, 0.0, 121.0, 0.0,
            1.8303521834191547, 2.2760551158240814, -0.14964909062173337,
        ],
        1e-9,
    );
}

#[test]
fn first_ensemble_member_for_seed_42() {
    let e = sample_ensemble(&singlet(), 3, 42, 0.0, Execution::Sequential).unwrap();
    close(
        &e.members[0].to_array(),
        &[
            9.166635595931693, -98.7842334292099, -7.185473720729069, 4.2844801365229825, 0.4497615015569439,
            2.6861647810063536, 0.31378861730367813, 130.44980141522308, 20.32183939815892, 3.941822409091656,
            2.0073426837002795, 0.9422193704894191,
        ],
        1e-14,
    );
}

#[test]
fn singlet_curvature_at_reference_point() {
    let rw = singlet().angular_curvature(&start()).unwrap().total();
    assert!((rw - 6.275306151933098).abs() < 1e-7);
}
