//! Hamilton-Jacobi trajectories on the two-top configuration space.

mod config;
mod ensemble;
mod trajectory;

pub use config::TwoTopConfig;
pub use ensemble::{
    equivariance_check, member_rng, sample_ensemble, sample_member, ChiSquareResult, Ensemble, EquivarianceOptions,
    EquivarianceReport, MAX_ABORT_FRACTION,
};
pub use trajectory::{
    group_velocity, integrate_trajectory, momentum_drift, velocity_field, write_trajectory_csv, ChartMode,
    IntegrationOptions, Trajectory, TrajectorySample, TrajectoryStatus, CHART_GUARD, CSV_HEADER, DEFAULT_DT,
};
