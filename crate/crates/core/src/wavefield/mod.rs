//! Scalar wavefunctions on the configuration space of one and two tops.

mod hamiltonian;
mod packet;
mod residual;
mod single_top;
mod state;
mod two_top;
mod wigner;

pub use hamiltonian::{apply_hamiltonian, eigen_residual, rayleigh_quotient, AngularField, ALIASING_TOLERANCE};
pub use packet::{GaussianPacket, DEFAULT_OFFSET, DEFAULT_SIGMA};
pub use residual::{continuity_residual, hje_residual, hje_terms, HjeTerms, TIME_STEP};
pub use single_top::SingleTopState;
pub use state::{ConfigurationWave, PhasePerturbed, PhaseTracker, ScalarWaveSample, SpinorCoeffs, NODE_FLOOR};
pub use two_top::{
    singlet_action, singlet_action_printed, singlet_angular_factor, singlet_overlap_term, singlet_psi, TwoTopState,
    MAX_PACKET_OVERLAP,
};
pub use wigner::{d_down, d_down_partials, d_up, d_up_partials, wigner_from_quaternion};
