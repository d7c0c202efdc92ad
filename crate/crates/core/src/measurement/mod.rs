//! Far-field Stern-Gerlach analysis, coincidence fluxes and Bell functionals.

mod coincidence;
mod detector;
mod output;
mod sga;

pub use coincidence::{
    bell_scan, chsh, coincidence_fluxes, correlation, redhead_functional, BellScanResult, CoincidenceTable,
    VIOLATION_EPS,
};
pub use detector::{detector_flux, DetectorPatch, FactorizedWave};
pub use output::{write_bell_csv, write_coincidence_json, CoincidenceRecord, BELL_CSV_HEADER};
pub use sga::{epr_coefficients, probability_up, sga_transform, SgaChannel, SgaSetting};
