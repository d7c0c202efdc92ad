use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::coincidence::{correlation, BellScanResult, CoincidenceTable};
use crate::error::Result;

pub const BELL_CSV_HEADER: &str = "delta_theta_deg,F,violated";

pub fn write_bell_csv<W: Write>(out: &mut W, scan: &BellScanResult) -> Result<()> {
    writeln!(out, "{BELL_CSV_HEADER}")?;
    for (i, &(d, f)) in scan.points.iter().enumerate() {
        writeln!(out, "{:.16e},{f:.16e},{}", d.to_degrees(), u8::from(scan.violated(i)))?;
    }
    Ok(())
}

/// Serialized form of a coincidence table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceRecord {
    #[serde(rename = "theta_A")]
    pub theta_a: f64,
    #[serde(rename = "theta_B")]
    pub theta_b: f64,
    pub phi: BTreeMap<String, f64>,
    #[serde(rename = "E")]
    pub e: f64,
}

impl From<&CoincidenceTable> for CoincidenceRecord {
    fn from(t: &CoincidenceTable) -> Self {
        let phi = [("uu", t.phi_uu), ("ud", t.phi_ud), ("du", t.phi_du), ("dd", t.phi_dd)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        Self {
            theta_a: t.theta_a,
            theta_b: t.theta_b,
            phi,
            e: correlation(t),
        }
    }
}

pub fn write_coincidence_json<W: Write>(out: &mut W, table: &CoincidenceTable) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, &CoincidenceRecord::from(table))?;
    writeln!(out)?;
    Ok(())
}
