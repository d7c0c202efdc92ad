use std::io::Write;

use serde::Serialize;

use super::RunConfig;
use crate::error::Result;
use crate::VERSION;

/// Provenance embedded in every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub version: &'static str,
    pub seed: u64,
    pub config: RunConfig,
}

impl Metadata {
    pub fn new(config: &RunConfig) -> Self {
        Self {
            version: VERSION,
            seed: config.seed,
            config: config.clone(),
        }
    }

    /// `#`-prefixed preamble for CSV files.
    pub fn write_comments<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "# version: {}", self.version)?;
        writeln!(out, "# seed: {}", self.seed)?;
        writeln!(out, "# config: {}", serde_json::to_string(&self.config)?)?;
        Ok(())
    }

    /// Adds a `meta` key to an object payload; other payloads become `{"meta", "data"}`.
    pub fn wrap<T: Serialize>(&self, data: &T) -> Result<serde_json::Value> {
        let meta = serde_json::to_value(self)?;
        Ok(match serde_json::to_value(data)? {
            serde_json::Value::Object(mut map) => {
                map.insert("meta".into(), meta);
                serde_json::Value::Object(map)
            }
            other => serde_json::json!({ "meta": meta, "data": other }),
        })
    }
}
