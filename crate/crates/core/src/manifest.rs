//! JSON run manifest written next to every CSV output.

use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    /// Fully resolved settings, defaults included.
    pub settings: Value,
    /// Quadrature tolerances, truncation bounds and similar diagnostics.
    pub diagnostics: Map<String, Value>,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, seed: u64, settings: impl Serialize) -> Result<Self> {
        Ok(Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            settings: to_value(settings)?,
            diagnostics: Map::new(),
            outputs: Vec::new(),
        })
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        self.diagnostics.insert(key.into(), to_value(value)?);
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

fn to_value(v: impl Serialize) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_is_valid_json() {
        let mut m = Manifest::new("simulate", 3, serde_json::json!({"step": 0.1})).unwrap();
        m.note("truncation_bound", 1e-6).unwrap();
        m.outputs.push("path.csv".into());
        let parsed: Value = serde_json::from_str(&m.to_json().unwrap()).unwrap();
        assert_eq!(parsed["seed"], 3);
        assert_eq!(parsed["settings"]["step"], 0.1);
        assert_eq!(parsed["diagnostics"]["truncation_bound"], 1e-6);
    }
}
