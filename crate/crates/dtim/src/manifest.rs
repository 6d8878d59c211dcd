//! Machine-readable record of a CLI run: subcommand, every parameter, input
//! hash and timing. A manifest plus the input files is enough to reproduce a
//! run bit-exactly.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub subcommand: String,
    pub parameters: BTreeMap<String, String>,
    pub input_hash: Option<String>,
    pub duration_seconds: f64,
}

impl RunManifest {
    pub fn new(subcommand: &str) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            parameters: BTreeMap::new(),
            input_hash: None,
            duration_seconds: 0.0,
        }
    }

    pub fn parameter(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer_pretty(writer, self)
            .map_err(|e| crate::error::DtimError::InvalidInput(e.to_string()))
    }

    pub fn read<R: Read>(reader: R) -> Result<Self> {
        serde_json::from_reader(reader)
            .map_err(|e| crate::error::DtimError::InvalidInput(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_round_trips() {
        let manifest = RunManifest::new("select")
            .parameter("k", 3)
            .parameter("alpha", 0.5);
        let mut buf = Vec::new();
        manifest.write(&mut buf).unwrap();
        let restored = RunManifest::read(buf.as_slice()).unwrap();
        assert_eq!(manifest, restored);
    }
}
