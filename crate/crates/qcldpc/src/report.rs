//! Run manifests: every CLI report embeds the command, its full parameter
//! echo, digests of the input files, the toolkit version and the seeds, so
//! identical manifests imply identical reports (timestamps aside).

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    /// Input path -> SHA-256 of its bytes.
    pub input_digests: BTreeMap<String, String>,
    pub version: String,
    pub seed: Option<u64>,
    pub timestamp_unix: u64,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            input_digests: BTreeMap::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: None,
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Records the SHA-256 of an input file.
    pub fn input(mut self, path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        self.input_digests
            .insert(path.display().to_string(), hex_string(&hasher.finalize()));
        Ok(self)
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_digests_inputs() {
        let dir = std::env::temp_dir().join("qcldpc_manifest_test");
        std::fs::create_dir_all(&dir).unwrap();
        let file = dir.join("input.json");
        std::fs::write(&file, b"{}").unwrap();
        let m = RunManifest::new("test").input(&file).unwrap();
        let digest = m.input_digests.values().next().unwrap();
        assert_eq!(
            digest,
            "44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a"
        );
    }

    #[test]
    fn manifest_param_echo() {
        let m = RunManifest::new("analyze").param("max-len", 10).seed(7);
        assert_eq!(m.parameters["max-len"], "10");
        assert_eq!(m.seed, Some(7));
    }
}
