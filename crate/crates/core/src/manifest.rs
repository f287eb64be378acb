//! Provenance record attached to every emitted artifact.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub command: Vec<String>,
    /// SHA-256 of the canonical JSON encoding of the run configuration.
    pub config_hash: String,
    /// SHA-256 of the input file bytes, when there is one.
    pub input_digest: Option<String>,
    pub seed: u64,
    pub threads: Option<usize>,
    pub wall_time_seconds: f64,
    pub outputs: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

impl RunManifest {
    pub fn new(command: Vec<String>, config: &serde_json::Value, input: Option<&[u8]>, seed: u64, threads: Option<usize>) -> Self {
        let canonical = serde_json::to_vec(config).unwrap_or_default();
        Self {
            tool: "torsym".into(),
            tool_version: TOOL_VERSION.into(),
            command,
            config_hash: sha256_hex(&canonical),
            input_digest: input.map(sha256_hex),
            seed,
            threads,
            wall_time_seconds: 0.0,
            outputs: Vec::new(),
        }
    }
}
