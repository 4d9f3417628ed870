//! Provenance block written at the top of every output file.

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Header {
    pub command: String,
    /// Hex SHA-256 of the configuration bytes.
    pub config_sha256: String,
    pub latcomp_version: String,
    pub core_version: String,
    pub seed: Option<u64>,
}

impl Header {
    pub fn new(command: &str, config: &[u8], seed: Option<u64>) -> Self {
        Self {
            command: command.to_string(),
            config_sha256: sha256_hex(config),
            latcomp_version: env!("CARGO_PKG_VERSION").to_string(),
            core_version: latcomp_core::VERSION.to_string(),
            seed,
        }
    }

    /// `# key: value` lines for CSV files.
    pub fn comment_lines(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# command: {}\n", self.command));
        s.push_str(&format!("# config_sha256: {}\n", self.config_sha256));
        s.push_str(&format!("# latcomp: {}\n", self.latcomp_version));
        s.push_str(&format!("# latcomp-core: {}\n", self.core_version));
        if let Some(seed) = self.seed {
            s.push_str(&format!("# seed: {seed}\n"));
        }
        s
    }

    pub fn digest(&self) -> [u8; 32] {
        let mut out = [0u8; 32];
        for (i, byte) in out.iter_mut().enumerate() {
            *byte = u8::from_str_radix(&self.config_sha256[2 * i..2 * i + 2], 16).unwrap_or(0);
        }
        out
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}
