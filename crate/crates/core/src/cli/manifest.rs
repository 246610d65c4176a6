use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Record of one CLI run, written to `<out>/manifest.json` exactly once.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub command: String,
    /// Full argument vector, replayable with `srot replay`.
    pub args: Vec<String>,
    pub config: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
    pub started_at: String,
    pub finished_at: String,
    pub version: String,
    pub status: String,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl RunManifest {
    pub fn begin(command: &str, args: &[String]) -> Self {
        RunManifest {
            command: command.to_string(),
            args: args.to_vec(),
            config: serde_json::Value::Null,
            inputs: Vec::new(),
            outputs: Vec::new(),
            started_at: now(),
            finished_at: String::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            status: "running".to_string(),
            exit_code: -1,
            error: None,
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        let bytes = fs::read(path)
            .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    pub fn add_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn finish(&mut self, exit_code: i32, error: Option<String>) {
        self.finished_at = now();
        self.exit_code = exit_code;
        self.status = if exit_code == 0 { "ok" } else { "failed" }.to_string();
        self.error = error;
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self).expect("manifest serialises");
        fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::input(format!("{}: {e}", path.display())))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}
