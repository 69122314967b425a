use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::{DisplayConfig, PlaneIndex};
use crate::error::{Error, Result};

/// Everything needed to re-run a command exactly. Serialized as pretty JSON
/// with `timestamp` as the only field that varies between identical runs; it
/// is written last, on its own line.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub config: DisplayConfig,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub seed: Option<u64>,
    pub plane_ladder: Vec<PlaneIndex>,
    pub notes: Vec<String>,
    pub details: serde_json::Value,
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: Vec<String>, cfg: &DisplayConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config: *cfg,
            inputs: Vec::new(),
            outputs: Vec::new(),
            seed: None,
            plane_ladder: cfg.plane_ladder(),
            notes: Vec::new(),
            details: serde_json::Value::Null,
            timestamp: timestamp(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    /// Writes the manifest to `path`, listing itself among the outputs.
    pub fn write(mut self, path: &Path) -> Result<PathBuf> {
        self.outputs.push(display(path));
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))?;
        Ok(path.to_path_buf())
    }
}

/// Seconds since the epoch, or `SOURCE_DATE_EPOCH` when set.
fn timestamp() -> u64 {
    if let Some(fixed) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|v| v.parse().ok()) {
        return fixed;
    }
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub(crate) fn display(path: &Path) -> String {
    path.display().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timestamp_is_isolated_on_one_line() {
        let mut m = RunManifest::new(vec!["kernels".into()], &DisplayConfig::default());
        m.details = serde_json::json!({ "nested": { "a": [1, 2] } });
        let json = m.to_json();
        let lines: Vec<&str> = json.lines().filter(|l| l.contains("timestamp")).collect();
        assert_eq!(lines.len(), 1);
        assert_eq!(json.lines().rev().nth(1).unwrap().trim_start().split(':').next(), Some("\"timestamp\""));
    }
}
