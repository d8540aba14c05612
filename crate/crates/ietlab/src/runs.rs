//! Run directories: a content-addressed folder per configuration holding a
//! manifest and every output written for it.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const PRECISION_ENV: &str = "IETLAB_PRECISION_BITS";
pub const THREADS_ENV: &str = "IETLAB_THREADS";
pub const DEFAULT_PRECISION_BITS: u32 = 256;

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

/// Working precision from the environment, if set.
pub fn precision_bits() -> Result<u32> {
    match std::env::var(PRECISION_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u32>()
            .ok()
            .filter(|&b| (16..=1 << 16).contains(&b))
            .ok_or_else(|| Error::InvalidArgument(format!("{PRECISION_ENV} must be an integer in [16, 65536]"))),
        Err(_) => Ok(DEFAULT_PRECISION_BITS),
    }
}

/// Thread count from the environment, if set.
pub fn threads() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .map(Some)
            .ok_or_else(|| Error::InvalidArgument(format!("{THREADS_ENV} must be a positive integer"))),
        Err(_) => Ok(None),
    }
}

/// First 16 hex digits of the SHA-256 of the compact JSON text. Object keys
/// are sorted, so the hash does not depend on field order.
pub fn config_hash(config: &Value) -> String {
    let text = serde_json::to_string(config).expect("json values serialize");
    hex::encode(Sha256::digest(text.as_bytes()))[..16].to_string()
}

/// Writes through a temporary file in the same directory and renames it.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().ok_or(Error::Io("path has no parent".into()))?;
    let name = path.file_name().ok_or(Error::Io("path has no file name".into()))?.to_string_lossy();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(bytes).map_err(io)?;
        f.sync_all().map_err(io)?;
    }
    fs::rename(&tmp, path).map_err(io)
}

pub struct RunDir {
    pub hash: String,
    pub dir: PathBuf,
    config: Value,
    outputs: Vec<String>,
}

impl RunDir {
    /// `root/<hash>/` for `{command, config}`; an existing directory is reused.
    pub fn create(root: &Path, command: &str, config: Value) -> Result<Self> {
        let config = json!({ "command": command, "config": config });
        let hash = config_hash(&config);
        let dir = root.join(&hash);
        fs::create_dir_all(&dir).map_err(io)?;
        Ok(RunDir { hash, dir, config, outputs: vec![] })
    }

    /// CSV file whose first line references the manifest.
    pub fn write_csv(&mut self, name: &str, body: &str) -> Result<PathBuf> {
        let text = format!("# manifest={}\n{body}", self.hash);
        self.write(name, text.as_bytes())
    }

    /// JSON file wrapping `value` with the manifest reference.
    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<PathBuf> {
        let v = serde_json::to_value(value).map_err(|e| Error::Io(e.to_string()))?;
        let text = serde_json::to_string_pretty(&json!({ "manifest": self.hash, "result": v })).unwrap();
        self.write(name, format!("{text}\n").as_bytes())
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        if name == "manifest.json" || name.contains(['/', '\\']) {
            return Err(Error::InvalidArgument(format!("bad output name {name:?}")));
        }
        let path = self.dir.join(name);
        atomic_write(&path, bytes)?;
        if !self.outputs.iter().any(|o| o == name) {
            self.outputs.push(name.to_string());
        }
        Ok(path)
    }

    /// Writes `manifest.json` listing all outputs.
    pub fn finish(mut self) -> Result<PathBuf> {
        self.outputs.sort();
        let mut m = self.config.clone();
        m["hash"] = json!(self.hash);
        m["version"] = json!(env!("CARGO_PKG_VERSION"));
        m["outputs"] = json!(self.outputs);
        let text = serde_json::to_string_pretty(&m).unwrap();
        atomic_write(&self.dir.join("manifest.json"), format!("{text}\n").as_bytes())?;
        Ok(self.dir)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_key_order() {
        let a: Value = serde_json::from_str(r#"{"x":1,"y":[1,2]}"#).unwrap();
        let b: Value = serde_json::from_str(r#"{"y":[1,2],"x":1}"#).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_ne!(config_hash(&a), config_hash(&json!({"x": 2})));
    }

    #[test]
    fn outputs_reference_manifest() {
        let root = std::env::temp_dir().join(format!("ietlab-runs-{}", std::process::id()));
        let mut run = RunDir::create(&root, "demo", json!({"n": 3})).unwrap();
        let csv = run.write_csv("a.csv", "x\n1\n").unwrap();
        run.write_json("b.json", &json!({"v": 1})).unwrap();
        let hash = run.hash.clone();
        let dir = run.finish().unwrap();
        assert!(fs::read_to_string(csv).unwrap().starts_with(&format!("# manifest={hash}")));
        let m: Value = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(m["outputs"], json!(["a.csv", "b.json"]));
        fs::remove_dir_all(root).unwrap();
    }
}
