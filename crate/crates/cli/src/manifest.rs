//! Run manifests written next to every output.

use std::path::{Path, PathBuf};

use serde::Serialize;
use ucsk::linksim::sha256_hex;

use crate::commands::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    pub fn file(path: &str, bytes: &[u8]) -> Self {
        FileDigest {
            path: path.to_string(),
            sha256: sha256_hex(bytes),
        }
    }

    pub fn builtin(name: &str, sha256: String) -> Self {
        FileDigest {
            path: format!("builtin:{name}"),
            sha256,
        }
    }
}

/// Everything needed to rerun a subcommand. Contains no timestamps or
/// host details, so identical runs give identical manifests.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub seed: Option<u64>,
    pub parameters: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

impl RunManifest {
    pub fn new(subcommand: &'static str, seed: Option<u64>, parameters: serde_json::Value) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            seed,
            parameters,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    /// Writes `bytes` to `path` and records the file by name.
    pub fn emit(&mut self, path: &Path, bytes: &[u8]) -> Result<(), CliError> {
        std::fs::write(path, bytes)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
        let name = path.file_name().map_or_else(
            || path.display().to_string(),
            |n| n.to_string_lossy().into_owned(),
        );
        self.outputs.push(FileDigest::file(&name, bytes));
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(path, text)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
    }
}

/// `<out>.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// `foo.csv` → `foo.ub.csv`; other names get `.ub.csv` appended.
pub fn union_bound_path(out: &Path) -> PathBuf {
    match out.extension() {
        Some(ext) if ext == "csv" => out.with_extension("ub.csv"),
        _ => {
            let mut s = out.as_os_str().to_owned();
            s.push(".ub.csv");
            PathBuf::from(s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn companion_paths() {
        assert_eq!(
            union_bound_path(Path::new("a/ser.csv")),
            PathBuf::from("a/ser.ub.csv")
        );
        assert_eq!(
            union_bound_path(Path::new("ser")),
            PathBuf::from("ser.ub.csv")
        );
        assert_eq!(
            manifest_path(Path::new("a/ser.csv")),
            PathBuf::from("a/ser.csv.manifest.json")
        );
    }
}
