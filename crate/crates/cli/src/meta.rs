//! Persisted file formats owned by the CLI and model fingerprints.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{read_file, CliError, CliResult};

pub const SCHEME_SCHEMA: &str = "band-scheme/v1";
pub const EMBEDDING_META_SCHEMA: &str = "embedding-meta/v1";

pub fn fingerprint(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// `path` with `suffix` appended to its file name.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn check_schema(value: &serde_json::Value, expected: &str, path: &Path) -> CliResult<()> {
    let found = value.get("schema").and_then(|s| s.as_str()).unwrap_or_default();
    if found != expected {
        return Err(CliError::data(format!(
            "{}: expected schema '{expected}', found '{found}'",
            path.display()
        )));
    }
    Ok(())
}

/// A frozen band layout plus the window it was fitted for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeFile {
    pub schema: String,
    pub window: usize,
    pub breakpoints: Vec<usize>,
    pub sse: Option<f64>,
}

impl SchemeFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let v: serde_json::Value = serde_json::from_str(&read_file(path)?)
            .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        check_schema(&v, SCHEME_SCHEMA, path)?;
        Ok(serde_json::from_value(v)?)
    }
}

/// Written beside every embedding: which method produced it and, for kernel
/// PCA, which model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingMeta {
    pub schema: String,
    pub method: String,
    pub model_fingerprint: Option<String>,
    pub embedding_fingerprint: String,
}

impl EmbeddingMeta {
    pub fn path_for(embedding: &Path) -> PathBuf {
        sidecar(embedding, ".meta.json")
    }

    /// The sidecar of `embedding`, if present.
    pub fn find(embedding: &Path) -> CliResult<Option<Self>> {
        let path = Self::path_for(embedding);
        if !path.exists() {
            return Ok(None);
        }
        let v: serde_json::Value = serde_json::from_str(&read_file(&path)?)
            .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        check_schema(&v, EMBEDDING_META_SCHEMA, &path)?;
        Ok(Some(serde_json::from_value(v)?))
    }

    pub fn is_kpca(&self) -> bool {
        self.method.starts_with("kpca")
    }
}

pub fn load_model(path: &Path) -> CliResult<(sensormap::kpca::KpcaModel, String)> {
    let text = read_file(path)?;
    let model = sensormap::kpca::KpcaModel::from_json(&text)
        .map_err(|e| CliError::from(e).context(path.display()))?;
    Ok((model, fingerprint(text.as_bytes())))
}

pub fn load_baseline(path: &Path) -> CliResult<sensormap::detect::BaselineModel> {
    sensormap::detect::BaselineModel::from_json(&read_file(path)?)
        .map_err(|e| CliError::from(e).context(path.display()))
}
