//! Artifact collection and the content-hash manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub kind: String,
    pub artifacts: Vec<ManifestEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Artifacts held in memory until the run finishes, keyed by relative path.
#[derive(Debug, Default)]
pub struct Artifacts {
    files: BTreeMap<String, Vec<u8>>,
}

impl Artifacts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, path: impl Into<String>, bytes: Vec<u8>) {
        let path = path.into();
        debug_assert!(path != MANIFEST_NAME && !path.starts_with('/'));
        self.files.insert(path, bytes);
    }

    pub fn extend(&mut self, other: Artifacts) {
        self.files.extend(other.files);
    }

    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    pub fn get(&self, path: &str) -> Option<&[u8]> {
        self.files.get(path).map(Vec::as_slice)
    }

    pub fn manifest(&self, kind: &str) -> Manifest {
        Manifest {
            schema_version: crate::config::SCHEMA_VERSION,
            kind: kind.to_string(),
            artifacts: self
                .files
                .iter()
                .map(|(p, b)| ManifestEntry { path: p.clone(), sha256: sha256_hex(b), bytes: b.len() as u64 })
                .collect(),
        }
    }

    /// Writes every artifact, then the manifest. Returns the manifest bytes.
    pub fn write_all(&self, dir: &Path, kind: &str) -> std::io::Result<Vec<u8>> {
        fs::create_dir_all(dir)?;
        for (rel, bytes) in &self.files {
            let path = dir.join(rel);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent)?;
            }
            fs::write(&path, bytes)?;
        }
        let manifest = crate::io::json_bytes(&self.manifest(kind));
        fs::write(dir.join(MANIFEST_NAME), &manifest)?;
        Ok(manifest)
    }
}

/// Files listed in `dir/manifest.json` that are missing or whose hash differs.
pub fn verify_manifest(dir: &Path) -> Result<Vec<String>, String> {
    let text = fs::read(dir.join(MANIFEST_NAME)).map_err(|e| format!("cannot read manifest: {e}"))?;
    let manifest: Manifest = serde_json::from_slice(&text).map_err(|e| format!("bad manifest: {e}"))?;
    let mut bad = Vec::new();
    for entry in &manifest.artifacts {
        match fs::read(dir.join(&entry.path)) {
            Ok(bytes) if sha256_hex(&bytes) == entry.sha256 && bytes.len() as u64 == entry.bytes => {}
            _ => bad.push(entry.path.clone()),
        }
    }
    Ok(bad)
}
