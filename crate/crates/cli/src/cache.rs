//! Disk cache for synthesized grammars, keyed by a content hash of the
//! presentation and units files, stored in `.smwp-cache/` next to the
//! presentation. Synthesis dominates runtime; repeated queries skip it.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const CACHE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
pub struct CacheFile {
    pub version: u32,
    /// Alphabet of the presentation as given.
    pub original_generators: Vec<String>,
    /// Alphabet after normalization (equal when no step was needed).
    pub generators: Vec<String>,
    pub normalized: bool,
    pub certification: crate::report::CertificationDto,
    pub pieces: Vec<String>,
    pub class_count: usize,
    pub piece_class: Vec<usize>,
    /// Grammar text per the documented grammar file format.
    pub wp_grammar: String,
    pub invertible_grammar: String,
}

/// Hash the inputs that determine the artifacts. `extra` is the contents
/// of a referenced units grammar file, when one exists.
pub fn cache_key(pres_text: &str, units_text: &str, extra: Option<&str>) -> String {
    let mut h = Sha256::new();
    h.update(CACHE_VERSION.to_le_bytes());
    h.update((pres_text.len() as u64).to_le_bytes());
    h.update(pres_text.as_bytes());
    h.update((units_text.len() as u64).to_le_bytes());
    h.update(units_text.as_bytes());
    if let Some(e) = extra {
        h.update(e.as_bytes());
    }
    let digest = h.finalize();
    digest.iter().take(16).map(|b| format!("{:02x}", b)).collect()
}

pub fn cache_path(pres_path: &Path, key: &str) -> PathBuf {
    let dir = pres_path.parent().unwrap_or(Path::new("."));
    dir.join(".smwp-cache").join(format!("{}.json", key))
}

/// Load a cache entry; any read, parse, or version mismatch is a miss.
pub fn load(path: &Path) -> Option<CacheFile> {
    let text = std::fs::read_to_string(path).ok()?;
    let file: CacheFile = serde_json::from_str(&text).ok()?;
    if file.version != CACHE_VERSION {
        return None;
    }
    Some(file)
}

pub fn store(path: &Path, file: &CacheFile) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating cache directory {}", dir.display()))?;
    }
    std::fs::write(path, serde_json::to_string(file)?)
        .with_context(|| format!("writing cache file {}", path.display()))
}
