//! Sidecar cache for oracle exponents, so sweeps never recompute them.

use crate::error::{CliError, Result};
use qillum::fock::{scenario_qcb, ScenarioQcb, Transmitter, TruncationSpec};
use qillum::ScenarioParams;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheKey {
    pub n_s: f64,
    pub n_b: f64,
    pub kappa: f64,
    pub transmitter: Transmitter,
    pub truncation: TruncationSpec,
    pub max_levels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Entry {
    key: CacheKey,
    qcb: ScenarioQcb,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QcbCache {
    entries: Vec<Entry>,
}

/// `<out>.qcb_cache.json` next to the output file.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".qcb_cache.json");
    out.with_file_name(name)
}

impl QcbCache {
    /// Reads a cache file; a missing file is an empty cache.
    pub fn load(path: &Path) -> Result<Self> {
        match std::fs::read_to_string(path) {
            Ok(text) => serde_json::from_str(&text)
                .map_err(|e| CliError::io(path, std::io::Error::new(std::io::ErrorKind::InvalidData, e))),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(QcbCache::default()),
            Err(e) => Err(CliError::io(path, e)),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("cache serializes");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| CliError::io(path, e))
    }

    pub fn get(&self, key: &CacheKey) -> Option<&ScenarioQcb> {
        self.entries.iter().find(|e| &e.key == key).map(|e| &e.qcb)
    }

    pub fn insert(&mut self, key: CacheKey, qcb: ScenarioQcb) {
        self.entries.retain(|e| e.key != key);
        self.entries.push(Entry { key, qcb });
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Oracle QCB for one transmitter, served from `cache` when present.
pub fn cached_qcb(
    cache: Option<&mut QcbCache>,
    params: &ScenarioParams,
    transmitter: Transmitter,
    truncation: &TruncationSpec,
    max_levels: usize,
) -> Result<ScenarioQcb> {
    let key = CacheKey {
        n_s: params.n_s,
        n_b: params.n_b,
        kappa: params.kappa,
        transmitter,
        truncation: truncation.clone(),
        max_levels,
    };
    if let Some(hit) = cache.as_ref().and_then(|c| c.get(&key)) {
        return Ok(hit.clone());
    }
    let fresh = scenario_qcb(params, transmitter, truncation, max_levels)?;
    if let Some(c) = cache {
        c.insert(key, fresh.clone());
    }
    Ok(fresh)
}
