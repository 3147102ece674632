use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data_io::store::check_label;
use crate::error::{Error, Result};

/// Environment variable naming the cache root.
pub const CACHE_ENV: &str = "FERMAT_CACHE_DIR";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    /// Seconds since the Unix epoch.
    pub fetched_at: u64,
    pub sha256: String,
    /// Upstream schema the payload was parsed with.
    pub schema: String,
}

/// `manifest.json`: relative path → entry.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheManifest {
    pub entries: BTreeMap<String, CacheEntry>,
}

/// On-disk cache laid out as `<root>/<source>/<label>/<level>.json`.
#[derive(Debug)]
pub struct Cache {
    root: PathBuf,
    manifest_lock: Mutex<()>,
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Cache { root: root.into(), manifest_lock: Mutex::new(()) }
    }

    /// `$FERMAT_CACHE_DIR`, else `./cache`.
    pub fn from_env() -> Self {
        Self::new(std::env::var_os(CACHE_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("cache")))
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn relative(source: &str, label: &str, level: u64) -> Result<String> {
        if source.is_empty() || !source.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-') {
            return Err(Error::Invalid(format!("malformed cache source {source:?}")));
        }
        Ok(format!("{source}/{}/{level}.json", check_label(label)?))
    }

    pub fn path(&self, source: &str, label: &str, level: u64) -> Result<PathBuf> {
        Ok(self.root.join(Self::relative(source, label, level)?))
    }

    pub fn manifest(&self) -> Result<CacheManifest> {
        let path = self.root.join("manifest.json");
        match fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text)
                .map_err(|e| Error::Invalid(format!("cache manifest {}: {e}", path.display()))),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(CacheManifest::default()),
            Err(e) => Err(e.into()),
        }
    }

    /// Cached payload and its manifest entry, after checking the hash.
    pub fn get(&self, source: &str, label: &str, level: u64) -> Result<Option<(String, CacheEntry)>> {
        let rel = Self::relative(source, label, level)?;
        let manifest = self.manifest()?;
        let Some(entry) = manifest.entries.get(&rel) else { return Ok(None) };
        let text = match fs::read_to_string(self.root.join(&rel)) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let digest = sha256_hex(text.as_bytes());
        if digest != entry.sha256 {
            return Err(Error::Inconsistency(format!(
                "cache file {rel} is corrupted: sha256 {digest}, manifest says {}",
                entry.sha256
            )));
        }
        Ok(Some((text, entry.clone())))
    }

    /// Stores a payload atomically and records it in the manifest.
    pub fn put(&self, source: &str, label: &str, level: u64, payload: &str, schema: &str) -> Result<CacheEntry> {
        let rel = Self::relative(source, label, level)?;
        atomic_write(&self.root.join(&rel), payload.as_bytes())?;
        let entry = CacheEntry { fetched_at: now(), sha256: sha256_hex(payload.as_bytes()), schema: schema.into() };
        let _guard = self.manifest_lock.lock().unwrap_or_else(|e| e.into_inner());
        let mut manifest = self.manifest()?;
        manifest.entries.insert(rel, entry.clone());
        atomic_write(&self.root.join("manifest.json"), serde_json::to_string_pretty(&manifest)?.as_bytes())?;
        Ok(entry)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Write to a temporary sibling, then rename over the target.
fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().ok_or_else(|| Error::Invalid(format!("no parent for {}", path.display())))?;
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
        std::process::id()
    ));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}
