//! On-disk cache of exact Hecke matrices.
//!
//! One JSON file per key (level, weight, operator). The header carries the
//! format version and a SHA-256 checksum over a canonical rendering of the
//! key and payload; entries are row-major exact rationals as strings. A
//! version mismatch, parse failure or checksum mismatch is logged and
//! treated as a miss, so the matrix is recomputed and rewritten. Writes go
//! to a temporary file in the cache directory and are renamed into place.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::arith::int::Q;
use crate::arith::qmat::QMat;
use crate::error::{Error, Result};
use crate::modsym::eigen::MatrixStore;
use crate::modsym::HeckeOp;

/// Bumping this invalidates every existing entry.
pub const CACHE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CacheKey {
    pub level: u64,
    pub weight: u32,
    pub operator: String,
}

impl CacheKey {
    pub fn new(level: u64, weight: u32, op: HeckeOp) -> Self {
        CacheKey { level, weight, operator: op.key() }
    }

    pub fn label(&self) -> String {
        format!("N{}-k{}-{}", self.level, self.weight, self.operator)
    }

    fn file_name(&self) -> String {
        format!("hecke-{}.json", self.label())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CacheEntry {
    pub key: CacheKey,
    pub matrix: QMat,
}

fn checksum(key: &CacheKey, rows: usize, cols: usize, entries: &[String]) -> String {
    let mut h = Sha256::new();
    h.update(format!("v{CACHE_VERSION}|{}|{}|{}|{rows}|{cols}|", key.level, key.weight, key.operator));
    h.update(entries.join(","));
    hex::encode(h.finalize())
}

impl CacheEntry {
    pub fn to_json(&self) -> Value {
        let entries: Vec<String> = self.matrix.data.iter().map(|q| q.to_string()).collect();
        let sum = checksum(&self.key, self.matrix.rows, self.matrix.cols, &entries);
        json!({
            "version": CACHE_VERSION,
            "level": self.key.level,
            "weight": self.key.weight,
            "operator": self.key.operator,
            "rows": self.matrix.rows,
            "cols": self.matrix.cols,
            "checksum": sum,
            "entries": entries,
        })
    }

    /// Parses and checks an entry; any defect is `CacheCorrupt`.
    pub fn from_json(v: &Value) -> Result<CacheEntry> {
        let bad = |what: &str| Error::CacheCorrupt(what.to_string());
        let version = v["version"].as_u64().ok_or_else(|| bad("missing version"))?;
        if version != CACHE_VERSION as u64 {
            return Err(bad(&format!("version {version}, expected {CACHE_VERSION}")));
        }
        let key = CacheKey {
            level: v["level"].as_u64().ok_or_else(|| bad("missing level"))?,
            weight: v["weight"].as_u64().ok_or_else(|| bad("missing weight"))? as u32,
            operator: v["operator"].as_str().ok_or_else(|| bad("missing operator"))?.to_string(),
        };
        let rows = v["rows"].as_u64().ok_or_else(|| bad("missing rows"))? as usize;
        let cols = v["cols"].as_u64().ok_or_else(|| bad("missing cols"))? as usize;
        let entries: Vec<String> = v["entries"]
            .as_array()
            .ok_or_else(|| bad("missing entries"))?
            .iter()
            .map(|e| e.as_str().map(str::to_string).ok_or_else(|| bad("entry is not a string")))
            .collect::<Result<_>>()?;
        if entries.len() != rows * cols {
            return Err(bad("entry count does not match shape"));
        }
        if v["checksum"].as_str() != Some(checksum(&key, rows, cols, &entries).as_str()) {
            return Err(bad("checksum mismatch"));
        }
        let data = entries
            .iter()
            .map(|s| Q::from_str(s).map_err(|_| bad(&format!("bad rational {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(CacheEntry { key, matrix: QMat { rows, cols, data } })
    }
}

/// A directory of cache entries with hit/miss instrumentation.
pub struct DiskCache {
    dir: PathBuf,
    hits: AtomicU64,
    misses: AtomicU64,
    corrupt: AtomicU64,
    touched: Mutex<BTreeSet<CacheKey>>,
}

impl DiskCache {
    pub fn open(dir: impl AsRef<Path>) -> Result<DiskCache> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        Ok(DiskCache {
            dir,
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            corrupt: AtomicU64::new(0),
            touched: Mutex::new(BTreeSet::new()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_of(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    pub fn corrupt_count(&self) -> u64 {
        self.corrupt.load(Ordering::Relaxed)
    }

    /// Every key looked up so far, sorted.
    pub fn keys_used(&self) -> Vec<CacheKey> {
        self.touched.lock().expect("cache key set").iter().cloned().collect()
    }

    /// Writes the entry atomically (temporary file, then rename).
    pub fn store(&self, entry: &CacheEntry) -> Result<()> {
        let body = serde_json::to_string(&entry.to_json()).map_err(|e| Error::Io(e.to_string()))?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(body.as_bytes())?;
        tmp.flush()?;
        tmp.persist(self.path_of(&entry.key)).map_err(|e| Error::Io(e.error.to_string()))?;
        Ok(())
    }

    /// `Ok(None)` when absent, `CacheCorrupt` when present but unusable.
    pub fn load(&self, key: &CacheKey) -> Result<Option<CacheEntry>> {
        let path = self.path_of(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let v: Value = serde_json::from_str(&text).map_err(|e| Error::CacheCorrupt(e.to_string()))?;
        let entry = CacheEntry::from_json(&v)?;
        if entry.key != *key {
            return Err(Error::CacheCorrupt(format!("file holds {}", entry.key.label())));
        }
        Ok(Some(entry))
    }
}

impl MatrixStore for DiskCache {
    fn load(&self, level: u64, weight: u32, op: HeckeOp) -> Option<QMat> {
        let key = CacheKey::new(level, weight, op);
        self.touched.lock().expect("cache key set").insert(key.clone());
        match DiskCache::load(self, &key) {
            Ok(Some(e)) => {
                self.hits.fetch_add(1, Ordering::Relaxed);
                Some(e.matrix)
            }
            Ok(None) => {
                self.misses.fetch_add(1, Ordering::Relaxed);
                None
            }
            Err(e) => {
                eprintln!("mtlab: {} ({}); recomputing", e, key.label());
                self.corrupt.fetch_add(1, Ordering::Relaxed);
                self.misses.fetch_add(1, Ordering::Relaxed);
                None
            }
        }
    }

    fn store(&self, level: u64, weight: u32, op: HeckeOp, m: &QMat) {
        let entry = CacheEntry { key: CacheKey::new(level, weight, op), matrix: m.clone() };
        // a failed write only costs a recomputation next time
        if let Err(e) = DiskCache::store(self, &entry) {
            eprintln!("mtlab: cache write failed for {}: {e}", entry.key.label());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int::q_int;

    fn sample() -> CacheEntry {
        let data = vec![q_int(1), Q::new(3.into(), (-7).into()), q_int(0), Q::new(22.into(), 9.into())];
        CacheEntry { key: CacheKey::new(11, 4, HeckeOp::T(2)), matrix: QMat { rows: 2, cols: 2, data } }
    }

    #[test]
    fn store_then_load_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        let c = DiskCache::open(dir.path()).unwrap();
        let e = sample();
        c.store(&e).unwrap();
        assert_eq!(c.load(&e.key).unwrap(), Some(e));
    }

    #[test]
    fn flipped_checksum_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let c = DiskCache::open(dir.path()).unwrap();
        let e = sample();
        c.store(&e).unwrap();
        let path = c.path_of(&e.key);
        let text = fs::read_to_string(&path).unwrap().replacen("\"22/9\"", "\"23/9\"", 1);
        fs::write(&path, text).unwrap();
        assert!(matches!(c.load(&e.key), Err(Error::CacheCorrupt(_))));
        assert_eq!(MatrixStore::load(&c, 11, 4, HeckeOp::T(2)), None);
        assert_eq!(c.corrupt_count(), 1);
    }

    #[test]
    fn other_version_is_rejected() {
        let mut v = sample().to_json();
        v["version"] = json!(CACHE_VERSION + 1);
        assert!(matches!(CacheEntry::from_json(&v), Err(Error::CacheCorrupt(_))));
    }
}
