//! Persistent Jacobi-sum cache: one JSON file per key, written atomically.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cyclo::CycElement;
use crate::error::{Error, Result};

pub const CACHE_VERSION: u32 = 1;

/// `(p, q, d_a, primitive tuple)`; the tuple lives in `G_{d_a}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CacheKey {
    pub p: u64,
    pub q: u64,
    pub d_a: u64,
    pub a: [u64; 4],
}

impl CacheKey {
    fn relative_path(&self) -> PathBuf {
        let a = self.a.map(|x| x.to_string()).join("_");
        PathBuf::from(format!("v{CACHE_VERSION}"))
            .join(format!("p{}", self.p))
            .join(format!("q{}", self.q))
            .join(format!("d{}", self.d_a))
            .join(format!("{a}.json"))
    }
}

#[derive(Serialize, Deserialize)]
struct Entry {
    version: u32,
    key: CacheKey,
    value: CycElement,
}

#[derive(Clone, Debug)]
pub struct Cache {
    root: PathBuf,
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Cache { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path_for(&self, key: &CacheKey) -> PathBuf {
        self.root.join(key.relative_path())
    }

    /// A missing, unreadable or corrupt entry is a miss; the latter two are logged.
    pub fn get(&self, key: &CacheKey) -> Option<CycElement> {
        let path = self.path_for(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return None,
            Err(e) => {
                log::warn!("unreadable cache entry {}: {e}", path.display());
                return None;
            }
        };
        match serde_json::from_str::<Entry>(&text) {
            Ok(entry)
                if entry.version == CACHE_VERSION
                    && entry.key == *key
                    && entry.value.conductor() as u64 == key.d_a =>
            {
                Some(entry.value)
            }
            Ok(_) => {
                log::warn!("stale or mismatched cache entry {}", path.display());
                None
            }
            Err(e) => {
                log::warn!("corrupt cache entry {}: {e}", path.display());
                None
            }
        }
    }

    pub fn put(&self, key: &CacheKey, value: &CycElement) -> Result<()> {
        let path = self.path_for(key);
        let dir = path.parent().expect("cache paths have a parent");
        fs::create_dir_all(dir)?;
        let entry = Entry { version: CACHE_VERSION, key: key.clone(), value: value.clone() };
        let body = serde_json::to_string(&entry).map_err(|e| Error::Cache(e.to_string()))?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(body.as_bytes())?;
        tmp.flush()?;
        tmp.persist(&path).map_err(|e| Error::Cache(e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key() -> CacheKey {
        CacheKey { p: 2, q: 2, d_a: 5, a: [1, 1, 4, 4] }
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        assert!(cache.get(&key()).is_none());
        let x = CycElement::zeta_pow(5, 2).scale(&7.into());
        cache.put(&key(), &x).unwrap();
        assert_eq!(cache.get(&key()).unwrap(), x);
        assert!(cache.path_for(&key()).ends_with("v1/p2/q2/d5/1_1_4_4.json"));
    }

    #[test]
    fn corrupt_is_miss() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let path = cache.path_for(&key());
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, "{not json").unwrap();
        assert!(cache.get(&key()).is_none());
        cache.put(&key(), &CycElement::from_int(5, 16)).unwrap();
        assert_eq!(cache.get(&key()).unwrap(), CycElement::from_int(5, 16));
    }

    #[test]
    fn concurrent_puts() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let x = CycElement::from_int(5, 16);
        std::thread::scope(|s| {
            for _ in 0..8 {
                s.spawn(|| cache.put(&key(), &x).unwrap());
            }
        });
        assert_eq!(cache.get(&key()).unwrap(), x);
    }
}
