//! Memoized construction of spaces and operators, with an optional disk
//! cache.
//!
//! Cache entries are keyed by (level, weight, character, schema version);
//! the schema version is part of the directory path, so a format change
//! simply stops old files from being found.  Entries are JSON: the matrix
//! payload in the shared exact-matrix format together with its provenance
//! header.  Serialization is deterministic, so recomputing an entry always
//! reproduces the previous bytes, and a disk hit is returned without
//! rebuilding the space.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::{build_space, HeckeMatrix, ManinSymbolSpace, SCHEMA_VERSION};
use crate::characters::DirichletCharacter;
use crate::exactalg::RationalMatrix;
use crate::{Error, Result};

/// Environment variable consulted for a default cache directory.
pub const CACHE_DIR_ENV: &str = "HECKE_CACHE_DIR";

type SpaceKey = (u64, i64, String);

/// Construction metadata written alongside the operator matrices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceHeader {
    pub schema: u32,
    pub level: u64,
    pub weight: i64,
    pub character: String,
    pub dim_quotient: usize,
    pub dim_cuspidal: usize,
    pub dim_plus: usize,
    pub dim_minus: usize,
    pub fingerprint: String,
    pub plus_basis: RationalMatrix,
}

#[derive(Default)]
struct Counters {
    spaces_built: AtomicU64,
    operators_built: AtomicU64,
    memo_hits: AtomicU64,
    disk_hits: AtomicU64,
}

/// Snapshot of the work performed by an engine.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WorkCounters {
    pub spaces_built: u64,
    pub operators_built: u64,
    pub memo_hits: u64,
    pub disk_hits: u64,
}

/// Shared entry point for building spaces and Hecke matrices with
/// memoization and an optional persistent cache.
pub struct Engine {
    cache_dir: Option<PathBuf>,
    spaces: Mutex<BTreeMap<SpaceKey, Arc<ManinSymbolSpace>>>,
    matrices: Mutex<BTreeMap<(SpaceKey, u64), Arc<HeckeMatrix>>>,
    counters: Counters,
}

fn character_slug(spec: &str) -> String {
    spec.replace(':', "_").replace(';', "__")
}

impl Engine {
    pub fn new(cache_dir: Option<PathBuf>) -> Engine {
        Engine {
            cache_dir,
            spaces: Mutex::new(BTreeMap::new()),
            matrices: Mutex::new(BTreeMap::new()),
            counters: Counters::default(),
        }
    }

    /// Engine honoring the cache directory environment variable.
    pub fn from_env() -> Engine {
        Engine::new(std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from))
    }

    pub fn counters(&self) -> WorkCounters {
        WorkCounters {
            spaces_built: self.counters.spaces_built.load(Ordering::SeqCst),
            operators_built: self.counters.operators_built.load(Ordering::SeqCst),
            memo_hits: self.counters.memo_hits.load(Ordering::SeqCst),
            disk_hits: self.counters.disk_hits.load(Ordering::SeqCst),
        }
    }

    fn entry_dir(&self, key: &SpaceKey) -> Option<PathBuf> {
        self.cache_dir.as_ref().map(|root| {
            root.join(format!("v{SCHEMA_VERSION}"))
                .join(format!("N{}_k{}_{}", key.0, key.1, character_slug(&key.2)))
        })
    }

    /// Build or fetch the memoized symbol space.
    pub fn space(&self, n: u64, k: i64, chi: &DirichletCharacter) -> Result<Arc<ManinSymbolSpace>> {
        let key: SpaceKey = (n, k, chi.spec_string());
        if let Some(hit) = self.spaces.lock().unwrap().get(&key) {
            self.counters.memo_hits.fetch_add(1, Ordering::SeqCst);
            return Ok(hit.clone());
        }
        let space = Arc::new(build_space(n, k, chi)?);
        self.counters.spaces_built.fetch_add(1, Ordering::SeqCst);
        if let Some(dir) = self.entry_dir(&key) {
            let path = dir.join("space.json");
            if !path.exists() {
                let header = SpaceHeader {
                    schema: SCHEMA_VERSION,
                    level: space.level(),
                    weight: space.weight(),
                    character: key.2.clone(),
                    dim_quotient: space.dim_quotient(),
                    dim_cuspidal: space.dim_cuspidal(),
                    dim_plus: space.dim_plus(),
                    dim_minus: space.dim_minus(),
                    fingerprint: space.fingerprint().to_string(),
                    plus_basis: space.plus_basis().clone(),
                };
                write_json(&path, &header)?;
            }
        }
        self.spaces.lock().unwrap().insert(key, space.clone());
        Ok(space)
    }

    /// Hecke matrix of prime index q on the cuspidal-plus basis, from the
    /// fastest available source: memo, disk, or a fresh build.
    pub fn hecke(&self, n: u64, k: i64, chi: &DirichletCharacter, q: u64) -> Result<Arc<HeckeMatrix>> {
        let key: SpaceKey = (n, k, chi.spec_string());
        let full_key = (key.clone(), q);
        if let Some(hit) = self.matrices.lock().unwrap().get(&full_key) {
            self.counters.memo_hits.fetch_add(1, Ordering::SeqCst);
            return Ok(hit.clone());
        }

        let path = self.entry_dir(&key).map(|dir| dir.join(format!("T{q}.json")));
        if let Some(path) = path.as_ref().filter(|p| p.exists()) {
            let loaded: HeckeMatrix = read_json(path)?;
            if loaded.n != q
                || loaded.provenance.level != n
                || loaded.provenance.weight != k
                || loaded.provenance.character != key.2
            {
                return Err(Error::Cache(format!(
                    "cache entry {} does not match its key",
                    path.display()
                )));
            }
            self.counters.disk_hits.fetch_add(1, Ordering::SeqCst);
            let entry = Arc::new(loaded);
            self.matrices.lock().unwrap().insert(full_key, entry.clone());
            return Ok(entry);
        }

        let space = self.space(n, k, chi)?;
        let computed = Arc::new(space.hecke_matrix(q)?);
        self.counters.operators_built.fetch_add(1, Ordering::SeqCst);
        if let Some(path) = path {
            write_json(&path, computed.as_ref())?;
        }
        self.matrices.lock().unwrap().insert(full_key, computed.clone());
        Ok(computed)
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let parent = path.parent().expect("cache paths have parents");
    fs::create_dir_all(parent)
        .map_err(|e| Error::Cache(format!("creating {}: {e}", parent.display())))?;
    let bytes = serde_json::to_vec(value).expect("cache entries serialize");
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, &bytes).map_err(|e| Error::Cache(format!("writing {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| Error::Cache(format!("installing {}: {e}", path.display())))?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let bytes =
        fs::read(path).map_err(|e| Error::Cache(format!("reading {}: {e}", path.display())))?;
    serde_json::from_slice(&bytes)
        .map_err(|e| Error::Cache(format!("parsing {}: {e}", path.display())))
}
