//! On-disk cache for enumeration tables, keyed by machine hash and budgets.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::enumerate::{enumerate_chron, enumerate_joint, EnumApprox, EnumParams};
use super::machine::{machine_hash, MachineKind};
use crate::error::{Result, UaiError};

pub const CACHE_ENV: &str = "UAI_LAB_CACHE";
pub const CACHE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    machine_hash: String,
    params: EnumParams,
    actions: Vec<u8>,
    /// `(key, count)` where the key is the output with a leading 1 bit.
    counts: Vec<(u64, u64)>,
}

#[derive(Clone, Debug)]
pub struct EnumCache {
    dir: PathBuf,
}

impl EnumCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        EnumCache { dir: dir.into() }
    }

    /// The cache named by `UAI_LAB_CACHE`, if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(EnumCache::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, params: &EnumParams, actions: &[u8]) -> PathBuf {
        let kind = match params.kind {
            MachineKind::Joint => "joint",
            MachineKind::Chron => "chron",
        };
        let tape: String = actions.iter().map(|a| char::from(b'0' + a)).collect();
        let hash = machine_hash();
        self.dir.join(format!(
            "{kind}-L{}-S{}-D{}-a{tape}-{}.json",
            params.l,
            params.s,
            params.depth,
            &hash[..12]
        ))
    }

    /// A stored table, or `None` when missing, stale or unreadable.
    pub fn load(&self, params: &EnumParams, actions: &[u8]) -> Option<EnumApprox> {
        let text = fs::read_to_string(self.path(params, actions)).ok()?;
        let file: CacheFile = serde_json::from_str(&text).ok()?;
        if file.version != CACHE_VERSION
            || file.machine_hash != machine_hash()
            || &file.params != params
            || file.actions != actions
        {
            return None;
        }
        Some(EnumApprox::from_parts(file.params, file.actions, file.counts))
    }

    pub fn store(&self, approx: &EnumApprox) -> Result<()> {
        fs::create_dir_all(&self.dir).map_err(|e| UaiError::Cache(e.to_string()))?;
        let file = CacheFile {
            version: CACHE_VERSION,
            machine_hash: machine_hash(),
            params: approx.params,
            actions: approx.actions.clone(),
            counts: approx.sorted_counts(),
        };
        let path = self.path(&approx.params, &approx.actions);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let text = serde_json::to_string(&file).map_err(|e| UaiError::Cache(e.to_string()))?;
        fs::write(&tmp, text).map_err(|e| UaiError::Cache(e.to_string()))?;
        fs::rename(&tmp, &path).map_err(|e| UaiError::Cache(e.to_string()))
    }

    pub fn joint(&self, l: u32, s: u64, depth: usize) -> Result<EnumApprox> {
        let params = EnumParams { kind: MachineKind::Joint, l, s, depth };
        if let Some(hit) = self.load(&params, &[]) {
            return Ok(hit);
        }
        let fresh = enumerate_joint(l, s, depth)?;
        self.store(&fresh)?;
        Ok(fresh)
    }

    pub fn chron(&self, l: u32, s: u64, actions: &[u8]) -> Result<EnumApprox> {
        let params = EnumParams { kind: MachineKind::Chron, l, s, depth: actions.len() };
        if let Some(hit) = self.load(&params, actions) {
            return Ok(hit);
        }
        let fresh = enumerate_chron(l, s, actions)?;
        self.store(&fresh)?;
        Ok(fresh)
    }
}

/// `enumerate_joint`, going through `cache` when given.
pub fn joint_cached(cache: Option<&EnumCache>, l: u32, s: u64, depth: usize) -> Result<EnumApprox> {
    match cache {
        Some(c) => c.joint(l, s, depth),
        None => enumerate_joint(l, s, depth),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_invalidation() {
        let dir = tempfile::tempdir().unwrap();
        let cache = EnumCache::new(dir.path());
        let fresh = cache.joint(7, 40, 4).unwrap();
        let params = fresh.params;
        let loaded = cache.load(&params, &[]).unwrap();
        assert_eq!(loaded, fresh);
        assert_eq!(cache.joint(7, 40, 4).unwrap(), fresh);

        let path = cache.path(&params, &[]);
        let text = fs::read_to_string(&path).unwrap().replace(&machine_hash(), "stale");
        fs::write(&path, text).unwrap();
        assert!(cache.load(&params, &[]).is_none());

        let c = cache.chron(6, 40, &[1, 0, 1]).unwrap();
        assert_eq!(cache.load(&c.params, &[1, 0, 1]).unwrap(), c);
    }
}
