//! On-disk store for simulated null draws.
//!
//! One file per [`NullSpec`]: a 48-byte little-endian header followed by the
//! sorted draws as `f64`.
//!
//! ```text
//! offset  size  field
//!      0     8  magic "STADFNUL"
//!      8     4  format version (1)
//!     12     4  family code
//!     16     8  r0 (f64)
//!     24     8  steps N (u64)
//!     32     8  replications R (u64)
//!     40     8  seed (u64)
//!     48  8 R   draws (f64, ascending)
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use log::info;

use super::null::{simulate_null, NullDistribution, NullFamily, NullSpec};
use crate::{Error, Result};

/// Environment variable naming the cache directory.
pub const CACHE_DIR_ENV: &str = "STADF_CACHE_DIR";

const MAGIC: &[u8; 8] = b"STADFNUL";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 48;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NullCache {
    dir: PathBuf,
}

impl NullCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// `$STADF_CACHE_DIR`, or `.stadf-cache` in the working directory.
    pub fn from_env() -> Self {
        Self::new(std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| ".stadf-cache".into()))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, spec: &NullSpec) -> PathBuf {
        self.dir.join(format!(
            "{}_r0-{:016x}_N{}_R{}_seed{}.bin",
            spec.family.name(),
            spec.r0.to_bits(),
            spec.steps,
            spec.replications,
            spec.seed
        ))
    }

    pub fn load(&self, spec: &NullSpec) -> Result<Option<NullDistribution>> {
        let path = self.path(spec);
        if !path.exists() {
            return Ok(None);
        }
        let dist = read(&path)?;
        if dist.spec != *spec {
            return Err(Error::Cache { path, reason: "header does not match the requested distribution".into() });
        }
        Ok(Some(dist))
    }

    pub fn store(&self, dist: &NullDistribution) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path(&dist.spec);
        write(&path, dist)?;
        Ok(path)
    }

    /// Cached distribution for `spec`, simulating (and storing) it on a miss
    /// or when `force` is set. The flag is true on a cache hit.
    pub fn load_or_simulate(&self, spec: &NullSpec, force: bool) -> Result<(NullDistribution, bool)> {
        if !force {
            if let Some(dist) = self.load(spec)? {
                return Ok((dist, true));
            }
        }
        info!("simulating {} null distribution (N = {}, R = {})", spec.family.name(), spec.steps, spec.replications);
        let dist = simulate_null(spec)?;
        self.store(&dist)?;
        Ok((dist, false))
    }
}

pub(crate) fn encode(dist: &NullDistribution) -> Vec<u8> {
    let spec = &dist.spec;
    let mut buf = Vec::with_capacity(HEADER_LEN + 8 * dist.draws().len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&spec.family.code().to_le_bytes());
    buf.extend_from_slice(&spec.r0.to_le_bytes());
    buf.extend_from_slice(&(spec.steps as u64).to_le_bytes());
    buf.extend_from_slice(&(spec.replications as u64).to_le_bytes());
    buf.extend_from_slice(&spec.seed.to_le_bytes());
    for d in dist.draws() {
        buf.extend_from_slice(&d.to_le_bytes());
    }
    buf
}

pub(crate) fn decode(bytes: &[u8], path: &Path) -> Result<NullDistribution> {
    let bad = |reason: &str| Error::Cache { path: path.to_path_buf(), reason: reason.to_string() };
    if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
        return Err(bad("not a null-distribution cache file"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
    if u32_at(8) != VERSION {
        return Err(bad("unsupported format version"));
    }
    let family = NullFamily::from_code(u32_at(12)).ok_or_else(|| bad("unknown family code"))?;
    let spec = NullSpec {
        family,
        r0: f64::from_bits(u64_at(16)),
        steps: u64_at(24) as usize,
        replications: u64_at(32) as usize,
        seed: u64_at(40),
    };
    let body = &bytes[HEADER_LEN..];
    if body.len() != 8 * spec.replications {
        return Err(bad("draw count does not match header"));
    }
    let draws = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    NullDistribution::from_draws(spec, draws).map_err(|_| bad("invalid draws"))
}

pub fn read(path: &Path) -> Result<NullDistribution> {
    decode(&fs::read(path)?, path)
}

/// Write through a temporary file and rename, so readers never see a partial file.
pub fn write(path: &Path, dist: &NullDistribution) -> Result<()> {
    let tmp = path.with_extension("bin.tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&encode(dist))?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> NullSpec {
        NullSpec { family: NullFamily::SadfGls, r0: 0.1, steps: 100, replications: 300, seed: 5 }
    }

    #[test]
    fn header_layout() {
        let dist = simulate_null(&spec()).unwrap();
        let bytes = encode(&dist);
        assert_eq!(bytes.len(), 48 + 8 * 300);
        assert_eq!(&bytes[..8], b"STADFNUL");
        assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 0);
        assert_eq!(f64::from_le_bytes(bytes[16..24].try_into().unwrap()), 0.1);
        assert_eq!(decode(&bytes, Path::new("x")).unwrap(), dist);
    }

    #[test]
    fn rejects_corrupt_files() {
        let dist = simulate_null(&spec()).unwrap();
        let mut bytes = encode(&dist);
        bytes.truncate(100);
        assert!(matches!(decode(&bytes, Path::new("x")), Err(Error::Cache { .. })));
        assert!(decode(b"garbage", Path::new("x")).is_err());
    }

    #[test]
    fn second_lookup_hits_the_cache() {
        let dir = tempfile::tempdir().unwrap();
        let cache = NullCache::new(dir.path());
        let (a, hit) = cache.load_or_simulate(&spec(), false).unwrap();
        assert!(!hit);
        let (b, hit) = cache.load_or_simulate(&spec(), false).unwrap();
        assert!(hit);
        assert_eq!(a, b);
        let (_, hit) = cache.load_or_simulate(&spec(), true).unwrap();
        assert!(!hit);
    }
}
