//! On-disk JSON cache of exact modular data, one file per `(algebra, k)`.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cyclotomic::CycNumber;
use crate::error::{Error, Result};
use crate::modular_data::ModularData;
use crate::rootsys::SimpleAlgebra;

/// Bumped whenever the stored layout or any convention behind `S`/`T` changes.
pub const CACHE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheFile {
    pub version: u32,
    pub algebra: String,
    pub k: u32,
    #[serde(rename = "N")]
    pub order: u32,
    pub weights: Vec<Vec<i64>>,
    #[serde(rename = "S")]
    pub s: Vec<Vec<CycNumber>>,
    #[serde(rename = "T")]
    pub t: Vec<CycNumber>,
}

/// What [`load_or_build`] did.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Built,
    /// A file existed but was unusable; the reason is kept for a warning.
    Rebuilt(String),
}

pub fn file_name(alg: &SimpleAlgebra, k: u32) -> String {
    format!("{}{}_k{k}_v{CACHE_VERSION}.json", alg.family(), alg.rank())
}

pub fn to_cache(md: &ModularData) -> CacheFile {
    CacheFile {
        version: CACHE_VERSION,
        algebra: md.algebra().name(),
        k: md.level(),
        order: md.order(),
        weights: md.weights().iter().map(|w| w.labels.0.clone()).collect(),
        s: md.s().to_vec(),
        t: md.t().to_vec(),
    }
}

/// Rebuilds modular data from a parsed cache file, checking every header
/// field against a fresh enumeration.
pub fn from_cache(file: CacheFile, alg: Arc<SimpleAlgebra>) -> Result<ModularData> {
    if file.version != CACHE_VERSION {
        return Err(Error::Cache(format!(
            "format version {} (expected {CACHE_VERSION})",
            file.version
        )));
    }
    if file.algebra != alg.name() {
        return Err(Error::Cache(format!("algebra {} (expected {})", file.algebra, alg.name())));
    }
    let k = file.k;
    let expected: Vec<Vec<i64>> = crate::modular_data::enumerate_weights(&alg, k)
        .into_iter()
        .map(|w| w.labels.0)
        .collect();
    if file.weights != expected {
        return Err(Error::Cache("weight list differs from enumeration".into()));
    }
    let md = ModularData::from_matrices(alg, k, file.s, file.t)?;
    if md.order() != file.order {
        return Err(Error::Cache(format!("N = {} (expected {})", file.order, md.order())));
    }
    Ok(md)
}

pub fn write(md: &ModularData, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(file_name(md.algebra(), md.level()));
    let json = serde_json::to_string(&to_cache(md)).map_err(|e| Error::Internal(e.to_string()))?;
    // Write then rename so a concurrent reader never sees a partial file.
    let tmp = path.with_extension(format!("json.tmp{}", std::process::id()));
    fs::write(&tmp, json).map_err(|e| Error::Io(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, &path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// `Ok(None)` if no file exists.
pub fn read(dir: &Path, alg: Arc<SimpleAlgebra>, k: u32) -> Result<Option<ModularData>> {
    let path = dir.join(file_name(&alg, k));
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(Error::Io(format!("{}: {e}", path.display()))),
    };
    let file: CacheFile =
        serde_json::from_str(&text).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
    from_cache(file, alg).map(Some)
}

/// Reads the cached data if present and valid, otherwise builds and writes it.
pub fn load_or_build(dir: &Path, alg: Arc<SimpleAlgebra>, k: u32) -> Result<(ModularData, CacheStatus)> {
    let status = match read(dir, alg.clone(), k) {
        Ok(Some(md)) => return Ok((md, CacheStatus::Hit)),
        Ok(None) => CacheStatus::Built,
        Err(e @ (Error::Cache(_) | Error::Internal(_))) => CacheStatus::Rebuilt(e.to_string()),
        Err(e) => return Err(e),
    };
    let md = ModularData::build(alg, k)?;
    write(&md, dir)?;
    Ok((md, status))
}
