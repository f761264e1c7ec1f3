//! On-disk cache of simulated rate tables.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{simulate_maxima, NoiseModel, RateTable};
use crate::cwt::FrequencyGrid;
use crate::error::Result;

const SCHEMA: &str = "ratetable/1";

/// Everything the simulated tables depend on. The noise amplitude is not part
/// of it because tables are in normalized units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheKey {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub r: f64,
    pub grid_hash: String,
    #[serde(rename = "n")]
    pub n_realizations: u64,
    pub seed: u64,
}

impl CacheKey {
    pub fn new(model: NoiseModel, grid: &FrequencyGrid, n_realizations: u64, seed: u64) -> Self {
        Self {
            alpha: model.alpha,
            beta: grid.wavelet.beta(),
            gamma: grid.wavelet.gamma(),
            r: grid.r,
            grid_hash: grid.digest(),
            n_realizations,
            seed,
        }
    }

    fn file_name(&self) -> String {
        let json = serde_json::to_vec(self).expect("key serializes");
        let digest = Sha256::digest(&json);
        let hex: String = digest.iter().take(12).map(|b| format!("{b:02x}")).collect();
        format!("ratetable-{hex}.json")
    }
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    schema: String,
    key: CacheKey,
    tables: Vec<RateTable>,
}

/// [`simulate_maxima`], reusing tables stored under `dir` when the key matches.
pub fn simulate_maxima_cached(
    model: NoiseModel,
    grid: &FrequencyGrid,
    n_realizations: u64,
    seed: u64,
    dir: Option<&Path>,
) -> Result<Vec<RateTable>> {
    let Some(dir) = dir else {
        return simulate_maxima(model, grid, n_realizations, seed);
    };
    let key = CacheKey::new(model, grid, n_realizations, seed);
    let path = dir.join(key.file_name());
    if let Some(tables) = load(&path, &key) {
        return Ok(tables);
    }
    let tables = simulate_maxima(model, grid, n_realizations, seed)?;
    store(dir, &path, key, &tables)?;
    Ok(tables)
}

fn load(path: &Path, key: &CacheKey) -> Option<Vec<RateTable>> {
    let bytes = fs::read(path).ok()?;
    let file: CacheFile = serde_json::from_slice(&bytes).ok()?;
    (file.schema == SCHEMA && &file.key == key).then_some(file.tables)
}

fn store(dir: &Path, path: &PathBuf, key: CacheKey, tables: &[RateTable]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let file = CacheFile { schema: SCHEMA.to_string(), key, tables: tables.to_vec() };
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, serde_json::to_vec(&file)?)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cwt::build_grid;
    use crate::morse::WaveletSpec;

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let grid = build_grid(WaveletSpec::new(2.0, 2.0).unwrap(), 64, 0.05, 4.0, 6.0).unwrap();
        let model = NoiseModel::white(1.0).unwrap();
        let a = simulate_maxima_cached(model, &grid, 2000, 1, Some(dir.path())).unwrap();
        let files: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(files.len(), 1);
        let b = simulate_maxima_cached(model, &grid, 2000, 1, Some(dir.path())).unwrap();
        assert_eq!(a, b);
        let c = simulate_maxima_cached(model, &grid, 2000, 2, Some(dir.path())).unwrap();
        assert_ne!(a, c);
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 2);
    }
}
