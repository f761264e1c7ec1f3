//! Noise-maxima rates measured by transforming simulated noise directly.

use rayon::prelude::*;

use super::simulate::{Histogram, Stratum};
use super::{derive_seed, wavelet_spectrum, NoiseModel, RateTable};
use crate::cwt::{FrequencyGrid, Transformer};
use crate::error::{Error, Result};
use crate::maxima::find_maxima;
use crate::synth::{random_walk, white_noise};

const BLOCK: usize = 1 << 16;

/// Rate table for the middle of the first `band_count` grid scales, measured
/// from at least `length` samples of noise.
///
/// Noise is generated in independent blocks; only block interiors farther
/// than ten footprints from either end are examined. White noise (`α = 0`)
/// has standard deviation `A`; `α = 1` is the cumulative sum of white noise
/// with standard deviation `A`, whose spectrum approaches `A² ω⁻²`.
pub fn direct_maxima_oracle(
    model: NoiseModel,
    grid: &FrequencyGrid,
    band_count: usize,
    length: usize,
    seed: u64,
) -> Result<RateTable> {
    if band_count < 3 || band_count > grid.len() {
        return Err(Error::Config(format!("band_count must be in 3..={}, got {band_count}", grid.len())));
    }
    if model.alpha != 0.0 && model.alpha != 1.0 {
        return Err(Error::Config("direct noise generation supports alpha = 0 or 1 only".into()));
    }
    let bands = grid.with_omegas(grid.omegas[..band_count].to_vec())?;
    let mid = band_count / 2;
    let footprint = bands.footprint(mid);
    let margin = (10.0 * bands.footprint(band_count - 1)).ceil() as usize;
    if 2 * margin + 1 >= BLOCK {
        return Err(Error::Config("selected bands are too coarse for direct simulation".into()));
    }
    let usable = BLOCK - 2 * margin;
    let blocks = length.div_ceil(usable).max(1);
    let sigma = wavelet_spectrum(model, grid.wavelet, bands.scale(mid))?.sqrt();
    let transformer = Transformer::new(&bands, BLOCK)?;
    let mask = vec![false; BLOCK];

    let hists: Vec<Result<Histogram>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let s = derive_seed(seed, &[0xd1ec7, b as u64]);
            let x = if model.alpha == 0.0 {
                white_noise(BLOCK, model.amplitude, s)
            } else {
                random_walk(BLOCK, model.amplitude, s)
            };
            let plane = transformer.apply(&x, &mask)?;
            let mut h = Histogram::new();
            for p in find_maxima(&plane) {
                if p.scale_index == mid && p.t_index >= margin && p.t_index < BLOCK - margin {
                    h.maxima += 1;
                    h.record(p.grid_magnitude / sigma);
                }
            }
            Ok(h)
        })
        .collect();
    let mut hist = Histogram::new();
    for h in hists {
        hist.merge(&h?);
    }
    let n = (blocks * usable) as u64;
    let n_maxima = hist.maxima;
    let stratum = Stratum { weight: footprint / n as f64, hist };
    Ok(RateTable::from_strata(
        mid,
        bands.omegas[mid],
        bands.scale(mid),
        footprint,
        &[stratum],
        n,
        n_maxima,
        seed,
    ))
}
