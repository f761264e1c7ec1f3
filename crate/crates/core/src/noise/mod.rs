//! Power-law noise: wavelet spectrum, transform covariance, the distribution of
//! noise-only maxima and the significance thresholds derived from it.
//!
//! Noise has spectrum `S(ω) = A² ω^{-2α}`. Its amplitude-normalized transform
//! has variance `σ²(s) = A² f s^{2α-1}`, where `f` is [`crate::morse::f_noise`].
//! Maxima magnitudes are compared with noise in the normalized units
//! `w̃ = |w| / σ(s)`.

mod cache;
mod covariance;
mod oracle;
mod rates;
mod simulate;

use serde::{Deserialize, Serialize};

pub use cache::{simulate_maxima_cached, CacheKey};
pub use covariance::{psd_cholesky, sigma_matrix, xi_covariance, XiKernel};
pub use oracle::direct_maxima_oracle;
pub use rates::{threshold_for_rate, RateTarget, Thresholds};
pub use simulate::{draw_vector, simulate_maxima, simulate_scale, RateTable, HIST_BINS, HIST_TOP};

use crate::cwt::TransformPlane;
use crate::error::{Error, Result};
use crate::morse::{f_noise, WaveletSpec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Spectral slope parameter; 0 is white noise, 1 a random walk.
    pub alpha: f64,
    /// Spectral amplitude `A`; for white noise this is the standard deviation.
    pub amplitude: f64,
}

impl NoiseModel {
    pub fn new(alpha: f64, amplitude: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::Domain(format!("noise slope alpha must be >= 0, got {alpha}")));
        }
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::Domain(format!("noise amplitude must be > 0, got {amplitude}")));
        }
        Ok(Self { alpha, amplitude })
    }

    pub fn white(sigma_eps: f64) -> Result<Self> {
        Self::new(0.0, sigma_eps)
    }

    /// White-noise standard deviation, defined only for `α = 0`.
    pub fn sigma_eps(&self) -> Option<f64> {
        (self.alpha == 0.0).then_some(self.amplitude)
    }

    pub fn with_amplitude(&self, amplitude: f64) -> Result<Self> {
        Self::new(self.alpha, amplitude)
    }

    pub(crate) fn check_wavelet(&self, wavelet: WaveletSpec) -> Result<()> {
        if !(wavelet.beta() > self.alpha - 0.5) {
            return Err(Error::Domain(format!(
                "noise slope alpha = {} needs beta > alpha - 1/2, got beta = {}",
                self.alpha,
                wavelet.beta()
            )));
        }
        Ok(())
    }
}

/// Expected `|w|²` of the noise transform at scale `s`.
pub fn wavelet_spectrum(model: NoiseModel, wavelet: WaveletSpec, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("scale must be positive, got {s}")));
    }
    model.check_wavelet(wavelet)?;
    let f = f_noise(model.alpha, wavelet)?;
    Ok(model.amplitude.powi(2) * f * s.powf(2.0 * model.alpha - 1.0))
}

/// Noise amplitude `A` inferred from the mean `|w|²` in the highest-frequency band,
/// over points that are neither edge-affected nor missing.
pub fn estimate_noise_amplitude(plane: &TransformPlane, alpha: f64) -> Result<f64> {
    let wavelet = plane.wavelet();
    let unit = NoiseModel::new(alpha, 1.0)?;
    let expected_unit = wavelet_spectrum(unit, wavelet, plane.grid.scale(0))?;
    let column = plane.column(0);
    let edge = plane.edge_column(0);
    let (sum, count) = (0..plane.len())
        .filter(|&n| !edge[n] && !plane.missing_mask[n])
        .fold((0.0, 0usize), |(s, c), n| (s + column[n].norm_sqr(), c + 1));
    if count == 0 {
        return Err(Error::Data("no usable points in the highest-frequency band".into()));
    }
    Ok((sum / count as f64 / expected_unit).sqrt())
}

/// White-noise standard deviation from the highest-frequency band.
pub fn estimate_sigma_eps(plane: &TransformPlane) -> Result<f64> {
    estimate_noise_amplitude(plane, 0.0)
}

/// Splits a master seed into independent stream seeds.
pub(crate) fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    let mut state = master;
    for &p in parts {
        state = splitmix(state ^ splitmix(p.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    }
    state
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
