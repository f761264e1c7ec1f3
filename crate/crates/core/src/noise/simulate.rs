//! Monte Carlo distribution of noise-only transform maxima.
//!
//! At each scale a 5-vector with the covariance of the center transform value
//! and its four neighbours is drawn as `y = L ε`. The draw is a maximum when
//! `|y₁|` strictly exceeds the other four moduli, and `|y₁|` is then its
//! normalized magnitude.
//!
//! Tail resolution comes from stratification on `|ε₁|`. Because `L` is lower
//! triangular, `|y₁| = L₁₁ |ε₁|`, and `|ε₁|²` is exponential; stratum `k`
//! draws `|ε₁|² = (w_k / L₁₁)² + Exp(1)`, which is exactly the conditional law
//! given `|y₁| > w_k`, and carries probability weight `exp(-(w_k / L₁₁)²)`.
//! Each stratum only contributes values below the next stratum's floor.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use nalgebra::Matrix5;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_distr::{Exp1, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{derive_seed, psd_cholesky, sigma_matrix, NoiseModel};
use crate::cwt::FrequencyGrid;
use crate::error::{Error, Result};

pub const HIST_BINS: usize = 100;
pub const HIST_TOP: f64 = 3.0;
const TAIL_BINS: usize = 150;
const TAIL_TOP: f64 = 6.0;

/// Lower bounds of the magnitude strata.
const STRATA: [f64; 3] = [0.0, 2.0, 3.0];
const CHUNK: u64 = 1 << 18;

/// Expected number of noise maxima per footprint as a function of normalized magnitude.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateTable {
    pub scale_index: usize,
    pub omega_s: f64,
    pub scale: f64,
    pub footprint: f64,
    /// `HIST_BINS + 1` edges spanning `[0, HIST_TOP]`.
    pub bin_edges: Vec<f64>,
    /// Per-bin counts per footprint; the final entry collects everything above `HIST_TOP`.
    pub density: Vec<f64>,
    /// Count per footprint at or above each of `bin_edges`.
    pub survival: Vec<f64>,
    /// Finer survival beyond `HIST_TOP`, for inverting small rates.
    pub tail_edges: Vec<f64>,
    pub tail_survival: Vec<f64>,
    /// Monte Carlo variance of `survival` followed by `tail_survival`.
    pub survival_variance: Vec<f64>,
    /// Raw number of simulated maxima behind each survival value, same layout.
    pub support: Vec<u64>,
    /// Mean normalized magnitude of a noise maximum; absent when none were found.
    pub mean: Option<f64>,
    /// Draws per stratum, or the number of examined points for a direct transform.
    pub n_samples: u64,
    /// Maxima among the unconditional draws.
    pub n_maxima: u64,
    pub seed: u64,
}

/// Raw counts of recorded maxima, binned on both the main and the tail edges.
#[derive(Clone, Debug)]
pub(crate) struct Histogram {
    main: Vec<u64>,
    tail: Vec<u64>,
    sum: f64,
    count: u64,
    /// Maxima found, including those above the recording ceiling.
    pub(crate) maxima: u64,
}

impl Histogram {
    pub(crate) fn new() -> Self {
        Self {
            main: vec![0; HIST_BINS + 1],
            tail: vec![0; TAIL_BINS + 1],
            sum: 0.0,
            count: 0,
            maxima: 0,
        }
    }

    pub(crate) fn record(&mut self, v: f64) {
        let b = ((v / HIST_TOP) * HIST_BINS as f64) as usize;
        self.main[b.min(HIST_BINS)] += 1;
        if v >= HIST_TOP {
            let t = (((v - HIST_TOP) / (TAIL_TOP - HIST_TOP)) * TAIL_BINS as f64) as usize;
            self.tail[t.min(TAIL_BINS)] += 1;
        }
        self.sum += v;
        self.count += 1;
    }

    pub(crate) fn merge(&mut self, other: &Histogram) {
        for (a, b) in self.main.iter_mut().zip(&other.main) {
            *a += b;
        }
        for (a, b) in self.tail.iter_mut().zip(&other.tail) {
            *a += b;
        }
        self.sum += other.sum;
        self.count += other.count;
        self.maxima += other.maxima;
    }
}

/// One stratum's histogram with its weight per recorded maximum, in counts per footprint.
pub(crate) struct Stratum {
    pub weight: f64,
    pub hist: Histogram,
}

impl RateTable {
    pub(crate) fn from_strata(
        scale_index: usize,
        omega_s: f64,
        scale: f64,
        footprint: f64,
        strata: &[Stratum],
        n_samples: u64,
        n_maxima: u64,
        seed: u64,
    ) -> Self {
        let bin_edges: Vec<f64> =
            (0..=HIST_BINS).map(|i| HIST_TOP * i as f64 / HIST_BINS as f64).collect();
        let tail_edges: Vec<f64> = (1..=TAIL_BINS)
            .map(|i| HIST_TOP + (TAIL_TOP - HIST_TOP) * i as f64 / TAIL_BINS as f64)
            .collect();
        let mut density = vec![0.0; HIST_BINS + 1];
        let mut tail_density = vec![0.0; TAIL_BINS + 1];
        let mut main_var = vec![0.0; HIST_BINS + 1];
        let mut tail_var = vec![0.0; TAIL_BINS + 1];
        let mut main_raw = vec![0u64; HIST_BINS + 1];
        let mut tail_raw = vec![0u64; TAIL_BINS + 1];
        let mut weighted_sum = 0.0;
        for st in strata {
            let w = st.weight;
            for (b, &c) in st.hist.main.iter().enumerate() {
                density[b] += w * c as f64;
                main_var[b] += w * w * c as f64;
                main_raw[b] += c;
            }
            for (b, &c) in st.hist.tail.iter().enumerate() {
                tail_density[b] += w * c as f64;
                tail_var[b] += w * w * c as f64;
                tail_raw[b] += c;
            }
            weighted_sum += w * st.hist.sum;
        }
        let suffix = |v: &[f64]| -> Vec<f64> {
            let mut out = vec![0.0; v.len()];
            let mut acc = 0.0;
            for i in (0..v.len()).rev() {
                acc += v[i];
                out[i] = acc;
            }
            out
        };
        let suffix_u = |v: &[u64]| -> Vec<u64> {
            let mut out = vec![0; v.len()];
            let mut acc = 0;
            for i in (0..v.len()).rev() {
                acc += v[i];
                out[i] = acc;
            }
            out
        };
        // Both parts come from one running sum so the junction at HIST_TOP is monotone.
        let tail_suffix = suffix(&tail_density);
        let mut survival = vec![0.0; HIST_BINS + 1];
        survival[HIST_BINS] = tail_suffix[0];
        for i in (0..HIST_BINS).rev() {
            survival[i] = survival[i + 1] + density[i];
        }
        // Tail edge i is the upper edge of tail bin i, so its survival starts at bin i + 1.
        let tail_survival = tail_suffix[1..].to_vec();
        let mut survival_variance = suffix(&main_var);
        survival_variance.extend_from_slice(&suffix(&tail_var)[1..]);
        let mut support = suffix_u(&main_raw);
        support.extend_from_slice(&suffix_u(&tail_raw)[1..]);
        let total = survival[0];
        let mean = (total > 0.0).then(|| weighted_sum / total);
        Self {
            scale_index,
            omega_s,
            scale,
            footprint,
            bin_edges,
            density,
            survival,
            tail_edges,
            tail_survival,
            survival_variance,
            support,
            mean,
            n_samples,
            n_maxima,
            seed,
        }
    }

    /// Expected maxima per footprint, of any magnitude.
    pub fn total_rate(&self) -> f64 {
        self.survival[0]
    }

    /// All survival edges, main then tail.
    pub fn edges(&self) -> impl Iterator<Item = f64> + '_ {
        self.bin_edges.iter().chain(&self.tail_edges).copied()
    }

    /// All survival values, aligned with [`RateTable::edges`].
    pub fn survival_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.survival.iter().chain(&self.tail_survival).copied()
    }

    /// Count per footprint at or above `w`, linearly interpolated between edges.
    pub fn survival_at(&self, w: f64) -> f64 {
        let edges: Vec<f64> = self.edges().collect();
        let values: Vec<f64> = self.survival_values().collect();
        if w <= edges[0] {
            return values[0];
        }
        for i in 1..edges.len() {
            if w <= edges[i] {
                let t = (w - edges[i - 1]) / (edges[i] - edges[i - 1]);
                return values[i - 1] + t * (values[i] - values[i - 1]);
            }
        }
        *values.last().unwrap()
    }
}

/// Draws circular complex Gaussians with unit expected squared modulus.
#[inline]
fn complex_normal<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

/// Full 5-vector `y = L ε`; used to check the simulated covariance.
pub fn draw_vector<R: Rng>(l: &Matrix5<Complex64>, rng: &mut R) -> [Complex64; 5] {
    let eps: [Complex64; 5] = std::array::from_fn(|_| complex_normal(rng));
    std::array::from_fn(|i| (0..=i).map(|k| l[(i, k)] * eps[k]).sum())
}

/// Records maxima from `count` draws with `|ε₁|²` conditioned above `floor²`.
/// Only magnitudes below `ceiling` are recorded.
fn run_chunk(l: &[[Complex64; 5]; 5], floor: f64, ceiling: f64, count: u64, seed: u64) -> Histogram {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut hist = Histogram::new();
    let l00 = l[0][0].re;
    let floor2 = (floor / l00).powi(2);
    'draw: for _ in 0..count {
        let e_mag2 = floor2 + rng.sample::<f64, _>(Exp1);
        let phase = rng.random::<f64>() * TAU;
        let e0 = Complex64::from_polar(e_mag2.sqrt(), phase);
        let m1 = l00 * l00 * e_mag2;
        let mut eps = [e0, Complex64::default(), Complex64::default(), Complex64::default(), Complex64::default()];
        for i in 1..5 {
            eps[i] = complex_normal(&mut rng);
            let row = &l[i];
            let mut y = row[0] * eps[0];
            for k in 1..=i {
                y += row[k] * eps[k];
            }
            if y.norm_sqr() >= m1 {
                continue 'draw;
            }
        }
        hist.maxima += 1;
        let v = m1.sqrt();
        if v < ceiling {
            hist.record(v);
        }
    }
    hist
}

/// Simulates one scale given the Cholesky factor of its covariance matrix.
///
/// `n` draws are made in each stratum; `footprint` converts per-draw rates to
/// rates per footprint.
pub fn simulate_scale(
    l: &Matrix5<Complex64>,
    footprint: f64,
    n: u64,
    seed: u64,
    scale_index: usize,
    omega_s: f64,
    scale: f64,
) -> RateTable {
    let rows: [[Complex64; 5]; 5] = std::array::from_fn(|i| std::array::from_fn(|k| l[(i, k)]));
    let chunks = n.div_ceil(CHUNK);
    let jobs: Vec<(usize, u64)> =
        (0..STRATA.len()).flat_map(|k| (0..chunks).map(move |c| (k, c))).collect();
    let results: Vec<Histogram> = jobs
        .par_iter()
        .map(|&(k, c)| {
            let count = CHUNK.min(n - c * CHUNK);
            let ceiling = STRATA.get(k + 1).copied().unwrap_or(f64::INFINITY);
            let s = derive_seed(seed, &[scale_index as u64, k as u64, c]);
            run_chunk(&rows, STRATA[k], ceiling, count, s)
        })
        .collect();
    let l00 = rows[0][0].re;
    let mut strata: Vec<Stratum> = STRATA
        .iter()
        .map(|&floor| Stratum {
            weight: (-(floor / l00).powi(2)).exp() * footprint / n as f64,
            hist: Histogram::new(),
        })
        .collect();
    for (&(k, _), h) in jobs.iter().zip(&results) {
        strata[k].hist.merge(h);
    }
    let n_maxima = strata[0].hist.maxima;
    RateTable::from_strata(scale_index, omega_s, scale, footprint, &strata, n, n_maxima, seed)
}

/// Noise-maxima rate tables for every interior scale of `grid`.
pub fn simulate_maxima(
    model: NoiseModel,
    grid: &FrequencyGrid,
    n_realizations: u64,
    seed: u64,
) -> Result<Vec<RateTable>> {
    if n_realizations == 0 {
        return Err(Error::Config("n_realizations must be positive".into()));
    }
    if grid.len() < 3 {
        return Err(Error::Config("noise simulation needs at least three scales".into()));
    }
    (1..grid.len() - 1)
        .map(|j| {
            let s = grid.scale(j);
            let sigma = sigma_matrix(model, grid.wavelet, s, grid.r)?;
            let l = psd_cholesky(&sigma).map_err(|e| {
                Error::Numerical(format!(
                    "{e} (s={s}, r={}, alpha={}, beta={}, gamma={})",
                    grid.r,
                    model.alpha,
                    grid.wavelet.beta(),
                    grid.wavelet.gamma()
                ))
            })?;
            Ok(simulate_scale(&l, grid.footprint(j), n_realizations, seed, j, grid.omegas[j], s))
        })
        .collect()
}
