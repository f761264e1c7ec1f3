//! Frequency grid and the amplitude-normalized continuous wavelet transform.
//!
//! The transform is computed in the frequency domain as
//! `w(τ, s) = (1/N) Σ_k Ψ(s ω_k) X_k e^{i ω_k τ}` over nonnegative frequencies
//! only, which yields the analytic, 1/s-normalized transform of a real series.
//! Series are extended by whole-sample mirror reflection, `x_{-k} = x_k`,
//! before transforming.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::morse::WaveletSpec;

/// Geometric grid of analysis frequencies, highest first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    /// Strictly decreasing radian frequencies `ω_{s_j}`.
    pub omegas: Vec<f64>,
    /// Ratio of successive scales.
    pub r: f64,
    pub eta: f64,
    pub density: f64,
    pub packing: f64,
    /// Series length the grid was designed for.
    pub length: usize,
    pub wavelet: WaveletSpec,
}

impl FrequencyGrid {
    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    /// Scale `s_j = ω_peak / ω_{s_j}`.
    pub fn scale(&self, j: usize) -> f64 {
        self.wavelet.omega_peak() / self.omegas[j]
    }

    pub fn scales(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.scale(j)).collect()
    }

    /// Footprint `L(s_j)` in samples.
    pub fn footprint(&self, j: usize) -> f64 {
        self.wavelet.footprint_coefficient() * self.scale(j)
    }

    /// Grid built from explicit frequencies, keeping the design parameters of `self`.
    pub fn with_omegas(&self, omegas: Vec<f64>) -> Result<Self> {
        if omegas.is_empty() || omegas.windows(2).any(|w| !(w[0] > w[1])) {
            return Err(Error::Config("grid frequencies must be strictly decreasing".into()));
        }
        if omegas.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::Config("grid frequencies must be positive".into()));
        }
        Ok(Self { omegas, ..self.clone() })
    }

    /// Stable digest of the grid frequencies and wavelet, for cache keys.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.wavelet.beta().to_le_bytes());
        h.update(self.wavelet.gamma().to_le_bytes());
        for w in &self.omegas {
            h.update(w.to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Lays down the geometric frequency grid for a series of length `m`.
///
/// The highest frequency is the one at which the wavelet has decayed to
/// `η` times its peak at the Nyquist frequency. Frequencies then step down by
/// `r = 1 + 1/(D P)` while staying at or above `p 2√2 P / M`, so that at least
/// `p` footprints fit in the series.
pub fn build_grid(
    wavelet: WaveletSpec,
    m: usize,
    eta: f64,
    density: f64,
    packing: f64,
) -> Result<FrequencyGrid> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Config(format!("eta must lie in (0, 1), got {eta}")));
    }
    if !(density > 0.0 && density.is_finite()) {
        return Err(Error::Config(format!("density D must be positive, got {density}")));
    }
    if !(packing > 0.0 && packing.is_finite()) {
        return Err(Error::Config(format!("packing number p must be positive, got {packing}")));
    }
    if m < 16 {
        return Err(Error::Config(format!("series length must be at least 16, got {m}")));
    }
    if wavelet.beta() <= 0.0 {
        return Err(Error::Config("grid requires a wavelet with beta > 0".into()));
    }
    let p_bc = wavelet.time_bandcenter();
    let omega_peak = wavelet.omega_peak();
    let omega_eta = decay_frequency(wavelet, eta);
    let omega_high = PI * omega_peak / omega_eta;
    let omega_low = packing * 2.0 * std::f64::consts::SQRT_2 * p_bc / m as f64;
    if omega_high <= omega_low {
        return Err(Error::Config(format!(
            "series of length {m} is too short: highest frequency {omega_high:.4} is not above lowest {omega_low:.4}"
        )));
    }
    let r = 1.0 + 1.0 / (density * p_bc);
    let mut omegas = vec![omega_high];
    loop {
        let next = omega_high / r.powi(omegas.len() as i32);
        if next < omega_low {
            break;
        }
        omegas.push(next);
    }
    Ok(FrequencyGrid { omegas, r, eta, density, packing, length: m, wavelet })
}

/// Frequency above the peak at which `Ψ(ω) = 2η`, by bisection to 1e-12 relative.
fn decay_frequency(wavelet: WaveletSpec, eta: f64) -> f64 {
    let target = 2.0 * eta;
    let mut lo = wavelet.omega_peak();
    let mut hi = 2.0 * lo;
    while wavelet.freq(hi) > target {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if wavelet.freq(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Wavelet transform of a series on a frequency grid.
#[derive(Clone, Debug)]
pub struct TransformPlane {
    /// Column-major by scale: `values[j * len + n]`.
    values: Vec<Complex64>,
    len: usize,
    pub grid: FrequencyGrid,
    pub missing_mask: Vec<bool>,
    edge_mask: Vec<bool>,
}

impl TransformPlane {
    /// Number of time samples.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn n_scales(&self) -> usize {
        self.grid.len()
    }

    pub fn wavelet(&self) -> WaveletSpec {
        self.grid.wavelet
    }

    pub fn get(&self, n: usize, j: usize) -> Complex64 {
        self.values[j * self.len + n]
    }

    pub fn column(&self, j: usize) -> &[Complex64] {
        &self.values[j * self.len..(j + 1) * self.len]
    }

    /// True where time `n` lies within half a footprint of either end at scale `j`.
    pub fn is_edge(&self, n: usize, j: usize) -> bool {
        self.edge_mask[j * self.len + n]
    }

    pub fn edge_column(&self, j: usize) -> &[bool] {
        &self.edge_mask[j * self.len..(j + 1) * self.len]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// Smallest `n ≥ min` of the form `2^a 3^b 5^c`.
pub fn next_fast_len(min: usize) -> usize {
    let mut n = min.max(1);
    loop {
        let mut k = n;
        for f in [2, 3, 5] {
            while k % f == 0 {
                k /= f;
            }
        }
        if k == 1 {
            return n;
        }
        n += 1;
    }
}

/// Reusable transform for series of one length on one grid.
pub struct Transformer {
    grid: FrequencyGrid,
    len: usize,
    ext_len: usize,
    offset: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Per scale, `Ψ(s ω_k)` for `k = 0..` up to the last nonzero value, Nyquist halved.
    filters: Vec<Vec<f64>>,
    half_footprints: Vec<f64>,
}

impl Transformer {
    pub fn new(grid: &FrequencyGrid, len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::Data("series must have at least two samples".into()));
        }
        let wavelet = grid.wavelet;
        let ext_len = next_fast_len(2 * len);
        let offset = (ext_len - len) / 2;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(ext_len);
        let inverse = planner.plan_fft_inverse(ext_len);
        let cutoff = wavelet.spectral_cutoff();
        let nyquist = ext_len / 2;
        let filters = (0..grid.len())
            .map(|j| {
                let s = grid.scale(j);
                let kmax = ((cutoff / s) * ext_len as f64 / (2.0 * PI)).ceil() as usize;
                let kmax = kmax.min(nyquist);
                let mut f: Vec<f64> = (0..=kmax)
                    .map(|k| wavelet.freq(s * 2.0 * PI * k as f64 / ext_len as f64))
                    .collect();
                if kmax == nyquist && ext_len % 2 == 0 {
                    f[kmax] *= 0.5;
                }
                f
            })
            .collect();
        let half_footprints = (0..grid.len()).map(|j| 0.5 * grid.footprint(j)).collect();
        Ok(Self {
            grid: grid.clone(),
            len,
            ext_len,
            offset,
            forward,
            inverse,
            filters,
            half_footprints,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn apply(&self, x: &[f64], missing: &[bool]) -> Result<TransformPlane> {
        if x.len() != self.len || missing.len() != self.len {
            return Err(Error::Data(format!(
                "expected {} samples and mask entries, got {} and {}",
                self.len,
                x.len(),
                missing.len()
            )));
        }
        let filled = fill_gaps(x, missing)?;
        let mut spectrum: Vec<Complex64> = (0..self.ext_len)
            .map(|i| {
                let k = mirror_index(i as isize - self.offset as isize, self.len);
                Complex64::new(filled[k], 0.0)
            })
            .collect();
        self.forward.process(&mut spectrum);

        let len = self.len;
        let norm = 1.0 / self.ext_len as f64;
        let mut values = vec![Complex64::default(); len * self.grid.len()];
        values.par_chunks_mut(len).zip(&self.filters).for_each(|(out, filter)| {
            let mut buf = vec![Complex64::default(); self.ext_len];
            for (k, &g) in filter.iter().enumerate() {
                buf[k] = spectrum[k] * g;
            }
            self.inverse.process(&mut buf);
            for (o, v) in out.iter_mut().zip(&buf[self.offset..self.offset + len]) {
                *o = v * norm;
            }
        });

        let mut edge_mask = vec![false; len * self.grid.len()];
        for (j, col) in edge_mask.chunks_mut(len).enumerate() {
            let half = self.half_footprints[j];
            for (n, e) in col.iter_mut().enumerate() {
                let dist = n.min(len - 1 - n) as f64;
                *e = dist < half;
            }
        }
        Ok(TransformPlane {
            values,
            len,
            grid: self.grid.clone(),
            missing_mask: missing.to_vec(),
            edge_mask,
        })
    }
}

/// Transforms `x`, treating samples flagged in `missing` as gaps.
pub fn transform(x: &[f64], missing: &[bool], grid: &FrequencyGrid) -> Result<TransformPlane> {
    Transformer::new(grid, x.len())?.apply(x, missing)
}

/// Maps an index on the infinite whole-sample symmetric extension back into `0..len`.
fn mirror_index(k: isize, len: usize) -> usize {
    let period = 2 * (len as isize - 1);
    let mut k = k.rem_euclid(period);
    if k >= len as isize {
        k = period - k;
    }
    k as usize
}

/// Linearly interpolates interior gaps; runs touching an end take the nearest valid value.
pub fn fill_gaps(x: &[f64], missing: &[bool]) -> Result<Vec<f64>> {
    let valid: Vec<usize> = (0..x.len()).filter(|&i| !missing[i]).collect();
    if valid.is_empty() {
        return Err(Error::Data("every sample is missing".into()));
    }
    if let Some(&i) = valid.iter().find(|&&i| !x[i].is_finite()) {
        return Err(Error::Data(format!("non-finite value at sample {i}")));
    }
    let mut out = x.to_vec();
    let first = valid[0];
    let last = *valid.last().unwrap();
    for v in out.iter_mut().take(first) {
        *v = x[first];
    }
    for v in out.iter_mut().skip(last + 1) {
        *v = x[last];
    }
    for pair in valid.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let span = (b - a) as f64;
        for (i, v) in out.iter_mut().enumerate().take(b).skip(a + 1) {
            let t = (i - a) as f64 / span;
            *v = x[a] + t * (x[b] - x[a]);
        }
    }
    Ok(out)
}

/// Outcome of comparing a transform against that of a time-stretched copy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub rho: usize,
    /// Largest `||w_ρ(ρτ, ρs)| - |w(τ, s)||` over interior points, relative to the peak of `|w|`.
    pub max_discrepancy: f64,
    pub peak_original: f64,
    pub peak_stretched: f64,
}

/// Checks amplitude normalization: stretching the input by an integer factor
/// `ρ` should rescale both axes of `|w|` by `ρ` and leave its values unchanged.
///
/// The stretched series is band-limited interpolation of the mirror-extended
/// input, and it is analyzed on the grid frequencies divided by `ρ`.
pub fn scaling_check(x: &[f64], grid: &FrequencyGrid, rho: usize) -> Result<ScalingReport> {
    if rho == 0 {
        return Err(Error::Config("stretch factor must be a positive integer".into()));
    }
    let m = x.len();
    let missing = vec![false; m];
    let original = transform(x, &missing, grid)?;
    let stretched_x = if rho == 1 { x.to_vec() } else { stretch(x, rho) };
    let stretched_grid = grid.with_omegas(grid.omegas.iter().map(|w| w / rho as f64).collect())?;
    let stretched = transform(&stretched_x, &vec![false; stretched_x.len()], &stretched_grid)?;

    let mut peak_original = 0.0f64;
    let mut peak_stretched = 0.0f64;
    let mut worst = 0.0f64;
    for j in 0..grid.len() {
        for n in 0..m {
            let a = original.get(n, j).norm();
            peak_original = peak_original.max(a);
            peak_stretched = peak_stretched.max(stretched.get(n * rho, j).norm());
            if original.is_edge(n, j) {
                continue;
            }
            let b = stretched.get(n * rho, j).norm();
            worst = worst.max((a - b).abs());
        }
    }
    let max_discrepancy = if peak_original > 0.0 { worst / peak_original } else { 0.0 };
    Ok(ScalingReport { rho, max_discrepancy, peak_original, peak_stretched })
}

/// Band-limited resampling of `x` onto a grid `rho` times finer, exact at the original samples.
fn stretch(x: &[f64], rho: usize) -> Vec<f64> {
    let m = x.len();
    let period = 2 * (m - 1);
    let mut planner = FftPlanner::new();
    let mut spec: Vec<Complex64> =
        (0..period).map(|i| Complex64::new(x[mirror_index(i as isize, m)], 0.0)).collect();
    planner.plan_fft_forward(period).process(&mut spec);
    let big = period * rho;
    let mut padded = vec![Complex64::default(); big];
    let half = period / 2;
    for k in 0..half {
        padded[k] = spec[k];
        if k > 0 {
            padded[big - k] = spec[period - k];
        }
    }
    // The Nyquist bin of the short series is split between ±π.
    padded[half] = spec[half] * 0.5;
    padded[big - half] = spec[half] * 0.5;
    planner.plan_fft_inverse(big).process(&mut padded);
    let scale = 1.0 / period as f64;
    padded[..(m - 1) * rho + 1].iter().map(|v| v.re * scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morse::ZetaKernel;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn morse22() -> WaveletSpec {
        WaveletSpec::new(2.0, 2.0).unwrap()
    }

    #[test]
    fn synthetic_grid_band_count() {
        let g = build_grid(morse22(), 12000, 0.05, 4.0, 3.0).unwrap();
        assert_eq!(g.len(), 59);
        assert_eq!(g.r, 1.125);
        let low = 3.0 * 2.0 * 2f64.sqrt() * 2.0 / 12000.0;
        assert!(*g.omegas.last().unwrap() >= low);
        assert!(g.omegas.last().unwrap() / g.r < low);
    }

    #[test]
    fn grid_top_satisfies_nyquist_decay() {
        let w = morse22();
        let g = build_grid(w, 1000, 0.05, 4.0, 3.0).unwrap();
        let s = g.scale(0);
        assert_relative_eq!(w.freq(PI * s), 0.1, max_relative = 1e-9);
    }

    #[test]
    fn short_series_is_rejected() {
        let w = WaveletSpec::new(8.0, 2.0).unwrap();
        assert!(matches!(build_grid(w, 16, 0.05, 4.0, 3.0), Err(Error::Config(_))));
        assert!(build_grid(morse22(), 10, 0.05, 4.0, 3.0).is_err());
        assert!(build_grid(morse22(), 1000, 1.5, 4.0, 3.0).is_err());
    }

    #[test]
    fn fast_lengths() {
        assert_eq!(next_fast_len(1), 1);
        assert_eq!(next_fast_len(7), 8);
        assert_eq!(next_fast_len(24000), 24000);
        assert_eq!(next_fast_len(24001), 24300);
        assert_eq!(next_fast_len(121), 125);
    }

    #[test]
    fn mirror_extension_indices() {
        let got: Vec<usize> = (-4..9).map(|k| mirror_index(k, 4)).collect();
        assert_eq!(got, vec![2, 3, 2, 1, 0, 1, 2, 3, 2, 1, 0, 1, 2]);
    }

    #[test]
    fn gap_filling() {
        let nan = f64::NAN;
        let x = [nan, 1.0, nan, nan, 4.0, nan];
        let m = [true, false, true, true, false, true];
        assert_eq!(fill_gaps(&x, &m).unwrap(), vec![1.0, 1.0, 2.0, 3.0, 4.0, 4.0]);
        assert!(fill_gaps(&[1.0, 2.0], &[true, true]).is_err());
        assert!(fill_gaps(&[1.0, nan], &[false, false]).is_err());
    }

    #[test]
    fn sinusoid_peaks_at_its_amplitude() {
        let w = morse22();
        let g = build_grid(w, 4000, 0.05, 4.0, 3.0).unwrap();
        let j0 = g.len() / 2;
        let omega0 = g.omegas[j0];
        let c = 1.7;
        let x: Vec<f64> = (0..4000).map(|n| c * (omega0 * n as f64).cos()).collect();
        let plane = transform(&x, &vec![false; 4000], &g).unwrap();
        let mut best = (0.0, 0);
        for j in 0..g.len() {
            let v = plane.get(2000, j).norm();
            if v > best.0 {
                best = (v, j);
            }
        }
        assert_eq!(best.1, j0);
        assert!((best.0 - c).abs() < 0.01 * c);
    }

    #[test]
    fn zero_input_gives_zero_plane() {
        let g = build_grid(morse22(), 256, 0.05, 4.0, 3.0).unwrap();
        let plane = transform(&vec![0.0; 256], &vec![false; 256], &g).unwrap();
        assert!(plane.values().iter().all(|v| *v == Complex64::default()));
        assert_eq!(plane.len(), 256);
        assert_eq!(plane.n_scales(), g.len());
    }

    #[test]
    fn edge_mask_follows_half_footprint() {
        let g = build_grid(morse22(), 500, 0.05, 4.0, 3.0).unwrap();
        let plane = transform(&vec![1.0; 500], &vec![false; 500], &g).unwrap();
        for j in 0..g.len() {
            let half = 0.5 * g.footprint(j);
            for n in 0..500 {
                let dist = n.min(499 - n) as f64;
                assert_eq!(plane.is_edge(n, j), dist < half);
            }
        }
    }

    #[test]
    fn element_transform_matches_zeta() {
        let w = morse22();
        let m = 2048;
        let g = build_grid(w, m, 0.05, 4.0, 3.0).unwrap();
        let rho = 12.0;
        let t0 = 1000.0;
        let c = Complex64::new(0.8, -0.5);
        let element = WaveletSpec::new(0.0, 2.0).unwrap();
        let eval = crate::morse::MorseEvaluator::new(element);
        let x: Vec<f64> =
            (0..m).map(|n| (c * eval.eval((n as f64 - t0) / rho)).re).collect();
        let plane = transform(&x, &vec![false; m], &g).unwrap();
        let kernel = ZetaKernel::new(2.0, 0.0, 2.0).unwrap();
        let peak = 0.5 * c.norm() * kernel.max().zeta_max;
        for j in (0..g.len()).step_by(3) {
            let s = g.scale(j);
            if s > 3.0 * rho {
                continue;
            }
            for n in (900..1100).step_by(7) {
                let expected = 0.5 * c * kernel.eval((n as f64 - t0) / rho, s / rho);
                let got = plane.get(n, j);
                assert!((got - expected).norm() < 1e-3 * peak, "j={j} n={n}");
            }
        }
    }

    #[test]
    fn scaling_identity_and_stretch() {
        let w = morse22();
        let m = 1024;
        let g = build_grid(w, m, 0.05, 4.0, 6.0).unwrap();
        let element = WaveletSpec::new(1.0, 2.0).unwrap();
        let eval = crate::morse::MorseEvaluator::new(element);
        let x: Vec<f64> = (0..m).map(|n| eval.eval((n as f64 - 500.0) / 15.0).re).collect();
        let r1 = scaling_check(&x, &g, 1).unwrap();
        assert_eq!(r1.max_discrepancy, 0.0);
        let r2 = scaling_check(&x, &g, 2).unwrap();
        assert!(r2.max_discrepancy < 0.02, "{r2:?}");

        let omega0 = g.omegas[g.len() / 2];
        let sinus: Vec<f64> = (0..m).map(|n| 2.0 * (omega0 * n as f64).cos()).collect();
        let r = scaling_check(&sinus, &g, 2).unwrap();
        assert!((r.peak_stretched - r.peak_original).abs() < 0.01 * r.peak_original);
    }

    #[test]
    fn real_part_halves_the_analytic_transform() {
        let w = morse22();
        let m = 1024;
        let g = build_grid(w, m, 0.05, 4.0, 3.0).unwrap();
        let element = WaveletSpec::new(3.0, 2.0).unwrap();
        let eval = crate::morse::MorseEvaluator::new(element);
        let z: Vec<Complex64> = (0..m).map(|n| eval.eval((n as f64 - 512.0) / 10.0)).collect();
        let mask = vec![false; m];
        let re = transform(&z.iter().map(|v| v.re).collect::<Vec<_>>(), &mask, &g).unwrap();
        let im = transform(&z.iter().map(|v| v.im).collect::<Vec<_>>(), &mask, &g).unwrap();
        // For analytic z, w[Re z] = w[z]/2 and w[z] = w[Re z] + i w[Im z], so w[Im z] = -i w[Re z].
        let peak = re.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        for j in (0..g.len()).filter(|&j| g.footprint(j) < 200.0) {
            for n in 300..700 {
                let diff = im.get(n, j) + Complex64::i() * re.get(n, j);
                assert!(diff.norm() < 1e-5 * peak, "j={j} n={n}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn transform_is_linear(
            xs in proptest::collection::vec(-10.0f64..10.0, 64),
            ys in proptest::collection::vec(-10.0f64..10.0, 64),
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
        ) {
            let g = build_grid(morse22(), 64, 0.05, 4.0, 1.0).unwrap();
            let mask = vec![false; 64];
            let combo: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| a * x + b * y).collect();
            let px = transform(&xs, &mask, &g).unwrap();
            let py = transform(&ys, &mask, &g).unwrap();
            let pc = transform(&combo, &mask, &g).unwrap();
            let scale = 1.0 + px.values().iter().chain(py.values()).map(|v| v.norm()).fold(0.0, f64::max);
            for i in 0..pc.values().len() {
                let expect = px.values()[i] * a + py.values()[i] * b;
                prop_assert!((pc.values()[i] - expect).norm() < 1e-12 * scale * 10.0);
            }
        }

        #[test]
        fn grid_is_geometric(
            beta in 0.5f64..8.0,
            gamma in 1.0f64..4.0,
            m in 200usize..20000,
            density in 1.0f64..10.0,
        ) {
            let w = WaveletSpec::new(beta, gamma).unwrap();
            if let Ok(g) = build_grid(w, m, 0.1, density, 2.0) {
                prop_assert_eq!(g.r, 1.0 + 1.0 / (density * w.time_bandcenter()));
                for pair in g.omegas.windows(2) {
                    prop_assert!(pair[0] > pair[1]);
                    prop_assert!((pair[0] / pair[1] / g.r - 1.0).abs() < 1e-12);
                }
                let low = 2.0 * 2.0 * 2f64.sqrt() * w.time_bandcenter() / m as f64;
                prop_assert!(*g.omegas.last().unwrap() >= low);
            }
        }
    }
}
