//! End-to-end element analysis: transform, maxima, significance, missing-data
//! rule, isolation, inversion to element parameters and reconstruction.

use std::path::PathBuf;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cwt::{build_grid, fill_gaps, FrequencyGrid, Transformer, TransformPlane};
use crate::error::{Error, Result};
use crate::influence::{isolate, rho_hat, InfluenceRegion, RegionShape, DEFAULT_POINTS};
use crate::maxima::{apply_missing_rule, find_maxima, MaximumPoint, Rejection};
use crate::morse::{zeta_max, ElementSpec, WaveletSpec};
use crate::noise::{
    estimate_noise_amplitude, simulate_maxima_cached, threshold_for_rate, wavelet_spectrum,
    NoiseModel, RateTable, RateTarget, Thresholds,
};
use crate::synth::{Event, EventTrain};

pub const CONFIG_SCHEMA: &str = "element-config/1";

/// How the noise amplitude `A` is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeMode {
    Fixed(f64),
    /// From the mean squared transform in the highest-frequency band.
    Estimated,
}

/// False-detection budget at each scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateSpec {
    /// Expected noise maxima per analyzed series.
    PerSeries(f64),
    PerFootprint(f64),
}

impl RateSpec {
    pub fn target(&self, length: usize) -> RateTarget {
        match *self {
            RateSpec::PerSeries(events) => RateTarget::PerSeries { events, length },
            RateSpec::PerFootprint(r) => RateTarget::PerFootprint(r),
        }
    }

    fn value(&self) -> f64 {
        match *self {
            RateSpec::PerSeries(v) | RateSpec::PerFootprint(v) => v,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    pub schema: String,
    /// Analyzing wavelet order.
    pub beta: f64,
    /// Family parameter shared by wavelet and element.
    pub gamma: f64,
    /// Element function order.
    pub mu: f64,
    /// Noise spectral slope.
    pub alpha: f64,
    pub amplitude: AmplitudeMode,
    pub eta: f64,
    pub density: f64,
    pub packing: f64,
    pub lambda: f64,
    /// Largest tolerated missing fraction within a footprint.
    pub missing_threshold: f64,
    pub rate: RateSpec,
    pub seed: u64,
    pub n_realizations: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            schema: CONFIG_SCHEMA.to_string(),
            beta: 2.0,
            gamma: 2.0,
            mu: 1.0,
            alpha: 0.0,
            amplitude: AmplitudeMode::Estimated,
            eta: 0.05,
            density: 4.0,
            packing: 3.0,
            lambda: 0.5,
            missing_threshold: 0.1,
            rate: RateSpec::PerSeries(1e-3),
            seed: 1,
            n_realizations: 500_000,
        }
    }
}

impl AnalysisConfig {
    /// Checks every parameter before any computation.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.schema != CONFIG_SCHEMA {
            return bad(format!("unsupported config schema {:?}, expected {CONFIG_SCHEMA:?}", self.schema));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be > 0, got {}", self.beta));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be > 0, got {}", self.gamma));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return bad(format!("mu must be >= 0, got {}", self.mu));
        }
        if !(self.alpha >= 0.0 && self.beta > self.alpha - 0.5) {
            return bad(format!("need alpha >= 0 and beta > alpha - 1/2, got alpha = {}", self.alpha));
        }
        if let AmplitudeMode::Fixed(a) = self.amplitude {
            if !(a > 0.0 && a.is_finite()) {
                return bad(format!("fixed noise amplitude must be > 0, got {a}"));
            }
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return bad(format!("lambda must lie in (0, 1), got {}", self.lambda));
        }
        if !(0.0..=1.0).contains(&self.missing_threshold) {
            return bad(format!("missing_threshold must lie in [0, 1], got {}", self.missing_threshold));
        }
        if !(self.rate.value() > 0.0 && self.rate.value().is_finite()) {
            return bad("false-detection rate must be positive".into());
        }
        if self.n_realizations == 0 {
            return bad("n_realizations must be positive".into());
        }
        if !(self.eta > 0.0 && self.eta < 1.0 && self.density > 0.0 && self.packing > 0.0) {
            return bad("grid needs 0 < eta < 1, density > 0 and packing > 0".into());
        }
        Ok(())
    }

    pub fn wavelet(&self) -> Result<WaveletSpec> {
        WaveletSpec::new(self.beta, self.gamma)
    }

    pub fn element(&self) -> Result<ElementSpec> {
        ElementSpec::new(self.mu, self.gamma)
    }

    pub fn region_shape(&self) -> Result<RegionShape> {
        RegionShape::new(self.lambda, self.beta, self.mu, self.gamma)
    }

    pub fn grid(&self, length: usize) -> Result<FrequencyGrid> {
        build_grid(self.wavelet()?, length, self.eta, self.density, self.packing)
    }
}

/// Element parameters read off a maximum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventEstimate {
    pub t_hat: f64,
    pub rho_hat: f64,
    pub omega_rho: f64,
    pub c_hat: Complex64,
    pub source: MaximumPoint,
}

impl EventEstimate {
    pub fn abs_c(&self) -> f64 {
        self.c_hat.norm()
    }

    pub fn phase(&self) -> f64 {
        self.c_hat.arg()
    }
}

/// Inverts a maximum: `ρ̂ = ŝ/s̃_max`, `ω_ρ = ω_μ/ρ̂` and `ĉ = 2ŵ/ζ_max`.
pub fn infer(point: &MaximumPoint, wavelet: WaveletSpec, element: ElementSpec) -> Result<EventEstimate> {
    if wavelet.gamma() != element.gamma() {
        return Err(Error::Config("wavelet and element must share gamma".into()));
    }
    let zmax = zeta_max(wavelet.beta(), element.mu(), element.gamma())?;
    let rho = rho_hat(point, wavelet.beta(), element.mu(), element.gamma())?;
    Ok(EventEstimate {
        t_hat: point.t_index as f64,
        rho_hat: rho,
        omega_rho: element.function().omega_peak() / rho,
        c_hat: point.w_value * (2.0 / zmax.zeta_max),
        source: point.clone(),
    })
}

/// `Σ Re{ĉ ψ_{μ,γ}((t - t̂)/ρ̂)}` at `t = 0..length`.
///
/// Every event contributes at every sample, including the tails of events
/// centered outside the record. Elements are synthesized spectrally; see
/// [`EventTrain::render`].
pub fn reconstruct(events: &[EventEstimate], element: ElementSpec, length: usize) -> Result<Vec<f64>> {
    if length == 0 {
        return Err(Error::Config("reconstruction length must be at least 1".into()));
    }
    if events.is_empty() {
        return Ok(vec![0.0; length]);
    }
    let train = EventTrain::new(
        events.iter().map(|e| Event { t0: e.t_hat, rho: e.rho_hat, c: e.c_hat }).collect(),
        element,
        length,
    )?;
    Ok(train.render())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnalysisResult {
    pub config: AnalysisConfig,
    pub grid: FrequencyGrid,
    pub noise: NoiseModel,
    /// Kept only on request; written separately by front ends.
    #[serde(skip)]
    pub plane: Option<TransformPlane>,
    /// All maxima in canonical order with their flags.
    pub maxima: Vec<MaximumPoint>,
    pub thresholds: Thresholds,
    pub events: Vec<EventEstimate>,
    /// Region of influence of each event, aligned with `events`.
    pub regions: Vec<InfluenceRegion>,
    pub reconstruction: Vec<f64>,
    pub residual: Vec<f64>,
    /// Expected noise-only detections per scale in this series.
    pub expected_false: Vec<f64>,
    pub expected_false_total: f64,
}

impl AnalysisResult {
    pub fn count_significant(&self) -> usize {
        self.maxima.iter().filter(|p| p.flags.significant).count()
    }
}

/// Runs the analysis with an optional rate-table cache and shared tables.
#[derive(Clone, Debug)]
pub struct Analyzer {
    config: AnalysisConfig,
    cache_dir: Option<PathBuf>,
    tables: Option<Arc<Vec<RateTable>>>,
    keep_plane: bool,
}

impl Analyzer {
    pub fn new(config: AnalysisConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { config, cache_dir: None, tables: None, keep_plane: false })
    }

    pub fn config(&self) -> &AnalysisConfig {
        &self.config
    }

    pub fn with_cache_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.cache_dir = Some(dir.into());
        self
    }

    /// Uses precomputed tables, which must match the grid of every analyzed series.
    pub fn with_tables(mut self, tables: Arc<Vec<RateTable>>) -> Self {
        self.tables = Some(tables);
        self
    }

    pub fn keep_plane(mut self, keep: bool) -> Self {
        self.keep_plane = keep;
        self
    }

    /// Noise-maxima tables for a series of `length` samples, simulated or from the cache.
    pub fn rate_tables(&self, length: usize) -> Result<Arc<Vec<RateTable>>> {
        let grid = self.config.grid(length)?;
        if let Some(t) = &self.tables {
            check_tables(t, &grid)?;
            return Ok(Arc::clone(t));
        }
        let unit = NoiseModel::new(self.config.alpha, 1.0)?;
        let tables = simulate_maxima_cached(
            unit,
            &grid,
            self.config.n_realizations,
            self.config.seed,
            self.cache_dir.as_deref(),
        )?;
        Ok(Arc::new(tables))
    }

    pub fn run(&self, x: &[f64], missing: &[bool]) -> Result<AnalysisResult> {
        let cfg = &self.config;
        if x.len() != missing.len() {
            return Err(Error::Data(format!(
                "series has {} values but the missing mask has {}",
                x.len(),
                missing.len()
            )));
        }
        let wavelet = cfg.wavelet()?;
        let element = cfg.element()?;
        let shape = cfg.region_shape()?;
        let grid = cfg.grid(x.len())?;
        let filled = fill_gaps(x, missing)?;
        let plane = Transformer::new(&grid, x.len())?.apply(&filled, missing)?;

        let noise = match cfg.amplitude {
            AmplitudeMode::Fixed(a) => NoiseModel::new(cfg.alpha, a)?,
            AmplitudeMode::Estimated => {
                NoiseModel::new(cfg.alpha, estimate_noise_amplitude(&plane, cfg.alpha)?)?
            }
        };
        let sigmas: Vec<f64> = (0..grid.len())
            .map(|j| wavelet_spectrum(noise, wavelet, grid.scale(j)).map(f64::sqrt))
            .collect::<Result<_>>()?;

        let tables = self.rate_tables(x.len())?;
        let target = cfg.rate.target(x.len());
        let thresholds = threshold_for_rate(&tables, grid.len(), target)?;

        let mut maxima = find_maxima(&plane);
        for p in maxima.iter_mut() {
            p.norm_magnitude = p.grid_magnitude / sigmas[p.scale_index];
            if p.flags.edge {
                p.reject(Rejection::Edge);
            } else {
                let cut = thresholds.cutoffs[p.scale_index];
                if !(p.norm_magnitude >= cut) {
                    p.reject(Rejection::BelowThreshold { threshold: cut });
                }
            }
        }
        apply_missing_rule(&mut maxima, cfg.missing_threshold);
        isolate(&mut maxima, shape)?;

        let events: Vec<EventEstimate> = maxima
            .iter()
            .filter(|p| p.flags.significant && p.flags.isolated)
            .map(|p| infer(p, wavelet, element))
            .collect::<Result<_>>()?;
        let regions = events
            .iter()
            .map(|e| shape.region(e.rho_hat, e.t_hat, DEFAULT_POINTS))
            .collect::<Result<Vec<_>>>()?;
        let reconstruction = reconstruct(&events, element, x.len())?;
        let residual = filled.iter().zip(&reconstruction).map(|(a, b)| a - b).collect();

        let expected_false: Vec<f64> = (0..grid.len())
            .map(|j| match tables.iter().find(|t| t.scale_index == j) {
                Some(t) => {
                    let usable = plane.edge_column(j).iter().filter(|&&e| !e).count() as f64;
                    t.survival_at(thresholds.cutoffs[j]) * usable / t.footprint
                }
                None => 0.0,
            })
            .collect();
        let expected_false_total = expected_false.iter().sum();

        Ok(AnalysisResult {
            config: cfg.clone(),
            grid,
            noise,
            plane: self.keep_plane.then_some(plane),
            maxima,
            thresholds,
            events,
            regions,
            reconstruction,
            residual,
            expected_false,
            expected_false_total,
        })
    }
}

fn check_tables(tables: &[RateTable], grid: &FrequencyGrid) -> Result<()> {
    for j in 1..grid.len().saturating_sub(1) {
        let ok = tables.iter().any(|t| {
            t.scale_index == j && (t.omega_s / grid.omegas[j] - 1.0).abs() < 1e-9
        });
        if !ok {
            return Err(Error::Config(format!(
                "supplied rate tables do not match scale {j} of the frequency grid"
            )));
        }
    }
    Ok(())
}

/// [`Analyzer::run`] without caching.
pub fn run(x: &[f64], missing: &[bool], config: &AnalysisConfig) -> Result<AnalysisResult> {
    Analyzer::new(config.clone())?.run(x, missing)
}
