//! Synthetic event trains and noise.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use rand_xoshiro::Xoshiro256PlusPlus;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::cwt::next_fast_len;
use crate::error::{Error, Result};
use crate::morse::ElementSpec;

/// One planted event: `Re{c ψ_{μ,γ}((t - t0)/ρ)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t0: f64,
    pub rho: f64,
    pub c: Complex64,
}

impl Event {
    /// Scale frequency `ω_ρ = ω_μ / ρ` of the event for an element with peak frequency `omega_mu`.
    pub fn omega_rho(&self, omega_mu: f64) -> f64 {
        omega_mu / self.rho
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventTrain {
    pub events: Vec<Event>,
    pub element: ElementSpec,
    pub length: usize,
}

impl EventTrain {
    pub fn new(events: Vec<Event>, element: ElementSpec, length: usize) -> Result<Self> {
        let omega_mu = element.function().omega_peak();
        for e in &events {
            let w = e.omega_rho(omega_mu);
            if !(e.rho > 0.0 && w > 0.0 && w < PI) {
                return Err(Error::Config(format!("event scale frequency {w} is outside (0, pi)")));
            }
        }
        Ok(Self { events, element, length })
    }

    /// Sum of all events sampled at `0..length`.
    ///
    /// Each event is synthesized from its spectrum `c ρ Ψ(ρω) e^{-iω t0}` on a
    /// periodic domain 32 times the record length, so the slowly decaying
    /// element tails wrap around only negligibly. Content above the Nyquist
    /// frequency is dropped, which is immaterial for `ρ` of a few samples or more.
    pub fn render(&self) -> Vec<f64> {
        let function = self.element.function();
        let n_ext = next_fast_len(32 * self.length.max(64));
        let mut planner = FftPlanner::new();
        let inverse = planner.plan_fft_inverse(n_ext);
        let mut x = vec![0.0; self.length];
        for e in &self.events {
            let mut buf = vec![Complex64::default(); n_ext];
            for (k, b) in buf.iter_mut().enumerate().take(n_ext / 2 + 1) {
                let omega = 2.0 * PI * k as f64 / n_ext as f64;
                let amp = e.rho * function.freq(e.rho * omega);
                if amp != 0.0 {
                    *b = e.c * Complex64::from_polar(amp, -omega * e.t0);
                }
            }
            inverse.process(&mut buf);
            for (v, b) in x.iter_mut().zip(&buf) {
                *v += b.re / n_ext as f64;
            }
        }
        x
    }
}

/// Event spacing in the six-event train; see [`paper_synthetic`].
pub const SYNTHETIC_SPACING: f64 = 2000.0;

/// The six-event test signal: first-order Gaussian elements `ψ_{1,2}` in a
/// 12000-sample record, scale frequencies from `2π/100` down to `2π/1000` in
/// steps of 0.2 decades, phases `(n-1)π/10`, and `|c| = 2/ψ_{1,2}(0)` so that
/// every element peaks at 2.
///
/// Events sit at `1000 + 2000 (n-1)`, evenly filling the record; absolute
/// positions are a convention of this generator.
pub fn paper_synthetic() -> (Vec<f64>, EventTrain) {
    let element = ElementSpec::new(1.0, 2.0).expect("valid element");
    let function = element.function();
    let omega_mu = function.omega_peak();
    let magnitude = 2.0 / crate::morse::center_value(function);
    let events = (0..6)
        .map(|k| {
            let omega_rho = 2.0 * PI / 100.0 * 10f64.powf(-0.2 * k as f64);
            Event {
                t0: 1000.0 + SYNTHETIC_SPACING * k as f64,
                rho: omega_mu / omega_rho,
                c: Complex64::from_polar(magnitude, k as f64 * PI / 10.0),
            }
        })
        .collect();
    let train = EventTrain::new(events, element, 12000).expect("six-event train is valid");
    (train.render(), train)
}

/// Independent Gaussian samples with standard deviation `sigma`.
pub fn white_noise(length: usize, sigma: f64, seed: u64) -> Vec<f64> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("finite sigma");
    (0..length).map(|_| normal.sample(&mut rng)).collect()
}

/// Cumulative sum of white noise with step standard deviation `step_sigma`.
pub fn random_walk(length: usize, step_sigma: f64, seed: u64) -> Vec<f64> {
    let mut acc = 0.0;
    white_noise(length, step_sigma, seed)
        .into_iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}

/// A random walk with its mean removed and its standard deviation set to one.
pub fn red_noise(length: usize, seed: u64) -> Vec<f64> {
    red_noise_with_amplitude(length, seed).0
}

/// [`red_noise`] together with the spectral amplitude `A` of the normalized
/// series, whose spectrum is approximately `A² ω⁻²`.
pub fn red_noise_with_amplitude(length: usize, seed: u64) -> (Vec<f64>, f64) {
    let walk = random_walk(length, 1.0, seed);
    let n = walk.len() as f64;
    let mean = walk.iter().sum::<f64>() / n;
    let std = (walk.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    (walk.iter().map(|v| (v - mean) / std).collect(), 1.0 / std)
}
