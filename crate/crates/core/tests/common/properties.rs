//! Property checks shared by the `properties` and `acceptance` targets.
//!
//! Each check drives its own runner so it can be called from any test and
//! timed as a unit.

use element_core::cwt::{build_grid, scaling_check, transform};
use element_core::influence::{isolate, rho_hat, RegionShape, DEFAULT_POINTS};
use element_core::maxima::{Flags, MaximumPoint};
use element_core::morse::{MorseEvaluator, WaveletSpec};
use element_core::noise::{psd_cholesky, sigma_matrix, simulate_scale, NoiseModel};
use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

pub type Outcome = Result<(), String>;

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

fn w22() -> WaveletSpec {
    WaveletSpec::new(2.0, 2.0).unwrap()
}

/// For an analytic `z`, the transform of `Im z` is `-i` times that of `Re z`.
/// Orders `μ >= 1` keep the imaginary part compact enough for a finite record.
pub fn analyticity(cases: u32) -> Outcome {
    let m = 512;
    let g = build_grid(w22(), m, 0.05, 4.0, 3.0).unwrap();
    let mask = vec![false; m];
    runner(cases)
        .run(&(1.0f64..4.0, 1.0f64..3.0, 4.0f64..12.0, 200.0f64..312.0), |(mu, gamma, rho, t0)| {
            let eval = MorseEvaluator::new(WaveletSpec::new(mu, gamma).unwrap());
            let z: Vec<Complex64> = (0..m).map(|n| eval.eval((n as f64 - t0) / rho)).collect();
            let re = transform(&z.iter().map(|v| v.re).collect::<Vec<_>>(), &mask, &g).unwrap();
            let im = transform(&z.iter().map(|v| v.im).collect::<Vec<_>>(), &mask, &g).unwrap();
            let peak = re.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
            for j in (0..g.len()).filter(|&j| g.footprint(j) < 60.0) {
                for n in 150..362 {
                    let diff = im.get(n, j) + Complex64::i() * re.get(n, j);
                    prop_assert!(diff.norm() < 1e-4 * peak, "j={} n={}: {}", j, n, diff.norm() / peak);
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn linearity(cases: u32) -> Outcome {
    let g = build_grid(w22(), 96, 0.05, 4.0, 1.0).unwrap();
    let mask = vec![false; 96];
    let series = || proptest::collection::vec(-10.0f64..10.0, 96);
    runner(cases)
        .run(&(series(), series(), -3.0f64..3.0, -3.0f64..3.0), |(xs, ys, a, b)| {
            let combo: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| a * x + b * y).collect();
            let px = transform(&xs, &mask, &g).unwrap();
            let py = transform(&ys, &mask, &g).unwrap();
            let pc = transform(&combo, &mask, &g).unwrap();
            let scale = 1.0 + px.values().iter().chain(py.values()).map(|v| v.norm()).fold(0.0, f64::max);
            for i in 0..pc.values().len() {
                let expect = px.values()[i] * a + py.values()[i] * b;
                prop_assert!((pc.values()[i] - expect).norm() < 1e-11 * scale);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Stretching the input by an integer factor rescales both transform axes
/// and leaves the modulus unchanged.
pub fn scaling_invariance(cases: u32) -> Outcome {
    let m = 512;
    let g = build_grid(w22(), m, 0.05, 4.0, 6.0).unwrap();
    runner(cases)
        .run(&(0.5f64..3.0, 8.0f64..20.0, 200.0f64..312.0, 2usize..4), |(mu, rho, t0, k)| {
            let eval = MorseEvaluator::new(WaveletSpec::new(mu, 2.0).unwrap());
            let x: Vec<f64> = (0..m).map(|n| eval.eval((n as f64 - t0) / rho).re).collect();
            let report = scaling_check(&x, &g, k).unwrap();
            prop_assert!(report.max_discrepancy < 0.02, "{:?}", report);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn sigma_hermitian_psd(cases: u32) -> Outcome {
    runner(cases)
        .run(
            &(0.0f64..1.5, 1.6f64..6.0, 1.0f64..4.0, -0.5f64..6.0, 2.0f64..8.0),
            |(alpha, beta, gamma, log_s, density)| {
                let w = WaveletSpec::new(beta, gamma).unwrap();
                let model = NoiseModel::new(alpha, 1.0).unwrap();
                let r = 1.0 + 1.0 / (density * w.time_bandcenter());
                let m = sigma_matrix(model, w, log_s.exp(), r).unwrap();
                prop_assert!((m - m.adjoint()).norm() < 1e-12);
                let eig = SymmetricEigen::new(m).eigenvalues;
                prop_assert!(eig.min() > -1e-10 * eig.max());
                let l = psd_cholesky(&m).unwrap();
                prop_assert!((l * l.adjoint() - m).norm() < 1e-8);
                Ok(())
            },
        )
        .map_err(|e| e.to_string())
}

pub fn survival_monotone(cases: u32) -> Outcome {
    runner(cases)
        .run(&(0.0f64..1.2, 0.0f64..5.0, any::<u64>(), 0.0f64..8.0), |(alpha, log_s, seed, w)| {
            let wavelet = w22();
            let model = NoiseModel::new(alpha, 1.0).unwrap();
            let s = log_s.exp();
            let r = 1.0 + 1.0 / (4.0 * wavelet.time_bandcenter());
            let l = psd_cholesky(&sigma_matrix(model, wavelet, s, r).unwrap()).unwrap();
            let t = simulate_scale(&l, 10.0, 4000, seed, 3, 1.0 / s, s);
            let all: Vec<f64> = t.survival_values().collect();
            prop_assert!(all.windows(2).all(|p| p[0] >= p[1]));
            prop_assert!(t.density.iter().all(|&d| d >= 0.0));
            prop_assert!(t.survival_at(w) >= t.survival_at(w + 0.1));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn point(t: usize, omega_s: f64, magnitude: f64) -> MaximumPoint {
    MaximumPoint {
        t_index: t,
        scale_index: 0,
        omega_s,
        w_value: Complex64::new(magnitude, 0.0),
        magnitude,
        grid_magnitude: magnitude,
        norm_magnitude: magnitude,
        missing_fraction: 0.0,
        flags: Flags { edge: false, significant: true, isolated: false },
        rejection: None,
    }
}

pub fn isolation_idempotent(cases: u32) -> Outcome {
    let shape = RegionShape::new(0.5, 2.0, 1.0, 2.0).unwrap();
    let points = proptest::collection::vec((0usize..400, -4.0f64..-0.5, 0.5f64..5.0), 1..25).prop_map(|v| {
        v.into_iter().map(|(t, lw, m)| point(t, lw.exp(), (m * 4.0).round() / 4.0)).collect::<Vec<_>>()
    });
    runner(cases)
        .run(&points, |pts| {
            let mut once = pts.clone();
            isolate(&mut once, shape).unwrap();
            let mut twice = once.clone();
            isolate(&mut twice, shape).unwrap();
            prop_assert_eq!(&once, &twice);
            for a in once.iter().filter(|p| p.flags.isolated) {
                let region = shape.region(rho_hat(a, 2.0, 1.0, 2.0).unwrap(), a.t_index as f64, DEFAULT_POINTS).unwrap();
                for b in once.iter().filter(|p| p.flags.isolated && p.magnitude > a.magnitude) {
                    prop_assert!(!region.contains(b.t_index as f64, b.omega_s));
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Every suite with its standalone case count.
pub const SUITES: [(&str, fn(u32) -> Outcome, u32); 6] = [
    ("analyticity", analyticity, 16),
    ("linearity", linearity, 32),
    ("scaling invariance", scaling_invariance, 8),
    ("sigma hermitian psd", sigma_hermitian_psd, 64),
    ("survival monotonicity", survival_monotone, 64),
    ("isolation idempotence", isolation_idempotent, 128),
];
