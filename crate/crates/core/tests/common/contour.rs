//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use element_core::influence::RegionShape;
use element_core::morse::ZetaKernel;
use rayon::prelude::*;

pub const BETAS: [f64; 5] = [0.5, 1.0, 2.0, 4.0, 8.0];
pub const GAMMAS: [f64; 4] = [1.0, 2.0, 3.0, 4.0];
const RAYS: usize = 48;

/// First outward crossing of `f` from positive to non-positive on `(0, r_max]`.
fn first_crossing(f: impl Fn(f64) -> f64, r_max: f64) -> Option<f64> {
    let steps = 400;
    let mut prev = 0.0;
    for k in 1..=steps {
        let r = r_max * k as f64 / steps as f64;
        if f(r) <= 0.0 {
            let (mut lo, mut hi) = (prev, r);
            for _ in 0..50 {
                let mid = 0.5 * (lo + hi);
                if f(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        prev = r;
    }
    None
}

/// Mean relative radial discrepancy between the closed-form region and the
/// `|ζ| = λ ζ_max` contour, along rays about the kernel maximum in
/// coordinates normalized by the closed-form half-extents.
pub fn mean_radial_discrepancy(lambda: f64, beta: f64, gamma: f64) -> f64 {
    let mu = 0.0;
    let shape = RegionShape::new(lambda, beta, mu, gamma).unwrap();
    let kernel = ZetaKernel::new(beta, mu, gamma).unwrap();
    let zmax = kernel.max();
    let (a, b) = shape.real_range().unwrap();
    let s0 = zmax.s_tilde_max;
    let x_unit = shape.half_width(s0).unwrap();
    let y_unit = 0.5 * (b / a).ln();
    let level = lambda * zmax.zeta_max;
    let errs: Vec<f64> = (0..RAYS)
        .into_par_iter()
        .map(|i| {
            let theta = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / RAYS as f64;
            let at = |r: f64| (r * theta.cos() * x_unit, s0 * (r * theta.sin() * y_unit).exp());
            let closed = |r: f64| {
                let (tau, s) = at(r);
                let w2 = shape.half_width(s).map_or(-1.0, |w| w * w);
                w2 - tau * tau
            };
            let numeric = |r: f64| {
                let (tau, s) = at(r);
                kernel.eval(tau, s).norm() - level
            };
            let rc = first_crossing(closed, 4.0).expect("closed-form region is bounded");
            let rn = first_crossing(numeric, 8.0).expect("numerical level set is bounded");
            (rc - rn).abs() / rn
        })
        .collect();
    errs.iter().sum::<f64>() / errs.len() as f64
}

