//! Local modulus maxima of the transform plane.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cwt::TransformPlane;

/// Why a maximum was dropped from the event list.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Rejection {
    /// Within half a footprint of a series end; never tested for significance.
    Edge,
    MissingData { fraction: f64 },
    BelowThreshold { threshold: f64 },
    NotIsolated { by: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Flags {
    /// Within half a footprint of a series end at the originating scale.
    pub edge: bool,
    /// Cleared by the missing-data rule and by thresholding.
    pub significant: bool,
    pub isolated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaximumPoint {
    pub t_index: usize,
    pub scale_index: usize,
    /// Frequency of the parabolic vertex in log frequency.
    pub omega_s: f64,
    pub w_value: Complex64,
    pub magnitude: f64,
    /// Modulus at the originating grid point, before refinement.
    pub grid_magnitude: f64,
    /// Grid modulus divided by the noise standard deviation at the originating scale.
    pub norm_magnitude: f64,
    pub missing_fraction: f64,
    pub flags: Flags,
    pub rejection: Option<Rejection>,
}

impl MaximumPoint {
    /// Scale `ω_peak / ω_s` of the refined maximum.
    pub fn scale(&self, omega_peak: f64) -> f64 {
        omega_peak / self.omega_s
    }

    pub fn reject(&mut self, why: Rejection) {
        self.flags.significant = false;
        if self.rejection.is_none() {
            self.rejection = Some(why);
        }
    }
}

/// True when `|w(n, j)|` strictly exceeds its four grid neighbours; false on the border.
pub fn is_strict_max(plane: &TransformPlane, n: usize, j: usize) -> bool {
    if n == 0 || j == 0 || n + 1 >= plane.len() || j + 1 >= plane.n_scales() {
        return false;
    }
    let c = plane.get(n, j).norm();
    c > plane.get(n - 1, j).norm()
        && c > plane.get(n + 1, j).norm()
        && c > plane.get(n, j - 1).norm()
        && c > plane.get(n, j + 1).norm()
}

/// All strict local maxima of `|w|`, refined in scale, in canonical order:
/// descending magnitude, then ascending time, then ascending scale index.
pub fn find_maxima(plane: &TransformPlane) -> Vec<MaximumPoint> {
    let m = plane.len();
    let nj = plane.n_scales();
    if m < 3 || nj < 3 {
        return Vec::new();
    }
    let omega_peak = plane.wavelet().omega_peak();
    let footprint_coef = plane.wavelet().footprint_coefficient();
    let mut points: Vec<MaximumPoint> = (1..nj - 1)
        .into_par_iter()
        .flat_map_iter(|j| {
            let above = plane.column(j - 1);
            let here = plane.column(j);
            let below = plane.column(j + 1);
            let omegas = (plane.grid.omegas[j - 1], plane.grid.omegas[j], plane.grid.omegas[j + 1]);
            (1..m - 1).filter_map(move |n| {
                let c = here[n].norm();
                let up = above[n].norm();
                let down = below[n].norm();
                if !(c > here[n - 1].norm() && c > here[n + 1].norm() && c > up && c > down) {
                    return None;
                }
                let (omega_s, w_value) = refine((up, c, down), omegas, here[n]);
                let footprint = footprint_coef * omega_peak / omega_s;
                Some(MaximumPoint {
                    t_index: n,
                    scale_index: j,
                    omega_s,
                    w_value,
                    magnitude: w_value.norm(),
                    grid_magnitude: c,
                    norm_magnitude: f64::NAN,
                    missing_fraction: missing_fraction(&plane.missing_mask, n as f64, footprint),
                    flags: Flags { edge: plane.is_edge(n, j), significant: true, isolated: false },
                    rejection: None,
                })
            })
        })
        .collect();
    sort_canonical(&mut points);
    points
}

pub fn sort_canonical(points: &mut [MaximumPoint]) {
    points.sort_by(|a, b| {
        b.magnitude
            .total_cmp(&a.magnitude)
            .then(a.t_index.cmp(&b.t_index))
            .then(a.scale_index.cmp(&b.scale_index))
    });
}

/// Three-point parabolic refinement of a maximum in log frequency.
///
/// Returns the vertex frequency, clamped to the outer two grid frequencies,
/// and the center value rescaled to the vertex height with its phase kept.
pub fn refine(
    moduli: (f64, f64, f64),
    omegas: (f64, f64, f64),
    center: Complex64,
) -> (f64, Complex64) {
    let (y0, y1, y2) = moduli;
    let (x0, x1, x2) = (omegas.0.ln(), omegas.1.ln(), omegas.2.ln());
    // Newton form: y = y1 + d1 (x - x1) + c (x - x1)(x - x2).
    let d0 = (y1 - y0) / (x1 - x0);
    let d1 = (y2 - y1) / (x2 - x1);
    let curv = (d1 - d0) / (x2 - x0);
    if !(curv.is_finite()) || curv == 0.0 || y1 == 0.0 {
        return (omegas.1, center);
    }
    // Vertex where d1 + c (2x - x1 - x2) = 0, expressed relative to x1.
    let mut dx = -(d1 + curv * (x1 - x2)) / (2.0 * curv);
    let (lo, hi) = if x0 < x2 { (x0 - x1, x2 - x1) } else { (x2 - x1, x0 - x1) };
    dx = dx.clamp(lo, hi);
    let height = y1 + d1 * dx + curv * dx * (dx + x1 - x2);
    if !(height > 0.0) {
        return (omegas.1, center);
    }
    ((x1 + dx).exp(), center * (height / y1))
}

/// Fraction of a footprint-wide window centered at `center` that is missing
/// or outside the series.
pub fn missing_fraction(missing: &[bool], center: f64, footprint: f64) -> f64 {
    let lo = (center - 0.5 * footprint).ceil() as i64;
    let hi = (center + 0.5 * footprint).floor() as i64;
    if hi < lo {
        return 0.0;
    }
    let total = (hi - lo + 1) as f64;
    let bad = (lo..=hi)
        .filter(|&i| i < 0 || i as usize >= missing.len() || missing[i as usize])
        .count();
    bad as f64 / total
}

/// Rejects maxima whose footprint window is more than `max_fraction` missing.
pub fn apply_missing_rule(points: &mut [MaximumPoint], max_fraction: f64) {
    for p in points.iter_mut() {
        if p.missing_fraction > max_fraction {
            p.reject(Rejection::MissingData { fraction: p.missing_fraction });
        }
    }
}
