//! Regions of influence around transform maxima and the isolation filter.
//!
//! The region of a maximum is the approximate level set `|ζ| = λ ζ_max` of the
//! transform of a single element, from the second-order cumulant expansion of
//! the kernel in time. In normalized coordinates `τ̃ = (τ - t̂)/ρ̂`, `s̃ = s/ρ̂`
//! its half-width is
//!
//! `τ̃(s̃)² = 2 (s̃^γ+1)^{2/γ} / K₂ · ln( s̃^β / (λ ϑ (s̃^γ+1)^{(β+μ+1)/γ}) )`
//!
//! with `K₂` the second cumulant of the `(β+μ, γ)` Morse function.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maxima::{MaximumPoint, Rejection};
use crate::morse::{cumulants, zeta_max, WaveletSpec};

/// Default number of samples per branch of a region curve.
pub const DEFAULT_POINTS: usize = 256;
const MIN_POINTS: usize = 64;
/// Relative margin by which a point must clear the boundary to be inside.
const BOUNDARY_TOL: f64 = 1e-12;

/// Level-set parameters shared by every region of one analysis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionShape {
    pub lambda: f64,
    pub beta: f64,
    pub mu: f64,
    pub gamma: f64,
}

impl RegionShape {
    pub fn new(lambda: f64, beta: f64, mu: f64, gamma: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::Domain(format!("lambda must lie in (0, 1), got {lambda}")));
        }
        if !(mu >= 0.0) {
            return Err(Error::Domain(format!("element order mu must be >= 0, got {mu}")));
        }
        zeta_max(beta, mu, gamma)?;
        Ok(Self { lambda, beta, mu, gamma })
    }

    fn ln_lambda_vartheta(&self) -> f64 {
        let vartheta = zeta_max(self.beta, self.mu, self.gamma).expect("validated").vartheta;
        (self.lambda * vartheta).ln()
    }

    /// Bounding bracket `[(λϑ)^{1/β}, (λϑ)^{-1/(μ+1)}]` of the real-valued range.
    pub fn bracket(&self) -> (f64, f64) {
        let l = self.ln_lambda_vartheta();
        ((l / self.beta).exp(), (-l / (self.mu + 1.0)).exp())
    }

    /// Log argument of the half-width; positive exactly on the real-valued range.
    fn log_argument(&self, s_tilde: f64) -> f64 {
        let ln_q = (self.gamma * s_tilde.ln()).exp().ln_1p() / self.gamma;
        self.beta * s_tilde.ln() - (self.beta + self.mu + 1.0) * ln_q - self.ln_lambda_vartheta()
    }

    /// Normalized half-width `τ̃(s̃)`, or `None` where it is imaginary.
    pub fn half_width(&self, s_tilde: f64) -> Option<f64> {
        let arg = self.log_argument(s_tilde);
        if !(arg >= 0.0) {
            return None;
        }
        let (_, k2) = cumulants(self.beta + self.mu, self.gamma);
        let q2 = (2.0 / self.gamma * (self.gamma * s_tilde.ln()).exp().ln_1p()).exp();
        Some((2.0 * q2 / k2 * arg).sqrt())
    }

    /// Endpoints of the real-valued range, or `None` if it is empty.
    pub fn real_range(&self) -> Option<(f64, f64)> {
        let s_max = zeta_max(self.beta, self.mu, self.gamma).expect("validated").s_tilde_max;
        if !(self.log_argument(s_max) > 0.0) {
            return None;
        }
        let (lo, hi) = self.bracket();
        let f = |s: f64| self.log_argument(s);
        Some((bisect_ln(f, lo, s_max), bisect_ln(f, s_max, hi)))
    }
}

/// Root of `f` in `[a, b]` by bisection in `ln s`; `f` changes sign on the bracket.
fn bisect_ln(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = (a.ln(), b.ln());
    let sign_lo = f(a) > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if (f(mid.exp()) > 0.0) == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfluenceRegion {
    pub shape: RegionShape,
    pub center_time: f64,
    pub rho: f64,
    /// Normalized scale range on which the half-width is real.
    pub s_range: (f64, f64),
    /// `(s̃, τ̃)` samples of the upper branch, log-spaced in `s̃`.
    pub branch: Vec<(f64, f64)>,
    /// Closed boundary in physical `(τ, ω_s)`: the late branch then the early branch reversed.
    pub curve: Vec<(f64, f64)>,
    /// Set when the level set has no real-valued part.
    pub empty: bool,
}

/// Region of influence of a maximum at `t_hat` with element scale `rho_hat`.
pub fn region_curve(
    lambda: f64,
    beta: f64,
    mu: f64,
    gamma: f64,
    rho_hat: f64,
    t_hat: f64,
    n_points: usize,
) -> Result<InfluenceRegion> {
    let shape = RegionShape::new(lambda, beta, mu, gamma)?;
    shape.region(rho_hat, t_hat, n_points)
}

impl RegionShape {
    pub fn region(&self, rho_hat: f64, t_hat: f64, n_points: usize) -> Result<InfluenceRegion> {
        if !(rho_hat > 0.0 && rho_hat.is_finite() && t_hat.is_finite()) {
            return Err(Error::Domain(format!("invalid region center ({t_hat}, {rho_hat})")));
        }
        let n = n_points.max(MIN_POINTS);
        let Some((a, b)) = self.real_range() else {
            return Ok(InfluenceRegion {
                shape: *self,
                center_time: t_hat,
                rho: rho_hat,
                s_range: (f64::NAN, f64::NAN),
                branch: Vec::new(),
                curve: Vec::new(),
                empty: true,
            });
        };
        let (la, lb) = (a.ln(), b.ln());
        let branch: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let s = match i {
                    0 => a,
                    _ if i == n - 1 => b,
                    _ => (la + (lb - la) * i as f64 / (n - 1) as f64).exp(),
                };
                let tau = if i == 0 || i == n - 1 { 0.0 } else { self.half_width(s).unwrap_or(0.0) };
                (s, tau)
            })
            .collect();
        let omega_beta = WaveletSpec::new(self.beta, self.gamma)?.omega_peak();
        let to_physical = |s: f64, tau: f64| (t_hat + rho_hat * tau, omega_beta / (rho_hat * s));
        let mut curve: Vec<(f64, f64)> = branch.iter().map(|&(s, t)| to_physical(s, t)).collect();
        curve.extend(branch.iter().rev().skip(1).map(|&(s, t)| to_physical(s, -t)));
        Ok(InfluenceRegion {
            shape: *self,
            center_time: t_hat,
            rho: rho_hat,
            s_range: (a, b),
            branch,
            curve,
            empty: false,
        })
    }
}

impl InfluenceRegion {
    /// Whether `(tau, omega_s)` lies strictly inside the region.
    pub fn contains(&self, tau: f64, omega_s: f64) -> bool {
        if self.empty || !(omega_s > 0.0) {
            return false;
        }
        let omega_beta = WaveletSpec::new(self.shape.beta, self.shape.gamma)
            .expect("validated")
            .omega_peak();
        let s = omega_beta / (self.rho * omega_s);
        let tau_tilde = (tau - self.center_time) / self.rho;
        if !(s > self.s_range.0 && s < self.s_range.1) {
            return false;
        }
        let ls = s.ln();
        let i = self.branch.partition_point(|&(bs, _)| bs.ln() <= ls).clamp(1, self.branch.len() - 1);
        let (s0, t0) = self.branch[i - 1];
        let (s1, t1) = self.branch[i];
        let f = (ls - s0.ln()) / (s1.ln() - s0.ln());
        let width = t0 + f.clamp(0.0, 1.0) * (t1 - t0);
        tau_tilde.abs() < width * (1.0 - BOUNDARY_TOL)
    }
}

/// Element scale `ρ̂ = ŝ / s̃_max` implied by a maximum.
pub fn rho_hat(point: &MaximumPoint, beta: f64, mu: f64, gamma: f64) -> Result<f64> {
    let omega_beta = WaveletSpec::new(beta, gamma)?.omega_peak();
    Ok(point.scale(omega_beta) / zeta_max(beta, mu, gamma)?.s_tilde_max)
}

/// Flags each significant point as isolated unless a stronger significant
/// point lies inside its region. Equal magnitudes favour the earlier time.
///
/// Points that are not significant are left as they are and never shield others.
pub fn isolate(points: &mut [MaximumPoint], shape: RegionShape) -> Result<()> {
    let mut order: Vec<usize> = (0..points.len()).filter(|&i| points[i].flags.significant).collect();
    order.sort_by(|&a, &b| stronger(&points[a], &points[b]));
    let mut verdicts = Vec::with_capacity(order.len());
    for (rank, &i) in order.iter().enumerate() {
        let p = &points[i];
        let rho = rho_hat(p, shape.beta, shape.mu, shape.gamma)?;
        let region = shape.region(rho, p.t_index as f64, DEFAULT_POINTS)?;
        let by = order[..rank]
            .iter()
            .copied()
            .find(|&k| region.contains(points[k].t_index as f64, points[k].omega_s));
        verdicts.push((i, by));
    }
    for (i, by) in verdicts {
        let p = &mut points[i];
        p.flags.isolated = by.is_none();
        p.rejection = match (by, p.rejection) {
            (Some(k), None | Some(Rejection::NotIsolated { .. })) => Some(Rejection::NotIsolated { by: k }),
            (None, Some(Rejection::NotIsolated { .. })) => None,
            (_, other) => other,
        };
    }
    Ok(())
}

fn stronger(a: &MaximumPoint, b: &MaximumPoint) -> Ordering {
    b.magnitude
        .total_cmp(&a.magnitude)
        .then(a.t_index.cmp(&b.t_index))
        .then(a.scale_index.cmp(&b.scale_index))
}
