//! Generalized Morse functions and wavelets.
//!
//! A Morse function of order `β ≥ 0` and family `γ > 0` is defined in the
//! frequency domain as `Ψ(ω) = a ω^β exp(-ω^γ)` for `ω > 0`, half that value at
//! `ω = 0` and zero for negative frequencies. The normalizing constant
//! `a = 2 (eγ/β)^{β/γ}` fixes the peak of `Ψ` at 2, which makes the
//! amplitude-normalized transform of a unit sinusoid peak at 1. With `β = 0`
//! the function is a one-sided low-pass filter rather than a wavelet; its
//! reference frequency is the half-power point `(ln 2)^{1/γ}`.
//!
//! All gamma-function expressions are evaluated in log space.

use std::f64::consts::{LN_10, LN_2, PI};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::cwt::next_fast_len;
use crate::error::{Error, Result};
use crate::quad;

/// Relative level, with respect to the spectral peak, at which the
/// frequency-domain integrand is truncated for time-domain evaluation.
const SPECTRAL_CUTOFF_DECADES: f64 = 16.0;

/// A `(β, γ)` Morse function; with `β > 0` it is an analyzing wavelet.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveletSpec {
    beta: f64,
    gamma: f64,
}

impl WaveletSpec {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::Domain(format!("Morse order beta must be >= 0, got {beta}")));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Domain(format!("Morse family gamma must be > 0, got {gamma}")));
        }
        Ok(Self { beta, gamma })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Natural log of the normalizing constant `a_{β,γ}`.
    pub fn ln_a(&self) -> f64 {
        ln_norm(self.beta, self.gamma)
    }

    pub fn a(&self) -> f64 {
        self.ln_a().exp()
    }

    /// Peak frequency `(β/γ)^{1/γ}`, or the half-power frequency when `β = 0`.
    pub fn omega_peak(&self) -> f64 {
        if self.beta == 0.0 {
            LN_2.powf(1.0 / self.gamma)
        } else {
            (self.beta / self.gamma).powf(1.0 / self.gamma)
        }
    }

    /// Time-bandcenter product `P = sqrt(βγ)`.
    pub fn time_bandcenter(&self) -> f64 {
        (self.beta * self.gamma).sqrt()
    }

    /// Frequency-domain value `Ψ(ω)`.
    pub fn freq(&self, omega: f64) -> f64 {
        if omega > 0.0 {
            self.freq_positive(omega)
        } else if omega == 0.0 {
            if self.beta == 0.0 {
                0.5 * self.a()
            } else {
                0.0
            }
        } else {
            0.0
        }
    }

    #[inline]
    fn freq_positive(&self, omega: f64) -> f64 {
        let decay = pow_gamma(omega, self.gamma);
        if self.beta == 0.0 {
            (self.ln_a() - decay).exp()
        } else {
            (self.ln_a() + self.beta * omega.ln() - decay).exp()
        }
    }

    /// `Ψ(ω)` evaluated over an array of frequencies.
    pub fn freq_wavelet(&self, omegas: &[f64]) -> Vec<f64> {
        omegas.iter().map(|&w| self.freq(w)).collect()
    }

    /// Time-domain value `ψ(t)`; see [`MorseEvaluator`] for repeated evaluation.
    pub fn time(&self, t: f64) -> Complex64 {
        MorseEvaluator::new(*self).eval(t)
    }

    /// Frequency-domain moment `M_n = a/(2πγ) Γ((β+1+n)/γ)`.
    pub fn moment(&self, n: f64) -> Result<f64> {
        let arg = (self.beta + 1.0 + n) / self.gamma;
        if arg <= 0.0 {
            return Err(Error::Domain(format!(
                "moment of order {n} needs (beta+1+n)/gamma > 0, got {arg}"
            )));
        }
        Ok((self.ln_a() - (2.0 * PI * self.gamma).ln() + ln_gamma(arg)).exp())
    }

    /// First two cumulants `(K1, K2)` of the wavelet's log expansion.
    pub fn cumulants(&self) -> (f64, f64) {
        cumulants(self.beta, self.gamma)
    }

    /// Footprint `L(s) = 2√2 P s / ω_peak`, in samples.
    pub fn footprint(&self, s: f64) -> Result<f64> {
        if self.beta == 0.0 {
            return Err(Error::Domain("footprint is undefined for beta = 0".into()));
        }
        if !(s > 0.0) {
            return Err(Error::Domain(format!("scale must be positive, got {s}")));
        }
        Ok(self.footprint_coefficient() * s)
    }

    /// `2√2 P / ω_peak`, the footprint of the unit-scale wavelet.
    pub fn footprint_coefficient(&self) -> f64 {
        2.0 * std::f64::consts::SQRT_2 * self.time_bandcenter() / self.omega_peak()
    }

    /// Frequency beyond which the spectrum has fallen 16 decades below its peak.
    pub fn spectral_cutoff(&self) -> f64 {
        let drop = SPECTRAL_CUTOFF_DECADES * LN_10;
        if self.beta == 0.0 {
            return drop.powf(1.0 / self.gamma);
        }
        let peak = (self.beta / self.gamma).powf(1.0 / self.gamma);
        let log_shape = |w: f64| self.beta * w.ln() - pow_gamma(w, self.gamma);
        let target = log_shape(peak) - drop;
        let mut lo = peak;
        let mut hi = 2.0 * peak.max(1.0);
        while log_shape(hi) > target {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if log_shape(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-14 * hi {
                break;
            }
        }
        hi
    }
}

/// The element function `ψ_{μ,γ}` whose rescaled copies make up a signal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementSpec {
    mu: f64,
    gamma: f64,
}

impl ElementSpec {
    pub fn new(mu: f64, gamma: f64) -> Result<Self> {
        WaveletSpec::new(mu, gamma)?;
        Ok(Self { mu, gamma })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn function(&self) -> WaveletSpec {
        WaveletSpec { beta: self.mu, gamma: self.gamma }
    }
}

/// Precomputed quadrature setup for evaluating `ψ_{β,γ}(t)` many times.
#[derive(Clone, Debug)]
pub struct MorseEvaluator {
    spec: WaveletSpec,
    scale: f64,
    integral: MorseIntegral,
}

impl MorseEvaluator {
    pub fn new(spec: WaveletSpec) -> Self {
        let integral = MorseIntegral::new(spec.beta, spec.gamma)
            .expect("a valid spec has a nonnegative order");
        Self { spec, scale: spec.a(), integral }
    }

    pub fn spec(&self) -> &WaveletSpec {
        &self.spec
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.integral.eval(t) * self.scale
    }

    /// `ψ(t0 + k dt)` for `k = 0..n`.
    ///
    /// Synthesized from the spectrum on a periodic domain at least 16 times
    /// the span and 1000 wavelet widths.
    /// Tails decay as `|t|^{-(β+1)}`, so the wrapped-around error is tiny for
    /// `β >= 1` but reaches about `1e-4` of the peak for `β` near zero. Falls
    /// back to [`Self::eval`] when `dt` is too coarse for the spectrum to
    /// vanish below the Nyquist frequency.
    pub fn eval_uniform(&self, t0: f64, dt: f64, n: usize) -> Vec<Complex64> {
        let cutoff = self.spec.spectral_cutoff();
        if !(dt > 0.0) || cutoff * dt >= PI {
            return (0..n).map(|k| self.eval(t0 + k as f64 * dt)).collect();
        }
        // The period also spans many wavelet widths when the requested span is short.
        let width = self.spec.time_bandcenter().max(1.0) / self.spec.omega_peak();
        let len = next_fast_len((16 * n.max(64)).max((1000.0 * width / dt).ceil() as usize));
        let dw = 2.0 * PI / (len as f64 * dt);
        let mut buf = vec![Complex64::default(); len];
        for (m, b) in buf.iter_mut().enumerate().take(len / 2) {
            let w = m as f64 * dw;
            if w > cutoff {
                break;
            }
            *b = Complex64::from_polar(self.spec.freq(w), w * t0);
        }
        FftPlanner::new().plan_fft_inverse(len).process(&mut buf);
        let norm = 1.0 / (len as f64 * dt);
        buf.truncate(n);
        buf.iter().map(|v| v * norm).collect()
    }
}

/// Unnormalized inverse transform `(1/2π) ∫_0^∞ ν^k exp(-ν^γ) e^{iνt} dν` for
/// any order `k > -1`.
///
/// The integral is truncated where the integrand falls 16 decades below its
/// peak and evaluated by adaptive Gauss-Kronrod, with the number of initial
/// panels growing with `|t|` to follow the oscillation. Negative orders are
/// integrated in the variable `ν^{k+1}`, which removes the endpoint singularity.
#[derive(Clone, Debug)]
pub struct MorseIntegral {
    order: f64,
    gamma: f64,
    omega_max: f64,
    abs_tol: f64,
}

impl MorseIntegral {
    pub fn new(order: f64, gamma: f64) -> Result<Self> {
        if !(order > -1.0 && order.is_finite()) {
            return Err(Error::Domain(format!("integral order must exceed -1, got {order}")));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Domain(format!("Morse family gamma must be > 0, got {gamma}")));
        }
        let omega_max = if order > 0.0 {
            WaveletSpec { beta: order, gamma }.spectral_cutoff()
        } else {
            (SPECTRAL_CUTOFF_DECADES * LN_10).powf(1.0 / gamma)
        };
        // The integral of the integrand's magnitude bounds every value.
        let mass = (ln_gamma((order + 1.0) / gamma) - gamma.ln()).exp();
        Ok(Self { order, gamma, omega_max, abs_tol: 1e-13 * mass })
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let panels = 4usize.max((self.omega_max * t.abs() / PI).ceil() as usize);
        let (k, g) = (self.order, self.gamma);
        let integral = if k >= 0.0 {
            quad::integrate(
                |w| {
                    let ln_mag = if k == 0.0 { 0.0 } else { k * w.ln() };
                    Complex64::from_polar((ln_mag - pow_gamma(w, g)).exp(), w * t)
                },
                0.0,
                self.omega_max,
                panels,
                self.abs_tol,
            )
        } else {
            let p = 1.0 / (k + 1.0);
            quad::integrate(
                |v| {
                    let w = v.powf(p);
                    Complex64::from_polar((-pow_gamma(w, g)).exp(), w * t)
                },
                0.0,
                self.omega_max.powf(k + 1.0),
                panels,
                self.abs_tol * (k + 1.0),
            ) * p
        };
        integral / (2.0 * PI)
    }
}

/// `ψ_{β,γ}(t)` at each of `ts`.
pub fn time_wavelet(spec: WaveletSpec, ts: &[f64]) -> Vec<Complex64> {
    let eval = MorseEvaluator::new(spec);
    ts.iter().map(|&t| eval.eval(t)).collect()
}

/// `ψ(0)`, `M_0` in closed form.
pub fn center_value(spec: WaveletSpec) -> f64 {
    spec.moment(0.0).expect("zeroth moment exists for any valid spec")
}

/// Cumulants `K1 = Γ((β+2)/γ)/Γ((β+1)/γ)` and
/// `K2 = Γ((β+3)/γ)/Γ((β+1)/γ) - K1²`.
pub fn cumulants(beta: f64, gamma: f64) -> (f64, f64) {
    let base = ln_gamma((beta + 1.0) / gamma);
    let k1 = (ln_gamma((beta + 2.0) / gamma) - base).exp();
    let k2 = (ln_gamma((beta + 3.0) / gamma) - base).exp() - k1 * k1;
    (k1, k2)
}

/// Maximum of the Morse-of-Morse kernel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaMax {
    /// Normalized scale `s/ρ` of the maximum, `(β/(μ+1))^{1/γ}`.
    pub s_tilde_max: f64,
    pub zeta_max: f64,
    /// Scale weighting `ϑ`, the amplitude factor of the kernel at its maximum.
    pub vartheta: f64,
}

/// Transform of a `(μ, γ)` Morse function by a `(β, γ)` Morse wavelet, as a
/// function of normalized time `τ/ρ` and normalized scale `s/ρ`.
#[derive(Clone, Debug)]
pub struct ZetaKernel {
    beta: f64,
    mu: f64,
    gamma: f64,
    ln_prefactor: f64,
    combined: MorseEvaluator,
}

impl ZetaKernel {
    pub fn new(beta: f64, mu: f64, gamma: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::Domain(format!("analyzing order beta must be > 0, got {beta}")));
        }
        let combined = WaveletSpec::new(beta + mu, gamma)?;
        ElementSpec::new(mu, gamma)?;
        let ln_prefactor = ln_norm(beta, gamma) + ln_norm(mu, gamma) - ln_norm(beta + mu, gamma);
        Ok(Self { beta, mu, gamma, ln_prefactor, combined: MorseEvaluator::new(combined) })
    }

    /// Amplitude `s̃^β / (s̃^γ+1)^{(β+μ+1)/γ}` and time dilation `(s̃^γ+1)^{1/γ}`.
    fn scale_factors(&self, s_tilde: f64) -> (f64, f64) {
        let ln_s = s_tilde.ln();
        let ln_q = (self.gamma * ln_s).exp().ln_1p() / self.gamma;
        let ln_amp = self.beta * ln_s - (self.beta + self.mu + 1.0) * ln_q;
        (ln_amp.exp(), ln_q.exp())
    }

    pub fn eval(&self, tau_tilde: f64, s_tilde: f64) -> Complex64 {
        let (amp, dilation) = self.scale_factors(s_tilde);
        self.combined.eval(tau_tilde / dilation) * (self.ln_prefactor.exp() * amp)
    }

    /// `ζ(τ0 + k dτ, s̃)` for `k = 0..n`; see [`MorseEvaluator::eval_uniform`].
    pub fn eval_uniform(&self, tau0: f64, dtau: f64, n: usize, s_tilde: f64) -> Vec<Complex64> {
        let (amp, dilation) = self.scale_factors(s_tilde);
        let factor = self.ln_prefactor.exp() * amp;
        let mut values = self.combined.eval_uniform(tau0 / dilation, dtau / dilation, n);
        for v in &mut values {
            *v *= factor;
        }
        values
    }

    /// `ζ(0, s̃)` from the closed-form center value; real and positive.
    pub fn center(&self, s_tilde: f64) -> f64 {
        let (amp, _) = self.scale_factors(s_tilde);
        self.ln_prefactor.exp() * amp * center_value(*self.combined.spec())
    }

    pub fn max(&self) -> ZetaMax {
        zeta_max(self.beta, self.mu, self.gamma).expect("parameters validated on construction")
    }
}

/// `ζ_{β,μ,γ}(τ̃, s̃)` at a single point.
pub fn zeta(tau_tilde: f64, s_tilde: f64, beta: f64, mu: f64, gamma: f64) -> Result<Complex64> {
    if !(s_tilde > 0.0) {
        return Err(Error::Domain(format!("normalized scale must be positive, got {s_tilde}")));
    }
    Ok(ZetaKernel::new(beta, mu, gamma)?.eval(tau_tilde, s_tilde))
}

pub fn zeta_max(beta: f64, mu: f64, gamma: f64) -> Result<ZetaMax> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("analyzing order beta must be > 0, got {beta}")));
    }
    ElementSpec::new(mu, gamma)?;
    let ratio = beta / (mu + 1.0);
    let s_tilde_max = ratio.powf(1.0 / gamma);
    let ln_vartheta = (beta / gamma) * ratio.ln() - ((beta + mu + 1.0) / gamma) * ratio.ln_1p();
    let ln_zeta = ln_norm(beta, gamma) + ln_norm(mu, gamma) - (2.0 * PI * gamma).ln()
        + ln_gamma((beta + mu + 1.0) / gamma)
        + ln_vartheta;
    Ok(ZetaMax { s_tilde_max, zeta_max: ln_zeta.exp(), vartheta: ln_vartheta.exp() })
}

/// Noise projection integral `f = (1/2π) ∫ ω^{-2α} Ψ²(ω) dω`, closed form.
pub fn f_noise(alpha: f64, spec: WaveletSpec) -> Result<f64> {
    if !(spec.beta > alpha - 0.5) {
        return Err(Error::Domain(format!(
            "f_noise requires beta > alpha - 1/2 (beta = {}, alpha = {alpha})",
            spec.beta
        )));
    }
    let x = (2.0 * spec.beta - 2.0 * alpha + 1.0) / spec.gamma;
    Ok((2.0 * spec.ln_a() - (2.0 * PI * spec.gamma).ln() + ln_gamma(x) - x * LN_2).exp())
}

fn ln_norm(beta: f64, gamma: f64) -> f64 {
    if beta == 0.0 {
        LN_2
    } else {
        LN_2 + (beta / gamma) * (1.0 + gamma.ln() - beta.ln())
    }
}

#[inline]
fn pow_gamma(x: f64, gamma: f64) -> f64 {
    if gamma == 2.0 {
        x * x
    } else if gamma == 1.0 {
        x
    } else {
        x.powf(gamma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    fn spec(b: f64, g: f64) -> WaveletSpec {
        WaveletSpec::new(b, g).unwrap()
    }

    #[test]
    fn derived_constants() {
        let s = spec(2.0, 2.0);
        assert_relative_eq!(s.a(), 2.0 * E, max_relative = 1e-14);
        assert_relative_eq!(s.omega_peak(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(s.time_bandcenter(), 2.0, max_relative = 1e-14);
        let z = spec(0.0, 2.0);
        assert_eq!(z.a(), 2.0);
        assert_relative_eq!(z.omega_peak(), LN_2.sqrt(), max_relative = 1e-14);
        assert_eq!(z.time_bandcenter(), 0.0);
    }

    #[test]
    fn freq_wavelet_examples() {
        assert_relative_eq!(spec(2.0, 2.0).freq(1.0), 2.0, max_relative = 1e-14);
        assert_eq!(spec(3.0, 1.5).freq(-1.0), 0.0);
        assert_eq!(spec(0.0, 2.0).freq(0.0), 1.0);
        assert_eq!(spec(2.0, 2.0).freq(0.0), 0.0);
        assert_relative_eq!(spec(0.0, 2.0).freq(LN_2.sqrt()), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn freq_peak_is_two() {
        for &(b, g) in &[(0.5, 1.0), (1.0, 2.0), (4.0, 3.0), (8.0, 1.5)] {
            let s = spec(b, g);
            let wp = s.omega_peak();
            let peak = s.freq(wp);
            assert_relative_eq!(peak, 2.0, max_relative = 1e-12);
            let best = (1..20000)
                .map(|k| s.freq(k as f64 * 1e-3 * wp))
                .fold(0.0f64, f64::max);
            assert!(best <= peak * (1.0 + 1e-12));
        }
    }

    #[test]
    fn moment_examples() {
        let m0 = spec(1.0, 2.0).moment(0.0).unwrap();
        assert_relative_eq!(m0, spec(1.0, 2.0).a() / (4.0 * PI), max_relative = 1e-13);
        assert!((m0 - 0.371).abs() < 1e-3);
        assert_relative_eq!(spec(0.0, 1.0).moment(0.0).unwrap(), 1.0 / PI, max_relative = 1e-13);
        assert_relative_eq!(
            spec(2.0, 2.0).moment(1.0).unwrap(),
            2.0 * E / (4.0 * PI),
            max_relative = 1e-13
        );
        assert!(matches!(spec(1.0, 2.0).moment(-2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn cumulant_examples() {
        let (k1, k2) = spec(2.0, 2.0).cumulants();
        assert_relative_eq!(k1, 2.0 / PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(k2, 1.5 - 4.0 / PI, max_relative = 1e-12);
    }

    #[test]
    fn cumulants_match_moment_ratios() {
        for &(b, g) in &[(0.5, 1.0), (1.0, 2.0), (3.0, 3.0), (7.5, 4.0)] {
            let s = spec(b, g);
            let m0 = s.moment(0.0).unwrap();
            let m1 = s.moment(1.0).unwrap();
            let m2 = s.moment(2.0).unwrap();
            let (k1, k2) = s.cumulants();
            assert_relative_eq!(k1, m1 / m0, max_relative = 1e-12);
            assert_relative_eq!(k2, m2 / m0 - (m1 / m0).powi(2), max_relative = 1e-9);
            assert!(k2 > 0.0);
        }
    }

    #[test]
    fn footprint_examples() {
        let s = spec(2.0, 2.0);
        assert_relative_eq!(s.footprint(1.0).unwrap(), 4.0 * 2f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(s.footprint(10.0).unwrap(), 56.568_542_494_923_8, max_relative = 1e-12);
        assert!(spec(0.0, 2.0).footprint(1.0).is_err());
        assert!(s.footprint(0.0).is_err());
    }

    #[test]
    fn time_wavelet_center_matches_moment() {
        for &(b, g) in &[(0.0, 2.0), (0.5, 4.0), (1.0, 2.0), (2.0, 2.0), (4.0, 1.0), (8.0, 3.0)] {
            let s = spec(b, g);
            let v = s.time(0.0);
            let m0 = s.moment(0.0).unwrap();
            assert_relative_eq!(v.re, m0, max_relative = 1e-8);
            assert!(v.im.abs() < 1e-10 * m0);
        }
        let v = spec(1.0, 2.0).time(0.0);
        assert!((v.re - 0.371).abs() < 1e-3);
    }

    #[test]
    fn time_wavelet_is_hermitian() {
        let s = spec(3.0, 2.5);
        for &t in &[0.3, 1.7, 4.0, 11.0] {
            let p = s.time(t);
            let m = s.time(-t);
            assert!((p - m.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn analytic_gaussian_real_part() {
        // Re ψ_{0,2}(t) is half the inverse transform of 2e^{-ω²} over the whole line.
        let s = spec(0.0, 2.0);
        for &t in &[0.0f64, 0.5, 1.3, 2.9] {
            let expected = (-t * t / 4.0).exp() / (2.0 * PI.sqrt());
            assert!((s.time(t).re - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn increment_order_is_derivative() {
        for &(b, g) in &[(1.0, 2.0), (2.0, 3.0), (0.5, 1.5)] {
            let lo = spec(b, g);
            let hi = spec(b + 1.0, g);
            let ratio = hi.a() / lo.a();
            let h = 1e-4;
            for &t in &[-2.0, -0.4, 0.7, 1.9] {
                let d = (lo.time(t + h) - lo.time(t - h)) / (2.0 * h);
                let expected = Complex64::new(0.0, -ratio) * d;
                assert!((hi.time(t) - expected).norm() < 1e-7, "b={b} g={g} t={t}");
            }
        }
    }

    #[test]
    fn negative_order_integral() {
        for &(k, g) in &[(-0.5, 2.0), (-0.8, 1.0), (0.0, 3.0)] {
            let v = MorseIntegral::new(k, g).unwrap().eval(0.0);
            let expected = ln_gamma((k + 1.0) / g).exp() / (2.0 * PI * g);
            assert_relative_eq!(v.re, expected, max_relative = 1e-9);
        }
        // γ = 1, k = -1/2: ∫ ν^{-1/2} e^{-ν} e^{iνt} dν = √π (1 - i t)^{-1/2}.
        let v = MorseIntegral::new(-0.5, 1.0).unwrap().eval(1.5);
        let expected = Complex64::new(1.0, -1.5).powf(-0.5) * PI.sqrt() / (2.0 * PI);
        assert!((v - expected).norm() < 1e-10);
        assert!(MorseIntegral::new(-1.0, 2.0).is_err());
    }

    #[test]
    fn zeta_max_examples() {
        let z = zeta_max(2.0, 1.0, 2.0).unwrap();
        assert_relative_eq!(z.s_tilde_max, 1.0, max_relative = 1e-14);
        let z = zeta_max(2.0, 0.0, 2.0).unwrap();
        assert_relative_eq!(z.vartheta, 2.0 / 3f64.powf(1.5), max_relative = 1e-13);
        assert_relative_eq!(z.zeta_max, E / (2.0 * PI.sqrt()) * z.vartheta, max_relative = 1e-12);
        assert!((z.zeta_max - 0.295).abs() < 1e-3);
    }

    #[test]
    fn zeta_center_is_closed_form_and_peaks_at_s_max() {
        let k = ZetaKernel::new(2.0, 1.0, 2.0).unwrap();
        let zm = k.max();
        for &s in &[0.3, 1.0, 2.5] {
            let v = k.eval(0.0, s);
            assert_relative_eq!(v.re, k.center(s), max_relative = 1e-8);
            assert!(v.im.abs() < 1e-10);
            assert!(k.center(s) <= zm.zeta_max * (1.0 + 1e-12));
        }
        assert_relative_eq!(k.center(zm.s_tilde_max), zm.zeta_max, max_relative = 1e-12);
    }

    #[test]
    fn uniform_evaluation_matches_quadrature() {
        for &(beta, gamma, tol) in &[(2.0, 2.0, 1e-8), (3.0, 1.0, 1e-8), (0.5, 4.0, 1e-3), (0.0, 2.0, 1e-3)] {
            let eval = MorseEvaluator::new(WaveletSpec::new(beta, gamma).unwrap());
            let peak = (0..200).map(|k| eval.eval(0.05 * k as f64 - 5.0).norm()).fold(0.0, f64::max);
            let fast = eval.eval_uniform(-30.0, 0.07, 900);
            for k in (0..900).step_by(13) {
                let t = -30.0 + 0.07 * k as f64;
                assert!((fast[k] - eval.eval(t)).norm() < tol * peak, "beta={beta} gamma={gamma} t={t}");
            }
        }
        let kernel = ZetaKernel::new(2.0, 1.0, 2.0).unwrap();
        let line = kernel.eval_uniform(-4.0, 0.1, 81, 1.3);
        for k in (0..81).step_by(10) {
            let expect = kernel.eval(-4.0 + 0.1 * k as f64, 1.3);
            assert!((line[k] - expect).norm() < 1e-8, "k={k}");
        }
    }

    #[test]
    fn zeta_is_hermitian_in_time() {
        let k = ZetaKernel::new(1.5, 0.5, 3.0).unwrap();
        for &(t, s) in &[(0.4, 0.7), (2.0, 1.3), (5.0, 3.0)] {
            assert!((k.eval(-t, s) - k.eval(t, s).conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn f_noise_examples() {
        let s = spec(2.0, 2.0);
        assert!((f_noise(0.0, s).unwrap() - 0.5528).abs() < 1e-4);
        assert!((f_noise(1.0, s).unwrap() - 0.7370).abs() < 1e-4);
        // α = β leaves Γ(1/γ)/2^{1/γ}.
        let expected = s.a().powi(2) / (4.0 * PI) * ln_gamma(0.5).exp() / 2f64.sqrt();
        assert_relative_eq!(f_noise(2.0, s).unwrap(), expected, max_relative = 1e-12);
        assert!(matches!(f_noise(2.5, s), Err(Error::Domain(_))));
    }
}
