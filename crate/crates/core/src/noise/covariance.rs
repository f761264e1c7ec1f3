//! Covariance of the noise transform between nearby grid points.

use nalgebra::{Matrix5, SymmetricEigen};
use num_complex::Complex64;

use super::NoiseModel;
use crate::error::{Error, Result};
use crate::morse::{MorseIntegral, WaveletSpec};

/// Most negative normalized eigenvalue accepted as round-off before clipping.
const EIGEN_FLOOR: f64 = -1e-10;

/// Time offsets and scale multipliers of the center point and its four neighbours,
/// in the order center, later, earlier, larger scale, smaller scale.
const OFFSETS: [f64; 5] = [0.0, 1.0, -1.0, 0.0, 0.0];
const SCALE_POWERS: [i32; 5] = [0, 0, 0, 1, -1];

/// Evaluates `Ξ(u, s, r) = E{ε(τ, s) ε*(τ + u, r s)}` for one noise model and wavelet.
#[derive(Clone, Debug)]
pub struct XiKernel {
    model: NoiseModel,
    wavelet: WaveletSpec,
    order: f64,
    integral: MorseIntegral,
}

impl XiKernel {
    pub fn new(model: NoiseModel, wavelet: WaveletSpec) -> Result<Self> {
        model.check_wavelet(wavelet)?;
        let order = 2.0 * wavelet.beta() - 2.0 * model.alpha;
        let integral = MorseIntegral::new(order, wavelet.gamma())?;
        Ok(Self { model, wavelet, order, integral })
    }

    pub fn eval(&self, u: f64, s: f64, r: f64) -> Complex64 {
        let (beta, gamma) = (self.wavelet.beta(), self.wavelet.gamma());
        let ln_r_tilde = (gamma * r.ln()).exp().ln_1p() / gamma;
        let ln_coef = 2.0 * self.model.amplitude.ln()
            + 2.0 * self.wavelet.ln_a()
            + beta * r.ln()
            + (2.0 * self.model.alpha - 1.0) * s.ln()
            - (self.order + 1.0) * ln_r_tilde;
        let t = u / (s * ln_r_tilde.exp());
        self.integral.eval(t).conj() * ln_coef.exp()
    }
}

pub fn xi_covariance(
    model: NoiseModel,
    wavelet: WaveletSpec,
    u: f64,
    s: f64,
    r: f64,
) -> Result<Complex64> {
    if !(s > 0.0 && r > 0.0) {
        return Err(Error::Domain(format!("scale and ratio must be positive, got s={s}, r={r}")));
    }
    Ok(XiKernel::new(model, wavelet)?.eval(u, s, r))
}

/// Covariance of the center transform value and its four grid neighbours,
/// normalized by the wavelet spectrum `σ²(s)` at the center.
pub fn sigma_matrix(
    model: NoiseModel,
    wavelet: WaveletSpec,
    s: f64,
    r: f64,
) -> Result<Matrix5<Complex64>> {
    if !(s > 0.0 && r > 1.0) {
        return Err(Error::Domain(format!("need s > 0 and r > 1, got s={s}, r={r}")));
    }
    let kernel = XiKernel::new(model, wavelet)?;
    let norm = super::wavelet_spectrum(model, wavelet, s)?;
    let mut m = Matrix5::zeros();
    for i in 0..5 {
        let si = s * r.powi(SCALE_POWERS[i]);
        for j in i..5 {
            let ratio = r.powi(SCALE_POWERS[j] - SCALE_POWERS[i]);
            let v = kernel.eval(OFFSETS[j] - OFFSETS[i], si, ratio) / norm;
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
        m[(i, i)].im = 0.0;
    }
    Ok(m)
}

/// Lower-triangular `L` with `L L^H = Σ` after clipping round-off negative eigenvalues.
pub fn psd_cholesky(sigma: &Matrix5<Complex64>) -> Result<Matrix5<Complex64>> {
    let eig = SymmetricEigen::new(*sigma);
    let min = eig.eigenvalues.min();
    let max = eig.eigenvalues.max();
    if min < EIGEN_FLOOR * max.max(1.0) {
        return Err(Error::Numerical(format!(
            "covariance matrix is not positive semidefinite: smallest eigenvalue {min:e}"
        )));
    }
    let clipped = if min < 0.0 {
        let lambda = eig.eigenvalues.map(|v| Complex64::new(v.max(0.0), 0.0));
        let v = eig.eigenvectors;
        v * Matrix5::from_diagonal(&lambda) * v.adjoint()
    } else {
        *sigma
    };
    semidefinite_cholesky(&clipped).or_else(|_| Ok(eigen_factor(&eig)))
}

/// Triangular factor of `V Λ V^H` via QR of `(V Λ^{1/2})^H`; stable when
/// elimination loses accuracy on a nearly singular matrix.
fn eigen_factor(eig: &SymmetricEigen<Complex64, nalgebra::U5>) -> Matrix5<Complex64> {
    let root = eig.eigenvalues.map(|v| Complex64::new(v.max(0.0).sqrt(), 0.0));
    let b = eig.eigenvectors * Matrix5::from_diagonal(&root);
    let mut l = b.adjoint().qr().r().adjoint();
    // Rotate each column so the diagonal is real and non-negative.
    for k in 0..5 {
        let d = l[(k, k)];
        if d.norm() > 0.0 {
            let phase = d.conj() / d.norm();
            for i in 0..5 {
                l[(i, k)] *= phase;
            }
        }
    }
    l
}

/// Cholesky factorization that zeroes columns whose pivots vanish to round-off.
fn semidefinite_cholesky(a: &Matrix5<Complex64>) -> Result<Matrix5<Complex64>> {
    let scale = (0..5).map(|i| a[(i, i)].re).fold(0.0, f64::max);
    let tiny = 1e-14 * scale;
    let mut l = Matrix5::<Complex64>::zeros();
    for j in 0..5 {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d < -1e-9 * scale {
            return Err(Error::Numerical(format!("negative Cholesky pivot {d:e} at column {j}")));
        }
        if d <= tiny {
            continue;
        }
        let pivot = d.sqrt();
        l[(j, j)] = Complex64::new(pivot, 0.0);
        for i in j + 1..5 {
            let mut v = a[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = v / pivot;
        }
    }
    Ok(l)
}
