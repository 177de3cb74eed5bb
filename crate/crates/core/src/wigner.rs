//! Direct evaluation of the Gaussian Wigner function as a displaced-parity
//! expectation, and the four-point CHSH combination built from it.
//!
//! Works for arbitrary physical covariance matrices (not only the symmetric
//! family) and serves as the brute-force counterpart of the closed forms in
//! [`crate::bell`]. Zero-mean states are assumed throughout.
//!
//! Normalization: the parity expectation at the origin equals
//! `1 / (4 sqrt(det sigma))`, the unique choice that reproduces the
//! closed-form Bell function of the symmetric family.

use nalgebra::Vector4;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::CovarianceMatrix;
use crate::numeric::golden_section_max;

/// A pair of coherent displacement amplitudes, one per mode.
#[derive(Clone, Copy, Debug)]
pub struct PhasePoint {
    pub alpha_a: Complex64,
    pub alpha_b: Complex64,
}

impl PhasePoint {
    pub fn origin() -> Self {
        Self::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn new(alpha_a: Complex64, alpha_b: Complex64) -> Self {
        Self { alpha_a, alpha_b }
    }

    pub fn real(x_a: f64, x_b: f64) -> Self {
        Self::new(Complex64::new(x_a, 0.0), Complex64::new(x_b, 0.0))
    }

    /// Quadrature-space image `(sqrt2 Re a, sqrt2 Im a, sqrt2 Re b, sqrt2 Im b)`.
    pub fn quadrature_image(&self) -> Vector4<f64> {
        let s = std::f64::consts::SQRT_2;
        Vector4::new(
            s * self.alpha_a.re,
            s * self.alpha_a.im,
            s * self.alpha_b.re,
            s * self.alpha_b.im,
        )
    }
}

/// Displaced-parity expectation `exp(-K^T sigma^-1 K / 2) / (4 sqrt(det sigma))`.
pub fn parity_expectation(cm: &CovarianceMatrix, p: &PhasePoint) -> Result<f64> {
    let det = cm.determinant();
    if !(det > 1e-300) {
        return Err(Error::SingularState(format!(
            "covariance determinant {det} too small to invert"
        )));
    }
    let inv = cm
        .matrix()
        .try_inverse()
        .ok_or_else(|| Error::SingularState("covariance matrix is not invertible".into()))?;
    let k = p.quadrature_image();
    let quad = (k.transpose() * inv * k)[(0, 0)];
    Ok((-0.5 * quad).exp() / (4.0 * det.sqrt()))
}

/// Four-point CHSH combination with settings `0` and displacement `sqrt(I)`:
///
/// `<W(0,0)> + <W(sqrtI,0)> + <W(0,-sqrtI)> - <W(sqrtI,-sqrtI)>`.
pub fn bell_combination(cm: &CovarianceMatrix, intensity: f64) -> Result<f64> {
    if intensity < 0.0 {
        return Err(Error::Domain(format!(
            "displacement intensity must be non-negative, got {intensity}"
        )));
    }
    let d = intensity.sqrt();
    Ok(parity_expectation(cm, &PhasePoint::origin())?
        + parity_expectation(cm, &PhasePoint::real(d, 0.0))?
        + parity_expectation(cm, &PhasePoint::real(0.0, -d))?
        - parity_expectation(cm, &PhasePoint::real(d, -d))?)
}

/// Golden-section maximization of [`bell_combination`] over the intensity.
///
/// Returns `(argmax, max)`. The bracket `[0, 10 sqrt(det sigma_X)]`, with
/// `sigma_X` the position-quadrature sub-block, covers the decay scale of
/// the parity exponentials.
pub fn bell_max_numeric(cm: &CovarianceMatrix) -> Result<(f64, f64)> {
    // Probe once up front so domain errors surface instead of panicking
    // inside the search closure.
    parity_expectation(cm, &PhasePoint::origin())?;
    let det_x = cm.entry(0, 0) * cm.entry(2, 2) - cm.entry(0, 2) * cm.entry(0, 2);
    let hi = 10.0 * det_x.max(0.0).sqrt();
    Ok(golden_section_max(
        |i| bell_combination(cm, i).unwrap(),
        0.0,
        hi.max(1e-6),
        1e-12,
    ))
}
