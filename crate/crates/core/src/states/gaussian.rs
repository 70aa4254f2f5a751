use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pure single-mode Gaussian state `D(α) S(ζ) |0⟩`.
///
/// `α = alpha_mag · e^{i·alpha_phase}` and `ζ = squeeze_r · e^{2i·squeeze_angle}`,
/// so `squeeze_angle` is the local-oscillator phase at which the quadrature
/// variance is smallest, `e^{-2r}/2`.
///
/// With this convention an amplitude-squeezed state has
/// `squeeze_angle == alpha_phase`, a phase-squeezed state has
/// `squeeze_angle == alpha_phase + π/2`, and a state "squeezed at a phase
/// angle δ" has `squeeze_angle - alpha_phase == δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianStateSpec {
    alpha_mag: f64,
    alpha_phase: f64,
    squeeze_r: f64,
    squeeze_angle: f64,
}

fn reduce_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl GaussianStateSpec {
    pub fn new(alpha_mag: f64, alpha_phase: f64, squeeze_r: f64, squeeze_angle: f64) -> Result<Self> {
        let all_finite = [alpha_mag, alpha_phase, squeeze_r, squeeze_angle]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::Domain("Gaussian state parameters must be finite".into()));
        }
        if alpha_mag < 0.0 || squeeze_r < 0.0 {
            return Err(Error::Domain(format!(
                "alpha_mag ({alpha_mag}) and squeeze_r ({squeeze_r}) must be nonnegative"
            )));
        }
        Ok(Self {
            alpha_mag,
            alpha_phase: reduce_angle(alpha_phase),
            squeeze_r,
            squeeze_angle: reduce_angle(squeeze_angle),
        })
    }

    pub fn vacuum() -> Self {
        Self {
            alpha_mag: 0.0,
            alpha_phase: 0.0,
            squeeze_r: 0.0,
            squeeze_angle: 0.0,
        }
    }

    pub fn coherent(alpha_mag: f64, alpha_phase: f64) -> Result<Self> {
        Self::new(alpha_mag, alpha_phase, 0.0, 0.0)
    }

    pub fn squeezed_vacuum(squeeze_r: f64, squeeze_angle: f64) -> Result<Self> {
        Self::new(0.0, 0.0, squeeze_r, squeeze_angle)
    }

    /// Reduced number fluctuations: the narrow axis points along the displacement.
    pub fn amplitude_squeezed(alpha_mag: f64, alpha_phase: f64, squeeze_r: f64) -> Result<Self> {
        Self::new(alpha_mag, alpha_phase, squeeze_r, alpha_phase)
    }

    /// Reduced phase fluctuations: the narrow axis is orthogonal to the displacement.
    pub fn phase_squeezed(alpha_mag: f64, alpha_phase: f64, squeeze_r: f64) -> Result<Self> {
        Self::new(alpha_mag, alpha_phase, squeeze_r, alpha_phase + PI / 2.0)
    }

    /// Squeezing axis rotated by `relative_angle` (radians) away from the displacement.
    pub fn squeezed_at_angle(
        alpha_mag: f64,
        alpha_phase: f64,
        squeeze_r: f64,
        relative_angle: f64,
    ) -> Result<Self> {
        Self::new(alpha_mag, alpha_phase, squeeze_r, alpha_phase + relative_angle)
    }

    pub fn alpha_mag(&self) -> f64 {
        self.alpha_mag
    }

    pub fn alpha_phase(&self) -> f64 {
        self.alpha_phase
    }

    pub fn squeeze_r(&self) -> f64 {
        self.squeeze_r
    }

    pub fn squeeze_angle(&self) -> f64 {
        self.squeeze_angle
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::from_polar(self.alpha_mag, self.alpha_phase)
    }

    pub fn zeta(&self) -> Complex64 {
        Complex64::from_polar(self.squeeze_r, 2.0 * self.squeeze_angle)
    }

    pub fn is_coherent(&self) -> bool {
        self.squeeze_r == 0.0
    }

    pub fn is_squeezed_vacuum(&self) -> bool {
        self.alpha_mag == 0.0 && self.squeeze_r > 0.0
    }

    /// Same state rotated in phase space by `delta`.
    pub fn rotated(&self, delta: f64) -> Self {
        Self {
            alpha_mag: self.alpha_mag,
            alpha_phase: reduce_angle(self.alpha_phase + delta),
            squeeze_r: self.squeeze_r,
            squeeze_angle: reduce_angle(self.squeeze_angle + delta),
        }
    }

    /// `⟨x̂(θ)⟩ = √2 |α| cos(θ − arg α)`.
    pub fn quadrature_mean(&self, theta: f64) -> f64 {
        std::f64::consts::SQRT_2 * self.alpha_mag * (theta - self.alpha_phase).cos()
    }

    pub fn quadrature_variance(&self, theta: f64) -> f64 {
        let (s, c) = (theta - self.squeeze_angle).sin_cos();
        let r2 = 2.0 * self.squeeze_r;
        0.5 * ((-r2).exp() * c * c + r2.exp() * s * s)
    }

    pub fn quadrature_pdf(&self, theta: f64, x: f64) -> f64 {
        let var = self.quadrature_variance(theta);
        let d = x - self.quadrature_mean(theta);
        (-(d * d) / (2.0 * var)).exp() / (TAU * var).sqrt()
    }

    /// `⟨n̂⟩ = |α|² + sinh² r`.
    pub fn mean_photon_number(&self) -> f64 {
        self.alpha_mag.powi(2) + self.squeeze_r.sinh().powi(2)
    }
}

impl Default for GaussianStateSpec {
    fn default() -> Self {
        Self::vacuum()
    }
}

impl fmt::Display for GaussianStateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "gaussian(alpha_mag={}, alpha_phase={}, squeeze_r={}, squeeze_angle={})",
            self.alpha_mag, self.alpha_phase, self.squeeze_r, self.squeeze_angle
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_moments() {
        let v = GaussianStateSpec::vacuum();
        for theta in [0.0, 0.7, 2.0, 5.5] {
            assert_eq!(v.quadrature_mean(theta), 0.0);
            assert!((v.quadrature_variance(theta) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn coherent_mean_along_displacement() {
        let c = GaussianStateSpec::coherent(2.0, 0.0).unwrap();
        assert!((c.quadrature_mean(0.0) - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-14);
        assert!((c.quadrature_variance(0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn squeezed_minimum_variance_at_squeeze_angle() {
        let s = GaussianStateSpec::squeezed_vacuum(0.5, 0.3).unwrap();
        assert!((s.quadrature_variance(0.3) - (-1.0f64).exp() / 2.0).abs() < 1e-15);
        assert!((s.quadrature_variance(0.3) - 0.18394).abs() < 1e-5);
        assert!((s.quadrature_variance(0.3 + PI / 2.0) - 1.0f64.exp() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn phases_are_reduced() {
        let s = GaussianStateSpec::new(1.0, -0.5, 0.1, 7.0).unwrap();
        assert!((s.alpha_phase() - (TAU - 0.5)).abs() < 1e-15);
        assert!((s.squeeze_angle() - (7.0 - TAU)).abs() < 1e-15);
        assert!(GaussianStateSpec::new(-1.0, 0.0, 0.0, 0.0).is_err());
        assert!(GaussianStateSpec::new(1.0, 0.0, -0.1, 0.0).is_err());
        assert!(GaussianStateSpec::new(f64::NAN, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn family_predicates() {
        assert!(GaussianStateSpec::coherent(1.0, 0.0).unwrap().is_coherent());
        assert!(GaussianStateSpec::squeezed_vacuum(0.4, 0.0).unwrap().is_squeezed_vacuum());
        let phase = GaussianStateSpec::phase_squeezed(2.0, 0.2, 0.3).unwrap();
        assert!((phase.squeeze_angle() - phase.alpha_phase() - PI / 2.0).abs() < 1e-15);
    }
}
