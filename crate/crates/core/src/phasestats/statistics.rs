use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::sampler::estimate::MomentEstimate;

/// `Δφ` closer than this to `π/2` makes the product unbounded.
pub const UNBOUNDED_TOLERANCE: f64 = 1e-6;

/// Number–phase uncertainty product `Δn·tan Δφ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Product {
    Finite(f64),
    /// `Δφ` within [`UNBOUNDED_TOLERANCE`] of `π/2`.
    Unbounded,
}

impl Product {
    pub fn finite(self) -> Option<f64> {
        match self {
            Product::Finite(v) => Some(v),
            Product::Unbounded => None,
        }
    }
}

impl fmt::Display for Product {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Product::Finite(v) => write!(f, "{v:.4}"),
            Product::Unbounded => f.write_str("unbounded"),
        }
    }
}

/// Mean phase, phase uncertainty and number statistics of one state, with
/// first-order propagated standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseStatistics {
    /// `arg Ψ̂_1` in `(−π, π]`.
    pub mean_phase: f64,
    pub mean_phase_error: f64,
    /// `arccos(min(|Ψ̂_1|, 1))` in `[0, π/2]`.
    pub phase_uncertainty: f64,
    pub phase_uncertainty_error: f64,
    pub n_mean: f64,
    pub n_mean_error: f64,
    /// `⟨n̂²⟩ − ⟨n̂⟩²`, clamped at zero.
    pub n_variance: f64,
    pub n_variance_error: f64,
    pub n_uncertainty: f64,
    pub n_uncertainty_error: f64,
    pub product: Product,
    /// Infinite when the product is unbounded.
    pub product_error: f64,
    /// Set when the sampled variance was negative and clamped.
    pub degenerate_variance: bool,
}

/// Statistics from `Ψ̂_1`, `⟨n̂⟩` and `⟨n̂²⟩`.
///
/// Errors: `σ_Δφ = min(σ_c/√(1−c²), √(2σ_c))` for `c = |Ψ̂_1|` (the second
/// form bounds the arccos singularity at `c → 1`),
/// `σ_V² = σ_2² + (2⟨n̂⟩σ_1)²`, `σ_Δn = σ_V/(2Δn)`, and
/// `σ_P² = (tan Δφ σ_Δn)² + (Δn sec² Δφ σ_Δφ)²`.
pub fn phase_statistics(psi_1: &MomentEstimate, n_mean: &MomentEstimate, n_second: &MomentEstimate) -> PhaseStatistics {
    let c = psi_1.value.norm();
    let sigma_c = psi_1.std_error;
    let mut mean_phase = psi_1.value.im.atan2(psi_1.value.re);
    if mean_phase <= -std::f64::consts::PI {
        mean_phase = std::f64::consts::PI;
    }
    let mean_phase_error = if c > 0.0 { sigma_c / c } else { f64::INFINITY };
    let phase_uncertainty = c.min(1.0).acos();
    let phase_uncertainty_error = {
        let slope = if c < 1.0 { sigma_c / (1.0 - c * c).sqrt() } else { f64::INFINITY };
        slope.min((2.0 * sigma_c).sqrt())
    };

    let m1 = n_mean.value.re;
    let m2 = n_second.value.re;
    let raw_var = m2 - m1 * m1;
    let degenerate_variance = raw_var < 0.0;
    let n_variance = raw_var.max(0.0);
    let n_variance_error = (n_second.std_error.powi(2) + (2.0 * m1 * n_mean.std_error).powi(2)).sqrt();
    let n_uncertainty = n_variance.sqrt();
    let n_uncertainty_error = if n_uncertainty > 0.0 {
        n_variance_error / (2.0 * n_uncertainty)
    } else {
        n_variance_error.sqrt()
    };

    let (product, product_error) = if (FRAC_PI_2 - phase_uncertainty).abs() < UNBOUNDED_TOLERANCE {
        (Product::Unbounded, f64::INFINITY)
    } else {
        let t = phase_uncertainty.tan();
        let sec2 = 1.0 + t * t;
        let err = ((t * n_uncertainty_error).powi(2) + (n_uncertainty * sec2 * phase_uncertainty_error).powi(2)).sqrt();
        (Product::Finite(n_uncertainty * t), err)
    };

    PhaseStatistics {
        mean_phase,
        mean_phase_error,
        phase_uncertainty,
        phase_uncertainty_error,
        n_mean: m1,
        n_mean_error: n_mean.std_error,
        n_variance,
        n_variance_error,
        n_uncertainty,
        n_uncertainty_error,
        product,
        product_error,
        degenerate_variance,
    }
}

impl PhaseStatistics {
    /// `⟨n̂⟩ − Δn² > 3σ`: number fluctuations below the Poisson level.
    pub fn sub_poissonian(&self) -> bool {
        let sigma = (self.n_mean_error.powi(2) + self.n_variance_error.powi(2)).sqrt();
        self.n_mean - self.n_variance > 3.0 * sigma
    }

    /// `Δn·tan Δφ < ½ − 3σ`.
    pub fn violates_uncertainty(&self) -> bool {
        match self.product {
            Product::Finite(p) => p < 0.5 - 3.0 * self.product_error,
            Product::Unbounded => false,
        }
    }
}
