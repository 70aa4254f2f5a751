use crate::error::{Error, Result};

/// θ-independent kernels for the photon-number moments, averaged uniformly over θ.
///
/// Follow from `⟨x²⟩_θ = ⟨n̂⟩ + ½` and `⟨x⁴⟩_θ = (3/2)(⟨n̂²⟩ + ⟨n̂⟩ + ½)`, where
/// `⟨·⟩_θ` is the phase-averaged quadrature moment.
/// * order 1: `x² − ½` samples `⟨n̂⟩`;
/// * order 2: `(2/3)x⁴ − x²` samples `⟨n̂²⟩`.
pub fn number_kernel(order: u8, x: f64) -> Result<f64> {
    let x2 = x * x;
    match order {
        1 => Ok(x2 - 0.5),
        2 => Ok(2.0 / 3.0 * x2 * x2 - x2),
        _ => Err(Error::Domain(format!("number kernels exist for orders 1 and 2, not {order}"))),
    }
}
