//! Exact number-basis values of every sampled quantity.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phasestats::distribution::{PhaseDistribution, Window};
use crate::states::fock::FockDensityMatrix;

/// `Ψ_k = ⟨Ê^k⟩ = Σ_n ρ_{n+k,n}`, using `Ê|n⟩ = |n−1⟩`.
///
/// Zero when `k > n_max`, which is exact for the truncated state.
/// `Ψ_{−k} = Ψ_k*` is left to the caller.
pub fn oracle_exponential_moment(rho: &FockDensityMatrix, k: usize) -> Result<Complex64> {
    if k == 0 {
        return Err(Error::Domain("exponential phase moments are taken for k ≥ 1".into()));
    }
    let dim = rho.dim();
    if k >= dim {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok((0..dim - k).map(|n| rho.get(n + k, n)).sum())
}

/// `[Ψ_1, …, Ψ_{k_max}]`.
pub fn oracle_exponential_moments(rho: &FockDensityMatrix, k_max: usize) -> Vec<Complex64> {
    (1..=k_max)
        .map(|k| oracle_exponential_moment(rho, k).expect("k ≥ 1"))
        .collect()
}

/// `(⟨n̂⟩, ⟨n̂²⟩)` from the diagonal.
pub fn oracle_number_moments(rho: &FockDensityMatrix) -> (f64, f64) {
    rho.diagonal()
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(m1, m2), (n, p)| {
            let nf = n as f64;
            (m1 + nf * p, m2 + nf * nf * p)
        })
}

/// `P(φ) = (2π)^{-1}[1 + 2 Re Σ_{k=1}^{k_max} e^{−ikφ} Ψ_k]` on `grid`.
pub fn oracle_phase_distribution(rho: &FockDensityMatrix, k_max: usize, grid: &[f64]) -> PhaseDistribution {
    let psi = oracle_exponential_moments(rho, k_max);
    PhaseDistribution::from_moments_on_grid(&psi, grid.to_vec(), Window::None)
}
