use crate::error::Result;
use crate::kernels::irregular::irregular_with_derivative;
use crate::kernels::wavefunctions::wavefunctions_with_derivatives;

/// Pattern function `f_{mn}(x) = d/dx[ψ_m(x) φ_n(x)]` for `m ≤ n`, extended
/// symmetrically (`f_{mn} = f_{nm}`), so the regular factor always carries the
/// smaller index and the product decays at large `|x|`.
///
/// Biorthogonality: `∫dθ/2π ∫dx e^{i(m−n)θ} f_{mn}(x) ψ_a(x) ψ_b(x) e^{i(b−a)θ} = δ_{ma} δ_{nb}`.
pub fn pattern_function(m: usize, n: usize, x: f64) -> Result<f64> {
    let (lo, hi) = if m <= n { (m, n) } else { (n, m) };
    let (psi, dpsi) = wavefunctions_with_derivatives(lo, x);
    let (phi, dphi) = irregular_with_derivative(hi, x)?;
    Ok(dpsi[lo] * phi + psi[lo] * dphi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::irregular::irregular_wavefunction;
    use crate::kernels::wavefunctions::regular_wavefunction;

    #[test]
    fn symmetric_in_indices() {
        for x in [-1.2, 0.4, 2.2] {
            assert_eq!(pattern_function(2, 5, x).unwrap(), pattern_function(5, 2, x).unwrap());
        }
    }

    #[test]
    fn finite_difference_of_product() {
        let h = 1e-5;
        let prod = |x: f64| regular_wavefunction(0, x) * irregular_wavefunction(1, x).unwrap();
        let fd = (prod(0.7 + h) - prod(0.7 - h)) / (2.0 * h);
        let f = pattern_function(0, 1, 0.7).unwrap();
        assert!((f - fd).abs() < 1e-8, "{f} vs {fd}");
    }
}
