//! Normalized oscillator eigenfunctions under the `⟨x²⟩_vac = ½` convention.
//!
//! `ψ_n(x) = π^{-1/4} (2^n n!)^{-1/2} H_n(x) e^{-x²/2}`, evaluated with the
//! normalized three-term recurrence
//! `ψ_{n+1} = √(2/(n+1)) x ψ_n − √(n/(n+1)) ψ_{n−1}`.
//! The Gaussian factor is held in the exponent and the running values are
//! rescaled, so no intermediate overflows or underflows for `n` up to a few
//! thousand and any finite `x`.

/// `π^{-1/4}`.
pub const PI_POW_NEG_QUARTER: f64 = 0.751_125_544_464_942_5;

const RESCALE: f64 = 1e150;

/// `ψ_0(x), …, ψ_{n_max}(x)`.
pub fn wavefunctions_upto(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut log_scale = -0.5 * x * x;
    let mut prev = 0.0;
    let mut cur = PI_POW_NEG_QUARTER;
    out.push(scaled(cur, log_scale));
    for n in 0..n_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
        out.push(scaled(cur, log_scale));
    }
    out
}

fn scaled(mantissa: f64, log_scale: f64) -> f64 {
    if mantissa == 0.0 {
        return 0.0;
    }
    mantissa.signum() * (mantissa.abs().ln() + log_scale).exp()
}

/// `ψ_n(x)`.
pub fn regular_wavefunction(n: usize, x: f64) -> f64 {
    wavefunctions_upto(n, x)[n]
}

/// Values and first derivatives `(ψ_j(x), ψ_j'(x))` for `j = 0..=n_max`,
/// using `ψ_n' = √(n/2) ψ_{n−1} − √((n+1)/2) ψ_{n+1}`.
pub fn wavefunctions_with_derivatives(n_max: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let mut psi = wavefunctions_upto(n_max + 1, x);
    let d = (0..=n_max)
        .map(|n| {
            let nf = n as f64;
            let lower = if n == 0 { 0.0 } else { (nf / 2.0).sqrt() * psi[n - 1] };
            lower - ((nf + 1.0) / 2.0).sqrt() * psi[n + 1]
        })
        .collect();
    psi.truncate(n_max + 1);
    (psi, d)
}

/// `ψ_n(0)`: zero for odd `n`, `(−1)^{n/2} π^{-1/4} √(n!)/(2^{n/2}(n/2)!)` for even `n`.
pub fn value_at_origin(n: usize) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    // ψ_{n+2}(0) = −√((n+1)/(n+2)) ψ_n(0)
    let mut v = PI_POW_NEG_QUARTER;
    let mut j = 0;
    while j < n {
        v *= -((j as f64 + 1.0) / (j as f64 + 2.0)).sqrt();
        j += 2;
    }
    v
}

/// `ψ_n'(0)`: zero for even `n`, `√(2n) ψ_{n−1}(0)` for odd `n`.
pub fn derivative_at_origin(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        return 0.0;
    }
    (2.0 * n as f64).sqrt() * value_at_origin(n - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Explicit Hermite-polynomial series, independent of the recurrence above.
    fn hermite_series(n: usize, x: f64) -> f64 {
        // H_n(x) = n! Σ_m (−1)^m (2x)^{n−2m} / (m! (n−2m)!)
        let mut h = 0.0;
        let ln_fact = |k: usize| (1..=k).map(|i| (i as f64).ln()).sum::<f64>();
        for m in 0..=n / 2 {
            let p = n - 2 * m;
            let ln_mag = ln_fact(n) - ln_fact(m) - ln_fact(p) + if p == 0 { 0.0 } else { p as f64 * (2.0 * x.abs()).ln() };
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 } * if x < 0.0 && p % 2 == 1 { -1.0 } else { 1.0 };
            if p > 0 && x == 0.0 {
                continue;
            }
            h += sign * ln_mag.exp();
        }
        let ln_norm = -0.5 * (n as f64 * 2f64.ln() + ln_fact(n));
        PI_POW_NEG_QUARTER * h * ln_norm.exp() * (-0.5 * x * x).exp()
    }

    #[test]
    fn ground_state_peak() {
        assert!((regular_wavefunction(0, 0.0) - 0.7511255444649425).abs() < 1e-15);
        assert_eq!(regular_wavefunction(1, 0.0), 0.0);
    }

    #[test]
    fn matches_hermite_series() {
        for n in [0, 1, 2, 5, 10, 17] {
            for x in [-2.3, -0.4, 0.0, 0.9, 1.3, 3.1] {
                let a = regular_wavefunction(n, x);
                // the alternating series loses ~4 digits at n = 17
                let b = hermite_series(n, x);
                assert!((a - b).abs() < 1e-10, "n={n} x={x}: {a} vs {b}");
            }
        }
        // 40-digit reference for ψ_10(1.3)
        assert!((regular_wavefunction(10, 1.3) - (-0.349_991_471_678_912_36)).abs() < 1e-10);
    }

    #[test]
    fn normalized_and_orthogonal() {
        let h = 1e-3;
        let xs: Vec<f64> = (-12000..=12000).map(|i| i as f64 * h).collect();
        let tables: Vec<Vec<f64>> = xs.iter().map(|&x| wavefunctions_upto(12, x)).collect();
        for m in 0..=12 {
            for n in 0..=m {
                let s: f64 = tables.iter().map(|t| t[m] * t[n]).sum::<f64>() * h;
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((s - want).abs() < 1e-10, "({m},{n}) -> {s}");
            }
        }
    }

    #[test]
    fn no_overflow_for_high_orders() {
        let v = wavefunctions_upto(600, 30.0);
        assert!(v.iter().all(|x| x.is_finite()));
        assert!(v[0] < 1e-190);
        // x = 30 lies inside the classically allowed region of n = 600
        assert!(v[600].abs() < 1.0 && v[600] != 0.0);
        let far = wavefunctions_upto(5, 45.0);
        assert!(far.iter().all(|x| *x == 0.0 || x.abs() < 1e-300));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for x in [-1.7, 0.2, 2.5] {
            let (_, d) = wavefunctions_with_derivatives(9, x);
            let up = wavefunctions_upto(9, x + h);
            let dn = wavefunctions_upto(9, x - h);
            for n in 0..=9 {
                let fd = (up[n] - dn[n]) / (2.0 * h);
                assert!((fd - d[n]).abs() < 1e-8, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn origin_values() {
        for n in 0..30 {
            assert!((value_at_origin(n) - regular_wavefunction(n, 0.0)).abs() < 1e-15);
            let (_, d) = wavefunctions_with_derivatives(n, 0.0);
            assert!((derivative_at_origin(n) - d[n]).abs() < 1e-14);
        }
    }
}
