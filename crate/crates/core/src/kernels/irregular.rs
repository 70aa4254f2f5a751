//! Irregular (non-normalizable) oscillator solutions `φ_n`.
//!
//! `φ_n` solves `u'' = (x² − 2n − 1) u` with the parity opposite to `ψ_n`,
//! `φ_n(−x) = (−1)^{n+1} φ_n(x)`, and the Wronskian
//! `ψ_n φ_n' − ψ_n' φ_n = 2`. With that constant the pattern functions are
//! biorthogonal to the quadrature densities of `|a⟩⟨b|` with unit weight.
//!
//! The solution grows like `e^{x²/2}`, so any contamination by `ψ_n` decays
//! relative to it and outward integration from `x = 0` is stable. Each step is
//! a local Taylor expansion whose coefficients follow from the ODE exactly;
//! the Wronskian against `ψ_n` is checked at every step.

use crate::error::{Error, Result};
use crate::kernels::wavefunctions::{derivative_at_origin, value_at_origin, wavefunctions_with_derivatives};

/// Largest `|x|` accepted: beyond it `ψ_n` underflows and the Wronskian can no
/// longer be certified.
pub const MAX_ABS_X: f64 = 36.0;

/// Tolerance on `|W − 2|`.
pub const WRONSKIAN_TOL: f64 = 2e-6;

const TAYLOR_STEP: f64 = 0.05;
const MAX_TERMS: usize = 160;

fn initial_data(n: usize) -> (f64, f64) {
    if n.is_multiple_of(2) {
        (0.0, 2.0 / value_at_origin(n))
    } else {
        (-2.0 / derivative_at_origin(n), 0.0)
    }
}

/// Taylor coefficients of the solution around `x0` for a step of length `s`.
fn taylor_coefficients(x0: f64, u0: f64, du0: f64, energy: f64, s: f64) -> Vec<f64> {
    let q0 = x0 * x0 - energy;
    let mut a = Vec::with_capacity(48);
    a.push(u0);
    a.push(du0);
    let scale = u0.abs() + du0.abs() * s + f64::MIN_POSITIVE;
    let mut small_run = 0;
    for j in 0..MAX_TERMS {
        let am1 = if j >= 1 { a[j - 1] } else { 0.0 };
        let am2 = if j >= 2 { a[j - 2] } else { 0.0 };
        let next = (q0 * a[j] + 2.0 * x0 * am1 + am2) / ((j + 2) as f64 * (j + 1) as f64);
        a.push(next);
        let term = next.abs() * s.powi(j as i32 + 2);
        if term < 1e-18 * scale {
            small_run += 1;
            if small_run >= 3 {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    a
}

fn eval_taylor(a: &[f64], h: f64) -> (f64, f64) {
    let mut u = 0.0;
    let mut du = 0.0;
    for j in (0..a.len()).rev() {
        u = u * h + a[j];
        if j >= 1 {
            du = du * h + j as f64 * a[j];
        }
    }
    (u, du)
}

fn check_wronskian(n: usize, x: f64, u: f64, du: f64) -> Result<()> {
    let (psi, dpsi) = wavefunctions_with_derivatives(n, x);
    let w = psi[n] * du - dpsi[n] * u;
    if (w - 2.0).abs() > WRONSKIAN_TOL || !w.is_finite() {
        return Err(Error::NumericalInstability(format!(
            "irregular solution n = {n}: Wronskian {w} at x = {x} (expected 2)"
        )));
    }
    Ok(())
}

fn check_range(x_max: f64) -> Result<()> {
    if !(x_max.is_finite() && x_max <= MAX_ABS_X) {
        return Err(Error::NumericalInstability(format!(
            "irregular solution requested at |x| = {x_max}, beyond the certified range {MAX_ABS_X}"
        )));
    }
    Ok(())
}

/// `(φ_n(x), φ_n'(x))`.
pub fn irregular_with_derivative(n: usize, x: f64) -> Result<(f64, f64)> {
    let target = x.abs();
    check_range(target)?;
    let energy = 2.0 * n as f64 + 1.0;
    let (mut u, mut du) = initial_data(n);
    let mut x0 = 0.0;
    while x0 < target {
        let s = TAYLOR_STEP.min(target - x0);
        let a = taylor_coefficients(x0, u, du, energy, s);
        let (nu, ndu) = eval_taylor(&a, s);
        u = nu;
        du = ndu;
        x0 += s;
        check_wronskian(n, x0, u, du)?;
    }
    // φ has parity (−1)^{n+1}; its derivative has parity (−1)^n
    if x < 0.0 {
        if n.is_multiple_of(2) {
            u = -u;
        } else {
            du = -du;
        }
    }
    Ok((u, du))
}

/// `φ_n(x)`.
pub fn irregular_wavefunction(n: usize, x: f64) -> Result<f64> {
    irregular_with_derivative(n, x).map(|(u, _)| u)
}

/// `φ_n` and `φ_n'` at `x_i = i·h`, `i = 0..=n_points−1`.
///
/// Integration steps are whole multiples of `h`, so every node is reached by
/// dense output from the step that contains it.
pub fn irregular_on_half_grid(n: usize, h: f64, n_points: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(h > 0.0) || n_points == 0 {
        return Err(Error::Domain("irregular grid needs h > 0 and at least one node".into()));
    }
    let x_last = h * (n_points - 1) as f64;
    check_range(x_last)?;
    let per_step = ((TAYLOR_STEP / h).round() as usize).max(1);
    let energy = 2.0 * n as f64 + 1.0;
    let mut phi = vec![0.0; n_points];
    let mut dphi = vec![0.0; n_points];
    let (mut u, mut du) = initial_data(n);
    phi[0] = u;
    dphi[0] = du;
    let mut i0 = 0;
    while i0 + 1 < n_points {
        let i1 = (i0 + per_step).min(n_points - 1);
        let x0 = i0 as f64 * h;
        let s = (i1 - i0) as f64 * h;
        let a = taylor_coefficients(x0, u, du, energy, s);
        for i in i0 + 1..=i1 {
            let (v, dv) = eval_taylor(&a, (i - i0) as f64 * h);
            phi[i] = v;
            dphi[i] = dv;
        }
        u = phi[i1];
        du = dphi[i1];
        i0 = i1;
        check_wronskian(n, i1 as f64 * h, u, du)?;
    }
    Ok((phi, dphi))
}
