use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::irregular::irregular_on_half_grid;
use crate::kernels::wavefunctions::wavefunctions_with_derivatives;

/// Symmetric uniform grid `x_i = −x_cut + i·step`, `i = 0..n_points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelGrid {
    half_points: usize,
    step: f64,
}

impl KernelGrid {
    pub const DEFAULT_STEP: f64 = 1e-3;

    /// Grid with at least the requested cutoff; `x_cut` is rounded up to a whole
    /// number of steps.
    pub fn new(x_cut: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && x_cut > 0.0 && x_cut.is_finite()) {
            return Err(Error::Domain(format!("invalid kernel grid (x_cut = {x_cut}, step = {step})")));
        }
        let half_points = (x_cut / step - 1e-9).ceil() as usize;
        Ok(Self { half_points, step })
    }

    /// `x_cut = max(6, √(2 n_max + 1) + 4)` at the default step.
    pub fn for_n_max(n_max: usize) -> Self {
        let x_cut = (((2 * n_max + 1) as f64).sqrt() + 4.0).max(6.0);
        Self::new(x_cut, Self::DEFAULT_STEP).expect("positive cutoff")
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn x_cut(&self) -> f64 {
        self.half_points as f64 * self.step
    }

    pub fn half_points(&self) -> usize {
        self.half_points
    }

    pub fn n_points(&self) -> usize {
        2 * self.half_points + 1
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - self.half_points as f64) * self.step
    }
}

/// Continuation of `F_k` beyond `±x_cut`: `F(x) = F(±x_cut)·(x_cut/|x|)^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TailModel {
    PowerLaw { exponent: f64 },
}

/// Tabulated radial factor `F_k` of the phase-moment kernel
/// `K_k(x, θ) = e^{ikθ} F_k(x) / 2π`.
///
/// With this placement of `1/2π`, `Ψ_k = ∫_0^{2π}dθ ∫dx K_k(x, θ) p(x, θ)`,
/// and for uniformly distributed `θ` the Monte Carlo estimator is the sample
/// mean of `e^{ikθ} F_k(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub(crate) k: usize,
    pub(crate) n_max_used: usize,
    pub(crate) grid: KernelGrid,
    pub(crate) values: Vec<f64>,
    pub(crate) tail: TailModel,
}

impl KernelTable {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_max_used(&self) -> usize {
        self.n_max_used
    }

    pub fn grid(&self) -> &KernelGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail(&self) -> TailModel {
        self.tail
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn tail_value(&self, x: f64) -> f64 {
        let x_cut = self.grid.x_cut();
        let edge = if x > 0.0 { self.values[self.values.len() - 1] } else { self.values[0] };
        match self.tail {
            TailModel::PowerLaw { exponent } => edge * (x_cut / x.abs()).powf(exponent),
        }
    }

    /// `F_k(x)`: linear interpolation on the grid, tail model outside it.
    pub fn eval(&self, x: f64) -> f64 {
        let x_cut = self.grid.x_cut();
        if x.abs() > x_cut {
            return self.tail_value(x);
        }
        let t = (x + x_cut) / self.grid.step;
        let last = self.values.len() - 1;
        let i = (t.floor() as usize).min(last - 1);
        let frac = t - i as f64;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }

    /// `∫_a^b F_k(x) dx` of the interpolant (and the tail beyond the grid).
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if b < a {
            return -self.integral(b, a);
        }
        let x_cut = self.grid.x_cut();
        let mut total = 0.0;
        let lo = a.max(-x_cut);
        let hi = b.min(x_cut);
        if hi > lo {
            total += self.grid_integral(lo, hi);
        }
        if a < -x_cut {
            total += self.tail_integral(a, b.min(-x_cut));
        }
        if b > x_cut {
            total += self.tail_integral(a.max(x_cut), b);
        }
        total
    }

    fn grid_integral(&self, a: f64, b: f64) -> f64 {
        let x_cut = self.grid.x_cut();
        let h = self.grid.step;
        let last = self.values.len() - 1;
        let ia = (((a + x_cut) / h).floor() as usize).min(last - 1);
        let ib = (((b + x_cut) / h).floor() as usize).min(last - 1);
        let seg = |i: usize, u: f64, v: f64| {
            // exact integral of the linear piece on [x_i + u·h, x_i + v·h]
            let (y0, y1) = (self.values[i], self.values[i + 1]);
            h * (y0 * (v - u) + 0.5 * (y1 - y0) * (v * v - u * u))
        };
        let ua = (a + x_cut) / h - ia as f64;
        let vb = (b + x_cut) / h - ib as f64;
        if ia == ib {
            return seg(ia, ua, vb);
        }
        let mut s = seg(ia, ua, 1.0);
        for i in ia + 1..ib {
            s += 0.5 * h * (self.values[i] + self.values[i + 1]);
        }
        s + seg(ib, 0.0, vb)
    }

    fn tail_integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let m = 64;
        let h = (b - a) / m as f64;
        let mut s = self.tail_value(a) + self.tail_value(b);
        for i in 1..m {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * self.tail_value(a + i as f64 * h);
        }
        s * h / 3.0
    }

    /// Mean of `F_k` over `[a, b]`.
    pub fn bin_average(&self, a: f64, b: f64) -> f64 {
        if b == a {
            return self.eval(a);
        }
        self.integral(a, b) / (b - a)
    }

    /// Central-difference slope of the interpolant.
    pub fn derivative(&self, x: f64) -> f64 {
        let h = self.grid.step;
        (self.eval(x + h) - self.eval(x - h)) / (2.0 * h)
    }
}

/// Construction parameters shared by all kernel orders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelOptions {
    /// Upper limit of the pattern-function sum `F_k = Σ_{n=0}^{n_max} f_{n,n+k}`.
    pub n_max: usize,
    pub grid: KernelGrid,
    /// Cap on `max |F_k|` over the grid.
    pub f_bound: f64,
    /// Tolerance of the moment certificate `|∫F_k ψ_n ψ_{n+k} dx − 1|`, `n ≤ n_max`.
    pub certificate_tol: f64,
}

impl KernelOptions {
    pub const DEFAULT_N_MAX: usize = 40;
    pub const DEFAULT_F_BOUND: f64 = 32.0;
    pub const DEFAULT_CERTIFICATE_TOL: f64 = 1e-4;

    pub fn with_n_max(n_max: usize) -> Self {
        Self {
            n_max,
            grid: KernelGrid::for_n_max(n_max),
            f_bound: Self::DEFAULT_F_BOUND,
            certificate_tol: Self::DEFAULT_CERTIFICATE_TOL,
        }
    }
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self::with_n_max(Self::DEFAULT_N_MAX)
    }
}

/// `ψ_j, ψ_j', φ_j, φ_j'` on the nonnegative half of a kernel grid.
pub(crate) struct WaveTable {
    pub psi: Vec<Vec<f64>>,
    pub dpsi: Vec<Vec<f64>>,
    pub phi: Vec<Vec<f64>>,
    pub dphi: Vec<Vec<f64>>,
}

impl WaveTable {
    pub fn build(j_max: usize, grid: &KernelGrid) -> Result<Self> {
        let npts = grid.half_points() + 1;
        let h = grid.step();
        let mut psi = vec![vec![0.0; npts]; j_max + 1];
        let mut dpsi = vec![vec![0.0; npts]; j_max + 1];
        let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..npts)
            .into_par_iter()
            .map(|i| wavefunctions_with_derivatives(j_max, i as f64 * h))
            .collect();
        for (i, (p, d)) in rows.into_iter().enumerate() {
            for j in 0..=j_max {
                psi[j][i] = p[j];
                dpsi[j][i] = d[j];
            }
        }
        let irregular: Vec<(Vec<f64>, Vec<f64>)> = (0..=j_max)
            .into_par_iter()
            .map(|j| irregular_on_half_grid(j, h, npts))
            .collect::<Result<_>>()?;
        let (phi, dphi) = irregular.into_iter().unzip();
        Ok(Self { psi, dpsi, phi, dphi })
    }

    fn j_max(&self) -> usize {
        self.psi.len() - 1
    }
}

fn build_from_waves(k: usize, opts: &KernelOptions, waves: &WaveTable) -> Result<KernelTable> {
    if k == 0 {
        return Err(Error::Domain("phase-moment kernels start at k = 1".into()));
    }
    let n_max = opts.n_max;
    debug_assert!(waves.j_max() >= n_max + k);
    let grid = opts.grid;
    let npts = grid.half_points() + 1;
    let mut half = vec![0.0; npts];
    for n in 0..=n_max {
        let (p, dp) = (&waves.psi[n], &waves.dpsi[n]);
        let (q, dq) = (&waves.phi[n + k], &waves.dphi[n + k]);
        for i in 0..npts {
            half[i] += dp[i] * q[i] + p[i] * dq[i];
        }
    }
    if half.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalInstability(format!("non-finite kernel value for k = {k}")));
    }

    // ∫F_k ψ_n ψ_{n+k} dx: the integrand is even, trapezoid on the half grid
    let h = grid.step();
    for n in 0..=n_max {
        let (a, b) = (&waves.psi[n], &waves.psi[n + k]);
        let mut s = 0.5 * half[0] * a[0] * b[0];
        for i in 1..npts {
            let w = if i == npts - 1 { 0.5 } else { 1.0 };
            s += w * half[i] * a[i] * b[i];
        }
        let moment = 2.0 * h * s;
        if (moment - 1.0).abs() > opts.certificate_tol {
            return Err(Error::Convergence {
                k,
                detail: format!("∫F_k ψ_{n} ψ_{} dx = {moment}, expected 1", n + k),
            });
        }
    }

    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut values = Vec::with_capacity(grid.n_points());
    values.extend(half[1..].iter().rev().map(|v| sign * v));
    values.extend_from_slice(&half);

    let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_abs > opts.f_bound {
        return Err(Error::Convergence {
            k,
            detail: format!("max |F_k| = {max_abs} exceeds the bound {}", opts.f_bound),
        });
    }

    // local log-log slope over the last half unit, floored at the asymptotic k + 2
    let back = ((0.5 / h).round() as usize).min(npts - 1);
    let (x1, f1) = (grid.x_cut(), half[npts - 1]);
    let (x0, f0) = (x1 - back as f64 * h, half[npts - 1 - back]);
    let measured = -(f1.abs() / f0.abs()).ln() / (x1 / x0).ln();
    let floor = k as f64 + 2.0;
    let exponent = if measured.is_finite() { measured.max(floor) } else { floor };

    Ok(KernelTable {
        k,
        n_max_used: n_max,
        grid,
        values,
        tail: TailModel::PowerLaw { exponent },
    })
}

/// Builds and certifies `F_k` for a single order.
pub fn phase_moment_kernel(k: usize, opts: &KernelOptions) -> Result<KernelTable> {
    let waves = WaveTable::build(opts.n_max + k, &opts.grid)?;
    build_from_waves(k, opts, &waves)
}

/// Kernels `F_1..F_{k_max}` built with common options.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSet {
    options: KernelOptions,
    tables: Vec<KernelTable>,
}

impl KernelSet {
    pub fn build(k_max: usize, options: KernelOptions) -> Result<Self> {
        let waves = WaveTable::build(options.n_max + k_max, &options.grid)?;
        let tables = (1..=k_max)
            .into_par_iter()
            .map(|k| build_from_waves(k, &options, &waves))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { options, tables })
    }

    /// Assembles a set from tables for `k = 1..=len`, in order.
    pub fn from_tables(options: KernelOptions, tables: Vec<KernelTable>) -> Result<Self> {
        for (i, t) in tables.iter().enumerate() {
            if t.k != i + 1 || t.n_max_used != options.n_max || t.grid != options.grid {
                return Err(Error::Domain(format!(
                    "kernel table {} does not match position {} or the set options",
                    t.k,
                    i + 1
                )));
            }
        }
        Ok(Self { options, tables })
    }

    pub fn options(&self) -> &KernelOptions {
        &self.options
    }

    pub fn k_max(&self) -> usize {
        self.tables.len()
    }

    pub fn get(&self, k: usize) -> Result<&KernelTable> {
        if k == 0 || k > self.tables.len() {
            return Err(Error::MissingKernel {
                k,
                available: self.tables.len(),
            });
        }
        Ok(&self.tables[k - 1])
    }

    pub fn tables(&self) -> &[KernelTable] {
        &self.tables
    }
}
