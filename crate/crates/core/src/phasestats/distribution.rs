use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampler::estimate::MomentEstimate;

/// Weights applied to the Fourier terms of the synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    /// `w_k = 1`: the raw truncated series.
    #[default]
    None,
    /// `w_k = 1 − k/(k_max+1)`: Fejér weights, nonnegative for `|Ψ_k| ≤ 1`.
    Cesaro,
}

impl Window {
    pub fn weight(self, k: usize, k_max: usize) -> f64 {
        match self {
            Window::None => 1.0,
            Window::Cesaro => 1.0 - k as f64 / (k_max as f64 + 1.0),
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Window::None => "none",
            Window::Cesaro => "cesaro",
        })
    }
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Window::None),
            "cesaro" => Ok(Window::Cesaro),
            other => Err(Error::Config(format!("unknown window '{other}' (expected none or cesaro)"))),
        }
    }
}

/// Truncated Fourier synthesis
/// `P(φ) = (2π)^{-1}[1 + 2 Σ_{k=1}^{k_max} w_k Re(e^{−ikφ} Ψ_k)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDistribution {
    grid: Vec<f64>,
    values: Vec<f64>,
    k_max: usize,
    window: Window,
}

/// `φ_i = −π + 2π i/N`, `i = 0..N`.
pub fn uniform_phase_grid(grid_size: usize) -> Vec<f64> {
    (0..grid_size).map(|i| -PI + TAU * i as f64 / grid_size as f64).collect()
}

impl PhaseDistribution {
    /// Synthesis from `[Ψ_1, …, Ψ_{k_max}]` on an arbitrary grid.
    pub fn from_moments_on_grid(psi: &[Complex64], grid: Vec<f64>, window: Window) -> Self {
        let k_max = psi.len();
        let values = grid
            .iter()
            .map(|&phi| {
                let s: f64 = psi
                    .iter()
                    .enumerate()
                    .map(|(i, p)| {
                        let k = i + 1;
                        window.weight(k, k_max) * (Complex64::from_polar(1.0, -(k as f64) * phi) * p).re
                    })
                    .sum();
                (1.0 + 2.0 * s) / TAU
            })
            .collect();
        Self {
            grid,
            values,
            k_max,
            window,
        }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// Periodic trapezoid rule, exact for the synthesized trigonometric
    /// polynomial on a uniform grid of more than `k_max` points.
    pub fn integral(&self) -> f64 {
        let n = self.grid.len();
        if n == 0 {
            return 0.0;
        }
        let mut s = 0.0;
        for i in 0..n {
            let next = if i + 1 < n { self.grid[i + 1] } else { self.grid[0] + TAU };
            s += 0.5 * (self.values[i] + self.values[(i + 1) % n]) * (next - self.grid[i]);
        }
        s
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Indices of circular local maxima whose topographic prominence exceeds
    /// `min_prominence`, in grid order.
    pub fn local_maxima(&self, min_prominence: f64) -> Vec<usize> {
        let v = &self.values;
        let n = v.len();
        if n < 3 {
            return Vec::new();
        }
        let global_min = self.min_value();
        let mut out = Vec::new();
        for i in 0..n {
            let (l, r) = (v[(i + n - 1) % n], v[(i + 1) % n]);
            // plateau points count once, at their left end
            if !(v[i] > l && v[i] >= r) {
                continue;
            }
            let mut j = i;
            let mut right_min = f64::INFINITY;
            let mut right_higher = false;
            for _ in 1..n {
                j = (j + 1) % n;
                if v[j] > v[i] {
                    right_higher = true;
                    break;
                }
                right_min = right_min.min(v[j]);
            }
            let mut j = i;
            let mut left_min = f64::INFINITY;
            let mut left_higher = false;
            for _ in 1..n {
                j = (j + n - 1) % n;
                if v[j] > v[i] {
                    left_higher = true;
                    break;
                }
                left_min = left_min.min(v[j]);
            }
            let base = if right_higher || left_higher {
                let l = if left_higher { left_min } else { f64::NEG_INFINITY };
                let r = if right_higher { right_min } else { f64::NEG_INFINITY };
                l.max(r)
            } else {
                global_min
            };
            if v[i] - base > min_prominence {
                out.push(i);
            }
        }
        out
    }

    /// `1 − |∫e^{iφ}P(φ)dφ|` by the trapezoid rule.
    pub fn circular_variance(&self) -> f64 {
        let n = self.grid.len();
        let h = TAU / n as f64;
        let m: Complex64 = self
            .grid
            .iter()
            .zip(&self.values)
            .map(|(&phi, &p)| Complex64::from_polar(p * h, phi))
            .sum();
        1.0 - m.norm()
    }

    /// Linear interpolation on a uniform periodic grid.
    pub fn value_at(&self, phi: f64) -> f64 {
        let n = self.grid.len();
        let h = TAU / n as f64;
        let t = (phi - self.grid[0]).rem_euclid(TAU) / h;
        let i = (t.floor() as usize) % n;
        let frac = t - t.floor();
        self.values[i] * (1.0 - frac) + self.values[(i + 1) % n] * frac
    }

    /// Two-column `φ P(φ)` table.
    pub fn to_text(&self) -> String {
        let mut s = format!("# phi P(phi); k_max = {}, window = {}\n", self.k_max, self.window);
        for (phi, p) in self.grid.iter().zip(&self.values) {
            s.push_str(&format!("{phi:?} {p:?}\n"));
        }
        s
    }
}

fn check_moment_order(moments: &[MomentEstimate]) -> Result<()> {
    for (i, m) in moments.iter().enumerate() {
        if m.k != i + 1 {
            return Err(Error::Domain(format!(
                "moment at position {} has k = {}, expected {}",
                i + 1,
                m.k,
                i + 1
            )));
        }
    }
    Ok(())
}

/// `P(φ)` on `uniform_phase_grid(grid_size)` from estimates `Ψ̂_1..Ψ̂_{k_max}`.
pub fn synthesize_phase_distribution(
    moments: &[MomentEstimate],
    grid_size: usize,
    window: Window,
) -> Result<PhaseDistribution> {
    check_moment_order(moments)?;
    if grid_size < 4 * moments.len() || grid_size < 4 {
        return Err(Error::GridTooCoarse {
            grid_size,
            k_max: moments.len(),
        });
    }
    let psi: Vec<Complex64> = moments.iter().map(|m| m.value).collect();
    Ok(PhaseDistribution::from_moments_on_grid(&psi, uniform_phase_grid(grid_size), window))
}

/// Pointwise standard error bound of the synthesis,
/// `(1/π) √(Σ w_k² σ_k²)` with `σ_k` the larger componentwise error.
pub fn synthesis_std_error(moments: &[MomentEstimate], window: Window) -> f64 {
    let k_max = moments.len();
    moments
        .iter()
        .map(|m| (window.weight(m.k, k_max) * m.std_error).powi(2))
        .sum::<f64>()
        .sqrt()
        / PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn exact(psi: &[Complex64]) -> Vec<MomentEstimate> {
        psi.iter()
            .enumerate()
            .map(|(i, &v)| MomentEstimate::exact(i + 1, v))
            .collect()
    }

    #[test]
    fn zero_moments_give_uniform() {
        let d = synthesize_phase_distribution(&exact(&[Complex64::new(0.0, 0.0); 5]), 64, Window::None).unwrap();
        assert!(d.values().iter().all(|v| (v - 1.0 / TAU).abs() < 1e-16));
        assert!((d.integral() - 1.0).abs() < 1e-14);
        assert!(d.local_maxima(0.0).is_empty());
    }

    #[test]
    fn coarse_grid_rejected() {
        let m = exact(&[Complex64::new(0.1, 0.0); 20]);
        assert!(matches!(
            synthesize_phase_distribution(&m, 79, Window::None),
            Err(Error::GridTooCoarse { grid_size: 79, k_max: 20 })
        ));
        assert!(synthesize_phase_distribution(&m, 80, Window::None).is_ok());
    }

    #[test]
    fn misordered_moments_rejected() {
        let mut m = exact(&[Complex64::new(0.1, 0.0); 3]);
        m.swap(0, 1);
        assert!(synthesize_phase_distribution(&m, 64, Window::None).is_err());
    }

    #[test]
    fn window_names() {
        assert_eq!("cesaro".parse::<Window>().unwrap(), Window::Cesaro);
        assert_eq!(Window::None.to_string(), "none");
        assert!("hann".parse::<Window>().is_err());
    }

    #[test]
    fn single_peak_location() {
        let psi: Vec<Complex64> = (1..=60).map(|k| Complex64::from_polar(0.9f64.powi(k), 0.5 * k as f64)).collect();
        let d = synthesize_phase_distribution(&exact(&psi), 720, Window::Cesaro).unwrap();
        let maxima = d.local_maxima(1e-3);
        assert_eq!(maxima.len(), 1);
        assert!((d.grid()[maxima[0]] - 0.5).abs() <= TAU / 720.0);
    }

    proptest! {
        #[test]
        fn normalized_and_fejer_nonnegative(
            mags in proptest::collection::vec(0.0f64..1.0, 1..15),
            phases in proptest::collection::vec(0.0f64..TAU, 15),
        ) {
            // moments of a point mixture are a valid characteristic sequence
            let psi: Vec<Complex64> = mags.iter().enumerate()
                .map(|(i, _)| {
                    let k = (i + 1) as f64;
                    (Complex64::from_polar(1.0, k * phases[0]) + Complex64::from_polar(1.0, k * phases[1])) * 0.5
                })
                .collect();
            let d = synthesize_phase_distribution(&exact(&psi), 4 * psi.len() + 7, Window::Cesaro).unwrap();
            prop_assert!((d.integral() - 1.0).abs() < 1e-8);
            prop_assert!(d.min_value() >= -1e-12);
            let raw = synthesize_phase_distribution(&exact(&psi), 4 * psi.len() + 7, Window::None).unwrap();
            prop_assert!((raw.integral() - 1.0).abs() < 1e-8);
        }

        #[test]
        fn shift_covariance(delta in -PI..PI) {
            let psi: Vec<Complex64> = (1..=8).map(|k| Complex64::from_polar(0.8f64.powi(k), 0.3 * k as f64)).collect();
            let shifted: Vec<Complex64> = psi.iter().enumerate()
                .map(|(i, p)| p * Complex64::from_polar(1.0, (i + 1) as f64 * delta)).collect();
            let grid = uniform_phase_grid(4096);
            let a = PhaseDistribution::from_moments_on_grid(&psi, grid.clone(), Window::None);
            let b = PhaseDistribution::from_moments_on_grid(&shifted, grid.clone(), Window::None);
            for &phi in grid.iter().step_by(97) {
                let want = PhaseDistribution::from_moments_on_grid(&psi, vec![phi - delta], Window::None).values()[0];
                prop_assert!((b.value_at(phi) - want).abs() < 1e-5);
                prop_assert!((a.value_at(phi - delta) - b.value_at(phi)).abs() < 1e-5);
            }
            // exact evaluation at shifted points
            for &phi in grid.iter().step_by(211) {
                let pb = PhaseDistribution::from_moments_on_grid(&shifted, vec![phi + delta], Window::None).values()[0];
                let pa = PhaseDistribution::from_moments_on_grid(&psi, vec![phi], Window::None).values()[0];
                prop_assert!((pa - pb).abs() < 1e-6);
            }
        }
    }
}
