use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::wavefunctions::wavefunctions_upto;
use crate::states::gaussian::GaussianStateSpec;

/// Default bound on the probability lost to Fock truncation.
pub const DEFAULT_TRUNCATION_BUDGET: f64 = 1e-10;

/// Largest cutoff chosen by [`gaussian_to_fock_auto`].
pub const MAX_AUTO_N_MAX: usize = 512;

/// Pure state `Σ_{n ≤ n_max} c_n |n⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockState {
    amplitudes: Vec<Complex64>,
}

impl FockState {
    /// Amplitudes whose squared norm lies in `[1 − DEFAULT_TRUNCATION_BUDGET, 1]`
    /// (up to rounding).
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::with_budget(amplitudes, DEFAULT_TRUNCATION_BUDGET)
    }

    pub fn with_budget(amplitudes: Vec<Complex64>, budget: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Empty("Fock state needs at least one amplitude".into()));
        }
        if amplitudes.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Domain("Fock amplitudes must be finite".into()));
        }
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if norm > 1.0 + 1e-12 {
            return Err(Error::Domain(format!("Fock amplitudes have squared norm {norm} > 1")));
        }
        if norm < 1.0 - budget {
            return Err(Error::Truncation {
                n_max: amplitudes.len() - 1,
                norm,
                budget,
            });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Domain("cannot normalize a zero or non-finite amplitude vector".into()));
        }
        Self::new(amplitudes.into_iter().map(|c| c / norm).collect())
    }

    pub fn number_state(n: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); n + 1];
        amplitudes[n] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn n_max(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨x, θ|ψ⟩ = Σ_n c_n e^{−inθ} ψ_n(x)`.
    pub fn quadrature_amplitude(&self, theta: f64, x: f64) -> Complex64 {
        let psi = wavefunctions_upto(self.n_max(), x);
        self.amplitudes
            .iter()
            .zip(&psi)
            .enumerate()
            .map(|(n, (c, p))| c * Complex64::from_polar(*p, -(n as f64) * theta))
            .sum()
    }

    pub fn quadrature_pdf(&self, theta: f64, x: f64) -> f64 {
        self.quadrature_amplitude(theta, x).norm_sqr()
    }

    pub fn density(&self) -> FockDensityMatrix {
        FockDensityMatrix::from_pure(self)
    }

    /// Copy with the cutoff raised to `n_max` by zero padding.
    pub fn padded(&self, n_max: usize) -> Self {
        let mut amplitudes = self.amplitudes.clone();
        if amplitudes.len() < n_max + 1 {
            amplitudes.resize(n_max + 1, Complex64::new(0.0, 0.0));
        }
        Self { amplitudes }
    }
}

/// Density matrix `ρ_{mn} = ⟨m|ρ|n⟩`, `0 ≤ m, n ≤ n_max`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    dim: usize,
    rho: Vec<Complex64>,
}

impl FockDensityMatrix {
    /// `ρ_{mn} = c_m c_n*`; Hermitian by construction.
    pub fn from_pure(state: &FockState) -> Self {
        let c = state.amplitudes();
        let dim = c.len();
        let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
        for m in 0..dim {
            rho[m * dim + m] = Complex64::new(c[m].norm_sqr(), 0.0);
            for n in 0..m {
                let v = c[m] * c[n].conj();
                rho[m * dim + n] = v;
                rho[n * dim + m] = v.conj();
            }
        }
        Self { dim, rho }
    }

    /// Convex combination `Σ w_i ρ_i`; weights must be nonnegative and sum to 1.
    pub fn mixture(parts: &[(f64, FockDensityMatrix)]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Empty("mixture needs at least one component".into()));
        }
        let total: f64 = parts.iter().map(|(w, _)| *w).sum();
        if parts.iter().any(|(w, _)| !(*w >= 0.0)) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("mixture weights must be nonnegative and sum to 1 (got {total})")));
        }
        let dim = parts.iter().map(|(_, r)| r.dim).max().expect("nonempty");
        let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (w, part) in parts {
            for m in 0..part.dim {
                for n in 0..part.dim {
                    rho[m * dim + n] += *w * part.get(m, n);
                }
            }
        }
        Ok(Self { dim, rho })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_max(&self) -> usize {
        self.dim - 1
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.rho[m * self.dim + n]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|n| self.get(n, n).re).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|n| self.get(n, n).re).collect()
    }

    pub fn is_hermitian(&self) -> bool {
        (0..self.dim).all(|m| (0..=m).all(|n| self.get(m, n) == self.get(n, m).conj()))
    }

    /// `⟨x, θ|ρ|x, θ⟩ = Σ_{mn} ρ_{mn} e^{−i(m−n)θ} ψ_m(x) ψ_n(x)`.
    pub fn quadrature_pdf(&self, theta: f64, x: f64) -> f64 {
        let psi = wavefunctions_upto(self.n_max(), x);
        let mut s = 0.0;
        for m in 0..self.dim {
            s += self.get(m, m).re * psi[m] * psi[m];
            for n in 0..m {
                let phase = Complex64::from_polar(1.0, -((m - n) as f64) * theta);
                s += 2.0 * (self.get(m, n) * phase).re * psi[m] * psi[n];
            }
        }
        s
    }
}

/// `fock_density(|ψ⟩) = |ψ⟩⟨ψ|`.
pub fn fock_density(state: &FockState) -> FockDensityMatrix {
    FockDensityMatrix::from_pure(state)
}

/// Unnormalized amplitudes of `D(α)S(ζ)|0⟩` for `n = 0..=n_max`.
///
/// Recurrence `√(n+1) cosh r · c_{n+1} = γ c_n − e^{2iϑ} sinh r · √n · c_{n−1}`
/// with `γ = α cosh r + α* e^{2iϑ} sinh r` and
/// `c_0 = (cosh r)^{−1/2} exp(−|α|²/2 − α*² e^{2iϑ} tanh r / 2)`.
/// Values are carried as `d_n · exp(log c_0 + s_n)` with `d_0 = 1` and a
/// rescaling offset `s_n`, so no step overflows or underflows prematurely.
fn displaced_squeezed_amplitudes(spec: &GaussianStateSpec, n_max: usize) -> Vec<Complex64> {
    let r = spec.squeeze_r();
    let (ch, sh) = (r.cosh(), r.sinh());
    let e = Complex64::from_polar(1.0, 2.0 * spec.squeeze_angle());
    let alpha = spec.alpha();
    let gamma = alpha * ch + alpha.conj() * e * sh;
    let log_c0 = Complex64::new(-0.5 * alpha.norm_sqr() - 0.5 * ch.ln(), 0.0)
        - 0.5 * alpha.conj() * alpha.conj() * e * r.tanh();
    let esh = e * sh;

    const RESCALE: f64 = 1e150;
    let mut out = Vec::with_capacity(n_max + 1);
    let mut offset = 0.0;
    let mut prev = Complex64::new(0.0, 0.0);
    let mut cur = Complex64::new(1.0, 0.0);
    out.push((log_c0).exp());
    for n in 0..n_max {
        let nf = n as f64;
        let next = (gamma * cur - esh * nf.sqrt() * prev) / (ch * (nf + 1.0).sqrt());
        prev = cur;
        cur = next;
        if cur.norm() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            offset += RESCALE.ln();
        }
        let out_n = if cur.norm() == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            (cur.ln() + log_c0 + offset).exp()
        };
        out.push(out_n);
    }
    out
}

/// Fock amplitudes of the displaced squeezed vacuum described by `spec`.
pub fn gaussian_to_fock(spec: &GaussianStateSpec, n_max: usize) -> Result<FockState> {
    gaussian_to_fock_with_budget(spec, n_max, DEFAULT_TRUNCATION_BUDGET)
}

pub fn gaussian_to_fock_with_budget(spec: &GaussianStateSpec, n_max: usize, budget: f64) -> Result<FockState> {
    FockState::with_budget(displaced_squeezed_amplitudes(spec, n_max), budget)
}

/// Smallest cutoff whose lost probability is below the default budget, capped
/// at [`MAX_AUTO_N_MAX`].
pub fn gaussian_to_fock_auto(spec: &GaussianStateSpec) -> Result<FockState> {
    let all = displaced_squeezed_amplitudes(spec, MAX_AUTO_N_MAX);
    let mut cum = 0.0;
    for (n, c) in all.iter().enumerate() {
        cum += c.norm_sqr();
        if cum >= 1.0 - DEFAULT_TRUNCATION_BUDGET {
            return FockState::new(all[..=n].to_vec());
        }
    }
    Err(Error::Truncation {
        n_max: MAX_AUTO_N_MAX,
        norm: cum,
        budget: DEFAULT_TRUNCATION_BUDGET,
    })
}
