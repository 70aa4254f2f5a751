use std::f64::consts::TAU;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::cache::write_atomic;
use crate::kernels::wavefunctions::wavefunctions_upto;
use crate::states::{FockState, GaussianStateSpec, State};

/// Samples per independently seeded RNG stream.
pub const CHUNK_SIZE: usize = 8192;

/// Number of local-oscillator phase intervals in a sweep.
pub const SWEEP_INTERVALS: usize = 128;

/// How local-oscillator phases are assigned to samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseScheme {
    /// Independent uniform `θ ∈ [0, 2π)`.
    #[serde(rename = "uniform-random")]
    UniformRandom,
    /// Linear sweep `θ_i = 2π(i + ½)/n` over the record, analysed as 128
    /// consecutive equal-length intervals.
    #[serde(rename = "swept-128")]
    Swept128,
}

impl fmt::Display for PhaseScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhaseScheme::UniformRandom => "uniform-random",
            PhaseScheme::Swept128 => "swept-128",
        })
    }
}

impl FromStr for PhaseScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform-random" => Ok(PhaseScheme::UniformRandom),
            "swept-128" => Ok(PhaseScheme::Swept128),
            other => Err(Error::Config(format!(
                "unknown phase scheme '{other}' (expected uniform-random or swept-128)"
            ))),
        }
    }
}

fn swept_phase(i: usize, n: usize) -> f64 {
    TAU * (i as f64 + 0.5) / n as f64
}

/// Homodyne samples `(θ_i, x_i)` with their provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct HomodyneRecord {
    thetas: Vec<f64>,
    xs: Vec<f64>,
    seed: u64,
    state_descriptor: String,
}

impl HomodyneRecord {
    /// Validates `θ ∈ [0, 2π)` and finite `x`.
    pub fn new(thetas: Vec<f64>, xs: Vec<f64>, seed: u64, state_descriptor: impl Into<String>) -> Result<Self> {
        if thetas.len() != xs.len() {
            return Err(Error::Domain(format!("{} phases but {} amplitudes", thetas.len(), xs.len())));
        }
        if let Some(t) = thetas.iter().find(|t| !(**t >= 0.0 && **t < TAU)) {
            return Err(Error::Domain(format!("phase {t} outside [0, 2π)")));
        }
        if xs.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite quadrature sample".into()));
        }
        Ok(Self {
            thetas,
            xs,
            seed,
            state_descriptor: state_descriptor.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn state_descriptor(&self) -> &str {
        &self.state_descriptor
    }

    /// `Swept128` when every phase equals the sweep formula, else `UniformRandom`.
    pub fn phase_scheme(&self) -> PhaseScheme {
        let n = self.len();
        let swept = n >= SWEEP_INTERVALS && self.thetas.iter().enumerate().all(|(i, &t)| t == swept_phase(i, n));
        if swept {
            PhaseScheme::Swept128
        } else {
            PhaseScheme::UniformRandom
        }
    }

    /// Copy with every amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            thetas: self.thetas.clone(),
            xs: self.xs.iter().map(|x| x * factor).collect(),
            seed: self.seed,
            state_descriptor: self.state_descriptor.clone(),
        }
    }

    /// Largest circular gap between consecutive phases.
    pub fn largest_phase_gap(&self) -> f64 {
        if self.is_empty() {
            return TAU;
        }
        if self.phase_scheme() == PhaseScheme::Swept128 {
            return TAU / self.len() as f64;
        }
        let mut t = self.thetas.clone();
        t.par_sort_unstable_by(f64::total_cmp);
        let wrap = t[0] + TAU - t[t.len() - 1];
        t.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::max)
    }

    /// Binary `HREC` encoding:
    /// `"HREC"`, u32 version (1), u64 n_samples, u64 seed, u32 descriptor
    /// length + UTF-8 bytes, then `n_samples` pairs of f64 `(θ, x)`; little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(32 + self.state_descriptor.len() + 16 * self.len());
        out.extend_from_slice(b"HREC");
        out.extend_from_slice(&1u32.to_le_bytes());
        out.extend_from_slice(&(self.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&(self.state_descriptor.len() as u32).to_le_bytes());
        out.extend_from_slice(self.state_descriptor.as_bytes());
        for (t, x) in self.thetas.iter().zip(&self.xs) {
            out.extend_from_slice(&t.to_le_bytes());
            out.extend_from_slice(&x.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |d: &str| Error::format("record file", d);
        let get = |from: usize, len: usize| bytes.get(from..from + len).ok_or_else(|| bad("truncated header"));
        if get(0, 4)? != b"HREC" {
            return Err(bad("bad magic"));
        }
        let version = u32::from_le_bytes(get(4, 4)?.try_into().expect("4 bytes"));
        if version != 1 {
            return Err(bad(&format!("unsupported version {version}")));
        }
        let n = u64::from_le_bytes(get(8, 8)?.try_into().expect("8 bytes")) as usize;
        let seed = u64::from_le_bytes(get(16, 8)?.try_into().expect("8 bytes"));
        let dlen = u32::from_le_bytes(get(24, 4)?.try_into().expect("4 bytes")) as usize;
        let desc = std::str::from_utf8(get(28, dlen)?).map_err(|_| bad("descriptor is not UTF-8"))?;
        let body = &bytes[28 + dlen..];
        if n.checked_mul(16) != Some(body.len()) {
            return Err(bad(&format!("header declares {n} samples, body holds {} bytes", body.len())));
        }
        let mut thetas = Vec::with_capacity(n);
        let mut xs = Vec::with_capacity(n);
        for pair in body.chunks_exact(16) {
            thetas.push(f64::from_le_bytes(pair[..8].try_into().expect("8 bytes")));
            xs.push(f64::from_le_bytes(pair[8..].try_into().expect("8 bytes")));
        }
        Self::new(thetas, xs, seed, desc)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_bytes())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

/// Exact-θ inverse-CDF sampler for a Fock superposition.
///
/// `p(x, θ) = Re[B_0(x) + 2 Σ_{d≥1} e^{−idθ} B_d(x)]` with
/// `B_d = Σ_n c_{n+d} c_n* ψ_{n+d} ψ_n`; the cumulative integrals of every
/// `B_d` are tabulated once, so the conditional CDF at any θ costs `O(n_max)`
/// per grid node.
pub struct FockSampler {
    x0: f64,
    step: f64,
    /// `cumulative[i][d] = ∫_{x0}^{x_i} B_d`.
    cumulative: Vec<Vec<Complex64>>,
}

impl FockSampler {
    pub const STEP: f64 = 0.002;

    pub fn new(state: &FockState) -> Self {
        let n_max = state.n_max();
        let half = ((2 * n_max + 1) as f64).sqrt() + 7.0;
        let n_nodes = (2.0 * half / Self::STEP).ceil() as usize + 1;
        let c = state.amplitudes();
        let density = |x: f64| -> Vec<Complex64> {
            let psi = wavefunctions_upto(n_max, x);
            (0..=n_max)
                .map(|d| (0..=n_max - d).map(|n| c[n + d] * c[n].conj() * (psi[n + d] * psi[n])).sum())
                .collect()
        };
        let rows: Vec<Vec<Complex64>> = (0..n_nodes)
            .into_par_iter()
            .map(|i| density(-half + i as f64 * Self::STEP))
            .collect();
        let mut cumulative = Vec::with_capacity(n_nodes);
        let mut acc = vec![Complex64::new(0.0, 0.0); n_max + 1];
        cumulative.push(acc.clone());
        for i in 1..n_nodes {
            for d in 0..=n_max {
                acc[d] += 0.5 * Self::STEP * (rows[i - 1][d] + rows[i][d]);
            }
            cumulative.push(acc.clone());
        }
        Self {
            x0: -half,
            step: Self::STEP,
            cumulative,
        }
    }

    fn cdf_at(&self, i: usize, phases: &[Complex64]) -> f64 {
        let row = &self.cumulative[i];
        let mut s = row[0].re;
        for d in 1..row.len() {
            s += 2.0 * (phases[d] * row[d]).re;
        }
        s
    }

    /// Draws `x` from `p(·, θ)` given `u ∈ [0, 1)`.
    pub fn quantile(&self, theta: f64, u: f64) -> f64 {
        let phases: Vec<Complex64> = (0..self.cumulative[0].len())
            .map(|d| Complex64::from_polar(1.0, -(d as f64) * theta))
            .collect();
        let last = self.cumulative.len() - 1;
        let target = u * self.cdf_at(last, &phases);
        let (mut lo, mut hi) = (0usize, last);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.cdf_at(mid, &phases) <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (c0, c1) = (self.cdf_at(lo, &phases), self.cdf_at(hi, &phases));
        let frac = if c1 > c0 { ((target - c0) / (c1 - c0)).clamp(0.0, 1.0) } else { 0.5 };
        self.x0 + (lo as f64 + frac) * self.step
    }
}

enum Draw<'a> {
    Gaussian(&'a GaussianStateSpec),
    Fock(&'a FockSampler),
}

impl Draw<'_> {
    fn sample(&self, theta: f64, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Draw::Gaussian(g) => {
                let z: f64 = rng.sample(StandardNormal);
                g.quadrature_mean(theta) + g.quadrature_variance(theta).sqrt() * z
            }
            Draw::Fock(s) => s.quantile(theta, rng.random::<f64>()),
        }
    }
}

fn uniform_phase(rng: &mut ChaCha8Rng) -> f64 {
    let t = rng.random::<f64>() * TAU;
    if t >= TAU {
        0.0
    } else {
        t
    }
}

fn generate_with(
    draw: &Draw<'_>,
    descriptor: String,
    n_samples: usize,
    scheme: Option<PhaseScheme>,
    fixed_theta: f64,
    seed: u64,
) -> Result<HomodyneRecord> {
    if n_samples == 0 {
        return Err(Error::Empty("a record needs at least one sample".into()));
    }
    let n_chunks = n_samples.div_ceil(CHUNK_SIZE);
    let chunks: Vec<(Vec<f64>, Vec<f64>)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let start = c * CHUNK_SIZE;
            let end = (start + CHUNK_SIZE).min(n_samples);
            let mut th = Vec::with_capacity(end - start);
            let mut xs = Vec::with_capacity(end - start);
            for i in start..end {
                let theta = match scheme {
                    Some(PhaseScheme::UniformRandom) => uniform_phase(&mut rng),
                    Some(PhaseScheme::Swept128) => swept_phase(i, n_samples),
                    None => fixed_theta,
                };
                th.push(theta);
                xs.push(draw.sample(theta, &mut rng));
            }
            (th, xs)
        })
        .collect();
    let mut thetas = Vec::with_capacity(n_samples);
    let mut xs = Vec::with_capacity(n_samples);
    for (t, x) in chunks {
        thetas.extend(t);
        xs.extend(x);
    }
    HomodyneRecord::new(thetas, xs, seed, descriptor)
}

fn with_draw<T>(state: &State, f: impl FnOnce(&Draw<'_>) -> T) -> T {
    match state {
        State::Gaussian(g) => f(&Draw::Gaussian(g)),
        State::Fock(s) => {
            let sampler = FockSampler::new(s);
            f(&Draw::Fock(&sampler))
        }
    }
}

/// Simulated homodyne record, deterministic in `seed`.
///
/// Samples are produced in chunks of [`CHUNK_SIZE`], chunk `c` drawing from
/// ChaCha8 stream `c` of `seed`, so the record does not depend on scheduling.
pub fn generate_records(state: &State, n_samples: usize, scheme: PhaseScheme, seed: u64) -> Result<HomodyneRecord> {
    with_draw(state, |d| generate_with(d, state.descriptor(), n_samples, Some(scheme), 0.0, seed))
}

/// Record at a single fixed local-oscillator phase.
pub fn generate_records_at_phase(state: &State, n_samples: usize, theta: f64, seed: u64) -> Result<HomodyneRecord> {
    let theta = theta.rem_euclid(TAU);
    with_draw(state, |d| generate_with(d, state.descriptor(), n_samples, None, theta, seed))
}
