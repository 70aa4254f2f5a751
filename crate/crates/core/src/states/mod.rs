//! Quantum states, their quadrature densities and the Fock-basis oracle.

pub mod fock;
pub mod gaussian;
pub mod oracle;

pub use fock::{
    fock_density, gaussian_to_fock, gaussian_to_fock_auto, gaussian_to_fock_with_budget, FockDensityMatrix,
    FockState, DEFAULT_TRUNCATION_BUDGET, MAX_AUTO_N_MAX,
};
pub use gaussian::GaussianStateSpec;
pub use oracle::{oracle_exponential_moment, oracle_exponential_moments, oracle_number_moments, oracle_phase_distribution};

use crate::error::Result;

/// Cutoff used when a Gaussian state is expanded for oracle comparisons.
pub const ORACLE_N_MAX: usize = 200;

/// A simulated source: Gaussian states keep their closed form, Fock
/// superpositions are given by amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Gaussian(GaussianStateSpec),
    Fock(FockState),
}

impl State {
    /// `p(x, θ) = ⟨x, θ|ρ|x, θ⟩`.
    pub fn quadrature_pdf(&self, theta: f64, x: f64) -> f64 {
        match self {
            State::Gaussian(g) => g.quadrature_pdf(theta, x),
            State::Fock(f) => f.quadrature_pdf(theta, x),
        }
    }

    /// Fock expansion with at least `n_max` levels for Gaussian states; Fock
    /// states are zero-padded to `n_max` when shorter.
    pub fn to_fock(&self, n_max: usize) -> Result<FockState> {
        match self {
            State::Gaussian(g) => gaussian_to_fock(g, n_max),
            State::Fock(f) => Ok(f.padded(n_max)),
        }
    }

    /// Density matrix for oracle values (Gaussian states at [`ORACLE_N_MAX`]).
    pub fn oracle_density(&self) -> Result<FockDensityMatrix> {
        Ok(self.to_fock(ORACLE_N_MAX)?.density())
    }

    /// Provenance string stored in record headers.
    pub fn descriptor(&self) -> String {
        match self {
            State::Gaussian(g) => g.to_string(),
            State::Fock(f) => {
                let terms: Vec<String> = f
                    .amplitudes()
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.norm() > 0.0)
                    .map(|(n, c)| format!("{n}:{}{:+}i", c.re, c.im))
                    .collect();
                format!("fock({})", terms.join(", "))
            }
        }
    }
}

impl From<GaussianStateSpec> for State {
    fn from(g: GaussianStateSpec) -> Self {
        State::Gaussian(g)
    }
}

impl From<FockState> for State {
    fn from(f: FockState) -> Self {
        State::Fock(f)
    }
}

/// `p(x, θ)` for either representation.
pub fn quadrature_pdf(state: &State, theta: f64, x: f64) -> f64 {
    state.quadrature_pdf(theta, x)
}
