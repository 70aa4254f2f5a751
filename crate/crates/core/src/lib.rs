//! Direct sampling of canonical-phase statistics from homodyne data.
//!
//! The crate simulates balanced homodyne records `(θ, x)` for single-mode
//! Gaussian and Fock-superposition states, and estimates the exponential
//! phase moments `Ψ_k = ⟨Ê^k⟩` (with `Ê = (n̂+1)^{-1/2} â`) directly from
//! the quadrature samples, without reconstructing the density matrix first.
//! The photon-number moments `⟨n̂⟩` and `⟨n̂²⟩` are sampled from the same
//! data, which gives the number–phase uncertainty product
//! `Δn·tan Δφ ≥ ½` with `Δφ = arccos|Ψ_1|`.
//!
//! Modules:
//!
//! * [`states`]: Gaussian and Fock states, analytic quadrature densities and
//!   the exact number-basis oracle for every sampled quantity.
//! * [`kernels`]: oscillator wavefunctions (regular and irregular), pattern
//!   functions and the tabulated sampling kernels `K_k(x, θ)`.
//! * [`sampler`]: record generation, the 128×256 histogram reduction with
//!   vacuum calibration, and the moment estimators with standard errors.
//! * [`phasestats`]: Fourier synthesis of `P(φ)`, mean phase, phase
//!   uncertainty and the uncertainty report.
//! * [`cli`]: configuration and the simulate / estimate / report pipeline.
//!
//! Quadratures follow `x̂(θ) = 2^{-1/2}(e^{-iθ}â + e^{iθ}â†)`, so the vacuum
//! variance is ½ everywhere in this crate, including the file formats.
//!
//! See the `examples/` directory of the crate for one runnable program per
//! capability (`cargo run --release --example <name>`).

pub mod cli;
pub mod error;
pub mod kernels;
pub mod phasestats;
pub mod sampler;
pub mod states;

pub use error::{Error, Result};
pub use num_complex::Complex64;
