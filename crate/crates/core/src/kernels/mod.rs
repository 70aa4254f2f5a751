//! Sampling kernels.
//!
//! The phase-moment kernel factorizes as `K_k(x, θ) = e^{ikθ} F_k(x) / 2π`
//! with `F_k = Σ_{n=0}^{n_max} f_{n,n+k}`, a truncated sum of pattern functions.
//! The partial sums do not converge pointwise as `n_max` grows (they drift by
//! polynomials of degree below `k`, which are invisible to every quadrature
//! density), so a table is certified by its action instead:
//! `∫F_k ψ_n ψ_{n+k} dx = 1` for every `n ≤ n_max`.

pub mod cache;
pub mod irregular;
pub mod number;
pub mod pattern;
pub mod table;
pub mod wavefunctions;

pub use irregular::{irregular_wavefunction, irregular_with_derivative};
pub use number::number_kernel;
pub use pattern::pattern_function;
pub use table::{phase_moment_kernel, KernelGrid, KernelOptions, KernelSet, KernelTable, TailModel};
pub use wavefunctions::{regular_wavefunction, wavefunctions_upto, wavefunctions_with_derivatives};
