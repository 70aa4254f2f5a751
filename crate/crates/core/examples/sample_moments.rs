//! Simulates a homodyne record of a coherent state and samples the first
//! exponential phase moments, comparing them with the Fock-basis values.

use homodyne_phase::kernels::{KernelOptions, KernelSet};
use homodyne_phase::sampler::{estimate_exponential_moments, estimate_number_moments, generate_records, PhaseScheme};
use homodyne_phase::states::{oracle_exponential_moments, oracle_number_moments, GaussianStateSpec, State};
use homodyne_phase::Result;

pub fn run() -> Result<()> {
    let state = State::Gaussian(GaussianStateSpec::coherent(2.0, 0.6)?);
    let k_max = 6;
    let kernels = KernelSet::build(k_max, KernelOptions::default())?;
    let record = generate_records(&state, 200_000, PhaseScheme::UniformRandom, 42)?;

    let sampled = estimate_exponential_moments((&record).into(), k_max, &kernels)?;
    let rho = state.oracle_density()?;
    let exact = oracle_exponential_moments(&rho, k_max);
    println!("{:>3} {:>24} {:>24} {:>9}", "k", "sampled", "exact", "|d|/sigma");
    for (m, e) in sampled.iter().zip(&exact) {
        println!(
            "{:>3} {:>24} {:>24} {:>9.2}",
            m.k,
            format!("{:.4}{:+.4}i", m.value.re, m.value.im),
            format!("{:.4}{:+.4}i", e.re, e.im),
            (m.value - e).norm() / m.std_error
        );
    }

    let (n1, n2) = estimate_number_moments((&record).into())?;
    let (e1, e2) = oracle_number_moments(&rho);
    println!("<n>   = {:.4} ± {:.4}  (exact {e1:.4})", n1.value.re, n1.std_error);
    println!("<n^2> = {:.4} ± {:.4}  (exact {e2:.4})", n2.value.re, n2.std_error);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
