//! Expands the test states in the number basis and prints the exact
//! exponential phase moments and photon-number moments.

use homodyne_phase::states::{oracle_exponential_moments, oracle_number_moments, GaussianStateSpec, State};
use homodyne_phase::Result;

pub fn run() -> Result<()> {
    let states = [
        ("vacuum", GaussianStateSpec::vacuum()),
        ("coherent", GaussianStateSpec::coherent(2.0, 0.0)?),
        ("amplitude-squeezed", GaussianStateSpec::amplitude_squeezed(2.0, 0.0, 0.3)?),
        ("phase-squeezed", GaussianStateSpec::phase_squeezed(2.0, 0.0, 0.3)?),
        ("squeezed vacuum", GaussianStateSpec::squeezed_vacuum(0.5, 0.0)?),
        ("48 degrees", GaussianStateSpec::squeezed_at_angle(2.0, 0.0, 0.3, 48f64.to_radians())?),
    ];
    println!("{:<20} {:>9} {:>9} {:>22} {:>22}", "state", "<n>", "<n^2>", "Psi_1", "Psi_2");
    for (name, spec) in states {
        let rho = State::Gaussian(spec).oracle_density()?;
        let (n1, n2) = oracle_number_moments(&rho);
        let psi = oracle_exponential_moments(&rho, 2);
        println!(
            "{name:<20} {n1:>9.5} {n2:>9.5} {:>22} {:>22}",
            format!("{:.6}{:+.6}i", psi[0].re, psi[0].im),
            format!("{:.6}{:+.6}i", psi[1].re, psi[1].im)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
