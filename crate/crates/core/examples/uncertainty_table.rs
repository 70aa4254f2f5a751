//! Number–phase uncertainty products of the test states from exact moments,
//! formatted as the pipeline's report.

use homodyne_phase::phasestats::{phase_statistics, uncertainty_report};
use homodyne_phase::sampler::MomentEstimate;
use homodyne_phase::states::{oracle_exponential_moment, oracle_number_moments, GaussianStateSpec, State};
use homodyne_phase::{Complex64, Result};

pub fn run() -> Result<()> {
    let states = [
        ("vacuum", GaussianStateSpec::vacuum()),
        ("coherent", GaussianStateSpec::coherent(2.0, 0.0)?),
        ("amp-squeezed", GaussianStateSpec::amplitude_squeezed(2.0, 0.0, 0.3)?),
        ("phase-squeezed", GaussianStateSpec::phase_squeezed(2.0, 0.0, 0.3)?),
        ("sq-vacuum", GaussianStateSpec::squeezed_vacuum(0.5, 0.0)?),
        ("48deg", GaussianStateSpec::squeezed_at_angle(2.0, 0.0, 0.3, 48f64.to_radians())?),
    ];
    let mut stats = Vec::new();
    let mut labels = Vec::new();
    for (name, spec) in states {
        let rho = State::Gaussian(spec).oracle_density()?;
        let psi1 = oracle_exponential_moment(&rho, 1)?;
        let (n1, n2) = oracle_number_moments(&rho);
        stats.push(phase_statistics(
            &MomentEstimate::exact(1, psi1),
            &MomentEstimate::exact(1, Complex64::new(n1, 0.0)),
            &MomentEstimate::exact(2, Complex64::new(n2, 0.0)),
        ));
        labels.push(name.to_string());
    }
    let report = uncertainty_report(&stats, &labels)?;
    print!("{}", report.to_text());
    println!("violations: {}", report.violations().len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
