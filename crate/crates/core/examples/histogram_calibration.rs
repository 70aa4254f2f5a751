//! Records taken in arbitrary detector units are reduced to the 128×256
//! histogram, calibrated against a vacuum record in the same units, and give
//! the same moments as the record itself in physical units.

use homodyne_phase::kernels::{KernelOptions, KernelSet};
use homodyne_phase::sampler::{
    estimate_exponential_moments, estimate_number_moments, generate_records, histogram_records, PhaseScheme,
};
use homodyne_phase::states::{GaussianStateSpec, State};
use homodyne_phase::Result;

pub fn run() -> Result<()> {
    let gain = 3.7;
    let state = State::Gaussian(GaussianStateSpec::amplitude_squeezed(2.0, 0.4, 0.3)?);
    let vacuum = State::Gaussian(GaussianStateSpec::vacuum());
    let record = generate_records(&state, 300_000, PhaseScheme::Swept128, 11)?;
    let raw = record.scaled(gain);
    let raw_vacuum = generate_records(&vacuum, 300_000, PhaseScheme::Swept128, 12)?.scaled(gain);

    let hist = histogram_records(&raw, &raw_vacuum)?;
    println!("vacuum scale {:.5} (1/gain = {:.5})", hist.vacuum_scale(), 1.0 / gain);

    let k_max = 4;
    let kernels = KernelSet::build(k_max, KernelOptions::default())?;
    let from_record = estimate_exponential_moments((&record).into(), k_max, &kernels)?;
    let from_hist = estimate_exponential_moments((&hist).into(), k_max, &kernels)?;
    println!("{:>3} {:>20} {:>20} {:>9} {:>9}", "k", "record", "histogram", "sigma_h", "bias");
    for (r, h) in from_record.iter().zip(&from_hist) {
        println!(
            "{:>3} {:>20} {:>20} {:>9.5} {:>9.2e}",
            r.k,
            format!("{:.5}{:+.5}i", r.value.re, r.value.im),
            format!("{:.5}{:+.5}i", h.value.re, h.value.im),
            h.std_error,
            h.binning_bias
        );
    }
    let (nr, _) = estimate_number_moments((&record).into())?;
    let (nh, _) = estimate_number_moments((&hist).into())?;
    println!("<n>: record {:.4} ± {:.4}, histogram {:.4} ± {:.4}", nr.value.re, nr.std_error, nh.value.re, nh.std_error);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
