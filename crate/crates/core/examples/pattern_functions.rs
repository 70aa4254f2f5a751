//! Tabulates a few pattern functions and checks their defining property
//! `∫ f_mn(x) ψ_a(x) ψ_b(x) dx = δ_ma δ_nb` (for `m − n = a − b`) by
//! quadrature.

use homodyne_phase::kernels::{pattern_function, wavefunctions_upto};
use homodyne_phase::Result;

pub fn run() -> Result<()> {
    println!("{:>6} {:>12} {:>12} {:>12}", "x", "f_00", "f_11", "f_20");
    for i in 0..=8 {
        let x = i as f64 * 0.5;
        println!(
            "{x:>6.2} {:>12.6} {:>12.6} {:>12.6}",
            pattern_function(0, 0, x)?,
            pattern_function(1, 1, x)?,
            pattern_function(2, 0, x)?
        );
    }

    let (step, reach) = (2e-3, 9.0);
    let points: Vec<f64> = (0..=(2.0 * reach / step) as usize).map(|i| -reach + i as f64 * step).collect();
    let waves: Vec<Vec<f64>> = points.iter().map(|&x| wavefunctions_upto(6, x)).collect();
    let mut worst: f64 = 0.0;
    for m in 0..=3 {
        for n in 0..=3 {
            let f: Vec<f64> = points.iter().map(|&x| pattern_function(m, n, x)).collect::<Result<_>>()?;
            for a in 0..=3 {
                let b = (a + n) as isize - m as isize;
                if !(0..=6).contains(&b) {
                    continue;
                }
                let b = b as usize;
                let s: f64 = waves.iter().zip(&f).map(|(w, f)| f * w[a] * w[b]).sum::<f64>() * step;
                let want = if a == m && b == n { 1.0 } else { 0.0 };
                worst = worst.max((s - want).abs());
            }
        }
    }
    println!("largest deviation from the delta property for indices <= 3: {worst:.2e}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
