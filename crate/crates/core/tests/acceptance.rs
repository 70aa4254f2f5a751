//! Acceptance suite: runs the eight criteria at their stated tolerances and
//! prints one pass/fail line per criterion. Exits non-zero if any fails.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::process::ExitCode;
use std::time::Instant;

use homodyne_phase::kernels::{pattern_function, wavefunctions_upto, KernelOptions, KernelSet};
use homodyne_phase::phasestats::{
    phase_statistics, synthesis_std_error, synthesize_phase_distribution, PhaseDistribution, PhaseStatistics, Product,
    Window,
};
use homodyne_phase::sampler::{
    estimate_exponential_moments, estimate_number_moments, generate_records, histogram_records, HomodyneRecord,
    MomentEstimate, PhaseScheme,
};
use homodyne_phase::states::{
    oracle_exponential_moments, oracle_number_moments, GaussianStateSpec, State,
};
use homodyne_phase::Complex64;

const K_MAX: usize = 20;
const N_RECORDS: usize = 1_000_000;
const GRID_SIZE: usize = 720;

struct TestState {
    name: &'static str,
    state: State,
    exact: Vec<Complex64>,
    exact_n: (f64, f64),
    record: HomodyneRecord,
    sampled: Vec<MomentEstimate>,
    sampled_n: (MomentEstimate, MomentEstimate),
}

struct Context {
    kernels: KernelSet,
    states: Vec<TestState>,
    vacuum: HomodyneRecord,
}

impl Context {
    fn new() -> Context {
        let kernels = KernelSet::build(K_MAX, KernelOptions::default()).expect("kernel construction");
        let specs = [
            ("vacuum", GaussianStateSpec::vacuum()),
            ("coherent", GaussianStateSpec::coherent(2.0, 0.0).unwrap()),
            ("amplitude-squeezed", GaussianStateSpec::amplitude_squeezed(2.0, 0.0, 0.3).unwrap()),
            ("phase-squeezed", GaussianStateSpec::phase_squeezed(2.0, 0.0, 0.3).unwrap()),
            ("squeezed-vacuum", GaussianStateSpec::squeezed_vacuum(0.5, 0.0).unwrap()),
            ("squeezed-48deg", GaussianStateSpec::squeezed_at_angle(2.0, 0.0, 0.3, 48f64.to_radians()).unwrap()),
        ];
        let states = specs
            .into_iter()
            .enumerate()
            .map(|(i, (name, spec))| {
                let state = State::Gaussian(spec);
                let rho = state.oracle_density().unwrap();
                let record = generate_records(&state, N_RECORDS, PhaseScheme::Swept128, 1000 + i as u64).unwrap();
                let sampled = estimate_exponential_moments((&record).into(), K_MAX, &kernels).unwrap();
                let sampled_n = estimate_number_moments((&record).into()).unwrap();
                TestState {
                    name,
                    exact: oracle_exponential_moments(&rho, K_MAX),
                    exact_n: oracle_number_moments(&rho),
                    state,
                    record,
                    sampled,
                    sampled_n,
                }
            })
            .collect();
        let vacuum = generate_records(
            &State::Gaussian(GaussianStateSpec::vacuum()),
            N_RECORDS,
            PhaseScheme::Swept128,
            999,
        )
        .unwrap();
        Context { kernels, states, vacuum }
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn exact_moment(k: usize, v: f64) -> MomentEstimate {
    MomentEstimate::exact(k, Complex64::new(v, 0.0))
}

fn exact_statistics(s: &TestState) -> PhaseStatistics {
    phase_statistics(
        &MomentEstimate::exact(1, s.exact[0]),
        &exact_moment(1, s.exact_n.0),
        &exact_moment(2, s.exact_n.1),
    )
}

fn sampled_statistics(s: &TestState) -> PhaseStatistics {
    phase_statistics(&s.sampled[0], &s.sampled_n.0, &s.sampled_n.1)
}

/// Comparisons whose oracle value is zero by symmetry (vacuum, odd moments
/// of the squeezed vacuum) are reported separately.
fn trivially_zero(s: &TestState, k: usize) -> bool {
    s.name == "vacuum" || (s.name == "squeezed-vacuum" && k % 2 == 1)
}

fn criterion_1(ctx: &Context, elapsed: f64) -> Outcome {
    let (mut within, mut total, mut zero_within, mut zero_total) = (0, 0, 0, 0);
    for s in &ctx.states {
        for (m, e) in s.sampled.iter().zip(&s.exact) {
            let ok = (m.value - e).norm() <= 3.0 * m.std_error;
            if trivially_zero(s, m.k) {
                zero_total += 1;
                zero_within += ok as usize;
            } else {
                total += 1;
                within += ok as usize;
            }
        }
    }
    let needed = (0.95 * total as f64).ceil() as usize;
    outcome(
        within >= needed && elapsed < 300.0,
        format!(
            "{within}/{total} non-trivial comparisons within 3 sigma (need {needed}); \
             {zero_within}/{zero_total} symmetry-zero; simulation and estimation {elapsed:.1} s"
        ),
    )
}

fn criterion_2(ctx: &Context) -> Outcome {
    // Σ_θ Δθ/2π ∫ e^{ikθ} F_k(x) p(x, θ) dx with periodic trapezoid in θ and
    // Simpson in x
    let n_theta = 256;
    let (reach, step) = (13.0, 2e-3);
    let n_x = (2.0 * reach / step) as usize;
    let xs: Vec<f64> = (0..=n_x).map(|i| -reach + i as f64 * step).collect();
    let w: Vec<f64> = (0..=n_x)
        .map(|i| {
            let c = if i == 0 || i == n_x { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            c * step / 3.0
        })
        .collect();
    let f: Vec<Vec<f64>> = (1..=K_MAX)
        .map(|k| {
            let t = ctx.kernels.get(k).unwrap();
            xs.iter().map(|&x| t.eval(x)).collect()
        })
        .collect();
    let mut worst: f64 = 0.0;
    for s in &ctx.states {
        let mut psi = vec![Complex64::new(0.0, 0.0); K_MAX];
        for j in 0..n_theta {
            let theta = TAU * j as f64 / n_theta as f64;
            let p: Vec<f64> = xs.iter().zip(&w).map(|(&x, &w)| w * s.state.quadrature_pdf(theta, x)).collect();
            for k in 1..=K_MAX {
                let integral: f64 = f[k - 1].iter().zip(&p).map(|(f, p)| f * p).sum();
                psi[k - 1] += Complex64::from_polar(integral / n_theta as f64, k as f64 * theta);
            }
        }
        for (a, b) in psi.iter().zip(&s.exact) {
            worst = worst.max((a - b).norm());
        }
    }
    outcome(worst < 1e-3, format!("largest |Psi_quad - Psi_oracle| = {worst:.2e} (tolerance 1e-3)"))
}

fn criterion_3() -> Outcome {
    let (reach, step) = (12.0, 1e-3);
    let xs: Vec<f64> = (0..=(2.0 * reach / step) as usize).map(|i| -reach + i as f64 * step).collect();
    let waves: Vec<Vec<f64>> = xs.iter().map(|&x| wavefunctions_upto(6, x)).collect();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for m in 0..=6usize {
        for n in 0..=6usize {
            let f: Vec<f64> = xs.iter().map(|&x| pattern_function(m, n, x).unwrap()).collect();
            for a in 0..=6usize {
                let b = a as isize + n as isize - m as isize;
                if !(0..=6).contains(&b) {
                    continue;
                }
                let b = b as usize;
                let s: f64 = waves.iter().zip(&f).map(|(w, f)| f * w[a] * w[b]).sum::<f64>() * step;
                let want = if a == m && b == n { 1.0 } else { 0.0 };
                worst = worst.max((s - want).abs());
                checked += 1;
            }
        }
    }
    outcome(
        worst < 1e-6,
        format!("{checked} index pairs with m-n = a-b, largest deviation {worst:.2e} (tolerance 1e-6)"),
    )
}

fn criterion_4(ctx: &Context) -> Outcome {
    let mut notes = Vec::new();
    let mut bounds_ok = true;
    let mut finite: Vec<(&str, f64)> = Vec::new();
    for s in &ctx.states {
        let e = exact_statistics(s);
        if let Product::Finite(p) = e.product {
            bounds_ok &= p >= 0.5;
            finite.push((s.name, p));
        }
        let m = sampled_statistics(s);
        if let Product::Finite(p) = m.product {
            bounds_ok &= p >= 0.5 - 3.0 * m.product_error;
        }
    }
    let coherent = finite.iter().find(|(n, _)| *n == "coherent").map(|(_, p)| *p).unwrap();
    let smallest = finite.iter().cloned().fold(("", f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let coherent_smallest = smallest.0 == "coherent";
    let coherent_close = (coherent - 0.5).abs() <= 0.05;
    notes.push(format!("exact and sampled products respect the bound: {bounds_ok}"));
    notes.push(format!(
        "coherent product {coherent:.5} (within 10% of 1/2: {coherent_close}); smallest is {} at {:.5}",
        smallest.0, smallest.1
    ));
    outcome(bounds_ok && coherent_smallest && coherent_close, notes.join("; "))
}

fn two_peaks_half_turn_apart(d: &PhaseDistribution, prominence: f64) -> (bool, String) {
    let peaks = d.local_maxima(prominence);
    let step = TAU / d.grid().len() as f64;
    if peaks.len() != 2 {
        return (false, format!("{} maxima", peaks.len()));
    }
    let sep = (d.grid()[peaks[1]] - d.grid()[peaks[0]]).abs();
    let sep = sep.min(TAU - sep);
    ((sep - PI).abs() <= step + 1e-12, format!("2 maxima {sep:.4} apart"))
}

fn criterion_5(ctx: &Context) -> Outcome {
    let s = ctx.states.iter().find(|s| s.name == "squeezed-vacuum").unwrap();
    let odd_ok = s
        .sampled
        .iter()
        .filter(|m| m.k % 2 == 1)
        .all(|m| m.value.norm() < 3.0 * m.std_error);
    let window = Window::Cesaro;
    let sampled = synthesize_phase_distribution(&s.sampled, GRID_SIZE, window).unwrap();
    let sigma = synthesis_std_error(&s.sampled, window);
    let (sampled_ok, sampled_note) = two_peaks_half_turn_apart(&sampled, 3.0 * sigma);
    let exact_m: Vec<MomentEstimate> = s.exact.iter().enumerate().map(|(i, v)| MomentEstimate::exact(i + 1, *v)).collect();
    let exact = synthesize_phase_distribution(&exact_m, GRID_SIZE, window).unwrap();
    let (exact_ok, exact_note) = two_peaks_half_turn_apart(&exact, 1e-9);
    let dphi = exact_statistics(s).phase_uncertainty;
    let dphi_ok = (dphi - FRAC_PI_2).abs() < 1e-3;
    outcome(
        odd_ok && sampled_ok && exact_ok && dphi_ok,
        format!(
            "odd moments within 3 sigma of 0: {odd_ok}; sampled P: {sampled_note}; oracle P: {exact_note}; \
             oracle dphi - pi/2 = {:.1e}",
            dphi - FRAC_PI_2
        ),
    )
}

fn criterion_6(ctx: &Context) -> Outcome {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut worst_at = String::new();
    for s in &ctx.states {
        let (m1, _) = (&s.sampled_n.0, &s.sampled_n.1);
        let (e1, e2) = s.exact_n;
        let z_mean = (m1.value.re - e1).abs() / m1.std_error;
        let st = sampled_statistics(s);
        let z_var = (st.n_variance - (e2 - e1 * e1)).abs() / st.n_variance_error;
        for (z, what) in [(z_mean, "mean"), (z_var, "variance")] {
            if z > worst {
                worst = z;
                worst_at = format!("{} {what}", s.name);
            }
        }
        ok &= z_mean < 3.0 && z_var < 3.0;
    }
    let amp = ctx.states.iter().find(|s| s.name == "amplitude-squeezed").unwrap();
    let st = sampled_statistics(amp);
    let sub = st.n_variance < st.n_mean;
    outcome(
        ok && sub,
        format!(
            "largest deviation {worst:.2} sigma ({worst_at}); amplitude-squeezed var {:.4} < mean {:.4}: {sub}",
            st.n_variance, st.n_mean
        ),
    )
}

fn criterion_7(ctx: &Context) -> Outcome {
    let coherent = ctx.states.iter().find(|s| s.name == "coherent").unwrap();
    let exact = coherent.exact[0];
    let hits: Vec<(bool, bool)> = (0..100u64)
        .map(|seed| {
            let r = generate_records(&coherent.state, 20_000, PhaseScheme::UniformRandom, 50_000 + seed).unwrap();
            let m = estimate_exponential_moments((&r).into(), 1, &ctx.kernels).unwrap()[0];
            (
                (m.value.re - exact.re).abs() <= 1.96 * m.std_re,
                (m.value.im - exact.im).abs() <= 1.96 * m.std_im,
            )
        })
        .collect();
    let covered = hits.iter().map(|(a, b)| *a as usize + *b as usize).sum::<usize>();
    let fraction = covered as f64 / 200.0;
    let err = |n: usize| {
        let r = generate_records(&coherent.state, n, PhaseScheme::UniformRandom, 77).unwrap();
        estimate_exponential_moments((&r).into(), 1, &ctx.kernels).unwrap()[0].std_error
    };
    let ratio = err(200_000) / err(50_000);
    let coverage_ok = (0.90..=1.0).contains(&fraction);
    let ratio_ok = (ratio - 0.5).abs() <= 0.15 * 0.5;
    outcome(
        coverage_ok && ratio_ok,
        format!("coverage {fraction:.3} over 100 seeds (both components); std_error ratio at 4x samples {ratio:.4}"),
    )
}

fn criterion_8(ctx: &Context) -> Outcome {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for s in &ctx.states {
        let h = histogram_records(&s.record, &ctx.vacuum).unwrap();
        let eh = estimate_exponential_moments((&h).into(), K_MAX, &ctx.kernels).unwrap();
        let mut check = |d: f64, sr: f64, sh: f64, bias: f64| {
            let tol = 3.0 * sr.hypot(sh) + bias;
            worst = worst.max(d.abs() / tol);
            ok &= d.abs() <= tol;
        };
        for (r, m) in s.sampled.iter().zip(&eh) {
            check(m.value.re - r.value.re, r.std_re, m.std_re, m.binning_bias);
            check(m.value.im - r.value.im, r.std_im, m.std_im, m.binning_bias);
        }
        let (h1, h2) = estimate_number_moments((&h).into()).unwrap();
        for (r, m) in [(&s.sampled_n.0, h1), (&s.sampled_n.1, h2)] {
            check(m.value.re - r.value.re, r.std_error, m.std_error, m.binning_bias);
        }
    }
    outcome(
        ok,
        format!("largest |histogram - record| is {worst:.3} of the combined tolerance"),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let ctx = Context::new();
    let elapsed = start.elapsed().as_secs_f64();
    let results = [
        ("1 oracle equivalence", criterion_1(&ctx, elapsed)),
        ("2 quadrature closure", criterion_2(&ctx)),
        ("3 biorthogonality", criterion_3()),
        ("4 uncertainty relation", criterion_4(&ctx)),
        ("5 squeezed-vacuum structure", criterion_5(&ctx)),
        ("6 number moments", criterion_6(&ctx)),
        ("7 statistical coverage", criterion_7(&ctx)),
        ("8 histogram path", criterion_8(&ctx)),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("criterion {name}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += !o.pass as usize;
    }
    println!("acceptance: {}/{} criteria passed in {:.1} s", results.len() - failed, results.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
