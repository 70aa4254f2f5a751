use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::number::number_kernel;
use crate::kernels::table::KernelSet;
use crate::sampler::histogram::{QuadratureHistogram, AMPLITUDE_BINS, PHASE_BINS};
use crate::sampler::record::{HomodyneRecord, PhaseScheme, CHUNK_SIZE, SWEEP_INTERVALS};

/// Largest admissible circular gap between sampled phases.
pub const MAX_PHASE_GAP: f64 = PI / 8.0;

/// Sampled moment with its statistical error.
///
/// `std_re` and `std_im` are the componentwise standard errors of the mean;
/// `std_error` is the larger of the two. `binning_bias` bounds the
/// deterministic error of the histogram reduction and is zero on the record
/// path. Number moments use `k` for the order (1 or 2) and a real `value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub k: usize,
    pub value: Complex64,
    pub std_error: f64,
    pub std_re: f64,
    pub std_im: f64,
    pub n_samples: u64,
    pub binning_bias: f64,
}

impl MomentEstimate {
    /// Noise-free value, for feeding oracle moments through the same pipeline.
    pub fn exact(k: usize, value: Complex64) -> Self {
        Self {
            k,
            value,
            std_error: 0.0,
            std_re: 0.0,
            std_im: 0.0,
            n_samples: 0,
            binning_bias: 0.0,
        }
    }

    fn from_parts(k: usize, value: Complex64, std_re: f64, std_im: f64, n_samples: u64, binning_bias: f64) -> Self {
        Self {
            k,
            value,
            std_error: std_re.max(std_im),
            std_re,
            std_im,
            n_samples,
            binning_bias,
        }
    }
}

/// Input to the estimators.
#[derive(Debug, Clone, Copy)]
pub enum MeasurementData<'a> {
    Record(&'a HomodyneRecord),
    Histogram(&'a QuadratureHistogram),
}

impl<'a> From<&'a HomodyneRecord> for MeasurementData<'a> {
    fn from(r: &'a HomodyneRecord) -> Self {
        MeasurementData::Record(r)
    }
}

impl<'a> From<&'a QuadratureHistogram> for MeasurementData<'a> {
    fn from(h: &'a QuadratureHistogram) -> Self {
        MeasurementData::Histogram(h)
    }
}

/// Running mean and centred sum of squares per component.
#[derive(Debug, Clone)]
struct Moments {
    n: f64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    fn new(dim: usize) -> Self {
        Self {
            n: 0.0,
            mean: vec![0.0; dim],
            m2: vec![0.0; dim],
        }
    }

    fn push(&mut self, v: &[f64]) {
        self.n += 1.0;
        for ((m, s), &x) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(v) {
            let d = x - *m;
            *m += d / self.n;
            *s += d * (x - *m);
        }
    }

    fn merge(&mut self, o: &Moments) {
        if o.n == 0.0 {
            return;
        }
        let n = self.n + o.n;
        for i in 0..self.mean.len() {
            let d = o.mean[i] - self.mean[i];
            self.mean[i] += d * o.n / n;
            self.m2[i] += o.m2[i] + d * d * self.n * o.n / n;
        }
        self.n = n;
    }
}

/// Mean and variance of the mean per component. Swept records are treated as
/// 128 strata; otherwise samples are i.i.d.
fn record_means(
    record: &HomodyneRecord,
    dim: usize,
    eval: impl Fn(f64, f64, &mut [f64]) + Sync,
) -> (Vec<f64>, Vec<f64>) {
    let n = record.len();
    let (thetas, xs) = (record.thetas(), record.xs());
    let accumulate = |lo: usize, hi: usize| {
        let mut acc = Moments::new(dim);
        let mut buf = vec![0.0; dim];
        for i in lo..hi {
            eval(thetas[i], xs[i], &mut buf);
            acc.push(&buf);
        }
        acc
    };
    if record.phase_scheme() == PhaseScheme::Swept128 && n >= 2 * SWEEP_INTERVALS {
        let strata: Vec<Moments> = (0..SWEEP_INTERVALS)
            .into_par_iter()
            .map(|j| accumulate(j * n / SWEEP_INTERVALS, (j + 1) * n / SWEEP_INTERVALS))
            .collect();
        let nf = n as f64;
        let mut mean = vec![0.0; dim];
        let mut var = vec![0.0; dim];
        for s in &strata {
            for i in 0..dim {
                mean[i] += s.n * s.mean[i] / nf;
                var[i] += s.m2[i] / (s.n - 1.0) * s.n / (nf * nf);
            }
        }
        (mean, var)
    } else {
        let chunks: Vec<Moments> = (0..n.div_ceil(CHUNK_SIZE))
            .into_par_iter()
            .map(|c| accumulate(c * CHUNK_SIZE, ((c + 1) * CHUNK_SIZE).min(n)))
            .collect();
        let mut total = Moments::new(dim);
        for c in &chunks {
            total.merge(c);
        }
        let var = if n > 1 {
            total.m2.iter().map(|m| m / (total.n - 1.0) / total.n).collect()
        } else {
            vec![f64::INFINITY; dim]
        };
        (total.mean, var)
    }
}

fn check_record_coverage(record: &HomodyneRecord) -> Result<()> {
    if record.is_empty() {
        return Err(Error::Empty("record has no samples".into()));
    }
    let gap = record.largest_phase_gap();
    if gap >= MAX_PHASE_GAP {
        return Err(Error::PhaseCoverage { gap });
    }
    Ok(())
}

fn check_histogram_coverage(h: &QuadratureHistogram) -> Result<()> {
    if h.total() == 0 {
        return Err(Error::Empty("histogram has no counts".into()));
    }
    let occupied: Vec<bool> = (0..PHASE_BINS).map(|j| h.phase_bin_total(j) > 0).collect();
    let mut longest = 0;
    let mut run = 0;
    for j in 0..2 * PHASE_BINS {
        if occupied[j % PHASE_BINS] {
            run = 0;
        } else {
            run += 1;
            longest = longest.max(run.min(PHASE_BINS));
        }
    }
    let gap = (longest + 1) as f64 * TAU / PHASE_BINS as f64;
    if gap >= MAX_PHASE_GAP {
        return Err(Error::PhaseCoverage { gap });
    }
    Ok(())
}

/// `sin(kπ/128)/(kπ/128)`: average of `e^{ikθ}` over a phase bin relative to
/// its value at the bin centre.
fn phase_bin_sinc(k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let a = k as f64 * PI / PHASE_BINS as f64;
    a.sin() / a
}

/// `Ψ̂_k` for `k = 1..=k_max`.
///
/// Record path: sample mean of `e^{ikθ} F_k(x)`. Histogram path: the double
/// sum over bins with bin-averaged `F_k`, the phase-bin average of `e^{ikθ}`
/// divided out, multinomial errors, the vacuum-calibration uncertainty added
/// in quadrature and a second-order binning-bias bound.
pub fn estimate_exponential_moments(
    data: MeasurementData<'_>,
    k_max: usize,
    kernels: &KernelSet,
) -> Result<Vec<MomentEstimate>> {
    let tables = (1..=k_max).map(|k| kernels.get(k)).collect::<Result<Vec<_>>>()?;
    match data {
        MeasurementData::Record(record) => {
            check_record_coverage(record)?;
            let (mean, var) = record_means(record, 2 * k_max, |theta, x, out| {
                let step = Complex64::from_polar(1.0, theta);
                let mut z = Complex64::new(1.0, 0.0);
                for (i, t) in tables.iter().enumerate() {
                    z *= step;
                    let v = z * t.eval(x);
                    out[2 * i] = v.re;
                    out[2 * i + 1] = v.im;
                }
            });
            Ok((0..k_max)
                .map(|i| {
                    MomentEstimate::from_parts(
                        i + 1,
                        Complex64::new(mean[2 * i], mean[2 * i + 1]),
                        var[2 * i].sqrt(),
                        var[2 * i + 1].sqrt(),
                        record.len() as u64,
                        0.0,
                    )
                })
                .collect())
        }
        MeasurementData::Histogram(h) => {
            check_histogram_coverage(h)?;
            let scale = h.vacuum_scale();
            let bin_values = |scale: f64| -> Vec<Vec<f64>> {
                let hs = h.with_vacuum_scale(scale);
                tables
                    .iter()
                    .map(|t| {
                        (0..AMPLITUDE_BINS)
                            .map(|b| {
                                let (a, c) = hs.calibrated_edges(b);
                                t.bin_average(a, c)
                            })
                            .collect()
                    })
                    .collect()
            };
            let base = bin_values(scale);
            let rel = calibration_rel_error(h);
            let shifted = bin_values(scale * (1.0 + rel));
            let delta = scale * h.bin_width();
            let curvature: Vec<Vec<f64>> = tables
                .iter()
                .map(|t| {
                    (0..AMPLITUDE_BINS)
                        .map(|b| {
                            let (a, c) = h.calibrated_edges(b);
                            let x = 0.5 * (a + c);
                            (t.eval(x + delta) - 2.0 * t.eval(x) + t.eval(x - delta)) / (delta * delta)
                        })
                        .collect()
                })
                .collect();
            Ok((0..k_max)
                .map(|i| {
                    let k = i + 1;
                    let sinc = phase_bin_sinc(k);
                    let value_of = |vals: &[f64], j: usize, b: usize| {
                        Complex64::from_polar(vals[b] / sinc, k as f64 * QuadratureHistogram::phase_center(j))
                    };
                    let (value, std_re, std_im) = histogram_mean(h, |j, b| value_of(&base[i], j, b));
                    let (moved, _, _) = histogram_mean(h, |j, b| value_of(&shifted[i], j, b));
                    let cal = moved - value;
                    let (curv, _, _) = histogram_mean(h, |j, b| value_of(&curvature[i], j, b));
                    let bias = delta * delta / 12.0 * curv.norm();
                    MomentEstimate::from_parts(
                        k,
                        value,
                        std_re.hypot(cal.re),
                        std_im.hypot(cal.im),
                        h.total(),
                        bias,
                    )
                })
                .collect())
        }
    }
}

/// `σ_s/s = 1/√(2(n_v − 1))` for a scale fitted to `n_v` vacuum samples.
fn calibration_rel_error(h: &QuadratureHistogram) -> f64 {
    let n = h.vacuum_samples();
    if n < 2 {
        0.0
    } else {
        1.0 / (2.0 * (n as f64 - 1.0)).sqrt()
    }
}

/// Count-weighted mean of `v(j, b)` with componentwise standard errors.
/// Phase bins are strata when their totals differ by at most one (a sweep);
/// otherwise counts are treated as one multinomial sample.
fn histogram_mean(h: &QuadratureHistogram, v: impl Fn(usize, usize) -> Complex64) -> (Complex64, f64, f64) {
    let n = h.total() as f64;
    let totals: Vec<u64> = (0..PHASE_BINS).map(|j| h.phase_bin_total(j)).collect();
    let (lo, hi) = (totals.iter().min().copied().unwrap_or(0), totals.iter().max().copied().unwrap_or(0));
    let stratified = lo >= 2 && hi - lo <= 1;
    let mut mean = Complex64::new(0.0, 0.0);
    let mut per_bin = Vec::with_capacity(PHASE_BINS);
    for (j, &nj) in totals.iter().enumerate() {
        let mut s = Complex64::new(0.0, 0.0);
        for b in 0..AMPLITUDE_BINS {
            let c = h.count(j, b);
            if c > 0 {
                s += v(j, b) * c as f64;
            }
        }
        let mj = if nj > 0 { s / nj as f64 } else { Complex64::new(0.0, 0.0) };
        per_bin.push(mj);
        mean += s / n;
    }
    let (mut var_re, mut var_im) = (0.0, 0.0);
    for (j, &nj) in totals.iter().enumerate() {
        if nj == 0 {
            continue;
        }
        let center = if stratified { per_bin[j] } else { mean };
        let (mut sr, mut si) = (0.0, 0.0);
        for b in 0..AMPLITUDE_BINS {
            let c = h.count(j, b);
            if c > 0 {
                let d = v(j, b) - center;
                sr += c as f64 * d.re * d.re;
                si += c as f64 * d.im * d.im;
            }
        }
        if stratified {
            let njf = nj as f64;
            var_re += sr / (njf - 1.0) * njf / (n * n);
            var_im += si / (njf - 1.0) * njf / (n * n);
        } else {
            var_re += sr;
            var_im += si;
        }
    }
    if !stratified {
        var_re /= (n - 1.0) * n;
        var_im /= (n - 1.0) * n;
    }
    (mean, var_re.sqrt(), var_im.sqrt())
}

/// `(⟨n̂⟩, ⟨n̂²⟩)` from the θ-independent number kernels.
pub fn estimate_number_moments(data: MeasurementData<'_>) -> Result<(MomentEstimate, MomentEstimate)> {
    match data {
        MeasurementData::Record(record) => {
            check_record_coverage(record)?;
            let (mean, var) = record_means(record, 2, |_, x, out| {
                out[0] = number_kernel(1, x).expect("order 1");
                out[1] = number_kernel(2, x).expect("order 2");
            });
            let n = record.len() as u64;
            Ok((
                MomentEstimate::from_parts(1, Complex64::new(mean[0], 0.0), var[0].sqrt(), 0.0, n, 0.0),
                MomentEstimate::from_parts(2, Complex64::new(mean[1], 0.0), var[1].sqrt(), 0.0, n, 0.0),
            ))
        }
        MeasurementData::Histogram(h) => {
            check_histogram_coverage(h)?;
            // exact bin averages of x² and x⁴
            let avg = |hs: &QuadratureHistogram, b: usize, p: i32| {
                let (a, c) = hs.calibrated_edges(b);
                (c.powi(p + 1) - a.powi(p + 1)) / ((p + 1) as f64 * (c - a))
            };
            let kernel_bins = |hs: &QuadratureHistogram| -> [Vec<f64>; 2] {
                let k1 = (0..AMPLITUDE_BINS).map(|b| avg(hs, b, 2) - 0.5).collect();
                let k2 = (0..AMPLITUDE_BINS)
                    .map(|b| 2.0 / 3.0 * avg(hs, b, 4) - avg(hs, b, 2))
                    .collect();
                [k1, k2]
            };
            let base = kernel_bins(h);
            let shifted = kernel_bins(&h.with_vacuum_scale(h.vacuum_scale() * (1.0 + calibration_rel_error(h))));
            let delta = h.vacuum_scale() * h.bin_width();
            let mut out = Vec::with_capacity(2);
            for order in 0..2 {
                let (value, std_re, _) = histogram_mean(h, |_, b| Complex64::new(base[order][b], 0.0));
                let (moved, _, _) = histogram_mean(h, |_, b| Complex64::new(shifted[order][b], 0.0));
                // second derivatives: 2 for x² − ½, 8x² − 2 for (2/3)x⁴ − x²
                let (curv, _, _) = histogram_mean(h, |_, b| {
                    let c = if order == 0 { 2.0 } else { 8.0 * avg(h, b, 2) - 2.0 };
                    Complex64::new(c, 0.0)
                });
                out.push(MomentEstimate::from_parts(
                    order + 1,
                    Complex64::new(value.re, 0.0),
                    std_re.hypot((moved - value).re),
                    0.0,
                    h.total(),
                    delta * delta / 12.0 * curv.re.abs(),
                ));
            }
            Ok((out[0], out[1]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::table::KernelOptions;
    use crate::sampler::histogram::histogram_records;
    use crate::sampler::record::generate_records;
    use crate::states::{GaussianStateSpec, State};
    use std::sync::OnceLock;

    fn kernels() -> &'static KernelSet {
        static SET: OnceLock<KernelSet> = OnceLock::new();
        SET.get_or_init(|| KernelSet::build(4, KernelOptions::with_n_max(24)).unwrap())
    }

    fn record(spec: GaussianStateSpec, n: usize, scheme: PhaseScheme, seed: u64) -> HomodyneRecord {
        generate_records(&State::Gaussian(spec), n, scheme, seed).unwrap()
    }

    #[test]
    fn welford_merge_matches_two_pass() {
        let data: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut a = Moments::new(1);
        let mut b = Moments::new(1);
        for (i, x) in data.iter().enumerate() {
            if i < 333 { a.push(&[*x]) } else { b.push(&[*x]) }
        }
        a.merge(&b);
        let m = data.iter().sum::<f64>() / 1000.0;
        let ss: f64 = data.iter().map(|x| (x - m).powi(2)).sum();
        assert!((a.mean[0] - m).abs() < 1e-12 && (a.m2[0] - ss).abs() < 1e-9);
    }

    #[test]
    fn vacuum_moments_consistent_with_zero() {
        let r = record(GaussianStateSpec::vacuum(), 100_000, PhaseScheme::UniformRandom, 1);
        for m in estimate_exponential_moments((&r).into(), 4, kernels()).unwrap() {
            assert!(m.value.norm() < 3.0 * 2f64.sqrt() * m.std_error, "k={} {:?}", m.k, m);
            assert_eq!(m.std_error, m.std_re.max(m.std_im));
        }
        let (n1, n2) = estimate_number_moments((&r).into()).unwrap();
        assert!(n1.value.re.abs() < 3.0 * n1.std_error);
        assert!(n2.value.re.abs() < 3.0 * n2.std_error);
    }

    #[test]
    fn missing_kernel_is_an_error() {
        let r = record(GaussianStateSpec::vacuum(), 1000, PhaseScheme::UniformRandom, 1);
        assert!(matches!(
            estimate_exponential_moments((&r).into(), 5, kernels()),
            Err(Error::MissingKernel { k: 5, .. })
        ));
    }

    #[test]
    fn partial_phase_coverage_is_an_error() {
        let thetas: Vec<f64> = (0..1000).map(|i| i as f64 * 0.003).collect();
        let r = HomodyneRecord::new(thetas, vec![0.0; 1000], 0, "").unwrap();
        assert!(matches!(
            estimate_exponential_moments((&r).into(), 1, kernels()),
            Err(Error::PhaseCoverage { .. })
        ));
        assert!(matches!(estimate_number_moments((&r).into()), Err(Error::PhaseCoverage { .. })));
    }

    #[test]
    fn swept_errors_not_larger_than_random() {
        let spec = GaussianStateSpec::coherent(1.0, 0.4).unwrap();
        let a = record(spec, 200_000, PhaseScheme::Swept128, 2);
        let b = record(spec, 200_000, PhaseScheme::UniformRandom, 2);
        let ea = estimate_exponential_moments((&a).into(), 1, kernels()).unwrap();
        let eb = estimate_exponential_moments((&b).into(), 1, kernels()).unwrap();
        assert!(ea[0].std_error <= eb[0].std_error * 1.05);
    }

    #[test]
    fn histogram_agrees_with_record() {
        let spec = GaussianStateSpec::coherent(1.0, 0.4).unwrap();
        let r = record(spec, 200_000, PhaseScheme::Swept128, 3);
        let v = record(GaussianStateSpec::vacuum(), 200_000, PhaseScheme::UniformRandom, 4);
        let h = histogram_records(&r, &v).unwrap();
        let er = estimate_exponential_moments((&r).into(), 4, kernels()).unwrap();
        let eh = estimate_exponential_moments((&h).into(), 4, kernels()).unwrap();
        for (a, b) in er.iter().zip(&eh) {
            let tol = 3.0 * (a.std_error.powi(2) + b.std_error.powi(2)).sqrt() + b.binning_bias;
            assert!((a.value - b.value).norm() < 2f64.sqrt() * tol, "k={}", a.k);
        }
        let (n1r, _) = estimate_number_moments((&r).into()).unwrap();
        let (n1h, _) = estimate_number_moments((&h).into()).unwrap();
        assert!((n1r.value.re - n1h.value.re).abs() < 3.0 * n1r.std_error.hypot(n1h.std_error) + n1h.binning_bias);
    }

    #[test]
    fn sinc_factor() {
        assert_eq!(phase_bin_sinc(0), 1.0);
        assert!((phase_bin_sinc(20) - (20.0 * PI / 128.0).sin() / (20.0 * PI / 128.0)).abs() < 1e-16);
        assert!(phase_bin_sinc(20) < 1.0 && phase_bin_sinc(20) > 0.95);
    }
}
