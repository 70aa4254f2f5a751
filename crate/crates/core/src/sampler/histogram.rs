use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::kernels::cache::write_atomic;
use crate::sampler::record::HomodyneRecord;

pub const PHASE_BINS: usize = 128;
pub const AMPLITUDE_BINS: usize = 256;

/// Counts of `(θ, x)` samples on 128 phase intervals × 256 amplitude bins.
///
/// Bin edges are stored in raw record units; the calibrated amplitude is
/// `vacuum_scale · x_raw`, where `vacuum_scale` maps the variance of a vacuum
/// reference record to ½.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureHistogram {
    x_lo: f64,
    x_hi: f64,
    vacuum_scale: f64,
    vacuum_samples: u64,
    /// Row-major, `counts[j * AMPLITUDE_BINS + b]` for phase bin `j`.
    counts: Vec<u64>,
    /// Samples outside `[x_lo, x_hi]` that were counted in the edge bins.
    clamped: u64,
}

impl QuadratureHistogram {
    pub fn new(x_lo: f64, x_hi: f64, vacuum_scale: f64, vacuum_samples: u64, counts: Vec<u64>) -> Result<Self> {
        if !(x_lo.is_finite() && x_hi.is_finite() && x_lo < x_hi) {
            return Err(Error::Domain(format!("invalid amplitude range [{x_lo}, {x_hi}]")));
        }
        if !(vacuum_scale > 0.0 && vacuum_scale.is_finite()) {
            return Err(Error::Domain(format!("vacuum scale must be positive, got {vacuum_scale}")));
        }
        if counts.len() != PHASE_BINS * AMPLITUDE_BINS {
            return Err(Error::Domain(format!(
                "expected {} counts, got {}",
                PHASE_BINS * AMPLITUDE_BINS,
                counts.len()
            )));
        }
        Ok(Self {
            x_lo,
            x_hi,
            vacuum_scale,
            vacuum_samples,
            counts,
            clamped: 0,
        })
    }

    pub fn x_lo(&self) -> f64 {
        self.x_lo
    }

    pub fn x_hi(&self) -> f64 {
        self.x_hi
    }

    pub fn vacuum_scale(&self) -> f64 {
        self.vacuum_scale
    }

    /// Size of the vacuum record behind `vacuum_scale`; zero when unknown.
    pub fn vacuum_samples(&self) -> u64 {
        self.vacuum_samples
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, phase_bin: usize, amplitude_bin: usize) -> u64 {
        self.counts[phase_bin * AMPLITUDE_BINS + amplitude_bin]
    }

    pub fn clamped(&self) -> u64 {
        self.clamped
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn phase_bin_total(&self, j: usize) -> u64 {
        self.counts[j * AMPLITUDE_BINS..(j + 1) * AMPLITUDE_BINS].iter().sum()
    }

    /// Phase bins without samples.
    pub fn empty_phase_bins(&self) -> Vec<usize> {
        (0..PHASE_BINS).filter(|&j| self.phase_bin_total(j) == 0).collect()
    }

    /// Raw amplitude bin width.
    pub fn bin_width(&self) -> f64 {
        (self.x_hi - self.x_lo) / AMPLITUDE_BINS as f64
    }

    /// Calibrated edges `[a, b)` of amplitude bin `b`.
    pub fn calibrated_edges(&self, b: usize) -> (f64, f64) {
        let w = self.bin_width();
        let a = self.x_lo + b as f64 * w;
        (self.vacuum_scale * a, self.vacuum_scale * (a + w))
    }

    /// Centre of phase bin `j`.
    pub fn phase_center(j: usize) -> f64 {
        TAU * (j as f64 + 0.5) / PHASE_BINS as f64
    }

    /// Copy with a different calibration.
    pub fn with_vacuum_scale(&self, vacuum_scale: f64) -> Self {
        Self {
            vacuum_scale,
            ..self.clone()
        }
    }

    /// Text form:
    ///
    /// ```text
    /// # quadrature histogram
    /// phase_bins = 128
    /// amplitude_bins = 256
    /// x_lo = <f64>
    /// x_hi = <f64>
    /// vacuum_scale = <f64>
    /// vacuum_samples = <u64>
    /// counts
    /// <128 lines of 256 integers>
    /// ```
    ///
    /// Floats use the shortest representation that parses back to the same bits.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(PHASE_BINS * AMPLITUDE_BINS * 3 + 256);
        s.push_str("# quadrature histogram\n");
        let _ = writeln!(s, "phase_bins = {PHASE_BINS}");
        let _ = writeln!(s, "amplitude_bins = {AMPLITUDE_BINS}");
        let _ = writeln!(s, "x_lo = {:?}", self.x_lo);
        let _ = writeln!(s, "x_hi = {:?}", self.x_hi);
        let _ = writeln!(s, "vacuum_scale = {:?}", self.vacuum_scale);
        let _ = writeln!(s, "vacuum_samples = {}", self.vacuum_samples);
        s.push_str("counts\n");
        for j in 0..PHASE_BINS {
            let row = &self.counts[j * AMPLITUDE_BINS..(j + 1) * AMPLITUDE_BINS];
            for (b, c) in row.iter().enumerate() {
                if b > 0 {
                    s.push(' ');
                }
                let _ = write!(s, "{c}");
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |d: String| Error::format("histogram file", d);
        let mut lines = text.lines().filter(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty());
        let mut field = |name: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| bad(format!("missing '{name}'")))?;
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected '{name} = …', got '{line}'")))?;
            if k.trim() != name {
                return Err(bad(format!("expected '{name}', got '{}'", k.trim())));
            }
            Ok(v.trim().to_string())
        };
        let parse_f = |v: String, name: &str| v.parse::<f64>().map_err(|_| bad(format!("bad {name} '{v}'")));
        let parse_u = |v: String, name: &str| v.parse::<u64>().map_err(|_| bad(format!("bad {name} '{v}'")));
        let pb = parse_u(field("phase_bins")?, "phase_bins")?;
        let ab = parse_u(field("amplitude_bins")?, "amplitude_bins")?;
        if pb as usize != PHASE_BINS || ab as usize != AMPLITUDE_BINS {
            return Err(bad(format!("grid {pb}×{ab}, expected {PHASE_BINS}×{AMPLITUDE_BINS}")));
        }
        let x_lo = parse_f(field("x_lo")?, "x_lo")?;
        let x_hi = parse_f(field("x_hi")?, "x_hi")?;
        let vacuum_scale = parse_f(field("vacuum_scale")?, "vacuum_scale")?;
        let vacuum_samples = parse_u(field("vacuum_samples")?, "vacuum_samples")?;
        let mut rest = text
            .lines()
            .skip_while(|l| l.trim() != "counts")
            .skip(1)
            .filter(|l| !l.trim().is_empty());
        let mut counts = Vec::with_capacity(PHASE_BINS * AMPLITUDE_BINS);
        for j in 0..PHASE_BINS {
            let line = rest.next().ok_or_else(|| bad(format!("missing count row {j}")))?;
            let row: Vec<u64> = line
                .split_whitespace()
                .map(|t| t.parse::<u64>().map_err(|_| bad(format!("bad count '{t}' in row {j}"))))
                .collect::<Result<_>>()?;
            if row.len() != AMPLITUDE_BINS {
                return Err(bad(format!("row {j} has {} counts", row.len())));
            }
            counts.extend(row);
        }
        if rest.next().is_some() {
            return Err(bad("trailing content after count grid".into()));
        }
        Self::new(x_lo, x_hi, vacuum_scale, vacuum_samples, counts)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_text().as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}

/// `√(½ / s²)` with `s²` the unbiased sample variance of the vacuum amplitudes.
pub fn vacuum_scale(vacuum: &HomodyneRecord) -> Result<f64> {
    let n = vacuum.len();
    if n < 2 {
        return Err(Error::Empty("vacuum calibration needs at least two samples".into()));
    }
    let mean = vacuum.xs().iter().sum::<f64>() / n as f64;
    let var = vacuum.xs().iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    if !(var > 0.0) {
        return Err(Error::Domain("vacuum record has zero variance".into()));
    }
    Ok((0.5 / var).sqrt())
}

/// Bins `record` on the 128×256 grid, calibrated against `vacuum_record`.
///
/// The amplitude range is symmetric and covers the largest `|x|` of both
/// records with one bin of margin on each side. Empty phase bins are reported
/// by [`QuadratureHistogram::empty_phase_bins`].
pub fn histogram_records(record: &HomodyneRecord, vacuum_record: &HomodyneRecord) -> Result<QuadratureHistogram> {
    if record.is_empty() {
        return Err(Error::Empty("record to histogram is empty".into()));
    }
    let scale = vacuum_scale(vacuum_record)?;
    let reach = record
        .xs()
        .iter()
        .chain(vacuum_record.xs())
        .fold(0.0f64, |m, x| m.max(x.abs()));
    let reach = if reach > 0.0 { reach } else { 1.0 };
    let w = 2.0 * reach / (AMPLITUDE_BINS - 2) as f64;
    let (x_lo, x_hi) = (-reach - w, reach + w);
    let mut counts = vec![0u64; PHASE_BINS * AMPLITUDE_BINS];
    let mut clamped = 0;
    let width = (x_hi - x_lo) / AMPLITUDE_BINS as f64;
    for (&t, &x) in record.thetas().iter().zip(record.xs()) {
        let j = ((t / TAU * PHASE_BINS as f64) as usize).min(PHASE_BINS - 1);
        let pos = ((x - x_lo) / width).floor();
        let b = if pos < 0.0 {
            clamped += 1;
            0
        } else if pos >= AMPLITUDE_BINS as f64 {
            clamped += 1;
            AMPLITUDE_BINS - 1
        } else {
            pos as usize
        };
        counts[j * AMPLITUDE_BINS + b] += 1;
    }
    let mut h = QuadratureHistogram::new(x_lo, x_hi, scale, vacuum_record.len() as u64, counts)?;
    h.clamped = clamped;
    Ok(h)
}
