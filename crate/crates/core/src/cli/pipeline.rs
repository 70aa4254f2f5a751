use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cli::config::{RunConfig, VACUUM_LABEL};
use crate::error::{Error, Result};
use crate::kernels::cache::write_atomic;
use crate::kernels::KernelSet;
use crate::phasestats::{phase_statistics, synthesize_phase_distribution, uncertainty_report, UncertaintyReport};
use crate::sampler::{
    estimate_exponential_moments, estimate_number_moments, generate_records, histogram_records, HomodyneRecord,
    MeasurementData, MomentEstimate, QuadratureHistogram,
};
use crate::states::{GaussianStateSpec, State};

/// Moment-file schema version.
pub const MOMENT_FILE_VERSION: u32 = 1;

/// Output tree under the configured directory:
///
/// ```text
/// config.toml             effective configuration
/// records/<label>.hrec    binary records, plus records/vacuum.hrec
/// records/<label>.hist    128×256 histograms calibrated against the vacuum
/// moments/<label>.toml    Ψ̂_1..Ψ̂_kmax, ⟨n̂⟩, ⟨n̂²⟩
/// phase/<label>.txt       φ P(φ) tables
/// report.txt, report.toml uncertainty table
/// kernels/                PKT1 cache (unless configured elsewhere)
/// ```
#[derive(Debug, Clone)]
pub struct Layout {
    root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn config(&self) -> PathBuf {
        self.root.join("config.toml")
    }

    pub fn record(&self, label: &str) -> PathBuf {
        self.root.join("records").join(format!("{label}.hrec"))
    }

    pub fn histogram(&self, label: &str) -> PathBuf {
        self.root.join("records").join(format!("{label}.hist"))
    }

    pub fn moments(&self, label: &str) -> PathBuf {
        self.root.join("moments").join(format!("{label}.toml"))
    }

    pub fn phase(&self, label: &str) -> PathBuf {
        self.root.join("phase").join(format!("{label}.txt"))
    }

    pub fn report_text(&self) -> PathBuf {
        self.root.join("report.txt")
    }

    pub fn report_toml(&self) -> PathBuf {
        self.root.join("report.toml")
    }
}

/// Estimates of one state as written by `estimate` and read by `report`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentFile {
    pub version: u32,
    pub label: String,
    /// State descriptor from the record header, or the histogram path.
    pub source: String,
    /// `record` or `histogram`.
    pub input: String,
    pub n_samples: u64,
    pub n_mean: MomentEstimate,
    pub n_second: MomentEstimate,
    #[serde(rename = "moment")]
    pub moments: Vec<MomentEstimate>,
}

impl MomentFile {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::format("moment file", e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let f: Self = toml::from_str(text).map_err(|e| Error::format("moment file", e.to_string()))?;
        if f.version != MOMENT_FILE_VERSION {
            return Err(Error::format("moment file", format!("unsupported version {}", f.version)));
        }
        Ok(f)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_toml()?.as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn file_label(path: &Path) -> Result<String> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .map(str::to_string)
        .ok_or_else(|| Error::Config(format!("cannot derive a label from {}", path.display())))
}

/// Writes one record per configured state plus the vacuum calibration
/// record, and a vacuum-calibrated histogram per state. Returns the record
/// paths, vacuum last.
pub fn cmd_simulate(config: &RunConfig) -> Result<Vec<PathBuf>> {
    config.validate()?;
    let layout = Layout::new(&config.out);
    create_dir(&layout.root().join("records"))?;
    write_atomic(&layout.config(), config.to_toml()?.as_bytes())?;
    let vacuum = generate_records(
        &State::Gaussian(GaussianStateSpec::vacuum()),
        config.n_samples,
        config.phase_scheme,
        config.stream_seed(0),
    )?;
    let vacuum_path = layout.record(VACUUM_LABEL);
    vacuum.write(&vacuum_path)?;
    let mut paths = config
        .states
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let record = generate_records(&s.state()?, config.n_samples, config.phase_scheme, config.stream_seed(i + 1))?;
            let path = layout.record(&s.label);
            record.write(&path)?;
            histogram_records(&record, &vacuum)?.write(&layout.histogram(&s.label))?;
            Ok(path)
        })
        .collect::<Result<Vec<_>>>()?;
    paths.push(vacuum_path);
    Ok(paths)
}

/// Moment estimates for one record (`.hrec`) or histogram (`.hist`) file.
pub fn estimate_file(path: &Path, kernels: &KernelSet, k_max: usize) -> Result<MomentFile> {
    let label = file_label(path)?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let (record, histogram);
    let (data, source, input) = match ext {
        "hrec" => {
            record = HomodyneRecord::read(path)?;
            (MeasurementData::Record(&record), record.state_descriptor().to_string(), "record")
        }
        "hist" => {
            histogram = QuadratureHistogram::read(path)?;
            (MeasurementData::Histogram(&histogram), path.display().to_string(), "histogram")
        }
        other => {
            return Err(Error::Config(format!(
                "{}: unknown input extension '{other}' (expected .hrec or .hist)",
                path.display()
            )))
        }
    };
    let moments = estimate_exponential_moments(data, k_max, kernels)?;
    let (n_mean, n_second) = estimate_number_moments(data)?;
    Ok(MomentFile {
        version: MOMENT_FILE_VERSION,
        label,
        source,
        input: input.to_string(),
        n_samples: n_mean.n_samples,
        n_mean,
        n_second,
        moments,
    })
}

/// Estimates every input and writes `moments/<label>.toml`. With no inputs,
/// the configured states' records are used. Kernels come from the cache,
/// which is filled on first use.
pub fn cmd_estimate(inputs: &[PathBuf], config: &RunConfig) -> Result<Vec<PathBuf>> {
    config.validate()?;
    let layout = Layout::new(&config.out);
    let inputs: Vec<PathBuf> = if inputs.is_empty() {
        config.states.iter().map(|s| layout.record(&s.label)).collect()
    } else {
        inputs.to_vec()
    };
    let cache = config.kernel_cache_dir();
    create_dir(&cache)?;
    let kernels = KernelSet::load_or_build(&cache, config.k_max, config.kernel_options())?;
    create_dir(&layout.root().join("moments"))?;
    inputs
        .par_iter()
        .map(|input| {
            let file = estimate_file(input, &kernels, config.k_max)?;
            let path = layout.moments(&file.label);
            file.write(&path)?;
            Ok(path)
        })
        .collect()
}

/// Synthesizes `P(φ)` per moment file and writes the uncertainty report.
/// With no inputs, the configured states' moment files are used.
pub fn cmd_report(inputs: &[PathBuf], config: &RunConfig) -> Result<UncertaintyReport> {
    config.validate()?;
    let layout = Layout::new(&config.out);
    let inputs: Vec<PathBuf> = if inputs.is_empty() {
        config.states.iter().map(|s| layout.moments(&s.label)).collect()
    } else {
        inputs.to_vec()
    };
    create_dir(&layout.root().join("phase"))?;
    let mut stats = Vec::with_capacity(inputs.len());
    let mut labels = Vec::with_capacity(inputs.len());
    for input in &inputs {
        let file = MomentFile::read(input)?;
        if file.moments.is_empty() {
            return Err(Error::Empty(format!("{} has no exponential moments", input.display())));
        }
        let dist = synthesize_phase_distribution(&file.moments, config.grid_size, config.window)?;
        write_atomic(&layout.phase(&file.label), dist.to_text().as_bytes())?;
        stats.push(phase_statistics(&file.moments[0], &file.n_mean, &file.n_second));
        labels.push(file.label);
    }
    let report = uncertainty_report(&stats, &labels)?;
    write_atomic(&layout.report_text(), report.to_text().as_bytes())?;
    write_atomic(&layout.report_toml(), report.to_toml()?.as_bytes())?;
    Ok(report)
}

/// `simulate`, `estimate` and `report` in sequence.
pub fn cmd_all(config: &RunConfig) -> Result<UncertaintyReport> {
    cmd_simulate(config)?;
    cmd_estimate(&[], config)?;
    cmd_report(&[], config)
}
