use std::collections::HashSet;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelOptions;
use crate::phasestats::Window;
use crate::sampler::PhaseScheme;
use crate::states::{FockState, GaussianStateSpec, State};

/// Config schema version understood by this build.
pub const CONFIG_VERSION: u32 = 1;

/// Label reserved for the calibration record.
pub const VACUUM_LABEL: &str = "vacuum";

/// One simulated source. Angles are in radians; `alpha_mag` and `squeeze_r`
/// are dimensionless. When `fock_amplitudes` is present the Gaussian fields
/// must stay at zero and the listed `[re, im]` pairs are normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub label: String,
    #[serde(default)]
    pub alpha_mag: f64,
    #[serde(default)]
    pub alpha_phase_rad: f64,
    #[serde(default)]
    pub squeeze_r: f64,
    #[serde(default)]
    pub squeeze_angle_rad: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fock_amplitudes: Option<Vec<[f64; 2]>>,
}

impl StateConfig {
    pub fn gaussian(label: &str, spec: GaussianStateSpec) -> Self {
        Self {
            label: label.to_string(),
            alpha_mag: spec.alpha_mag(),
            alpha_phase_rad: spec.alpha_phase(),
            squeeze_r: spec.squeeze_r(),
            squeeze_angle_rad: spec.squeeze_angle(),
            fock_amplitudes: None,
        }
    }

    pub fn state(&self) -> Result<State> {
        match &self.fock_amplitudes {
            None => Ok(State::Gaussian(GaussianStateSpec::new(
                self.alpha_mag,
                self.alpha_phase_rad,
                self.squeeze_r,
                self.squeeze_angle_rad,
            )?)),
            Some(amps) => {
                if [self.alpha_mag, self.alpha_phase_rad, self.squeeze_r, self.squeeze_angle_rad] != [0.0; 4] {
                    return Err(Error::Config(format!(
                        "state '{}' mixes fock_amplitudes with Gaussian parameters",
                        self.label
                    )));
                }
                let c = amps.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
                Ok(State::Fock(FockState::normalized(c)?))
            }
        }
    }
}

fn default_scheme() -> PhaseScheme {
    PhaseScheme::Swept128
}

fn default_k_max() -> usize {
    20
}

fn default_n_max() -> usize {
    KernelOptions::DEFAULT_N_MAX
}

fn default_window() -> Window {
    Window::Cesaro
}

fn default_grid_size() -> usize {
    720
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

/// Everything a run depends on besides the code itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub seed: u64,
    pub n_samples: usize,
    #[serde(default = "default_scheme")]
    pub phase_scheme: PhaseScheme,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    /// Fock cutoff of the kernel construction.
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_window")]
    pub window: Window,
    /// Points of the uniform φ grid for `P(φ)` tables.
    #[serde(default = "default_grid_size")]
    pub grid_size: usize,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Kernel cache directory; `<out>/kernels` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_cache: Option<PathBuf>,
    #[serde(rename = "state")]
    pub states: Vec<StateConfig>,
}

impl RunConfig {
    /// The eight-state roster: coherent (A, B), amplitude-squeezed (C, D),
    /// phase-squeezed (E, F), squeezed vacuum (G) and squeezing at 48° (H).
    pub fn battery() -> Self {
        let g = |label: &str, spec: Result<GaussianStateSpec>| StateConfig::gaussian(label, spec.expect("valid"));
        Self {
            version: CONFIG_VERSION,
            seed: 1,
            n_samples: 1_000_000,
            phase_scheme: default_scheme(),
            k_max: default_k_max(),
            n_max: default_n_max(),
            window: default_window(),
            grid_size: default_grid_size(),
            out: default_out(),
            kernel_cache: None,
            states: vec![
                g("A", GaussianStateSpec::coherent(2.0, 0.0)),
                g("B", GaussianStateSpec::coherent(1.0, 0.0)),
                g("C", GaussianStateSpec::amplitude_squeezed(2.0, 0.0, 0.3)),
                g("D", GaussianStateSpec::amplitude_squeezed(1.5, 0.0, 0.5)),
                g("E", GaussianStateSpec::phase_squeezed(2.0, 0.0, 0.3)),
                g("F", GaussianStateSpec::phase_squeezed(1.5, 0.0, 0.5)),
                g("G", GaussianStateSpec::squeezed_vacuum(0.5, 0.0)),
                g("H", GaussianStateSpec::squeezed_at_angle(2.0, 0.0, 0.3, 48f64.to_radians())),
            ],
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "config version {} is not supported (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        if self.n_samples < 2 {
            return Err(Error::Config("n_samples must be at least 2".into()));
        }
        if self.k_max == 0 {
            return Err(Error::Config("k_max must be positive".into()));
        }
        if self.grid_size < 4 * self.k_max {
            return Err(Error::Config(format!(
                "grid_size {} is below 4·k_max = {}",
                self.grid_size,
                4 * self.k_max
            )));
        }
        if self.states.is_empty() {
            return Err(Error::Config("at least one [[state]] is required".into()));
        }
        let mut seen = HashSet::new();
        for s in &self.states {
            let ok = !s.label.is_empty()
                && s.label
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
            if !ok {
                return Err(Error::Config(format!(
                    "state label '{}' must be nonempty ASCII letters, digits, '-' or '_'",
                    s.label
                )));
            }
            if s.label == VACUUM_LABEL {
                return Err(Error::Config(format!("state label '{VACUUM_LABEL}' is reserved")));
            }
            if !seen.insert(s.label.as_str()) {
                return Err(Error::Config(format!("duplicate state label '{}'", s.label)));
            }
            s.state()?;
        }
        Ok(())
    }

    pub fn kernel_options(&self) -> KernelOptions {
        KernelOptions::with_n_max(self.n_max)
    }

    pub fn kernel_cache_dir(&self) -> PathBuf {
        self.kernel_cache.clone().unwrap_or_else(|| self.out.join("kernels"))
    }

    /// Seed of the stream for state `index` (1-based); 0 is the vacuum record.
    pub fn stream_seed(&self, index: usize) -> u64 {
        self.seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_round_trip() {
        let c = RunConfig::battery();
        c.validate().unwrap();
        let text = c.to_toml().unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), c);
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut text = RunConfig::battery().to_toml().unwrap();
        text = text.replacen("seed = 1", "seed = 1\ntemperature = 3", 1);
        assert!(matches!(RunConfig::from_toml(&text), Err(Error::Config(_))));
        let text = RunConfig::battery().to_toml().unwrap().replacen("squeeze_r", "squeeze_deg", 1);
        assert!(RunConfig::from_toml(&text).is_err());
    }

    #[test]
    fn defaults_fill_optional_fields() {
        let c = RunConfig::from_toml("version = 1\nseed = 3\nn_samples = 10\n[[state]]\nlabel = \"A\"\nalpha_mag = 1.0\n").unwrap();
        assert_eq!(c.k_max, 20);
        assert_eq!(c.phase_scheme, PhaseScheme::Swept128);
        assert_eq!(c.kernel_cache_dir(), PathBuf::from("out/kernels"));
    }

    #[test]
    fn invalid_configs() {
        let base = "seed = 3\nn_samples = 10\n[[state]]\nlabel = \"A\"\n";
        assert!(RunConfig::from_toml(&format!("version = 2\n{base}")).is_err());
        assert!(RunConfig::from_toml(&format!("version = 1\n{base}[[state]]\nlabel = \"A\"\n")).is_err());
        assert!(RunConfig::from_toml(&format!("version = 1\nk_max = 200\n{base}")).is_err());
        assert!(RunConfig::from_toml("version = 1\nseed = 3\nn_samples = 10\n[[state]]\nlabel = \"vacuum\"\n").is_err());
        assert!(RunConfig::from_toml("version = 1\nseed = 3\nn_samples = 10\n[[state]]\nlabel = \"a/b\"\n").is_err());
        assert!(RunConfig::from_toml(
            "version = 1\nseed = 3\nn_samples = 10\n[[state]]\nlabel = \"F\"\nalpha_mag = 1.0\nfock_amplitudes = [[1.0, 0.0]]\n"
        )
        .is_err());
    }

    #[test]
    fn fock_state_config() {
        let c = RunConfig::from_toml(
            "version = 1\nseed = 3\nn_samples = 10\n[[state]]\nlabel = \"S\"\nfock_amplitudes = [[1.0, 0.0], [0.0, 1.0]]\n",
        )
        .unwrap();
        let State::Fock(f) = c.states[0].state().unwrap() else { panic!() };
        assert!((f.amplitudes()[1].im - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn stream_seeds_distinct() {
        let c = RunConfig::battery();
        let seeds: HashSet<u64> = (0..=8).map(|i| c.stream_seed(i)).collect();
        assert_eq!(seeds.len(), 9);
        assert_eq!(c.stream_seed(0), c.seed);
    }
}
