//! Experiment configuration files.
//!
//! A config is one TOML document. Keys and defaults:
//!
//! ```toml
//! version = 1                    # required, must equal CONFIG_VERSION
//! preset = "grushin-1"           # or: system = "path/to/system.txt"
//! seed = 0                       # random test points only; PDE runs are deterministic
//! output = "grushin-1"           # directory below the output root
//! horizon = 100.0                # simulation horizon
//!
//! [grid]                         # optional for presets, required for `system`
//! lower = [-6.0, -12.0]
//! upper = [6.0, 12.0]
//! points = [49, 49]
//!
//! [nonlinearity]                 # f(u) = A u^alpha with lower constant B
//! kind = "power"
//! alpha = 1.3
//! a = 1.0
//! b = 1.0
//!
//! [time_weight]                  # constant (c) | power (sigma) | tabulated (t, phi)
//! kind = "constant"
//! c = 1.0
//!
//! [initial_data]                 # gaussian | constant | file
//! kind = "gaussian"
//! center = [0.0, 0.0]
//! width = [1.0, 1.0]
//! amplitude = 0.5
//!
//! [certificates]
//! t_split = 0.25
//! horizon = 1.0                  # congl quadrature and Weissler horizon
//! data_policy = "fixed"          # or "certified"
//! certified_fraction = 0.5
//! lemma_samples = 32
//!
//! [simulation]
//! max_change = 0.2
//! # threshold, dt optional
//!
//! [diagnostics]
//! kernel = true
//! decay = true
//! volume = true
//!
//! [sweep]
//! alpha = [1.2, 1.4, 2.0]
//! amplitude = [0.5]              # optional
//! ```
//!
//! Precedence: command-line overrides, then the file, then these defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::grid::{Field, GridSpec};
use crate::semilinear::{Nonlinearity, TimeWeight};
use crate::{Error, Result};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub points: Vec<usize>,
}

impl GridConfig {
    pub fn to_spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.lower.clone(), self.upper.clone(), self.points.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialData {
    /// `amplitude · exp(−Σ ((x_j − c_j)/w_j)²)` in grid coordinates.
    Gaussian {
        center: Vec<f64>,
        width: Vec<f64>,
        amplitude: f64,
    },
    Constant {
        value: f64,
    },
    /// A field in the binary field format; `amplitude` rescales it.
    File {
        path: PathBuf,
        #[serde(default = "one")]
        amplitude: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl InitialData {
    pub fn amplitude(&self) -> f64 {
        match self {
            InitialData::Gaussian { amplitude, .. } | InitialData::File { amplitude, .. } => *amplitude,
            InitialData::Constant { value } => *value,
        }
    }

    pub fn with_amplitude(&self, a: f64) -> Self {
        let mut d = self.clone();
        match &mut d {
            InitialData::Gaussian { amplitude, .. } | InitialData::File { amplitude, .. } => *amplitude = a,
            InitialData::Constant { value } => *value = a,
        }
        d
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            InitialData::Gaussian {
                center,
                width,
                amplitude,
            } => {
                if center.len() != dim || width.len() != dim {
                    return Err(Error::Config(format!("gaussian center and width need {dim} entries")));
                }
                if width.iter().any(|w| !(*w > 0.0)) {
                    return Err(Error::Config("gaussian widths must be positive".into()));
                }
                if !(*amplitude >= 0.0) {
                    return Err(Error::Config("amplitude must be non-negative".into()));
                }
            }
            InitialData::Constant { value } => {
                if !(*value >= 0.0) {
                    return Err(Error::Config("constant data must be non-negative".into()));
                }
            }
            InitialData::File { amplitude, .. } => {
                if !(*amplitude >= 0.0) {
                    return Err(Error::Config("amplitude must be non-negative".into()));
                }
            }
        }
        Ok(())
    }

    /// Samples the data on `grid`; relative file paths resolve against `base`.
    pub fn realize(&self, grid: &GridSpec, base: &Path) -> Result<Field> {
        match self {
            InitialData::Gaussian {
                center,
                width,
                amplitude,
            } => Ok(Field::gaussian(grid, center, width, *amplitude)),
            InitialData::Constant { value } => Ok(Field::constant(grid, *value)),
            InitialData::File { path, amplitude } => {
                let path = if path.is_absolute() {
                    path.clone()
                } else {
                    base.join(path)
                };
                let file = std::fs::File::open(&path)?;
                let field = crate::heat::io::read_field(std::io::BufReader::new(file))?;
                if field.grid() != grid {
                    return Err(Error::Config(format!(
                        "initial field {} lives on a different grid",
                        path.display()
                    )));
                }
                if field.min_value() < 0.0 {
                    return Err(Error::Config("initial field has negative values".into()));
                }
                Ok(field.scaled(*amplitude))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DataPolicy {
    /// Use the configured amplitude as is.
    #[default]
    Fixed,
    /// Above the Fujita exponent, shrink the amplitude to
    /// `certified_fraction` of the largest amplitude passing the
    /// global-existence test.
    Certified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateConfig {
    #[serde(default = "default_t_split")]
    pub t_split: f64,
    #[serde(default = "default_cert_horizon")]
    pub horizon: f64,
    #[serde(default)]
    pub data_policy: DataPolicy,
    #[serde(default = "default_fraction")]
    pub certified_fraction: f64,
    /// Geometric sample count for the necessary-condition certificate on
    /// `[horizon/1000, simulation horizon]`.
    #[serde(default = "default_lemma_samples")]
    pub lemma_samples: usize,
    #[serde(default = "default_snapshots")]
    pub snapshots: usize,
}

fn default_t_split() -> f64 {
    0.25
}
fn default_cert_horizon() -> f64 {
    1.0
}
fn default_fraction() -> f64 {
    0.5
}
fn default_lemma_samples() -> usize {
    32
}
fn default_snapshots() -> usize {
    32
}

impl Default for CertificateConfig {
    fn default() -> Self {
        Self {
            t_split: default_t_split(),
            horizon: default_cert_horizon(),
            data_policy: DataPolicy::Fixed,
            certified_fraction: default_fraction(),
            lemma_samples: default_lemma_samples(),
            snapshots: default_snapshots(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_max_change")]
    pub max_change: f64,
}

fn default_max_change() -> f64 {
    0.2
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            threshold: None,
            dt: None,
            max_change: default_max_change(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    #[serde(default = "yes")]
    pub kernel: bool,
    #[serde(default = "yes")]
    pub decay: bool,
    #[serde(default = "yes")]
    pub volume: bool,
}

fn yes() -> bool {
    true
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            kernel: true,
            decay: true,
            volume: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SweepAxes {
    #[serde(default)]
    pub alpha: Vec<f64>,
    #[serde(default)]
    pub amplitude: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub system: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub horizon: f64,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    pub nonlinearity: Nonlinearity,
    #[serde(default)]
    pub time_weight: TimeWeight,
    pub initial_data: InitialData,
    #[serde(default)]
    pub certificates: CertificateConfig,
    #[serde(default)]
    pub simulation: SimulationConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub sweep: Option<SweepAxes>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Label used in reports: the preset name or the system file stem.
    pub fn label(&self) -> String {
        match (&self.preset, &self.system) {
            (Some(p), _) => p.clone(),
            (None, Some(s)) => s
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "system".into()),
            (None, None) => "unnamed".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        match (&self.preset, &self.system) {
            (Some(_), Some(_)) => return Err(Error::Config("give either `preset` or `system`, not both".into())),
            (None, None) => return Err(Error::Config("one of `preset` or `system` is required".into())),
            (None, Some(_)) if self.grid.is_none() => {
                return Err(Error::Config("a `[grid]` table is required with `system`".into()))
            }
            _ => {}
        }
        if !(self.horizon > 0.0) {
            return Err(Error::Config("horizon must be positive".into()));
        }
        self.nonlinearity.validate()?;
        self.time_weight.validate()?;
        let c = &self.certificates;
        if !(c.t_split > 0.0) || !(c.horizon > c.t_split) {
            return Err(Error::Config("certificates need 0 < t_split < horizon".into()));
        }
        if !(c.certified_fraction > 0.0 && c.certified_fraction <= 1.0) {
            return Err(Error::Config("certified_fraction must lie in (0, 1]".into()));
        }
        if c.lemma_samples < 2 || c.snapshots < 1 {
            return Err(Error::Config("need at least two lemma samples and one snapshot".into()));
        }
        if let Some(g) = &self.grid {
            g.to_spec()?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serialises");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Power-law exponent of the nonlinearity, if any.
    pub fn alpha(&self) -> Option<f64> {
        match self.nonlinearity {
            Nonlinearity::Power { alpha, .. } => Some(alpha),
            _ => None,
        }
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        let mut c = self.clone();
        match &mut c.nonlinearity {
            Nonlinearity::Power { alpha: a, .. } => *a = alpha,
            _ => return Err(Error::Config("an alpha axis needs a power nonlinearity".into())),
        }
        c.nonlinearity.validate()?;
        Ok(c)
    }

    pub fn with_amplitude(&self, amplitude: f64) -> Self {
        let mut c = self.clone();
        c.initial_data = c.initial_data.with_amplitude(amplitude);
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
version = 1
preset = "grushin-1"
horizon = 10.0

[nonlinearity]
kind = "power"
alpha = 1.3
a = 1.0
b = 1.0

[initial_data]
kind = "gaussian"
center = [0.0, 0.0]
width = [1.0, 1.0]
amplitude = 0.5
"#;

    #[test]
    fn parses_with_defaults() {
        let c = ExperimentConfig::from_toml(SAMPLE).unwrap();
        assert_eq!(c.seed, 0);
        assert_eq!(c.time_weight, TimeWeight::default());
        assert_eq!(c.certificates, CertificateConfig::default());
        assert!(c.diagnostics.decay);
        assert_eq!(c.label(), "grushin-1");
    }

    #[test]
    fn round_trips_through_toml() {
        let c = ExperimentConfig::from_toml(SAMPLE).unwrap();
        let again = ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.hash(), again.hash());
    }

    #[test]
    fn hash_tracks_every_field() {
        let c = ExperimentConfig::from_toml(SAMPLE).unwrap();
        let mut d = c.clone();
        d.seed = 1;
        assert_ne!(c.hash(), d.hash());
        assert_ne!(c.hash(), c.with_alpha(1.31).unwrap().hash());
        assert_ne!(c.hash(), c.with_amplitude(0.4).hash());
        assert_eq!(c.hash().len(), 64);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::from_toml(&SAMPLE.replace("version = 1", "version = 2")).is_err());
        assert!(ExperimentConfig::from_toml(&SAMPLE.replace("preset = \"grushin-1\"", "")).is_err());
        assert!(ExperimentConfig::from_toml(&SAMPLE.replace("alpha = 1.3", "alpha = 0.9")).is_err());
        assert!(ExperimentConfig::from_toml(&format!("{SAMPLE}\nbogus = 1\n")).is_err());
        let both = SAMPLE.replace("horizon = 10.0", "horizon = 10.0\nsystem = \"x.txt\"");
        assert!(ExperimentConfig::from_toml(&both).is_err());
    }
}
