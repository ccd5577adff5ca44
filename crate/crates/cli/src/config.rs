use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use spinmodes::coupling::TrapDepth;
use spinmodes::oracle::{OracleLimits, SuiteConfig};
use spinmodes::{AxialExtent, CloudDistribution, GridSpec64, ModeProfile64};

use crate::error::CliError;

/// Everything a command needs, as read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub geometry: Geometry,
    pub state: StateSpec,
    pub wigner: WignerSection,
    pub gain: GainSection,
    pub thermal: ThermalSection,
    pub verify: VerifySection,
    pub output: OutputSection,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            geometry: Geometry::default(),
            state: StateSpec::Dicke { n: 1, cutoff: None },
            wigner: WignerSection::default(),
            gain: GainSection::default(),
            thermal: ThermalSection::default(),
            verify: VerifySection::default(),
            output: OutputSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Geometry {
    pub spin: f64,
    pub n_atoms: usize,
    pub preparation: ModeProfile64,
    pub readout: ModeProfile64,
    pub cloud: CloudDistribution<f64>,
    /// Overrides the overlap computed from the two profiles.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            spin: 1.0,
            n_atoms: 2000,
            preparation: ModeProfile64::StandingWave { wavelength: 1.0 },
            readout: ModeProfile64::Uniform,
            cloud: CloudDistribution::UniformLine { extent: AxialExtent::Wavelengths(100) },
            j: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Dicke {
        n: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        cutoff: Option<usize>,
    },
    Cat {
        m: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        cutoff: Option<usize>,
    },
    Squeezed {
        db: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        cutoff: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WignerSection {
    /// `xmin:xmax:n,pmin:pmax:n`
    pub grid: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
}

impl Default for WignerSection {
    fn default() -> Self {
        Self { grid: "-4:4:161,-4:4:161".into(), sweep: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    pub j_min: f64,
    pub j_max: f64,
    pub points: usize,
}

impl Default for Sweep {
    fn default() -> Self {
        Self { j_min: 0.0, j_max: 1.0, points: 101 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GainSection {
    pub db: Vec<f64>,
    /// Total effective spin; taken from the geometry when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    pub j_min: f64,
    pub j_max: f64,
    pub points: usize,
}

impl Default for GainSection {
    fn default() -> Self {
        Self { db: vec![15.0, 10.0, 5.0], s: None, j_min: 0.01, j_max: 1.0, points: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermalSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trap_depth_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trap_depth_kelvin: Option<f64>,
    pub n_atoms: f64,
    pub temperatures_nk: Vec<f64>,
}

impl Default for ThermalSection {
    fn default() -> Self {
        Self { trap_depth_hz: None, trap_depth_kelvin: None, n_atoms: 1e8, temperatures_nk: vec![10.0, 50.0, 100.0] }
    }
}

impl ThermalSection {
    pub fn depth(&self) -> TrapDepth<f64> {
        match (self.trap_depth_hz, self.trap_depth_kelvin) {
            (_, Some(k)) => TrapDepth::Kelvin(k),
            (Some(hz), None) => TrapDepth::Hertz(hz),
            (None, None) => TrapDepth::Hertz(10e6),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub n_min: usize,
    pub n_max: usize,
    pub samples: usize,
    pub eta_min: f64,
    pub max_dim: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        let d = SuiteConfig::default();
        Self { n_min: d.n_min, n_max: d.n_max, samples: d.samples, eta_min: d.eta_min, max_dim: d.limits.max_dim }
    }
}

impl VerifySection {
    pub fn suite(&self, seed: u64) -> SuiteConfig {
        SuiteConfig {
            n_min: self.n_min,
            n_max: self.n_max,
            seed,
            samples: self.samples,
            eta_min: self.eta_min,
            limits: OracleLimits { max_dim: self.max_dim, ..OracleLimits::default() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

/// Parsed configuration plus the text it came from, for error locations.
pub struct Loaded {
    pub config: ScenarioConfig,
    pub source: Option<(PathBuf, String)>,
}

impl Loaded {
    pub fn defaults() -> Self {
        Self { config: ScenarioConfig::default(), source: None }
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
        let config = parse(&text).map_err(|(line, message)| CliError::Config {
            path: path.display().to_string(),
            line,
            message,
        })?;
        Ok(Self { config, source: Some((path.to_path_buf(), text)) })
    }

    /// Validation error pointing at `section.key` in the source file.
    pub fn invalid(&self, section: &str, key: &str, message: String) -> CliError {
        let (path, line) = match &self.source {
            Some((p, text)) => (p.display().to_string(), locate(text, section, key)),
            None => ("<defaults>".to_string(), None),
        };
        let name = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
        CliError::Config { path, line, message: format!("{name}: {message}") }
    }
}

/// Parses TOML text; errors carry the 1-based line of the offending span.
pub fn parse(text: &str) -> Result<ScenarioConfig, (Option<usize>, String)> {
    toml::from_str(text).map_err(|e: toml::de::Error| {
        let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        (line, e.message().trim().to_string())
    })
}

pub fn to_toml(config: &ScenarioConfig) -> String {
    toml::to_string(config).expect("config serializes to TOML")
}

/// SHA-256 of the canonical TOML form.
pub fn hash(config: &ScenarioConfig) -> String {
    let digest = Sha256::digest(to_toml(config).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// 1-based line of `key = ...` inside table `section` (dotted, may be empty).
pub fn locate(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    let mut header_line = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.split(']').next()) {
            current = name.trim_matches('[').trim().to_string();
            if current == section {
                header_line = Some(i + 1);
            }
            continue;
        }
        let Some((lhs, _)) = line.split_once('=') else { continue };
        let lhs = lhs.trim();
        let full = if current.is_empty() { lhs.to_string() } else { format!("{current}.{lhs}") };
        let wanted = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
        if full == wanted || full.starts_with(&format!("{wanted}.")) {
            return Some(i + 1);
        }
    }
    header_line
}

impl ScenarioConfig {
    pub fn grid(&self) -> Result<GridSpec64, String> {
        self.wigner.grid.parse::<GridSpec64>().map_err(|e| e.to_string())
    }
}
