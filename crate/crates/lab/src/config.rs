//! JSON scenario documents.
//!
//! Every physical quantity carries its unit in the key name and unknown keys
//! are rejected. Omitted fields take the defaults of
//! [`Scenario::with_defaults`]. A parsed scenario converted back with
//! [`ScenarioConfig::from_scenario`] reparses to an identical value.

use std::path::PathBuf;

use doa_core::array::{ArrayGeometry, SourceSpec};
use doa_core::frontend::{ReceiverKind, ReceiverModel};
use doa_core::subspace::{Algorithm, EspritVariant, SourceCountMethod};
use serde::{Deserialize, Serialize};

use crate::scenarios::{
    Scenario, SmoothingChoice, DEFAULT_CARRIER_HZ, DEFAULT_ELEMENTS, DEFAULT_GRID_STEP_DEG,
    DEFAULT_SNAPSHOTS, DEFAULT_TOLERANCE_DEG,
};
use crate::{LabError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub geometry: GeometryConfig,
    pub sources: Vec<SourceConfig>,
    #[serde(default)]
    pub receiver: ReceiverConfig,
    #[serde(default = "default_snapshots")]
    pub num_snapshots: usize,
    /// `null` or absent means noiseless.
    #[serde(default)]
    pub noise_power_db: Option<f64>,
    #[serde(default)]
    pub smoothing: SmoothingConfig,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<AlgorithmName>,
    #[serde(default)]
    pub source_count: SourceCountConfig,
    #[serde(default)]
    pub esprit_variant: VariantName,
    #[serde(default = "default_grid_step")]
    pub grid_step_deg: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance_deg: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    #[serde(default = "default_elements")]
    pub num_elements: usize,
    #[serde(default = "default_carrier")]
    pub carrier_freq_hz: f64,
    /// Half a wavelength when absent.
    #[serde(default)]
    pub spacing_m: Option<f64>,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            num_elements: DEFAULT_ELEMENTS,
            carrier_freq_hz: DEFAULT_CARRIER_HZ,
            spacing_m: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub aoa_deg: f64,
    #[serde(default)]
    pub power_db: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherence_group: Option<u32>,
    #[serde(default)]
    pub path_phase_deg: f64,
    #[serde(default)]
    pub path_gain_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReceiverKindName {
    #[default]
    Ideal,
    SixPort,
    FivePort,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverConfig {
    #[serde(default)]
    pub kind: ReceiverKindName,
    #[serde(default)]
    pub static_gain_db: Vec<f64>,
    #[serde(default)]
    pub static_phase_deg: Vec<f64>,
    #[serde(default)]
    pub lo_phase_jitter_rad: f64,
    #[serde(default)]
    pub lo_gain_jitter_db: f64,
    #[serde(default = "yes")]
    pub calibrate: bool,
}

impl Default for ReceiverConfig {
    fn default() -> Self {
        Self {
            kind: ReceiverKindName::Ideal,
            static_gain_db: Vec::new(),
            static_phase_deg: Vec::new(),
            lo_phase_jitter_rad: 0.0,
            lo_gain_jitter_db: 0.0,
            calibrate: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothingMode {
    #[default]
    Off,
    Forward,
    ForwardBackward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothingConfig {
    #[serde(default)]
    pub mode: SmoothingMode,
    /// Defaults to `n - K` for a known source count, else `ceil(n/2) + 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subarray_size: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmName {
    Music,
    Esprit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantName {
    Ls,
    #[default]
    Tls,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceCountConfig {
    /// `k` defaults to the number of configured sources.
    Known {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
    },
    Threshold {
        ratio: f64,
    },
    Mdl,
    Aic,
}

impl Default for SourceCountConfig {
    fn default() -> Self {
        SourceCountConfig::Known { k: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
    #[serde(default)]
    pub dump_spectrum: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            out_dir: None,
            formats: default_formats(),
            dump_spectrum: false,
        }
    }
}

fn default_snapshots() -> usize {
    DEFAULT_SNAPSHOTS
}
fn default_elements() -> usize {
    DEFAULT_ELEMENTS
}
fn default_carrier() -> f64 {
    DEFAULT_CARRIER_HZ
}
fn default_grid_step() -> f64 {
    DEFAULT_GRID_STEP_DEG
}
fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE_DEG
}
fn default_trials() -> usize {
    1
}
fn default_algorithms() -> Vec<AlgorithmName> {
    vec![AlgorithmName::Music, AlgorithmName::Esprit]
}
fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Json, OutputFormat::Csv]
}
fn yes() -> bool {
    true
}

/// Parse and validate a JSON scenario document.
pub fn parse_config(document: &str) -> Result<(Scenario, OutputConfig)> {
    let cfg: ScenarioConfig = serde_json::from_str(document)?;
    let output = cfg.output.clone().unwrap_or_default();
    Ok((cfg.to_scenario()?, output))
}

impl ScenarioConfig {
    pub fn to_scenario(&self) -> Result<Scenario> {
        let g = &self.geometry;
        let geometry = match g.spacing_m {
            Some(d) => ArrayGeometry::new(g.num_elements, d, g.carrier_freq_hz),
            None => ArrayGeometry::half_wavelength(g.num_elements, g.carrier_freq_hz),
        }
        .map_err(|e| LabError::from_core("geometry", e))?;

        let sources: Vec<SourceSpec> = self
            .sources
            .iter()
            .map(|s| SourceSpec {
                aoa_deg: s.aoa_deg,
                power_db: s.power_db,
                coherence_group: s.coherence_group,
                path_phase_deg: s.path_phase_deg,
                path_gain_db: s.path_gain_db,
            })
            .collect();

        let r = &self.receiver;
        let kind = match r.kind {
            ReceiverKindName::Ideal => ReceiverKind::Ideal,
            ReceiverKindName::SixPort => ReceiverKind::SixPort,
            ReceiverKindName::FivePort => ReceiverKind::FivePort,
        };
        if kind == ReceiverKind::SixPort
            && (r.lo_phase_jitter_rad != 0.0 || r.lo_gain_jitter_db != 0.0)
        {
            return Err(LabError::config(
                "receiver.lo_phase_jitter_rad",
                "six_port receivers have a stable LO; jitter applies to five_port only",
            ));
        }
        let receiver = ReceiverModel::new(
            kind,
            r.static_gain_db.clone(),
            r.static_phase_deg.clone(),
            r.lo_phase_jitter_rad,
            r.lo_gain_jitter_db,
        )
        .map_err(|e| LabError::from_core("receiver", e))?
        .with_calibration(r.calibrate);

        let source_count = match self.source_count {
            SourceCountConfig::Known { k } => SourceCountMethod::Known(k.unwrap_or(sources.len())),
            SourceCountConfig::Threshold { ratio } => SourceCountMethod::Threshold(ratio),
            SourceCountConfig::Mdl => SourceCountMethod::Mdl,
            SourceCountConfig::Aic => SourceCountMethod::Aic,
        };

        let n = geometry.num_elements();
        let p = || {
            let known = match source_count {
                SourceCountMethod::Known(k) => Some(k),
                _ => None,
            };
            self.smoothing
                .subarray_size
                .unwrap_or_else(|| doa_core::covariance::default_subarray_size(n, known))
        };
        let smoothing = match self.smoothing.mode {
            SmoothingMode::Off => {
                if self.smoothing.subarray_size.is_some() {
                    return Err(LabError::config(
                        "smoothing.subarray_size",
                        "only meaningful with mode forward or forward_backward",
                    ));
                }
                SmoothingChoice::Off
            }
            SmoothingMode::Forward => SmoothingChoice::Forward(p()),
            SmoothingMode::ForwardBackward => SmoothingChoice::ForwardBackward(p()),
        };

        let mut algorithms = Vec::new();
        for a in &self.algorithms {
            let a = match a {
                AlgorithmName::Music => Algorithm::Music,
                AlgorithmName::Esprit => Algorithm::Esprit,
            };
            if algorithms.contains(&a) {
                return Err(LabError::config(
                    "algorithms",
                    format!("`{}` listed twice", a.as_str()),
                ));
            }
            algorithms.push(a);
        }

        let scenario = Scenario {
            name: self.name.clone(),
            geometry,
            sources,
            receiver,
            num_snapshots: self.num_snapshots,
            noise_power_db: self.noise_power_db,
            smoothing,
            algorithms,
            source_count,
            esprit_variant: match self.esprit_variant {
                VariantName::Ls => EspritVariant::Ls,
                VariantName::Tls => EspritVariant::Tls,
            },
            grid_step_deg: self.grid_step_deg,
            tolerance_deg: self.tolerance_deg,
            trials: self.trials,
            base_seed: self.base_seed,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// Fully explicit document for `scenario`, without output controls.
    pub fn from_scenario(s: &Scenario) -> Self {
        let r = &s.receiver;
        let (mode, subarray_size) = match s.smoothing {
            SmoothingChoice::Off => (SmoothingMode::Off, None),
            SmoothingChoice::Forward(p) => (SmoothingMode::Forward, Some(p)),
            SmoothingChoice::ForwardBackward(p) => (SmoothingMode::ForwardBackward, Some(p)),
        };
        Self {
            name: s.name.clone(),
            geometry: GeometryConfig {
                num_elements: s.geometry.num_elements(),
                carrier_freq_hz: s.geometry.carrier_freq_hz(),
                spacing_m: Some(s.geometry.spacing_m()),
            },
            sources: s
                .sources
                .iter()
                .map(|x| SourceConfig {
                    aoa_deg: x.aoa_deg,
                    power_db: x.power_db,
                    coherence_group: x.coherence_group,
                    path_phase_deg: x.path_phase_deg,
                    path_gain_db: x.path_gain_db,
                })
                .collect(),
            receiver: ReceiverConfig {
                kind: match r.kind() {
                    ReceiverKind::Ideal => ReceiverKindName::Ideal,
                    ReceiverKind::SixPort => ReceiverKindName::SixPort,
                    ReceiverKind::FivePort => ReceiverKindName::FivePort,
                },
                static_gain_db: r.static_gain_db().to_vec(),
                static_phase_deg: r.static_phase_deg().to_vec(),
                lo_phase_jitter_rad: r.lo_phase_jitter_rad(),
                lo_gain_jitter_db: r.lo_gain_jitter_db(),
                calibrate: r.calibrated(),
            },
            num_snapshots: s.num_snapshots,
            noise_power_db: s.noise_power_db,
            smoothing: SmoothingConfig {
                mode,
                subarray_size,
            },
            algorithms: s
                .algorithms
                .iter()
                .map(|a| match a {
                    Algorithm::Music => AlgorithmName::Music,
                    Algorithm::Esprit => AlgorithmName::Esprit,
                })
                .collect(),
            source_count: match s.source_count {
                SourceCountMethod::Known(k) => SourceCountConfig::Known { k: Some(k) },
                SourceCountMethod::Threshold(ratio) => SourceCountConfig::Threshold { ratio },
                SourceCountMethod::Mdl => SourceCountConfig::Mdl,
                SourceCountMethod::Aic => SourceCountConfig::Aic,
            },
            esprit_variant: match s.esprit_variant {
                EspritVariant::Ls => VariantName::Ls,
                EspritVariant::Tls => VariantName::Tls,
            },
            grid_step_deg: s.grid_step_deg,
            tolerance_deg: s.tolerance_deg,
            trials: s.trials,
            base_seed: s.base_seed,
            output: None,
        }
    }
}

impl Scenario {
    /// Serialize as a JSON scenario document.
    pub fn to_config(&self) -> String {
        serde_json::to_string_pretty(&ScenarioConfig::from_scenario(self))
            .expect("scenario documents always serialize")
    }
}
