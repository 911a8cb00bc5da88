//! Monte Carlo scenarios.
//!
//! A [`Scenario`] fixes the array, sources, receiver, covariance processing
//! and estimators. [`run_scenario`] repeats the full chain for every trial
//! with seed `base_seed + trial` and scores each estimator against the true
//! angles.

mod builtin;
mod matching;
mod sweep;

use std::time::{Duration, Instant};

use doa_core::array::{synthesize_snapshots, validate_sources, ArrayGeometry, SourceSpec};
use doa_core::covariance::{sample_covariance, spatial_smoothing, CovarianceMatrix};
use doa_core::frontend::{apply_receiver, calibrate, ReceiverModel};
use doa_core::subspace::{
    eigendecompose, esprit, estimate_levels, estimate_source_count, find_peaks, music_spectrum,
    Algorithm, AngleGrid, EspritVariant, SourceCountMethod, Spectrum,
};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

pub use builtin::{builtin, builtin_scenarios, BuiltinScenario};
pub use matching::{match_angles, MatchedPair, Matching};
pub use sweep::{resolution_sweep, snr_sweep, ResolutionRow, SnrRow};

use crate::config::ScenarioConfig;
use crate::{LabError, Result};

/// Default matching tolerance for detection, degrees.
pub const DEFAULT_TOLERANCE_DEG: f64 = 1.0;
pub const DEFAULT_GRID_STEP_DEG: f64 = 0.1;
pub const DEFAULT_SNAPSHOTS: usize = 200;
pub const DEFAULT_ELEMENTS: usize = 8;
pub const DEFAULT_CARRIER_HZ: f64 = 3.5e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmoothingChoice {
    Off,
    Forward(usize),
    ForwardBackward(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub geometry: ArrayGeometry,
    pub sources: Vec<SourceSpec>,
    pub receiver: ReceiverModel,
    pub num_snapshots: usize,
    /// `None` is a noiseless run.
    pub noise_power_db: Option<f64>,
    pub smoothing: SmoothingChoice,
    pub algorithms: Vec<Algorithm>,
    pub source_count: SourceCountMethod,
    pub esprit_variant: EspritVariant,
    pub grid_step_deg: f64,
    pub tolerance_deg: f64,
    pub trials: usize,
    pub base_seed: u64,
}

impl Scenario {
    /// Scenario with every documented default: 8 elements at half-wavelength
    /// spacing for 3.5 GHz, 200 snapshots, noiseless, ideal receiver, no
    /// smoothing, MUSIC and TLS-ESPRIT with the true source count, one trial.
    pub fn with_defaults(name: impl Into<String>, sources: Vec<SourceSpec>) -> Self {
        let k = sources.len();
        Self {
            name: name.into(),
            geometry: ArrayGeometry::half_wavelength(DEFAULT_ELEMENTS, DEFAULT_CARRIER_HZ)
                .expect("default geometry is valid"),
            sources,
            receiver: ReceiverModel::ideal(),
            num_snapshots: DEFAULT_SNAPSHOTS,
            noise_power_db: None,
            smoothing: SmoothingChoice::Off,
            algorithms: vec![Algorithm::Music, Algorithm::Esprit],
            source_count: SourceCountMethod::Known(k),
            esprit_variant: EspritVariant::Tls,
            grid_step_deg: DEFAULT_GRID_STEP_DEG,
            tolerance_deg: DEFAULT_TOLERANCE_DEG,
            trials: 1,
            base_seed: 0,
        }
    }

    /// Dimension of the covariance handed to the estimators.
    pub fn effective_elements(&self) -> usize {
        match self.smoothing {
            SmoothingChoice::Off => self.geometry.num_elements(),
            SmoothingChoice::Forward(p) | SmoothingChoice::ForwardBackward(p) => p,
        }
    }

    /// True angles sorted ascending.
    pub fn truth_deg(&self) -> Vec<f64> {
        let mut t: Vec<f64> = self.sources.iter().map(|s| s.aoa_deg).collect();
        t.sort_by(f64::total_cmp);
        t
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(LabError::config("name", "must be non-empty"));
        }
        if self.trials == 0 {
            return Err(LabError::config("trials", "must be at least 1"));
        }
        if self.algorithms.is_empty() {
            return Err(LabError::config(
                "algorithms",
                "select at least one algorithm",
            ));
        }
        if self.num_snapshots == 0 {
            return Err(LabError::config("num_snapshots", "must be at least 1"));
        }
        // Per-source checks first so the diagnostic names the index.
        for (i, s) in self.sources.iter().enumerate() {
            if !(s.aoa_deg > -90.0 && s.aoa_deg < 90.0) {
                return Err(LabError::config(
                    format!("sources[{i}].aoa_deg"),
                    format!("must lie strictly inside (-90, 90), got {}", s.aoa_deg),
                ));
            }
            for (key, v) in [
                ("power_db", s.power_db),
                ("path_gain_db", s.path_gain_db),
                ("path_phase_deg", s.path_phase_deg),
            ] {
                if !v.is_finite() {
                    return Err(LabError::config(
                        format!("sources[{i}].{key}"),
                        "must be finite",
                    ));
                }
            }
        }
        validate_sources(&self.sources).map_err(|e| LabError::from_core("sources", e))?;
        if let Some(db) = self.noise_power_db {
            if !db.is_finite() {
                return Err(LabError::config("noise_power_db", "must be finite or null"));
            }
        }
        let n = self.geometry.num_elements();
        let p = self.effective_elements();
        if p < 2 || p > n {
            return Err(LabError::config(
                "smoothing.subarray_size",
                format!("must lie in 2..={n}, got {p}"),
            ));
        }
        if let SourceCountMethod::Known(k) = self.source_count {
            if k == 0 || k >= p {
                return Err(LabError::config(
                    "source_count.k",
                    format!("must lie in 1..{p} for a {p}-element covariance, got {k}"),
                ));
            }
        }
        if let SourceCountMethod::Threshold(r) = self.source_count {
            if !(r > 0.0 && r < 1.0) {
                return Err(LabError::config("source_count.ratio", "must lie in (0, 1)"));
            }
        }
        if !(self.tolerance_deg > 0.0) || !self.tolerance_deg.is_finite() {
            return Err(LabError::config("tolerance_deg", "must be positive"));
        }
        AngleGrid::symmetric(self.grid_step_deg).map_err(|e| LabError::from_core("", e))?;
        for (key, v) in [
            ("receiver.static_gain_db", self.receiver.static_gain_db()),
            (
                "receiver.static_phase_deg",
                self.receiver.static_phase_deg(),
            ),
        ] {
            if !v.is_empty() && v.len() != n {
                return Err(LabError::config(
                    key,
                    format!("{} entries for a {n}-element array", v.len()),
                ));
            }
        }
        Ok(())
    }
}

fn ser_algorithm<S: Serializer>(a: &Algorithm, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(a.as_str())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeStatus {
    Ok,
    /// Fewer pseudospectrum peaks than sources.
    ResolutionFailure,
    /// Any other estimator error (out-of-range root, degenerate subspace,
    /// unusable source count).
    Failed,
}

/// One estimator's result on one trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmOutcome {
    #[serde(serialize_with = "ser_algorithm")]
    pub algorithm: Algorithm,
    pub status: OutcomeStatus,
    pub angles_deg: Vec<f64>,
    pub levels_db: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub matches: Vec<MatchedPair>,
    pub misses: usize,
    /// Estimation succeeded and every source was matched within tolerance.
    pub detected: bool,
    #[serde(skip)]
    pub spectrum: Option<Spectrum>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub source_count: usize,
    pub eigenvalues: Vec<f64>,
    pub outcomes: Vec<AlgorithmOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmSummary {
    #[serde(serialize_with = "ser_algorithm")]
    pub algorithm: Algorithm,
    /// Root mean square of all matched-pair errors; `None` when nothing was
    /// matched in any trial.
    pub rmse_deg: Option<f64>,
    pub detection_rate: f64,
    pub resolution_failures: usize,
    pub failures: usize,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: ScenarioConfig,
    pub truth_deg: Vec<f64>,
    pub summaries: Vec<AlgorithmSummary>,
    pub trials: Vec<TrialRecord>,
    /// Wall-clock time; excluded from serialized reports so identical runs
    /// produce identical files.
    #[serde(skip)]
    pub runtime: Duration,
}

impl ScenarioReport {
    pub fn summary(&self, algorithm: Algorithm) -> Option<&AlgorithmSummary> {
        self.summaries.iter().find(|s| s.algorithm == algorithm)
    }
}

/// Run every trial of `scenario`. Estimator failures are recorded in the
/// report; only synthesis or eigensolver failures abort the run.
pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioReport> {
    scenario.validate()?;
    let start = Instant::now();
    let grid = AngleGrid::symmetric(scenario.grid_step_deg).map_err(LabError::Numeric)?;
    let truth = scenario.truth_deg();

    // Parallel map preserves trial order in the collected vector.
    let trials: Vec<TrialRecord> = (0..scenario.trials)
        .into_par_iter()
        .map(|t| run_trial(scenario, &grid, &truth, t))
        .collect::<Result<_>>()?;

    let summaries = scenario
        .algorithms
        .iter()
        .map(|&a| summarize(a, &trials))
        .collect();

    Ok(ScenarioReport {
        scenario: ScenarioConfig::from_scenario(scenario),
        truth_deg: truth,
        summaries,
        trials,
        runtime: start.elapsed(),
    })
}

fn covariance(
    scenario: &Scenario,
    snapshots: &doa_core::array::SnapshotMatrix,
) -> Result<CovarianceMatrix> {
    let smoothed = match scenario.smoothing {
        SmoothingChoice::Off => return Ok(sample_covariance(snapshots)),
        SmoothingChoice::Forward(p) => spatial_smoothing(snapshots, p, false),
        SmoothingChoice::ForwardBackward(p) => spatial_smoothing(snapshots, p, true),
    };
    smoothed.map_err(|e| LabError::from_core("smoothing", e))
}

fn run_trial(
    scenario: &Scenario,
    grid: &AngleGrid,
    truth: &[f64],
    trial: usize,
) -> Result<TrialRecord> {
    let seed = scenario.base_seed.wrapping_add(trial as u64);
    let x = synthesize_snapshots(
        &scenario.geometry,
        &scenario.sources,
        scenario.num_snapshots,
        scenario.noise_power_db,
        seed,
    )
    .map_err(|e| LabError::from_core("sources", e))?;
    let mut x = apply_receiver(&x, &scenario.receiver, seed)
        .map_err(|e| LabError::from_core("receiver", e))?;
    if scenario.receiver.calibrated() {
        x = calibrate(&x, &scenario.receiver).map_err(|e| LabError::from_core("receiver", e))?;
    }
    let r = covariance(scenario, &x)?;
    let eigs = eigendecompose(&r).map_err(LabError::Numeric)?;
    let p = r.effective_elements();

    let k = estimate_source_count(&eigs, scenario.source_count, scenario.num_snapshots);
    let outcomes = scenario
        .algorithms
        .iter()
        .map(|&algorithm| {
            let k = match k {
                Ok(k) if k >= 1 && k < p => k,
                Ok(k) => {
                    return failed(
                        algorithm,
                        truth,
                        format!("source count {k} unusable with {p} elements"),
                    )
                }
                Err(ref e) => return failed(algorithm, truth, e.to_string()),
            };
            let (estimate, spectrum) = match algorithm {
                Algorithm::Music => match music_spectrum(&eigs, k, &scenario.geometry, grid) {
                    Ok(s) => (find_peaks(&s, k), Some(s)),
                    Err(e) => (Err(e), None),
                },
                Algorithm::Esprit => (
                    esprit(&eigs, k, &scenario.geometry, scenario.esprit_variant),
                    None,
                ),
            };
            let mut outcome = match estimate {
                Ok(angles) => {
                    let m = match_angles(truth, &angles, scenario.tolerance_deg);
                    AlgorithmOutcome {
                        algorithm,
                        status: OutcomeStatus::Ok,
                        levels_db: estimate_levels(&r, &angles, &scenario.geometry).ok(),
                        angles_deg: angles,
                        error: None,
                        detected: m.all_within_tolerance(),
                        misses: m.misses,
                        matches: m.pairs,
                        spectrum: None,
                    }
                }
                Err(doa_core::Error::ResolutionFailure { found, .. }) => {
                    let mut o = failed(algorithm, truth, "resolution failure".to_string());
                    o.status = OutcomeStatus::ResolutionFailure;
                    o.angles_deg = found;
                    o
                }
                Err(e) => failed(algorithm, truth, e.to_string()),
            };
            outcome.spectrum = spectrum;
            outcome
        })
        .collect();

    Ok(TrialRecord {
        trial,
        seed,
        source_count: k.unwrap_or(0),
        eigenvalues: eigs.eigenvalues().to_vec(),
        outcomes,
    })
}

fn failed(algorithm: Algorithm, truth: &[f64], error: String) -> AlgorithmOutcome {
    AlgorithmOutcome {
        algorithm,
        status: OutcomeStatus::Failed,
        angles_deg: Vec::new(),
        levels_db: None,
        error: Some(error),
        matches: Vec::new(),
        misses: truth.len(),
        detected: false,
        spectrum: None,
    }
}

pub(crate) fn summarize(algorithm: Algorithm, trials: &[TrialRecord]) -> AlgorithmSummary {
    let outcomes: Vec<&AlgorithmOutcome> = trials
        .iter()
        .flat_map(|t| t.outcomes.iter().filter(|o| o.algorithm == algorithm))
        .collect();
    let errors: Vec<f64> = outcomes
        .iter()
        .flat_map(|o| o.matches.iter().map(|m| m.error_deg))
        .collect();
    let rmse_deg = if errors.is_empty() {
        None
    } else {
        Some((errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt())
    };
    let n = outcomes.len();
    AlgorithmSummary {
        algorithm,
        rmse_deg,
        detection_rate: if n == 0 {
            0.0
        } else {
            outcomes.iter().filter(|o| o.detected).count() as f64 / n as f64
        },
        resolution_failures: outcomes
            .iter()
            .filter(|o| o.status == OutcomeStatus::ResolutionFailure)
            .count(),
        failures: outcomes
            .iter()
            .filter(|o| o.status == OutcomeStatus::Failed)
            .count(),
        trials: n,
    }
}
