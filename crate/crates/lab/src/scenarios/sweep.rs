use doa_core::array::SourceSpec;
use doa_core::subspace::{Algorithm, SourceCountMethod};
use serde::Serialize;

use super::{run_scenario, AlgorithmSummary, OutcomeStatus, Scenario, ScenarioReport};
use crate::{LabError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnrRow {
    /// Per-source SNR of the strongest source; `None` is noiseless.
    pub snr_db: Option<f64>,
    pub summaries: Vec<AlgorithmSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolutionRow {
    pub separation_deg: f64,
    /// `(algorithm, probability)` in the base scenario's algorithm order.
    pub probability: Vec<(&'static str, f64)>,
    pub resolution_failures: Vec<(&'static str, usize)>,
}

impl ResolutionRow {
    pub fn probability_of(&self, algorithm: Algorithm) -> Option<f64> {
        self.probability
            .iter()
            .find(|(a, _)| *a == algorithm.as_str())
            .map(|&(_, p)| p)
    }
}

/// Rerun `base` at each SNR point. Noise is fixed at 0 dB and source powers
/// are shifted together so the strongest arriving path sits at the requested
/// SNR; relative levels are preserved. Every point reuses the base seed.
pub fn snr_sweep(
    base: &Scenario,
    snr_points_db: &[Option<f64>],
    trials: usize,
) -> Result<Vec<SnrRow>> {
    if snr_points_db.len() < 2 {
        return Err(LabError::config(
            "snr_points_db",
            "need at least two points",
        ));
    }
    let strongest = base
        .sources
        .iter()
        .map(|s| s.power_db + s.path_gain_db)
        .fold(f64::NEG_INFINITY, f64::max);
    snr_points_db
        .iter()
        .map(|&snr| {
            let mut s = base.clone();
            s.trials = trials;
            match snr {
                None => s.noise_power_db = None,
                Some(db) => {
                    s.noise_power_db = Some(0.0);
                    for src in &mut s.sources {
                        src.power_db += db - strongest;
                    }
                }
            }
            let report = run_scenario(&s)?;
            Ok(SnrRow {
                snr_db: snr,
                summaries: report.summaries,
            })
        })
        .collect()
}

/// Two equal-power sources centred on broadside at each separation. A trial
/// resolves when the estimator returns two angles, each within half the
/// separation of its matched truth.
pub fn resolution_sweep(
    base: &Scenario,
    separations_deg: &[f64],
    trials: usize,
) -> Result<Vec<ResolutionRow>> {
    if separations_deg.is_empty() {
        return Err(LabError::config("separations_deg", "must be non-empty"));
    }
    if separations_deg
        .iter()
        .any(|&d| !(d > 0.0) || !d.is_finite())
    {
        return Err(LabError::config("separations_deg", "must be positive"));
    }
    if separations_deg.windows(2).any(|w| w[1] >= w[0]) {
        return Err(LabError::config(
            "separations_deg",
            "must be strictly descending",
        ));
    }
    let power = base.sources.first().map_or(0.0, |s| s.power_db);
    separations_deg
        .iter()
        .map(|&sep| {
            let mut s = base.clone();
            s.trials = trials;
            s.sources = vec![
                SourceSpec::new(-sep / 2.0).with_power_db(power),
                SourceSpec::new(sep / 2.0).with_power_db(power),
            ];
            s.source_count = SourceCountMethod::Known(2);
            let report = run_scenario(&s)?;
            Ok(resolution_row(&s, &report, sep))
        })
        .collect()
}

fn resolution_row(s: &Scenario, report: &ScenarioReport, sep: f64) -> ResolutionRow {
    let half = sep / 2.0;
    let mut probability = Vec::new();
    let mut failures = Vec::new();
    for &alg in &s.algorithms {
        let outcomes = report
            .trials
            .iter()
            .flat_map(|t| t.outcomes.iter().filter(move |o| o.algorithm == alg));
        let (mut resolved, mut total, mut rf) = (0usize, 0usize, 0usize);
        for o in outcomes {
            total += 1;
            if o.status == OutcomeStatus::ResolutionFailure {
                rf += 1;
            }
            if o.status == OutcomeStatus::Ok
                && o.matches.len() == 2
                && o.matches.iter().all(|m| m.error_deg < half)
            {
                resolved += 1;
            }
        }
        probability.push((alg.as_str(), resolved as f64 / total.max(1) as f64));
        failures.push((alg.as_str(), rf));
    }
    ResolutionRow {
        separation_deg: sep,
        probability,
        resolution_failures: failures,
    }
}
