//! Model order selection from the eigenvalue profile.

use super::EigenStructure;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceCountMethod {
    /// The number of sources is given.
    Known(usize),
    /// Count eigenvalues above `ratio * max_eigenvalue`.
    Threshold(f64),
    /// Minimum description length (Wax-Kailath).
    Mdl,
    /// Akaike information criterion (Wax-Kailath).
    Aic,
}

/// Estimate how many sources the eigenvalue profile supports.
pub fn estimate_source_count(
    eigs: &EigenStructure,
    method: SourceCountMethod,
    num_snapshots: usize,
) -> Result<usize> {
    if num_snapshots == 0 {
        return Err(Error::domain(
            "num_snapshots",
            "at least one snapshot is required",
        ));
    }
    let p = eigs.dim();
    match method {
        SourceCountMethod::Known(k) => {
            if k >= p {
                return Err(Error::domain(
                    "source_count",
                    alloc::format!("{k} sources cannot be resolved with {p} elements"),
                ));
            }
            Ok(k)
        }
        SourceCountMethod::Threshold(ratio) => {
            if !(ratio > 0.0) || !ratio.is_finite() {
                return Err(Error::domain("ratio", "threshold ratio must be positive"));
            }
            let cut = ratio * eigs.max_eigenvalue();
            Ok(eigs.eigenvalues().iter().filter(|&&l| l > cut).count())
        }
        SourceCountMethod::Mdl | SourceCountMethod::Aic => {
            let scores = information_criterion(eigs.eigenvalues(), num_snapshots, method);
            let mut best = 0;
            for (k, &s) in scores.iter().enumerate() {
                if s < scores[best] {
                    best = k;
                }
            }
            Ok(best)
        }
    }
}

/// Criterion value for each candidate order `k = 0..p-1`.
pub(crate) fn information_criterion(
    eigenvalues: &[f64],
    num_snapshots: usize,
    method: SourceCountMethod,
) -> alloc::vec::Vec<f64> {
    let p = eigenvalues.len();
    let m = num_snapshots as f64;
    let max = eigenvalues
        .first()
        .copied()
        .unwrap_or(0.0)
        .max(f64::MIN_POSITIVE);
    // Eigenvalues at or below roundoff are clamped so the logs stay finite.
    let floor = max * 1e-300_f64.max(f64::MIN_POSITIVE);
    (0..p)
        .map(|k| {
            let noise = &eigenvalues[k..];
            let d = noise.len() as f64;
            let mean_log = noise.iter().map(|&l| libm::log(l.max(floor))).sum::<f64>() / d;
            let log_mean = libm::log(noise.iter().map(|&l| l.max(floor)).sum::<f64>() / d);
            // -log likelihood ratio, >= 0 by the AM-GM inequality
            let neg_ll = m * d * (log_mean - mean_log).max(0.0);
            let free = (k * (2 * p - k)) as f64;
            match method {
                SourceCountMethod::Aic => 2.0 * neg_ll + 2.0 * free,
                _ => neg_ll + 0.5 * free * libm::log(m),
            }
        })
        .collect()
}
