//! Subspace direction-of-arrival estimators.
//!
//! Everything here starts from an [`EigenStructure`] of a (possibly
//! smoothed) covariance matrix. The signal subspace is spanned by the `K`
//! dominant eigenvectors and the noise subspace by the remaining `p - K`.

use alloc::vec::Vec;

mod eigen;
mod esprit;
mod levels;
mod music;
mod order;

pub use eigen::{eigendecompose, EigenStructure};
pub use esprit::{esprit, EspritVariant};
pub use levels::{estimate_levels, LEVEL_FLOOR_DB, MAX_STEERING_CONDITION};
pub use music::{
    find_peaks, local_maxima, music_pseudospectrum, music_spectrum, AngleGrid, Peak, Spectrum,
    PSEUDOSPECTRUM_FLOOR,
};
pub use order::{estimate_source_count, SourceCountMethod};

use crate::array::ArrayGeometry;
use crate::covariance::CovarianceMatrix;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Music,
    Esprit,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Music => "music",
            Algorithm::Esprit => "esprit",
        }
    }
}

/// Output of one estimator run.
#[derive(Debug, Clone, PartialEq)]
pub struct DoaResult {
    pub algorithm: Algorithm,
    /// Estimates in degrees, strictly increasing.
    pub angles_deg: Vec<f64>,
    /// Least-squares power fit at the estimated angles, `None` when the
    /// steering matrix was too ill-conditioned for a fit.
    pub levels_db: Option<Vec<f64>>,
    pub source_count: usize,
    /// Normalized MUSIC pseudospectrum.
    pub spectrum: Option<Spectrum>,
    /// Eigenvalue profile of the covariance, descending.
    pub eigenvalues: Vec<f64>,
}

/// MUSIC grid search followed by peak refinement and level estimation.
pub fn estimate_music(
    r: &CovarianceMatrix,
    eigs: &EigenStructure,
    num_sources: usize,
    geometry: &ArrayGeometry,
    grid: &AngleGrid,
) -> Result<DoaResult> {
    let spectrum = music_spectrum(eigs, num_sources, geometry, grid)?;
    let angles_deg = find_peaks(&spectrum, num_sources)?;
    Ok(DoaResult {
        algorithm: Algorithm::Music,
        levels_db: estimate_levels(r, &angles_deg, geometry).ok(),
        angles_deg,
        source_count: num_sources,
        spectrum: Some(spectrum),
        eigenvalues: eigs.eigenvalues().to_vec(),
    })
}

/// ESPRIT followed by level estimation.
pub fn estimate_esprit(
    r: &CovarianceMatrix,
    eigs: &EigenStructure,
    num_sources: usize,
    geometry: &ArrayGeometry,
    variant: EspritVariant,
) -> Result<DoaResult> {
    let angles_deg = esprit(eigs, num_sources, geometry, variant)?;
    Ok(DoaResult {
        algorithm: Algorithm::Esprit,
        levels_db: estimate_levels(r, &angles_deg, geometry).ok(),
        angles_deg,
        source_count: num_sources,
        spectrum: None,
        eigenvalues: eigs.eigenvalues().to_vec(),
    })
}
