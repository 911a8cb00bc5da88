//! MUSIC pseudospectrum and grid peak search.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::EigenStructure;
use crate::array::{steering_vector, ArrayGeometry};
use crate::math::power_to_db;
use crate::{Error, Result, C64};

/// Floor applied to the projection onto the noise subspace.
pub const PSEUDOSPECTRUM_FLOOR: f64 = 1e-12;

/// Strictly increasing scan angles inside the open interval (-90, 90) degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleGrid {
    angles_deg: Vec<f64>,
}

impl AngleGrid {
    pub fn new(angles_deg: Vec<f64>) -> Result<Self> {
        if angles_deg.is_empty() {
            return Err(Error::domain("grid", "scan grid is empty"));
        }
        if angles_deg.iter().any(|&a| !(a > -90.0 && a < 90.0)) {
            return Err(Error::domain(
                "grid",
                "scan angles must lie strictly inside (-90, 90)",
            ));
        }
        if angles_deg.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain(
                "grid",
                "scan angles must be strictly increasing",
            ));
        }
        Ok(Self { angles_deg })
    }

    /// Every multiple of `step_deg` strictly inside (-90, 90).
    ///
    /// When `1/step_deg` is an integer the points are computed as `i / (1/step)`
    /// so that, for example, the 0.1 degree grid contains the exact doubles
    /// `51.1` and `-19.5`.
    pub fn symmetric(step_deg: f64) -> Result<Self> {
        if !(step_deg > 0.0 && step_deg < 90.0) {
            return Err(Error::domain("grid_step_deg", "step must lie in (0, 90)"));
        }
        let inv = 1.0 / step_deg;
        let divisor = libm::round(inv);
        let exact = (inv - divisor).abs() < 1e-9;
        let at = |i: i64| {
            if exact {
                i as f64 / divisor
            } else {
                i as f64 * step_deg
            }
        };
        let mut last = libm::floor(90.0 / step_deg) as i64;
        while at(last) >= 90.0 {
            last -= 1;
        }
        Self::new((-last..=last).map(at).collect())
    }

    pub fn angles_deg(&self) -> &[f64] {
        &self.angles_deg
    }

    pub fn len(&self) -> usize {
        self.angles_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles_deg.is_empty()
    }
}

impl Default for AngleGrid {
    /// -89.9 to 89.9 degrees in 0.1 degree steps.
    fn default() -> Self {
        Self::symmetric(0.1).expect("0.1 is a valid step")
    }
}

/// Pseudospectrum samples in dB, normalized so the maximum is 0 dB.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub angles_deg: Vec<f64>,
    pub power_db: Vec<f64>,
}

/// MUSIC pseudospectrum from an eigendecomposition, using the `p - k` minor
/// eigenvectors as the noise subspace.
pub fn music_spectrum(
    eigs: &EigenStructure,
    num_sources: usize,
    geometry: &ArrayGeometry,
    grid: &AngleGrid,
) -> Result<Spectrum> {
    let p = eigs.dim();
    if num_sources == 0 || num_sources >= p {
        return Err(Error::domain(
            "source_count",
            alloc::format!("MUSIC needs 1 <= K < {p}, got {num_sources}"),
        ));
    }
    music_pseudospectrum(&eigs.noise_subspace(num_sources), geometry, grid)
}

/// `P(theta) = 1 / max(|E_n^H a(theta)|^2, floor)` in normalized dB.
///
/// `noise_subspace` is `p x (p - K)`; steering vectors use the leading `p`
/// elements of `geometry`.
pub fn music_pseudospectrum(
    noise_subspace: &DMatrix<C64>,
    geometry: &ArrayGeometry,
    grid: &AngleGrid,
) -> Result<Spectrum> {
    let sub = geometry.subarray(noise_subspace.nrows())?;
    let en_h = noise_subspace.adjoint();
    let linear: Vec<f64> = grid
        .angles_deg()
        .iter()
        .map(|&theta| {
            let proj = &en_h * steering_vector(theta, &sub);
            1.0 / proj.norm_squared().max(PSEUDOSPECTRUM_FLOOR)
        })
        .collect();
    let max = linear.iter().cloned().fold(f64::MIN_POSITIVE, f64::max);
    Ok(Spectrum {
        angles_deg: grid.angles_deg().to_vec(),
        power_db: linear.iter().map(|&v| power_to_db(v / max)).collect(),
    })
}

/// A refined local maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub angle_deg: f64,
    pub height_db: f64,
}

/// All interior local maxima (strictly above both neighbours), refined by a
/// three-point parabola through the dB values. Returned in grid order.
pub fn local_maxima(spectrum: &Spectrum) -> Vec<Peak> {
    let x = &spectrum.angles_deg;
    let y = &spectrum.power_db;
    let mut peaks = Vec::new();
    for i in 1..y.len().saturating_sub(1) {
        if !(y[i] > y[i - 1] && y[i] > y[i + 1]) {
            continue;
        }
        let curvature = y[i - 1] - 2.0 * y[i] + y[i + 1];
        let offset = if curvature < 0.0 {
            (0.5 * (y[i - 1] - y[i + 1]) / curvature).clamp(-0.5, 0.5)
        } else {
            0.0
        };
        let half_span = 0.5 * (x[i + 1] - x[i - 1]);
        peaks.push(Peak {
            angle_deg: x[i] + offset * half_span,
            height_db: y[i] - 0.25 * (y[i - 1] - y[i + 1]) * offset,
        });
    }
    peaks
}

/// The `k` highest refined peaks, sorted ascending by angle.
///
/// Fewer than `k` local maxima is a [`Error::ResolutionFailure`] carrying the
/// peaks that were found.
pub fn find_peaks(spectrum: &Spectrum, k: usize) -> Result<Vec<f64>> {
    if spectrum.angles_deg.is_empty() || spectrum.angles_deg.len() != spectrum.power_db.len() {
        return Err(Error::domain(
            "spectrum",
            "spectrum must be non-empty and aligned",
        ));
    }
    let mut peaks = local_maxima(spectrum);
    if peaks.len() < k {
        return Err(Error::ResolutionFailure {
            expected: k,
            found: peaks.iter().map(|p| p.angle_deg).collect(),
        });
    }
    // Highest first; equal heights prefer the smaller angle.
    peaks.sort_by(|a, b| {
        b.height_db
            .total_cmp(&a.height_db)
            .then(a.angle_deg.total_cmp(&b.angle_deg))
    });
    let mut angles: Vec<f64> = peaks[..k].iter().map(|p| p.angle_deg).collect();
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}
