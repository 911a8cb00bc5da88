use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::eigen::{eigendecompose, singular_values};
use crate::array::{steering_matrix, ArrayGeometry};
use crate::covariance::CovarianceMatrix;
use crate::math::power_to_db;
use crate::{Error, Result};

/// Largest steering-matrix condition number accepted by [`estimate_levels`].
pub const MAX_STEERING_CONDITION: f64 = 1e8;
/// Level estimates are clamped at this floor.
pub const LEVEL_FLOOR_DB: f64 = -100.0;

/// Per-source power in dB at the estimated angles.
///
/// Fits `R ~ A diag(P) A^H + sigma^2 I` in the Frobenius norm, with `sigma^2`
/// the mean of the `p - K` minor eigenvalues of `R`. The normal equations are
/// `sum_k |a_j^H a_k|^2 P_k = a_j^H (R - sigma^2 I) a_j`.
pub fn estimate_levels(
    r: &CovarianceMatrix,
    angles_deg: &[f64],
    geometry: &ArrayGeometry,
) -> Result<Vec<f64>> {
    let p = r.effective_elements();
    let k = angles_deg.len();
    if k == 0 || k >= p {
        return Err(Error::domain(
            "angles_deg",
            alloc::format!("need 1 <= K < {p} angles, got {k}"),
        ));
    }
    let mut sorted = angles_deg.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::domain("angles_deg", "angles must be distinct"));
    }

    let eigs = eigendecompose(r)?;
    let noise = &eigs.eigenvalues()[k..];
    let sigma2 = noise.iter().sum::<f64>() / noise.len() as f64;

    let a = steering_matrix(angles_deg, &geometry.subarray(p)?);
    let s = singular_values(&a)?;
    let condition = s[0] / s[k - 1];
    if !(condition <= MAX_STEERING_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }

    let gram = a.adjoint() * &a;
    let g = DMatrix::from_fn(k, k, |i, j| gram[(i, j)].norm_sqr());
    let ra = r.data() * &a;
    let b = DVector::from_fn(k, |j, _| {
        let aj = a.column(j);
        aj.dotc(&ra.column(j)).re - sigma2 * aj.norm_squared()
    });
    let powers = g
        .lu()
        .solve(&b)
        .ok_or(Error::IllConditioned { condition })?;
    Ok(powers
        .iter()
        .map(|&pk| {
            if pk > 0.0 {
                power_to_db(pk).max(LEVEL_FLOOR_DB)
            } else {
                LEVEL_FLOOR_DB
            }
        })
        .collect())
}
