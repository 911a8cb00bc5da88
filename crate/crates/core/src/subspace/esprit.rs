//! ESPRIT: angles from the rotational invariance between the two maximally
//! overlapping subarrays of a uniform linear array.

use alloc::vec::Vec;

use nalgebra::{DMatrix, Schur};

use super::eigen::{hermitian_eigen, singular_values};
use super::EigenStructure;
use crate::array::ArrayGeometry;
use crate::math::{arg, rad_to_deg};
use crate::{Error, Result, C64};

/// Relative singular value below which the shifted subspace is treated as
/// rank deficient.
const DEGENERACY_TOLERANCE: f64 = 1e-10;
const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EspritVariant {
    /// Least squares solution of `E1 Psi = E2`.
    Ls,
    /// Total least squares solution of `E1 Psi = E2`.
    #[default]
    Tls,
}

impl EspritVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            EspritVariant::Ls => "ls",
            EspritVariant::Tls => "tls",
        }
    }
}

/// ESPRIT angle estimates in degrees, sorted ascending.
pub fn esprit(
    eigs: &EigenStructure,
    num_sources: usize,
    geometry: &ArrayGeometry,
    variant: EspritVariant,
) -> Result<Vec<f64>> {
    let p = eigs.dim();
    if num_sources == 0 || num_sources >= p {
        return Err(Error::domain(
            "source_count",
            alloc::format!("ESPRIT needs 1 <= K <= {}, got {num_sources}", p - 1),
        ));
    }
    let sub = geometry.subarray(p)?;
    let signal = eigs.signal_subspace(num_sources);
    let e1 = signal.rows(0, p - 1).into_owned();
    let e2 = signal.rows(1, p - 1).into_owned();

    let psi = match variant {
        EspritVariant::Ls => least_squares(&e1, &e2)?,
        EspritVariant::Tls => {
            check_rank(&e1)?;
            total_least_squares(&e1, &e2)?
        }
    };

    let roots = eigenvalues(psi)?;
    let scale = 2.0 * core::f64::consts::PI * sub.spacing_wavelengths();
    let mut angles = Vec::with_capacity(roots.len());
    for (index, mu) in roots.into_iter().enumerate() {
        let sine = arg(mu) / scale;
        if !(-1.0..=1.0).contains(&sine) {
            return Err(Error::AngleOutOfRange { index, sine });
        }
        angles.push(rad_to_deg(libm::asin(sine)));
    }
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}

fn check_rank(e1: &DMatrix<C64>) -> Result<()> {
    let s = singular_values(e1)?;
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > DEGENERACY_TOLERANCE * max.max(1.0)) {
        return Err(Error::DegenerateSubspace {
            smallest_singular_value: min,
        });
    }
    Ok(())
}

/// `Psi = E1^+ E2` through the thin QR factorization of `E1`.
fn least_squares(e1: &DMatrix<C64>, e2: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    check_rank(e1)?;
    let qr = e1.clone().qr();
    let rhs = qr.q().adjoint() * e2;
    qr.r()
        .solve_upper_triangular(&rhs)
        .ok_or(Error::DegenerateSubspace {
            smallest_singular_value: 0.0,
        })
}

/// TLS: with `V` the eigenvectors of `[E1 E2]^H [E1 E2]` (descending), split
/// into `K x K` blocks, `Psi = -V12 V22^-1`.
fn total_least_squares(e1: &DMatrix<C64>, e2: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let k = e1.ncols();
    let mut c = DMatrix::zeros(e1.nrows(), 2 * k);
    c.columns_mut(0, k).copy_from(e1);
    c.columns_mut(k, k).copy_from(e2);
    let ch_c = c.adjoint() * &c;
    // Exactly Hermitian before handing to the eigensolver.
    let ch_c = (&ch_c + ch_c.adjoint()) * C64::new(0.5, 0.0);
    let v = hermitian_eigen(&ch_c)?.eigenvectors().clone();
    let v12 = v.view((0, k), (k, k)).into_owned();
    let v22 = v.view((k, k), (k, k)).into_owned();
    let v22_inv = match v22.clone().try_inverse() {
        Some(inv) => inv,
        None => {
            let s = singular_values(&v22)?;
            return Err(Error::DegenerateSubspace {
                smallest_singular_value: s.last().copied().unwrap_or(0.0),
            });
        }
    };
    Ok(-(v12 * v22_inv))
}

/// Eigenvalues of a general complex matrix from the diagonal of its
/// complex Schur form.
fn eigenvalues(psi: DMatrix<C64>) -> Result<Vec<C64>> {
    if psi.nrows() == 1 {
        return Ok(alloc::vec![psi[(0, 0)]]);
    }
    let dim = psi.nrows();
    let norm = psi.norm();
    let schur = Schur::try_new(psi, f64::EPSILON, SCHUR_MAX_ITER).ok_or(Error::NoConvergence {
        dim,
        frobenius_norm: norm,
        hermitian_defect: f64::NAN,
    })?;
    let (_, t) = schur.unpack();
    Ok(t.diagonal().iter().copied().collect())
}
