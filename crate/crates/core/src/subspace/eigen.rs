use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::covariance::{hermitian_defect, CovarianceMatrix};
use crate::{Error, Result, C64};

const MAX_SWEEPS: usize = 1000;

/// Eigenvalues sorted descending with column-aligned unitary eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenStructure {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
}

impl EigenStructure {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// The `k` dominant eigenvectors.
    pub fn signal_subspace(&self, k: usize) -> DMatrix<C64> {
        self.eigenvectors.columns(0, k).into_owned()
    }

    /// The `p - k` minor eigenvectors.
    pub fn noise_subspace(&self, k: usize) -> DMatrix<C64> {
        self.eigenvectors.columns(k, self.dim() - k).into_owned()
    }

    /// `V diag(lambda) V^H`.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let mut scaled = self.eigenvectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= C64::new(self.eigenvalues[j], 0.0);
        }
        scaled * self.eigenvectors.adjoint()
    }
}

/// Full Hermitian eigendecomposition of a covariance matrix.
pub fn eigendecompose(r: &CovarianceMatrix) -> Result<EigenStructure> {
    hermitian_eigen(r.data())
}

pub(crate) fn hermitian_eigen(m: &DMatrix<C64>) -> Result<EigenStructure> {
    let dim = m.nrows();
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, MAX_SWEEPS).ok_or_else(|| {
        Error::NoConvergence {
            dim,
            frobenius_norm: m.norm(),
            hermitian_defect: hermitian_defect(m),
        }
    })?;
    let mut order: Vec<usize> = (0..dim).collect();
    // Stable sort keeps the solver's order for exact ties.
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = DMatrix::zeros(dim, dim);
    for (j, &i) in order.iter().enumerate() {
        eigenvectors.set_column(j, &eig.eigenvectors.column(i));
    }
    Ok(EigenStructure {
        eigenvalues,
        eigenvectors,
    })
}

/// Singular values of `m`, descending, from the eigenvalues of the Hermitian
/// dilation `[[0, M], [M^H, 0]]` (which are `+-sigma_i` plus zeros).
pub(crate) fn singular_values(m: &DMatrix<C64>) -> Result<Vec<f64>> {
    let (r, c) = m.shape();
    let mut dilation = DMatrix::zeros(r + c, r + c);
    dilation.view_mut((0, r), (r, c)).copy_from(m);
    dilation.view_mut((r, 0), (c, r)).copy_from(&m.adjoint());
    let eig = hermitian_eigen(&dilation)?;
    Ok(eig.eigenvalues[..r.min(c)]
        .iter()
        .map(|&s| s.max(0.0))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn dilation_singular_values() {
        // [[3, 0], [0, -2], [0, 0]] has singular values 3 and 2
        let mut m = DMatrix::<C64>::zeros(3, 2);
        m[(0, 0)] = C64::new(3.0, 0.0);
        m[(1, 1)] = C64::new(0.0, -2.0);
        let s = singular_values(&m).unwrap();
        assert!((s[0] - 3.0).abs() < 1e-14 && (s[1] - 2.0).abs() < 1e-14);
        let s = singular_values(&m.adjoint()).unwrap();
        assert!((s[0] - 3.0).abs() < 1e-14 && (s[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn identity() {
        let r = CovarianceMatrix::from_hermitian(DMatrix::identity(3, 3)).unwrap();
        let e = eigendecompose(&r).unwrap();
        for l in e.eigenvalues() {
            assert!((l - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn diagonal_is_sorted_with_permutation_vectors() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(3.0, 0.0),
            C64::new(2.0, 0.0),
        ]));
        let e = eigendecompose(&CovarianceMatrix::from_hermitian(d).unwrap()).unwrap();
        assert_eq!(e.eigenvalues(), &[3.0, 2.0, 1.0]);
        // column j is +-e_{index of eigenvalue j}
        for (j, row) in [1usize, 2, 0].into_iter().enumerate() {
            assert!((crate::math::abs(e.eigenvectors()[(row, j)]) - 1.0).abs() < 1e-15);
        }
    }
}
