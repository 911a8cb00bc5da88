//! Spatial covariance estimation and spatial smoothing.

use nalgebra::{DMatrix, DMatrixView};

use crate::array::SnapshotMatrix;
use crate::math::abs;
use crate::{Error, Result, C64};

/// How a covariance matrix was smoothed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothing {
    None,
    Forward {
        subarray_size: usize,
        num_subarrays: usize,
    },
    ForwardBackward {
        subarray_size: usize,
        num_subarrays: usize,
    },
}

/// A `p x p` Hermitian positive semidefinite covariance estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    data: DMatrix<C64>,
    smoothing: Smoothing,
}

impl CovarianceMatrix {
    /// Wrap an arbitrary square matrix after checking it is Hermitian to
    /// within `1e-12` of its largest entry.
    pub fn from_hermitian(data: DMatrix<C64>) -> Result<Self> {
        if !data.is_square() || data.nrows() == 0 {
            return Err(Error::domain(
                "data",
                "covariance must be square and non-empty",
            ));
        }
        let scale = data.iter().map(|z| abs(*z)).fold(0.0, f64::max).max(1.0);
        if hermitian_defect(&data) > 1e-12 * scale {
            return Err(Error::domain("data", "covariance must be Hermitian"));
        }
        Ok(Self {
            data,
            smoothing: Smoothing::None,
        })
    }

    pub fn data(&self) -> &DMatrix<C64> {
        &self.data
    }

    /// Dimension `p` of the (possibly smoothed) matrix.
    pub fn effective_elements(&self) -> usize {
        self.data.nrows()
    }

    pub fn smoothing(&self) -> Smoothing {
        self.smoothing
    }

    pub fn trace(&self) -> f64 {
        self.data.diagonal().iter().map(|z| z.re).sum()
    }
}

/// Largest `|R[i,j] - conj(R[j,i])|`.
pub(crate) fn hermitian_defect(r: &DMatrix<C64>) -> f64 {
    let n = r.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max(abs(r[(i, j)] - r[(j, i)].conj()));
        }
    }
    worst
}

/// `X X^H` accumulated into `acc`, upper triangle computed and mirrored so the
/// result is exactly Hermitian.
fn accumulate_outer(acc: &mut DMatrix<C64>, x: DMatrixView<'_, C64>) {
    let p = x.nrows();
    for i in 0..p {
        for j in i..p {
            let mut s = C64::new(0.0, 0.0);
            for t in 0..x.ncols() {
                s += x[(i, t)] * x[(j, t)].conj();
            }
            if i == j {
                acc[(i, i)].re += s.re;
            } else {
                acc[(i, j)] += s;
                acc[(j, i)] += s.conj();
            }
        }
    }
}

/// `R = X X^H / m`.
pub fn sample_covariance(snapshots: &SnapshotMatrix) -> CovarianceMatrix {
    let x = snapshots.data();
    let n = x.nrows();
    let mut r = DMatrix::zeros(n, n);
    accumulate_outer(&mut r, x.as_view());
    r /= C64::new(snapshots.num_snapshots() as f64, 0.0);
    CovarianceMatrix {
        data: r,
        smoothing: Smoothing::None,
    }
}

/// Forward-backward average `(R + J conj(R) J) / 2`, `J` the exchange matrix.
pub fn forward_backward(r: &CovarianceMatrix) -> CovarianceMatrix {
    let p = r.data.nrows();
    let mut out = DMatrix::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            out[(i, j)] = (r.data[(i, j)] + r.data[(p - 1 - i, p - 1 - j)].conj()) * 0.5;
        }
    }
    let smoothing = match r.smoothing {
        Smoothing::None => Smoothing::ForwardBackward {
            subarray_size: p,
            num_subarrays: 1,
        },
        Smoothing::Forward {
            subarray_size,
            num_subarrays,
        }
        | Smoothing::ForwardBackward {
            subarray_size,
            num_subarrays,
        } => Smoothing::ForwardBackward {
            subarray_size,
            num_subarrays,
        },
    };
    CovarianceMatrix {
        data: out,
        smoothing,
    }
}

/// Average the sample covariances of the `L = n - p + 1` sliding subarrays of
/// `subarray_size` consecutive elements, optionally followed by
/// [`forward_backward`].
pub fn spatial_smoothing(
    snapshots: &SnapshotMatrix,
    subarray_size: usize,
    use_backward: bool,
) -> Result<CovarianceMatrix> {
    let n = snapshots.geometry().num_elements();
    if subarray_size < 2 || subarray_size > n {
        return Err(Error::domain(
            "subarray_size",
            alloc::format!("must lie in 2..={n}, got {subarray_size}"),
        ));
    }
    let p = subarray_size;
    let num_subarrays = n - p + 1;
    let x = snapshots.data();
    let mut r = DMatrix::zeros(p, p);
    for l in 0..num_subarrays {
        accumulate_outer(&mut r, x.rows(l, p));
    }
    r /= C64::new((snapshots.num_snapshots() * num_subarrays) as f64, 0.0);
    let forward = CovarianceMatrix {
        data: r,
        smoothing: Smoothing::Forward {
            subarray_size: p,
            num_subarrays,
        },
    };
    Ok(if use_backward {
        forward_backward(&forward)
    } else {
        forward
    })
}

/// Subarray size used when a scenario asks for smoothing without one:
/// `n - K` when the source count is known (so `L = K + 1`), otherwise
/// `ceil(n/2) + 1`. The result is clamped into `2..=n`.
pub fn default_subarray_size(num_elements: usize, known_sources: Option<usize>) -> usize {
    let p = match known_sources {
        Some(k) => num_elements.saturating_sub(k),
        None => num_elements.div_ceil(2) + 1,
    };
    p.clamp(2, num_elements.max(2))
}
