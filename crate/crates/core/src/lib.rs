//! Direction-of-arrival estimation for uniform linear arrays.
//!
//! `doa-core` is `no_std` and only needs an allocator. It covers the whole
//! estimation chain, from synthetic snapshots to angle estimates:
//!
//! * [`array`]: array geometry, plane-wave steering vectors and seeded
//!   multi-source snapshot synthesis (incoherent and coherent sources).
//! * [`frontend`]: static per-element gain/phase errors, five-port LO jitter
//!   and the idealized inverse calibration.
//! * [`covariance`]: sample covariance, forward-backward averaging and
//!   spatial smoothing for coherent multipath.
//! * [`subspace`]: Hermitian eigendecomposition, model order selection,
//!   the MUSIC pseudospectrum with peak refinement, LS/TLS ESPRIT and
//!   least-squares source level estimates.
//!
//! All transcendental functions go through `libm`, so results do not depend
//! on whether the final binary links `std`.
//!
//! ```
//! use doa_core::array::{synthesize_snapshots, ArrayGeometry, SourceSpec};
//! use doa_core::covariance::sample_covariance;
//! use doa_core::subspace::{eigendecompose, esprit, EspritVariant};
//!
//! let geometry = ArrayGeometry::half_wavelength(8, 3.5e9).unwrap();
//! let sources = [SourceSpec::new(-20.0), SourceSpec::new(35.0)];
//! let x = synthesize_snapshots(&geometry, &sources, 100, None, 1).unwrap();
//! let eigs = eigendecompose(&sample_covariance(&x)).unwrap();
//! let angles = esprit(&eigs, 2, &geometry, EspritVariant::Tls).unwrap();
//! assert!((angles[0] + 20.0).abs() < 1e-6);
//! assert!((angles[1] - 35.0).abs() < 1e-6);
//! ```
#![no_std]
// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod array;
pub mod covariance;
mod error;
pub mod frontend;
mod math;
pub mod subspace;

pub use error::{Error, Result};
pub use nalgebra::{Complex, DMatrix, DVector};

/// Complex sample type used throughout the crate.
pub type C64 = Complex<f64>;
