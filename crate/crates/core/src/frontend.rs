//! Receiver-chain imperfections applied to complex envelopes.
//!
//! Each element has a static gain/phase error (LNA and down-converter
//! mismatch). A five-port receiver additionally suffers LO power instability,
//! modelled as independent Gaussian phase and gain jitter on every sample.
//! [`calibrate`] removes the static part exactly; jitter is dynamic and stays.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand_distr::{Distribution, Normal};

use crate::array::{stream_rng, SnapshotMatrix};
use crate::math::{cis, db_to_amplitude, deg_to_rad};
use crate::{Error, Result, C64};

/// ChaCha stream used for LO jitter.
pub(crate) const JITTER_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReceiverKind {
    Ideal,
    SixPort,
    FivePort,
}

impl ReceiverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ReceiverKind::Ideal => "ideal",
            ReceiverKind::SixPort => "six_port",
            ReceiverKind::FivePort => "five_port",
        }
    }
}

/// Receiver imperfection model.
///
/// Empty static error vectors mean "no static error"; otherwise their length
/// must match the number of array elements.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverModel {
    kind: ReceiverKind,
    static_gain_db: Vec<f64>,
    static_phase_deg: Vec<f64>,
    lo_phase_jitter_rad: f64,
    lo_gain_jitter_db: f64,
    calibrated: bool,
}

impl ReceiverModel {
    pub fn ideal() -> Self {
        Self {
            kind: ReceiverKind::Ideal,
            static_gain_db: Vec::new(),
            static_phase_deg: Vec::new(),
            lo_phase_jitter_rad: 0.0,
            lo_gain_jitter_db: 0.0,
            calibrated: true,
        }
    }

    /// Stable six-port receiver with static errors only.
    pub fn six_port(static_gain_db: Vec<f64>, static_phase_deg: Vec<f64>) -> Result<Self> {
        Self::new(
            ReceiverKind::SixPort,
            static_gain_db,
            static_phase_deg,
            0.0,
            0.0,
        )
    }

    pub fn five_port(
        static_gain_db: Vec<f64>,
        static_phase_deg: Vec<f64>,
        lo_phase_jitter_rad: f64,
        lo_gain_jitter_db: f64,
    ) -> Result<Self> {
        Self::new(
            ReceiverKind::FivePort,
            static_gain_db,
            static_phase_deg,
            lo_phase_jitter_rad,
            lo_gain_jitter_db,
        )
    }

    /// General constructor. Ideal receivers must carry no errors; six-port
    /// jitter is forced to zero.
    pub fn new(
        kind: ReceiverKind,
        static_gain_db: Vec<f64>,
        static_phase_deg: Vec<f64>,
        lo_phase_jitter_rad: f64,
        lo_gain_jitter_db: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("lo_phase_jitter_rad", lo_phase_jitter_rad),
            ("lo_gain_jitter_db", lo_gain_jitter_db),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::domain(
                    name,
                    alloc::format!("jitter standard deviation must be finite and >= 0, got {v}"),
                ));
            }
        }
        if static_gain_db
            .iter()
            .chain(&static_phase_deg)
            .any(|v| !v.is_finite())
        {
            return Err(Error::domain(
                "static_gain_db",
                "static errors must be finite",
            ));
        }
        let (lo_phase_jitter_rad, lo_gain_jitter_db) = match kind {
            ReceiverKind::Ideal => {
                let has_static = static_gain_db
                    .iter()
                    .chain(&static_phase_deg)
                    .any(|&v| v != 0.0);
                if has_static || lo_phase_jitter_rad != 0.0 || lo_gain_jitter_db != 0.0 {
                    return Err(Error::domain("kind", "an ideal receiver carries no errors"));
                }
                (0.0, 0.0)
            }
            ReceiverKind::SixPort => (0.0, 0.0),
            ReceiverKind::FivePort => (lo_phase_jitter_rad, lo_gain_jitter_db),
        };
        Ok(Self {
            kind,
            static_gain_db,
            static_phase_deg,
            lo_phase_jitter_rad,
            lo_gain_jitter_db,
            calibrated: true,
        })
    }

    /// Whether the downstream chain should invert the static errors.
    pub fn with_calibration(mut self, calibrated: bool) -> Self {
        self.calibrated = calibrated;
        self
    }

    pub fn kind(&self) -> ReceiverKind {
        self.kind
    }

    pub fn static_gain_db(&self) -> &[f64] {
        &self.static_gain_db
    }

    pub fn static_phase_deg(&self) -> &[f64] {
        &self.static_phase_deg
    }

    pub fn lo_phase_jitter_rad(&self) -> f64 {
        self.lo_phase_jitter_rad
    }

    pub fn lo_gain_jitter_db(&self) -> f64 {
        self.lo_gain_jitter_db
    }

    pub fn calibrated(&self) -> bool {
        self.calibrated
    }

    fn has_jitter(&self) -> bool {
        self.lo_phase_jitter_rad > 0.0 || self.lo_gain_jitter_db > 0.0
    }

    /// Per-element static error factors `g_k * exp(i * psi_k)`, or `None`
    /// when the model has no static error at all.
    fn static_factors(&self, num_elements: usize) -> Result<Option<Vec<C64>>> {
        for (name, v) in [
            ("static_gain_db", &self.static_gain_db),
            ("static_phase_deg", &self.static_phase_deg),
        ] {
            if !v.is_empty() && v.len() != num_elements {
                return Err(Error::domain(
                    name,
                    alloc::format!("{} entries for a {num_elements}-element array", v.len()),
                ));
            }
        }
        if self.static_gain_db.is_empty() && self.static_phase_deg.is_empty() {
            return Ok(None);
        }
        let factors = (0..num_elements)
            .map(|k| {
                let gain = self.static_gain_db.get(k).copied().unwrap_or(0.0);
                let phase = self.static_phase_deg.get(k).copied().unwrap_or(0.0);
                cis(deg_to_rad(phase)) * db_to_amplitude(gain)
            })
            .collect();
        Ok(Some(factors))
    }
}

impl Default for ReceiverModel {
    fn default() -> Self {
        Self::ideal()
    }
}

/// Pass snapshots through the receiver model.
///
/// Entry `(k, t)` is multiplied by the static factor of element `k` and, for a
/// five-port receiver, by `exp(i*eps) * 10^(delta/20)` with `eps` and `delta`
/// drawn independently per entry. The jitter draws come from a dedicated
/// ChaCha stream of `rng_seed`.
pub fn apply_receiver(
    snapshots: &SnapshotMatrix,
    model: &ReceiverModel,
    rng_seed: u64,
) -> Result<SnapshotMatrix> {
    let n = snapshots.geometry().num_elements();
    let factors = model.static_factors(n)?;
    if model.kind == ReceiverKind::Ideal {
        return Ok(snapshots.clone());
    }

    let mut data = snapshots.data().clone();
    if let Some(f) = &factors {
        for (k, mut row) in data.row_iter_mut().enumerate() {
            row.iter_mut().for_each(|z| *z *= f[k]);
        }
    }

    if model.kind == ReceiverKind::FivePort && model.has_jitter() {
        // Both standard deviations are validated finite and >= 0.
        let phase = Normal::new(0.0, model.lo_phase_jitter_rad).expect("validated std");
        let gain = Normal::new(0.0, model.lo_gain_jitter_db).expect("validated std");
        let mut rng = stream_rng(rng_seed, JITTER_STREAM);
        let (rows, cols) = data.shape();
        for t in 0..cols {
            for k in 0..rows {
                let eps: f64 = phase.sample(&mut rng);
                let delta: f64 = gain.sample(&mut rng);
                data[(k, t)] *= cis(eps) * db_to_amplitude(delta);
            }
        }
    }

    Ok(snapshots.with_data(data, false))
}

/// Invert the static per-element errors of `model`. Jitter is left in place.
pub fn calibrate(snapshots: &SnapshotMatrix, model: &ReceiverModel) -> Result<SnapshotMatrix> {
    let n = snapshots.geometry().num_elements();
    let factors = match model.static_factors(n)? {
        Some(f) if model.kind != ReceiverKind::Ideal => f,
        _ => return Ok(snapshots.with_data(snapshots.data().clone(), true)),
    };
    let mut data: DMatrix<C64> = snapshots.data().clone();
    for (k, mut row) in data.row_iter_mut().enumerate() {
        let inv = factors[k].inv();
        row.iter_mut().for_each(|z| *z *= inv);
    }
    Ok(snapshots.with_data(data, true))
}
