//! Uniform linear array geometry and snapshot synthesis.
//!
//! Element `k` (counting from zero, element 0 is the phase reference) sees a
//! plane wave from angle `theta` with phase `k * 2*pi*(spacing/lambda)*sin(theta)`.
//! Angles are measured from the array normal; positive angles give positive
//! inter-element phase delay.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::math::{cis, db_to_amplitude, deg_to_rad};
use crate::{Error, Result, C64};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// ChaCha stream used for source waveforms.
pub(crate) const WAVEFORM_STREAM: u64 = 0;
/// ChaCha stream used for additive receiver noise.
pub(crate) const NOISE_STREAM: u64 = 1;

/// Wavelength in meters of a carrier at `carrier_freq_hz`.
pub fn wavelength(carrier_freq_hz: f64) -> Result<f64> {
    if !(carrier_freq_hz > 0.0) || !carrier_freq_hz.is_finite() {
        return Err(Error::domain(
            "carrier_freq_hz",
            alloc::format!("must be positive and finite, got {carrier_freq_hz}"),
        ));
    }
    Ok(SPEED_OF_LIGHT / carrier_freq_hz)
}

/// A uniform linear array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    num_elements: usize,
    spacing_m: f64,
    carrier_freq_hz: f64,
    aliasing: bool,
}

impl ArrayGeometry {
    pub fn new(num_elements: usize, spacing_m: f64, carrier_freq_hz: f64) -> Result<Self> {
        if num_elements < 2 {
            return Err(Error::domain(
                "num_elements",
                alloc::format!("a linear array needs at least 2 elements, got {num_elements}"),
            ));
        }
        if !(spacing_m > 0.0) || !spacing_m.is_finite() {
            return Err(Error::domain(
                "spacing_m",
                alloc::format!("must be positive and finite, got {spacing_m}"),
            ));
        }
        let lambda = wavelength(carrier_freq_hz)?;
        Ok(Self {
            num_elements,
            spacing_m,
            carrier_freq_hz,
            aliasing: spacing_m / lambda > 0.5,
        })
    }

    /// Array with spacing of exactly half a wavelength.
    pub fn half_wavelength(num_elements: usize, carrier_freq_hz: f64) -> Result<Self> {
        let lambda = wavelength(carrier_freq_hz)?;
        Self::new(num_elements, lambda / 2.0, carrier_freq_hz)
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn spacing_m(&self) -> f64 {
        self.spacing_m
    }

    pub fn carrier_freq_hz(&self) -> f64 {
        self.carrier_freq_hz
    }

    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_freq_hz
    }

    /// Element spacing in wavelengths.
    pub fn spacing_wavelengths(&self) -> f64 {
        self.spacing_m / self.wavelength_m()
    }

    /// Set when spacing exceeds half a wavelength and grating lobes can alias
    /// one arrival angle onto another.
    pub fn aliasing_warning(&self) -> bool {
        self.aliasing
    }

    /// The leading `num_elements` elements of this array, used for smoothed
    /// subarrays.
    pub fn subarray(&self, num_elements: usize) -> Result<Self> {
        if num_elements > self.num_elements {
            return Err(Error::domain(
                "num_elements",
                alloc::format!(
                    "subarray of {num_elements} elements exceeds the {}-element array",
                    self.num_elements
                ),
            ));
        }
        Self::new(num_elements, self.spacing_m, self.carrier_freq_hz)
    }
}

/// Inter-element phase delay in radians for a plane wave from `aoa_deg`.
pub fn phase_delay(aoa_deg: f64, geometry: &ArrayGeometry) -> f64 {
    2.0 * core::f64::consts::PI * geometry.spacing_wavelengths() * libm::sin(deg_to_rad(aoa_deg))
}

/// Array response to a unit plane wave from `aoa_deg`; component 0 is exactly 1.
pub fn steering_vector(aoa_deg: f64, geometry: &ArrayGeometry) -> DVector<C64> {
    let phi = phase_delay(aoa_deg, geometry);
    DVector::from_fn(geometry.num_elements(), |k, _| {
        if k == 0 {
            C64::new(1.0, 0.0)
        } else {
            cis(k as f64 * phi)
        }
    })
}

/// Steering vectors for several angles, one column per angle.
pub fn steering_matrix(angles_deg: &[f64], geometry: &ArrayGeometry) -> DMatrix<C64> {
    let mut a = DMatrix::zeros(geometry.num_elements(), angles_deg.len());
    for (j, &theta) in angles_deg.iter().enumerate() {
        a.set_column(j, &steering_vector(theta, geometry));
    }
    a
}

/// One impinging plane wave.
///
/// Sources that share a `coherence_group` are deterministic scaled copies of
/// one waveform (multipath). `None` means the source has its own independent
/// waveform. The complex amplitude of a source is
/// `10^((power_db + path_gain_db)/20) * exp(i * path_phase_deg)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    pub aoa_deg: f64,
    /// Power in dB relative to unit noise power.
    pub power_db: f64,
    pub coherence_group: Option<u32>,
    pub path_phase_deg: f64,
    pub path_gain_db: f64,
}

impl SourceSpec {
    /// Independent 0 dB source.
    pub fn new(aoa_deg: f64) -> Self {
        Self {
            aoa_deg,
            power_db: 0.0,
            coherence_group: None,
            path_phase_deg: 0.0,
            path_gain_db: 0.0,
        }
    }

    pub fn with_power_db(mut self, power_db: f64) -> Self {
        self.power_db = power_db;
        self
    }

    /// Make this source a member of coherence group `group` with the given
    /// deterministic path gain and phase relative to the group waveform.
    pub fn coherent(mut self, group: u32, path_gain_db: f64, path_phase_deg: f64) -> Self {
        self.coherence_group = Some(group);
        self.path_gain_db = path_gain_db;
        self.path_phase_deg = path_phase_deg;
        self
    }

    pub fn is_reference(&self) -> bool {
        self.path_gain_db == 0.0 && self.path_phase_deg == 0.0
    }

    fn amplitude(&self) -> C64 {
        cis(deg_to_rad(self.path_phase_deg)) * db_to_amplitude(self.power_db + self.path_gain_db)
    }
}

/// Check every source and the one-reference-per-group rule.
pub fn validate_sources(sources: &[SourceSpec]) -> Result<()> {
    if sources.is_empty() {
        return Err(Error::domain("sources", "at least one source is required"));
    }
    for s in sources {
        if !(s.aoa_deg > -90.0 && s.aoa_deg < 90.0) {
            return Err(Error::domain(
                "aoa_deg",
                alloc::format!("must lie strictly inside (-90, 90), got {}", s.aoa_deg),
            ));
        }
        for (name, v) in [
            ("power_db", s.power_db),
            ("path_gain_db", s.path_gain_db),
            ("path_phase_deg", s.path_phase_deg),
        ] {
            if !v.is_finite() {
                return Err(Error::domain(name, "must be finite"));
            }
        }
    }
    let mut groups: Vec<u32> = sources.iter().filter_map(|s| s.coherence_group).collect();
    groups.sort_unstable();
    groups.dedup();
    for g in groups {
        let refs = sources
            .iter()
            .filter(|s| s.coherence_group == Some(g) && s.is_reference())
            .count();
        if refs != 1 {
            return Err(Error::domain(
                "coherence_group",
                alloc::format!(
                    "group {g} has {refs} reference members (path_gain_db = 0 and \
                     path_phase_deg = 0); exactly one is required"
                ),
            ));
        }
    }
    Ok(())
}

/// Complex envelopes of an array: one row per element, one column per snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMatrix {
    data: DMatrix<C64>,
    geometry: ArrayGeometry,
    calibrated: bool,
}

impl SnapshotMatrix {
    pub fn new(geometry: ArrayGeometry, data: DMatrix<C64>) -> Result<Self> {
        if data.nrows() != geometry.num_elements() {
            return Err(Error::domain(
                "data",
                alloc::format!(
                    "{} rows for a {}-element array",
                    data.nrows(),
                    geometry.num_elements()
                ),
            ));
        }
        if data.ncols() == 0 {
            return Err(Error::domain(
                "num_snapshots",
                "at least one snapshot is required",
            ));
        }
        Ok(Self {
            data,
            geometry,
            calibrated: false,
        })
    }

    pub fn data(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<C64> {
        self.data
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geometry
    }

    pub fn num_snapshots(&self) -> usize {
        self.data.ncols()
    }

    /// Whether static receiver errors have been removed.
    pub fn is_calibrated(&self) -> bool {
        self.calibrated
    }

    pub(crate) fn with_data(&self, data: DMatrix<C64>, calibrated: bool) -> Self {
        debug_assert_eq!(data.shape(), self.data.shape());
        Self {
            data,
            geometry: self.geometry,
            calibrated,
        }
    }
}

/// One circular complex Gaussian sample with unit variance.
pub(crate) fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Synthesize `X = A*S + N`.
///
/// Every independent source and every coherence group draws its own
/// unit-power circular Gaussian waveform; coherent members scale the shared
/// group waveform by their deterministic path gain and phase. Noise is white
/// circular Gaussian with power `noise_power_db` (dB relative to unit power)
/// or absent when `None`. Waveforms and noise use separate ChaCha streams of
/// `rng_seed`, so the output is a pure function of the arguments.
pub fn synthesize_snapshots(
    geometry: &ArrayGeometry,
    sources: &[SourceSpec],
    num_snapshots: usize,
    noise_power_db: Option<f64>,
    rng_seed: u64,
) -> Result<SnapshotMatrix> {
    validate_sources(sources)?;
    if num_snapshots == 0 {
        return Err(Error::domain(
            "num_snapshots",
            "at least one snapshot is required",
        ));
    }
    if let Some(db) = noise_power_db {
        if !db.is_finite() {
            return Err(Error::domain("noise_power_db", "must be finite or absent"));
        }
    }

    let n = geometry.num_elements();
    let m = num_snapshots;

    // Waveforms are drawn in order of first use so the draw sequence depends
    // only on the source list.
    let mut rng = stream_rng(rng_seed, WAVEFORM_STREAM);
    let mut group_waveforms: Vec<(u32, usize)> = Vec::new();
    let mut waveforms: Vec<Vec<C64>> = Vec::new();
    let draw = |rng: &mut ChaCha8Rng, waveforms: &mut Vec<Vec<C64>>| -> usize {
        waveforms.push((0..m).map(|_| complex_gaussian(rng)).collect());
        waveforms.len() - 1
    };
    let mut source_waveform = Vec::with_capacity(sources.len());
    for s in sources {
        let idx = match s.coherence_group {
            None => draw(&mut rng, &mut waveforms),
            Some(g) => match group_waveforms.iter().find(|(tag, _)| *tag == g) {
                Some(&(_, idx)) => idx,
                None => {
                    let idx = draw(&mut rng, &mut waveforms);
                    group_waveforms.push((g, idx));
                    idx
                }
            },
        };
        source_waveform.push(idx);
    }

    let mut data = DMatrix::<C64>::zeros(n, m);
    for (s, &w) in sources.iter().zip(&source_waveform) {
        let a = steering_vector(s.aoa_deg, geometry);
        let amp = s.amplitude();
        for (t, &sample) in waveforms[w].iter().enumerate() {
            let st = amp * sample;
            for k in 0..n {
                data[(k, t)] += a[k] * st;
            }
        }
    }

    if let Some(db) = noise_power_db {
        let sigma = db_to_amplitude(db);
        let mut rng = stream_rng(rng_seed, NOISE_STREAM);
        for t in 0..m {
            for k in 0..n {
                data[(k, t)] += complex_gaussian(&mut rng) * sigma;
            }
        }
    }

    SnapshotMatrix::new(*geometry, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::PI;

    fn half_wave(n: usize) -> ArrayGeometry {
        ArrayGeometry::half_wavelength(n, 3.5e9).unwrap()
    }

    #[test]
    fn wavelength_examples() {
        assert_abs_diff_eq!(wavelength(3.5e9).unwrap(), 0.085654988, epsilon = 1e-12);
        assert_eq!(wavelength(SPEED_OF_LIGHT).unwrap(), 1.0);
        assert_abs_diff_eq!(wavelength(7.0e9).unwrap(), 0.042827494, epsilon = 1e-12);
        assert!(matches!(wavelength(0.0), Err(Error::Domain { .. })));
        assert!(matches!(wavelength(-1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn phase_delay_examples() {
        let g = half_wave(8);
        assert_eq!(phase_delay(0.0, &g), 0.0);
        assert_abs_diff_eq!(phase_delay(90.0, &g), PI, epsilon = 1e-12);
        // pi * sin(19.5 deg), evaluated independently
        assert_abs_diff_eq!(phase_delay(19.5, &g), 1.048685176686697, epsilon = 1e-12);
        assert!(phase_delay(10.0, &g) > 0.0);
    }

    #[test]
    fn steering_vector_examples() {
        let a = steering_vector(0.0, &half_wave(4));
        assert!(a.iter().all(|z| *z == C64::new(1.0, 0.0)));

        let a = steering_vector(30.0, &half_wave(2));
        assert_eq!(a[0], C64::new(1.0, 0.0));
        assert_abs_diff_eq!(a[1].re, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a[1].im, 1.0, epsilon = 1e-12);

        let a = steering_vector(19.5, &half_wave(3));
        for (k, phase) in [0.0, 1.048685176686697, 2.097370353373394]
            .into_iter()
            .enumerate()
        {
            assert_abs_diff_eq!(a[k].re, libm::cos(phase), epsilon = 1e-12);
            assert_abs_diff_eq!(a[k].im, libm::sin(phase), epsilon = 1e-12);
        }
    }

    #[test]
    fn geometry_validation() {
        assert!(ArrayGeometry::new(1, 0.04, 3.5e9).is_err());
        assert!(ArrayGeometry::new(4, 0.0, 3.5e9).is_err());
        assert!(ArrayGeometry::new(4, 0.04, 0.0).is_err());
        assert!(!half_wave(4).aliasing_warning());
        let wide = ArrayGeometry::new(4, 0.06, 3.5e9).unwrap();
        assert!(wide.aliasing_warning());
        assert_abs_diff_eq!(half_wave(4).spacing_wavelengths(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn single_source_single_snapshot_is_rank_one() {
        let g = half_wave(4);
        let x = synthesize_snapshots(&g, &[SourceSpec::new(0.0)], 1, None, 11).unwrap();
        let col = x.data().column(0);
        assert!(crate::math::abs(col[0]) > 0.0);
        for k in 1..4 {
            assert_eq!(col[k], col[0]);
        }
    }

    #[test]
    fn synthesis_rejects_bad_input() {
        let g = half_wave(4);
        assert!(synthesize_snapshots(&g, &[], 10, None, 0).is_err());
        assert!(synthesize_snapshots(&g, &[SourceSpec::new(90.0)], 10, None, 0).is_err());
        assert!(synthesize_snapshots(&g, &[SourceSpec::new(0.0)], 0, None, 0).is_err());
        // two references in one group
        let two_refs = [
            SourceSpec::new(0.0).coherent(1, 0.0, 0.0),
            SourceSpec::new(20.0).coherent(1, 0.0, 0.0),
        ];
        assert!(synthesize_snapshots(&g, &two_refs, 10, None, 0).is_err());
        // no reference in a group
        let no_ref = [SourceSpec::new(0.0).coherent(1, -3.0, 0.0)];
        assert!(synthesize_snapshots(&g, &no_ref, 10, None, 0).is_err());
    }

    #[test]
    fn synthesis_is_deterministic_in_seed() {
        let g = half_wave(6);
        let src = [
            SourceSpec::new(-10.0),
            SourceSpec::new(25.0).with_power_db(3.0),
        ];
        let a = synthesize_snapshots(&g, &src, 50, Some(0.0), 42).unwrap();
        let b = synthesize_snapshots(&g, &src, 50, Some(0.0), 42).unwrap();
        let c = synthesize_snapshots(&g, &src, 50, Some(0.0), 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn coherent_copy_is_scaled_reference() {
        let g = half_wave(4);
        let src = [
            SourceSpec::new(0.0).coherent(7, -6.0, 90.0),
            SourceSpec::new(0.0).coherent(7, 0.0, 0.0),
        ];
        // Both at broadside: total amplitude is (1 + 10^(-6/20) * i) times the waveform.
        let x = synthesize_snapshots(&g, &src, 3, None, 5).unwrap();
        let single = synthesize_snapshots(&g, &[SourceSpec::new(0.0)], 3, None, 5).unwrap();
        let factor = C64::new(1.0, db_to_amplitude(-6.0));
        for t in 0..3 {
            let expected = single.data()[(0, t)] * factor;
            assert_abs_diff_eq!(x.data()[(0, t)].re, expected.re, epsilon = 1e-12);
            assert_abs_diff_eq!(x.data()[(0, t)].im, expected.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn per_source_power_converges() {
        let g = half_wave(8);
        for power_db in [-10.0, 0.0, 13.0] {
            let x = synthesize_snapshots(
                &g,
                &[SourceSpec::new(12.0).with_power_db(power_db)],
                1000,
                None,
                3,
            )
            .unwrap();
            // element 0 carries the source waveform with unit steering gain
            let p: f64 = x.data().row(0).iter().map(|z| z.norm_sqr()).sum::<f64>() / 1000.0;
            assert!((crate::math::power_to_db(p) - power_db).abs() < 0.5);
        }
    }

    #[test]
    fn noise_power_matches_request() {
        let g = half_wave(8);
        let x = synthesize_snapshots(
            &g,
            &[SourceSpec::new(0.0).with_power_db(-300.0)],
            2000,
            Some(5.0),
            9,
        )
        .unwrap();
        let p: f64 = x.data().iter().map(|z| z.norm_sqr()).sum::<f64>() / (8.0 * 2000.0);
        assert!((crate::math::power_to_db(p) - 5.0).abs() < 0.1);
    }
}
