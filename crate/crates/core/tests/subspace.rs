use doa_core::array::{steering_matrix, synthesize_snapshots, ArrayGeometry, SourceSpec};
use doa_core::covariance::{sample_covariance, spatial_smoothing, CovarianceMatrix};
use doa_core::subspace::*;
use doa_core::{Complex, DMatrix, Error, C64};
use nalgebra::SymmetricEigen;

const TABLE1: [f64; 5] = [-51.1, -19.5, 0.0, 19.5, 51.1];

fn ula(n: usize) -> ArrayGeometry {
    ArrayGeometry::half_wavelength(n, 3.5e9).unwrap()
}

fn sources(angles: &[f64]) -> Vec<SourceSpec> {
    angles.iter().map(|&a| SourceSpec::new(a)).collect()
}

fn noiseless(n: usize, angles: &[f64], m: usize, seed: u64) -> (CovarianceMatrix, EigenStructure) {
    let x = synthesize_snapshots(&ula(n), &sources(angles), m, None, seed).unwrap();
    let r = sample_covariance(&x);
    let e = eigendecompose(&r).unwrap();
    (r, e)
}

/// Eigenvalues of a Hermitian matrix through its real symmetric embedding
/// `[[Re, -Im], [Im, Re]]`; every eigenvalue appears twice there.
fn oracle_eigenvalues(r: &DMatrix<C64>) -> Vec<f64> {
    let n = r.nrows();
    let big = DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| {
        let z = r[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut ev: Vec<f64> = SymmetricEigen::new(big)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev.into_iter().step_by(2).collect()
}

fn oracle_rank(r: &DMatrix<C64>, rel: f64) -> usize {
    let ev = oracle_eigenvalues(r);
    ev.iter().filter(|&&l| l > rel * ev[0]).count()
}

fn frobenius(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[test]
fn table1_noiseless_covariance_has_five_nonzero_eigenvalues() {
    let (r, e) = noiseless(8, &TABLE1, 200, 1);
    assert_eq!(oracle_rank(r.data(), 1e-8), 5);
    let max = e.max_eigenvalue();
    assert_eq!(
        e.eigenvalues().iter().filter(|&&l| l > 1e-8 * max).count(),
        5
    );
    // agree with the oracle eigenvalue by eigenvalue
    for (a, b) in e.eigenvalues().iter().zip(oracle_eigenvalues(r.data())) {
        assert!((a - b).abs() < 1e-10 * max);
    }
}

#[test]
fn coherent_pair_collapses_to_rank_one() {
    let src = [
        SourceSpec::new(0.0).coherent(0, -6.0, 30.0),
        SourceSpec::new(27.0).coherent(0, 0.0, 0.0),
    ];
    let x = synthesize_snapshots(&ula(8), &src, 2000, None, 3).unwrap();
    assert_eq!(oracle_rank(sample_covariance(&x).data(), 1e-8), 1);
}

#[test]
fn eigendecomposition_reconstructs() {
    let (r, e) = noiseless(8, &[-10.0, 33.0], 100, 5);
    let max = e.max_eigenvalue();
    assert_eq!(
        e.eigenvalues().iter().filter(|&&l| l > 1e-8 * max).count(),
        2
    );
    let resid = frobenius(&(e.reconstruct() - r.data())) / frobenius(r.data());
    assert!(resid < 1e-9, "residual {resid}");
    assert!(e.eigenvalues().windows(2).all(|w| w[0] >= w[1]));
    let v = e.eigenvectors();
    let unitary_defect = frobenius(&(v.adjoint() * v - DMatrix::identity(8, 8)));
    assert!(unitary_defect < 1e-12);
}

#[test]
fn source_count_threshold_and_known() {
    let (_, e) = noiseless(8, &TABLE1, 200, 2);
    assert_eq!(
        estimate_source_count(&e, SourceCountMethod::Threshold(1e-6), 200).unwrap(),
        5
    );
    assert_eq!(
        estimate_source_count(&e, SourceCountMethod::Known(3), 200).unwrap(),
        3
    );
    assert!(matches!(
        estimate_source_count(&e, SourceCountMethod::Known(8), 200),
        Err(Error::Domain { .. })
    ));
}

#[test]
fn mdl_finds_no_source_in_pure_noise() {
    let g = ula(8);
    let trials = 100;
    let mut zero = 0;
    for seed in 0..trials {
        // a source 300 dB below the noise is absent for every practical purpose
        let x = synthesize_snapshots(
            &g,
            &[SourceSpec::new(0.0).with_power_db(-300.0)],
            1000,
            Some(0.0),
            seed,
        )
        .unwrap();
        let e = eigendecompose(&sample_covariance(&x)).unwrap();
        if estimate_source_count(&e, SourceCountMethod::Mdl, 1000).unwrap() == 0 {
            zero += 1;
        }
    }
    assert!(zero as f64 >= 0.95 * trials as f64, "{zero}/{trials}");
}

#[test]
fn mdl_and_aic_find_two_strong_sources() {
    let g = ula(8);
    for seed in 0..20 {
        let src = [
            SourceSpec::new(-20.0).with_power_db(10.0),
            SourceSpec::new(30.0).with_power_db(10.0),
        ];
        let x = synthesize_snapshots(&g, &src, 500, Some(0.0), seed).unwrap();
        let e = eigendecompose(&sample_covariance(&x)).unwrap();
        assert_eq!(
            estimate_source_count(&e, SourceCountMethod::Mdl, 500).unwrap(),
            2
        );
        assert!(estimate_source_count(&e, SourceCountMethod::Aic, 500).unwrap() >= 2);
    }
}

#[test]
fn music_single_source_peaks_at_broadside() {
    let (_, e) = noiseless(4, &[0.0], 50, 7);
    let s = music_spectrum(&e, 1, &ula(4), &AngleGrid::default()).unwrap();
    let argmax = s
        .power_db
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0;
    assert_eq!(s.angles_deg[argmax], 0.0);
    assert_eq!(s.power_db[argmax], 0.0);
    assert_eq!(find_peaks(&s, 1).unwrap(), vec![0.0]);
}

#[test]
fn music_table1_peaks() {
    let (_, e) = noiseless(8, &TABLE1, 200, 11);
    let s = music_spectrum(&e, 5, &ula(8), &AngleGrid::default()).unwrap();
    let peaks = find_peaks(&s, 5).unwrap();
    for (p, t) in peaks.iter().zip(TABLE1) {
        assert!((p - t).abs() <= 0.1, "{p} vs {t}");
    }
}

#[test]
fn music_rejects_bad_source_count() {
    let (_, e) = noiseless(4, &[10.0], 20, 7);
    assert!(music_spectrum(&e, 0, &ula(4), &AngleGrid::default()).is_err());
    assert!(music_spectrum(&e, 4, &ula(4), &AngleGrid::default()).is_err());
}

/// Deterministic unitary from the QR factorization of a fixed complex matrix.
fn unitary(k: usize, seed: u64) -> DMatrix<C64> {
    let mut state = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    let mut next = || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    };
    let m = DMatrix::from_fn(k, k, |_, _| Complex::new(next(), next()));
    m.qr().q()
}

#[test]
fn music_is_invariant_under_noise_subspace_rebasis() {
    let (_, e) = noiseless(8, &[-40.0, 5.0, 12.0], 100, 13);
    let g = ula(8);
    let grid = AngleGrid::symmetric(0.5).unwrap();
    let en = e.noise_subspace(3);
    let base = music_pseudospectrum(&en, &g, &grid).unwrap();
    for seed in 0..5 {
        let rotated = &en * unitary(5, seed);
        let s = music_pseudospectrum(&rotated, &g, &grid).unwrap();
        for (a, b) in base.power_db.iter().zip(&s.power_db) {
            // relative error of the linear pseudospectrum
            let rel = (10f64.powf((a - b) / 10.0) - 1.0).abs();
            assert!(rel < 1e-9, "{a} vs {b}");
        }
    }
}

#[test]
fn merged_peaks_are_a_resolution_failure() {
    let g = ula(8);
    let src = [SourceSpec::new(-0.15), SourceSpec::new(0.15)];
    let x = synthesize_snapshots(&g, &src, 200, Some(-20.0), 4).unwrap();
    let e = eigendecompose(&sample_covariance(&x)).unwrap();
    let window = AngleGrid::new((-30..=30).map(|i| i as f64 / 10.0).collect()).unwrap();
    let s = music_spectrum(&e, 2, &g, &window).unwrap();
    // count interior strict local maxima by hand
    let y = &s.power_db;
    let maxima = (1..y.len() - 1)
        .filter(|&i| y[i] > y[i - 1] && y[i] > y[i + 1])
        .count();
    assert_eq!(maxima, 1);
    match find_peaks(&s, 2) {
        Err(Error::ResolutionFailure { expected: 2, found }) => {
            assert_eq!(found.len(), 1);
            assert!(found[0].abs() < 0.3);
        }
        other => panic!("expected resolution failure, got {other:?}"),
    }
}

#[test]
fn esprit_single_source_at_thirty_degrees() {
    let (_, e) = noiseless(6, &[30.0], 40, 17);
    for v in [EspritVariant::Ls, EspritVariant::Tls] {
        let a = esprit(&e, 1, &ula(6), v).unwrap();
        assert!((a[0] - 30.0).abs() < 1e-9, "{v:?}: {}", a[0]);
    }
}

#[test]
fn esprit_table1() {
    let (_, e) = noiseless(8, &TABLE1, 200, 19);
    let tls = esprit(&e, 5, &ula(8), EspritVariant::Tls).unwrap();
    let ls = esprit(&e, 5, &ula(8), EspritVariant::Ls).unwrap();
    for i in 0..5 {
        assert!((tls[i] - TABLE1[i]).abs() < 0.05);
        assert!((tls[i] - TABLE1[i]).abs() < 1e-6);
        assert!((ls[i] - tls[i]).abs() < 1e-6);
    }
}

#[test]
fn esprit_rejects_bad_source_count() {
    let (_, e) = noiseless(4, &[10.0], 20, 7);
    assert!(esprit(&e, 0, &ula(4), EspritVariant::Tls).is_err());
    assert!(esprit(&e, 4, &ula(4), EspritVariant::Tls).is_err());
}

#[test]
fn esprit_flags_roots_outside_visible_region() {
    // With spacing 0.3 lambda the invariance phase of a wave at 60 degrees is
    // 0.3*2*pi*sin(60) = 1.63 rad; read back assuming 0.1 lambda it needs
    // sin(theta) = 2.6.
    let wide = ArrayGeometry::new(6, 0.3 * 0.085654988, 3.5e9).unwrap();
    let x = synthesize_snapshots(&wide, &[SourceSpec::new(60.0)], 30, None, 1).unwrap();
    let e = eigendecompose(&sample_covariance(&x)).unwrap();
    let narrow = ArrayGeometry::new(6, 0.1 * 0.085654988, 3.5e9).unwrap();
    match esprit(&e, 1, &narrow, EspritVariant::Tls) {
        Err(Error::AngleOutOfRange { index: 0, sine }) => assert!(sine > 1.0),
        other => panic!("expected out-of-range, got {other:?}"),
    }
}

#[test]
fn esprit_flags_degenerate_subspace() {
    // A signal subspace concentrated on the last element leaves E1 rank deficient.
    let mut r = DMatrix::<C64>::zeros(4, 4);
    r[(3, 3)] = Complex::new(1.0, 0.0);
    let e = eigendecompose(&CovarianceMatrix::from_hermitian(r).unwrap()).unwrap();
    for v in [EspritVariant::Ls, EspritVariant::Tls] {
        assert!(matches!(
            esprit(&e, 1, &ula(4), v),
            Err(Error::DegenerateSubspace { .. })
        ));
    }
}

#[test]
fn esprit_is_invariant_to_global_phase() {
    let g = ula(8);
    let x = synthesize_snapshots(&g, &sources(&[-33.0, 4.0, 48.0]), 100, Some(-10.0), 23).unwrap();
    let base = esprit(
        &eigendecompose(&sample_covariance(&x)).unwrap(),
        3,
        &g,
        EspritVariant::Tls,
    )
    .unwrap();
    for phase in [0.3_f64, 1.7, -2.9] {
        let rot = Complex::new(phase.cos(), phase.sin());
        let y = doa_core::array::SnapshotMatrix::new(g, x.data() * rot).unwrap();
        let est = esprit(
            &eigendecompose(&sample_covariance(&y)).unwrap(),
            3,
            &g,
            EspritVariant::Tls,
        )
        .unwrap();
        for (a, b) in base.iter().zip(&est) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }
}

#[test]
fn music_and_esprit_agree_on_noiseless_data() {
    for (angles, seed) in [
        (&TABLE1[..], 1u64),
        (&[0.0, 34.0][..], 2),
        (&[-23.0, 34.0][..], 3),
        (&[-60.0, -40.0, -20.0, 0.0, 20.0, 40.0, 60.0][..], 4),
    ] {
        let (_, e) = noiseless(8, angles, 200, seed);
        let k = angles.len();
        let m = find_peaks(
            &music_spectrum(&e, k, &ula(8), &AngleGrid::default()).unwrap(),
            k,
        )
        .unwrap();
        let s = esprit(&e, k, &ula(8), EspritVariant::Tls).unwrap();
        for i in 0..k {
            assert!(
                (m[i] - s[i]).abs() < 0.1,
                "{angles:?}: {} vs {}",
                m[i],
                s[i]
            );
            assert!((s[i] - angles[i]).abs() < 1e-6);
        }
    }
}

#[test]
fn smoothed_esprit_resolves_coherent_multipath() {
    let g = ula(8);
    let src = [
        SourceSpec::new(0.0)
            .with_power_db(6.0)
            .coherent(0, -6.0, 45.0),
        SourceSpec::new(27.0)
            .with_power_db(6.0)
            .coherent(0, 0.0, 0.0),
    ];
    let x = synthesize_snapshots(&g, &src, 200, None, 29).unwrap();
    let r = spatial_smoothing(&x, 6, false).unwrap();
    let e = eigendecompose(&r).unwrap();
    let a = esprit(&e, 2, &g, EspritVariant::Tls).unwrap();
    assert!(
        (a[0] - 0.0).abs() < 1e-6 && (a[1] - 27.0).abs() < 1e-6,
        "{a:?}"
    );
    let m = find_peaks(
        &music_spectrum(&e, 2, &g, &AngleGrid::default()).unwrap(),
        2,
    )
    .unwrap();
    assert!(
        (m[0] - 0.0).abs() < 0.1 && (m[1] - 27.0).abs() < 0.1,
        "{m:?}"
    );
}

#[test]
fn level_of_single_unit_source() {
    // Exact noiseless-limit covariance a a^H + I: closed-form fit gives P = 1.
    let g = ula(8);
    let a = steering_matrix(&[14.0], &g);
    let r = &a * a.adjoint() + DMatrix::<C64>::identity(8, 8);
    let r = CovarianceMatrix::from_hermitian(r).unwrap();
    let levels = estimate_levels(&r, &[14.0], &g).unwrap();
    assert!(levels[0].abs() < 0.2, "{levels:?}");
}

#[test]
fn equal_sources_have_equal_levels() {
    let g = ula(8);
    let a = steering_matrix(&[-25.0, 25.0], &g);
    let r = &a * a.adjoint() * Complex::new(4.0, 0.0) + DMatrix::<C64>::identity(8, 8);
    let r = CovarianceMatrix::from_hermitian(r).unwrap();
    let levels = estimate_levels(&r, &[-25.0, 25.0], &g).unwrap();
    assert!((levels[0] - levels[1]).abs() < 0.3);
    assert!((levels[0] - 10.0 * 4f64.log10()).abs() < 0.2);
}

#[test]
fn level_offset_is_recovered() {
    let g = ula(8);
    let src = [
        SourceSpec::new(-10.0).with_power_db(20.0),
        SourceSpec::new(30.0).with_power_db(10.0),
    ];
    let x = synthesize_snapshots(&g, &src, 1000, Some(0.0), 31).unwrap();
    let r = sample_covariance(&x);
    let levels = estimate_levels(&r, &[-10.0, 30.0], &g).unwrap();
    assert!(((levels[0] - levels[1]) - 10.0).abs() < 0.5, "{levels:?}");
}

#[test]
fn level_errors() {
    let g = ula(8);
    let r = CovarianceMatrix::from_hermitian(DMatrix::identity(8, 8)).unwrap();
    assert!(matches!(
        estimate_levels(&r, &[1.0, 1.0], &g),
        Err(Error::Domain { .. })
    ));
    assert!(matches!(
        estimate_levels(&r, &[], &g),
        Err(Error::Domain { .. })
    ));
    assert!(matches!(
        estimate_levels(&r, &[0.0, 1e-7], &g),
        Err(Error::IllConditioned { .. })
    ));
    let small = CovarianceMatrix::from_hermitian(DMatrix::identity(2, 2)).unwrap();
    assert!(estimate_levels(&small, &[0.0, 10.0], &g).is_err());
}

#[test]
fn levels_floor_at_minus_100_db() {
    let g = ula(8);
    let a = steering_matrix(&[0.0], &g);
    let r = CovarianceMatrix::from_hermitian(&a * a.adjoint() + DMatrix::<C64>::identity(8, 8))
        .unwrap();
    // a second, empty direction gets a non-positive fit
    let levels = estimate_levels(&r, &[0.0, 40.0], &g).unwrap();
    assert_eq!(levels[1], LEVEL_FLOOR_DB);
}

#[test]
fn convenience_estimators_fill_results() {
    let (r, e) = noiseless(8, &[-12.0, 40.0], 200, 41);
    let g = ula(8);
    let m = estimate_music(&r, &e, 2, &g, &AngleGrid::default()).unwrap();
    assert_eq!(m.algorithm, Algorithm::Music);
    assert_eq!(m.angles_deg.len(), m.source_count);
    assert!(m.spectrum.is_some());
    assert_eq!(m.eigenvalues.len(), 8);
    let s = estimate_esprit(&r, &e, 2, &g, EspritVariant::Tls).unwrap();
    assert_eq!(s.algorithm, Algorithm::Esprit);
    let levels = s.levels_db.unwrap();
    assert!(
        (levels[0]).abs() < 0.5 && (levels[1]).abs() < 0.5,
        "{levels:?}"
    );
}
