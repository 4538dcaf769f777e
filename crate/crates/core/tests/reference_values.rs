//! Spectral facts of the momentum-space secular function, recomputed with an
//! independent 60-digit evaluation and confirmed by the determinant oracle.

use ptwell::numerics::refine_extremum;
use ptwell::pwell::{
    count_levels, find_spectrum, locate_doublet_birth, secular_value_alpha, sweep, threshold_alpha,
    SweepEvent,
};
use ptwell::{Error, MpReal, PrecisionPolicy, Real};

fn policy() -> PrecisionPolicy {
    PrecisionPolicy::default()
}

#[test]
fn thresholds() {
    assert_eq!(threshold_alpha(1.0), 0.5);
    assert!((threshold_alpha(0.1) - 0.232079).abs() < 1e-6);
}

#[test]
fn shallow_wells_hold_one_level() {
    for z in [1e-3, 1e-2, 0.1, 1.0] {
        assert_eq!(count_levels(z, &policy()).unwrap(), 1, "Z={z}");
    }
    // no root near alpha = 0.0445 at Z = 0.1
    assert!(secular_value_alpha(&0.0445, &0.1).unwrap() < -1.0);
}

#[test]
fn level_counts() {
    let cases = [(1.0, 1), (5.31, 2), (35.0, 2), (40.0, 3), (150.0, 4), (200.0, 4), (1000.0, 6)];
    for (z, n) in cases {
        assert_eq!(count_levels(z, &policy()).unwrap(), n, "Z={z}");
    }
}

#[test]
fn left_plateau_of_very_shallow_well() {
    let v = secular_value_alpha(&1e-5, &1e-3).unwrap();
    assert!((v - (-10.255692115)).abs() < 1e-6, "{v}");
    // closer to the origin the bracket is O(alpha^2) and needs more digits
    let z = MpReal::with_digits(1e-3, 40);
    let v = secular_value_alpha(&z.lit(1e-9), &z).unwrap().to_f64();
    assert!((v - (-10.259999569)).abs() < 1e-8, "{v}");
}

#[test]
fn no_touching_peak_near_five() {
    let z = 5.3003;
    let f = |a: &f64| secular_value_alpha(a, &z).unwrap();
    let (a, v) = refine_extremum(f, &0.3, &(0.999 * threshold_alpha(z)), &policy()).unwrap();
    assert!((a - 0.74817).abs() < 1e-4);
    assert!((v - 1.67216).abs() < 1e-4);
    let s = find_spectrum(z, &policy()).unwrap();
    assert_eq!(s.len(), 2);
    assert!(s.peak.is_none());
}

#[test]
fn no_doublet_births() {
    for (lo, hi) in [(5.0, 5.6), (1150.0, 1250.0)] {
        assert!(matches!(
            locate_doublet_birth(lo, hi, &policy()),
            Err(Error::NoBirthInInterval { .. })
        ));
    }
    assert_eq!(count_levels(1150.0, &policy()).unwrap(), 6);
    assert_eq!(count_levels(1190.0, &policy()).unwrap(), 7);
}

#[test]
fn count_at_1200_is_precision_independent() {
    let expect = [
        0.959792753791, 1.769859543623, 2.567603099908, 3.349254794323, 4.106610211957,
        4.816459847417, 5.313133921945,
    ];
    for p in [policy().fixed(), policy(), policy().with_digits(45)] {
        let a = find_spectrum(1200.0, &p).unwrap().alphas();
        assert_eq!(a.len(), 7, "digits={}", p.digits);
        for (g, e) in a.iter().zip(expect) {
            assert!((g - e).abs() < 1e-9);
        }
    }
}

#[test]
fn staircase_grows_through_threshold() {
    let zs: Vec<f64> = (0..40).map(|i| 10f64.powf(-3.0 + 6.1 * f64::from(i) / 39.0)).collect();
    let recs = sweep(&zs, &policy()).unwrap();
    for r in &recs[1..] {
        assert!(r.delta == 0 || r.delta == 1, "Z={} delta={}", r.z, r.delta);
        if r.delta == 1 {
            assert_eq!(r.events, vec![SweepEvent::ThresholdEntry]);
        }
    }
    assert_eq!(recs.first().unwrap().n_levels, 1);
    assert_eq!(recs.last().unwrap().n_levels, 7);
}
