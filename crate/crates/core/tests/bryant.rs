use std::sync::OnceLock;

use solab_core::bryant::{self, BryantProfile};
use solab_core::SolabError;

fn profile() -> &'static BryantProfile {
    static P: OnceLock<BryantProfile> = OnceLock::new();
    P.get_or_init(|| bryant::solve_bryant(1000.0, 1e-8).unwrap())
}

#[test]
fn identity_holds_to_the_far_field() {
    let b = profile();
    assert_eq!(*b.r.last().unwrap(), 1000.0);
    let inv = bryant::invariants(b);
    assert!(inv.max_identity_drift <= 1e-8, "{inv:?}");
    assert!(inv.phi_prime_decreasing && inv.scalar_decreasing && inv.fprime_nonnegative);
    assert!(inv.final_phi_prime <= 0.05, "{inv:?}");
    assert!(b.fprime.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn scalar_curvature_decays_like_one_over_r() {
    let b = profile();
    let rr: Vec<f64> = b
        .r
        .iter()
        .zip(&b.scalar)
        .filter(|(r, _)| **r >= 100.0)
        .map(|(r, s)| r * s)
        .collect();
    let hi = rr.iter().copied().fold(f64::MIN, f64::max);
    let lo = rr.iter().copied().fold(f64::MAX, f64::min);
    assert!((hi - lo) / hi <= 0.02, "R·r in [{lo}, {hi}]");
}

#[test]
fn series_and_integration_agree_at_the_hand_off() {
    let b = profile();
    let k = b.r.iter().position(|&r| r == bryant::R_START).unwrap();
    let y = bryant::tip_series(bryant::R_START);
    assert_eq!((b.phi[k], b.phi_prime[k], b.fprime[k]), (y[0], y[1], y[2]));
    // The series itself satisfies the identity to truncation order.
    let r = bryant::scalar_from_state(&y);
    assert!((r + y[2] * y[2] - 1.0).abs() <= 1e-10);
    assert_eq!(b.scalar[0], 1.0);
}

#[test]
fn refinement_changes_little() {
    let coarse = profile();
    let fine = bryant::solve_bryant_scaled(50.0, 1e-8, 0.5).unwrap();
    let spline = coarse.phi_spline();
    let worst = fine
        .r
        .iter()
        .zip(&fine.phi)
        .filter(|(r, _)| **r > 0.0)
        .map(|(r, p)| (spline.eval(*r) - p).abs() / p)
        .fold(0.0, f64::max);
    assert!(worst <= 1e-7, "{worst:e}");
}

#[test]
fn tip_comparison_with_itself_vanishes() {
    let b = profile();
    let cmp = bryant::compare_tip(&b.to_profile().unwrap(), b).unwrap();
    assert!((cmp.r_tip - 1.0).abs() <= 1e-6, "{cmp:?}");
    assert!(cmp.discrepancy <= 1e-6, "{cmp:?}");
    assert!(cmp.overlap_points >= bryant::MIN_TIP_POINTS);
}

#[test]
fn slope_lookup() {
    let b = profile();
    let (r, phi) = b.where_slope(0.5).unwrap();
    let k = b.r.iter().position(|&x| x > r).unwrap();
    assert!(b.phi_prime[k - 1] >= 0.5 && b.phi_prime[k] < 0.5);
    assert!(phi > 0.0 && phi < r);
    assert!(b.where_slope(1e-6).is_none());
}

#[test]
fn bad_arguments() {
    assert!(matches!(bryant::solve_bryant(0.01, 1e-8), Err(SolabError::Parameter(_))));
    assert!(matches!(bryant::solve_bryant_scaled(10.0, 1e-8, 2.0), Err(SolabError::Parameter(_))));
    assert!(matches!(bryant::solve_bryant(100.0, 1e-16), Err(SolabError::Drift(_))));
}

#[test]
fn open_profiles_have_no_tip() {
    let z: Vec<f64> = (0..64).map(|i| i as f64 * 0.1).collect();
    let p = solab_core::RadialProfile::new(z, vec![1.0; 64], 1.0, false).unwrap();
    let e = bryant::estimate_tip_curvature(&p, bryant::TIP_RESOLUTION).unwrap_err();
    assert!(e.to_string().contains("insufficient resolution"));
}
