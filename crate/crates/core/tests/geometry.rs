use std::f64::consts::{PI, SQRT_2};

use proptest::prelude::*;
use solab_core::geometry::{self, RadialProfile};
use solab_core::numerics::linspace;
use solab_core::SolabError;

fn sine_profile(cells: usize) -> RadialProfile {
    let z = linspace(0.0, PI, cells + 1);
    let mut f: Vec<f64> = z.iter().map(|v| v.sin()).collect();
    let n = f.len();
    f[0] = 0.0;
    f[n - 1] = 0.0;
    RadialProfile::new(z, f, 1.0, true).unwrap()
}

#[test]
fn closed_forms_with_exact_derivatives() {
    // Cylinder F ≡ √2: K_rad = 0, K_orb = 1/2.
    let (kr, ko) = geometry::curvatures_from_derivatives(SQRT_2, 0.0, 0.0);
    assert!(kr.abs() <= 1e-10 && (ko - 0.5).abs() <= 1e-10);
    // F = sin z: both sectional curvatures are 1, R̄ = 6.
    for z in linspace(0.1, PI - 0.1, 512) {
        let (kr, ko) = geometry::curvatures_from_derivatives(z.sin(), z.cos(), -z.sin());
        assert!((kr - 1.0).abs() <= 1e-10, "K_rad at {z}");
        assert!((ko - 1.0).abs() <= 1e-10, "K_orb at {z}");
        assert!((4.0 * kr + 2.0 * ko - 6.0).abs() <= 1e-10);
    }
}

#[test]
fn cylinder_grid_is_exact() {
    let z = linspace(-4.0, 4.0, 513);
    let f = vec![SQRT_2; z.len()];
    let p = RadialProfile::new(z, f, 1.0, false).unwrap();
    let (kr, ko) = geometry::sectional_curvatures(&p).unwrap();
    assert!(kr.iter().all(|k| k.abs() <= 1e-10));
    assert!(ko.iter().all(|k| (k - 0.5).abs() <= 1e-10));
    let (ric_rad, ric_orb) = geometry::ricci(&p).unwrap();
    assert!(ric_rad.iter().all(|r| r.abs() <= 1e-10));
    // Ric_orb = F²(K_rad + K_orb) = 2·(1/2) = 1.
    assert!(ric_orb.iter().all(|r| (r - 1.0).abs() <= 1e-10));
    assert!(geometry::scalar_curvature(&p).unwrap().iter().all(|r| (r - 1.0).abs() <= 1e-10));
}

fn sine_errors(cells: usize) -> (f64, f64) {
    let p = sine_profile(cells);
    let (kr, ko) = geometry::sectional_curvatures(&p).unwrap();
    let range: Vec<usize> = p.eval_range().collect();
    let mut e = (0.0_f64, 0.0_f64);
    for (k, &i) in range.iter().enumerate() {
        // Away from the tips, where the orbital curvature is an 0/0 limit.
        if p.z[i] < PI / 8.0 || p.z[i] > 7.0 * PI / 8.0 {
            continue;
        }
        e.0 = e.0.max((kr[k] - 1.0).abs());
        e.1 = e.1.max((ko[k] - 1.0).abs());
    }
    e
}

#[test]
fn finite_differences_converge_at_second_order() {
    let (a_rad, a_orb) = sine_errors(512);
    let (b_rad, b_orb) = sine_errors(1024);
    let order_rad = (a_rad / b_rad).log2();
    let order_orb = (a_orb / b_orb).log2();
    assert!(order_rad >= 1.85, "K_rad order {order_rad}");
    assert!(order_orb >= 1.85, "K_orb order {order_orb}");
}

#[test]
fn cylinder_radius_scales_curvature() {
    for r in [0.5, 1.0, 3.0] {
        let z = linspace(-1.0, 1.0, 65);
        let p = RadialProfile::new(z, vec![r; 65], 1.0, false).unwrap();
        let (_, ko) = geometry::sectional_curvatures(&p).unwrap();
        assert!(ko.iter().all(|k| (k - 1.0 / (r * r)).abs() <= 1e-12));
    }
}

#[test]
fn reversal_is_bit_exact() {
    let z = linspace(-3.0, 3.0, 201);
    let f: Vec<f64> = z.iter().map(|v| 2.0 + 0.3 * (1.3 * v).sin() + 0.1 * v).collect();
    let p = RadialProfile::new(z, f, 1.0, false).unwrap();
    let q = p.reversed();
    let (a_rad, a_orb) = geometry::sectional_curvatures(&p).unwrap();
    let (mut b_rad, mut b_orb) = geometry::sectional_curvatures(&q).unwrap();
    b_rad.reverse();
    b_orb.reverse();
    assert_eq!(a_rad, b_rad);
    assert_eq!(a_orb, b_orb);
}

#[test]
fn tips_are_excluded_from_evaluation() {
    let p = sine_profile(64);
    assert_eq!(p.eval_range(), 1..64);
    assert_eq!(geometry::scalar_curvature(&p).unwrap().len(), 63);
}

#[test]
fn invalid_profiles_are_rejected() {
    let z = linspace(0.0, 1.0, 20);
    let mut f = vec![1.0; 20];
    f[7] = 0.0;
    match RadialProfile::new(z.clone(), f, 1.0, false) {
        Err(SolabError::InvalidProfile { index, .. }) => assert_eq!(index, 7),
        other => panic!("expected InvalidProfile, got {other:?}"),
    }
    let mut f = vec![1.0; 20];
    f[3] = f64::NAN;
    assert!(matches!(
        RadialProfile::new(z.clone(), f, 1.0, false),
        Err(SolabError::InvalidProfile { index: 3, .. })
    ));
    assert!(RadialProfile::new(z.clone(), vec![1.0; 20], 1.0, true).is_err());
    assert!(RadialProfile::new(z.clone(), vec![1.0; 19], 1.0, false).is_err());
    assert!(RadialProfile::new(linspace(0.0, 1.0, 5), vec![1.0; 5], 1.0, false).is_err());
    let mut zz = z.clone();
    zz.swap(4, 5);
    assert!(RadialProfile::new(zz, vec![1.0; 20], 1.0, false).is_err());
    assert!(RadialProfile::new(z, vec![1.0; 20], -1.0, false).is_err());
}

#[test]
fn regime_check_flags_convex_profiles() {
    let z = linspace(-1.0, 1.0, 101);
    let concave: Vec<f64> = z.iter().map(|v| 2.0 - 0.1 * v * v).collect();
    let convex: Vec<f64> = z.iter().map(|v| 2.0 + 0.1 * v * v).collect();
    let p = RadialProfile::new(z.clone(), concave, 1.0, false).unwrap();
    let q = RadialProfile::new(z, convex, 1.0, false).unwrap();
    assert!(geometry::regime_check(&p).ok);
    let r = geometry::regime_check(&q);
    assert!(!r.ok && r.max_fzz > 0.1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_identity_on_random_profiles(
        c in prop::collection::vec(-0.2f64..0.2, 4),
        base in 1.5f64..4.0,
    ) {
        let z = linspace(-2.0, 2.0, 257);
        let f: Vec<f64> = z
            .iter()
            .map(|v| base + c.iter().enumerate().map(|(k, a)| a * ((k + 1) as f64 * v).cos()).sum::<f64>())
            .collect();
        let p = RadialProfile::new(z, f, 1.0, false).unwrap();
        let (kr, ko) = geometry::sectional_curvatures(&p).unwrap();
        let r = geometry::scalar_curvature(&p).unwrap();
        for i in 0..r.len() {
            let t = 4.0 * kr[i] + 2.0 * ko[i];
            prop_assert!((r[i] - t).abs() <= 1e-12 * t.abs().max(1.0));
        }
        let (ric_rad, ric_orb) = geometry::ricci(&p).unwrap();
        for (k, i) in p.eval_range().enumerate() {
            prop_assert!((ric_rad[k] - 2.0 * kr[k]).abs() <= 1e-12 * kr[k].abs().max(1.0));
            let expect = p.f[i] * p.f[i] * (kr[k] + ko[k]);
            prop_assert!((ric_orb[k] - expect).abs() <= 1e-12 * expect.abs().max(1.0));
        }
    }
}
