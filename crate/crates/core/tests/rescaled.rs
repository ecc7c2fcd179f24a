use std::f64::consts::SQRT_2;

use solab_core::flow::{self, ErrorModel, FlowTrajectory};
use solab_core::geometry::RadialProfile;
use solab_core::rescaled::{self, RescaledProfile};

fn smooth_profile(s: f64) -> RadialProfile {
    let z = flow::symmetric_grid(400, 3.0 * s.sqrt()).unwrap();
    let root = s.sqrt();
    let f = z
        .iter()
        .map(|&v| {
            let xi = v / root;
            root * (SQRT_2 + 0.05 * (xi * xi - 2.0) * (-xi * xi / 8.0).exp() + 0.02 * (0.7 * xi).sin())
        })
        .collect();
    RadialProfile::new(z, f, s, false).unwrap()
}

#[test]
fn roundtrip_is_identity() {
    for s in [0.3, 1.0, 50.0, 2.0e4] {
        let p = smooth_profile(s);
        let r = rescaled::to_rescaled(&p);
        assert!((r.s() - s).abs() <= 1e-12 * s);
        let q = rescaled::from_rescaled(&r).unwrap();
        for i in 0..p.len() {
            assert!((q.z[i] - p.z[i]).abs() <= 1e-12 * p.z[i].abs().max(1.0));
            assert!((q.f[i] - p.f[i]).abs() <= 1e-12 * p.f[i]);
        }
    }
}

#[test]
fn g_rhs_matches_the_chain_rule() {
    // G_τ = F/(2√s) − z F_z/(2√s) − √s F_s at fixed ξ.
    for model in [ErrorModel::zero(), ErrorModel::standard()] {
        for s in [1.0, 30.0] {
            let p = smooth_profile(s);
            let fs = flow::rhs(&p, &model).unwrap();
            let (fz, _) = p.derivatives();
            let gt = rescaled::g_rhs(&rescaled::to_rescaled(&p), &model).unwrap();
            let root = s.sqrt();
            for i in p.eval_range() {
                let oracle = p.f[i] / (2.0 * root) - p.z[i] * fz[i] / (2.0 * root) - root * fs[i];
                assert!(
                    (gt[i] - oracle).abs() <= 1e-8,
                    "s = {s}, i = {i}: {} vs {oracle}",
                    gt[i]
                );
            }
        }
    }
}

#[test]
fn zero_is_a_fixed_point() {
    let xi = flow::symmetric_grid(200, 5.0).unwrap();
    let r = RescaledProfile {
        g: vec![0.0; xi.len()],
        xi,
        tau: -3.0,
        closed: false,
    };
    let gt = rescaled::g_rhs(&r, &ErrorModel::zero()).unwrap();
    assert!(gt.iter().all(|v| v.abs() <= 1e-12), "{:e}", gt.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
}

#[test]
fn origin_must_be_a_node() {
    let r = RescaledProfile {
        xi: vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0],
        g: vec![0.0; 6],
        tau: 0.0,
        closed: false,
    };
    assert!(rescaled::g_rhs(&r, &ErrorModel::zero()).is_err());
}

#[test]
fn trackers_are_running_sups() {
    let snaps: Vec<RadialProfile> = [100.0, 90.0, 80.0]
        .iter()
        .zip([0.01, -0.02, 0.005])
        .map(|(&s, bump)| {
            let z = flow::symmetric_grid(64, 2.0 * f64::sqrt(s)).unwrap();
            let root = f64::sqrt(s);
            let f = z
                .iter()
                .map(|&v| root * (SQRT_2 + bump * (-(v / root).powi(2)).exp()))
                .collect();
            RadialProfile::new(z, f, s, false).unwrap()
        })
        .collect();
    let traj = FlowTrajectory::from_snapshots(snaps, ErrorModel::zero());
    let t = rescaled::trackers(&traj);
    assert_eq!(t.tau.len(), 3);
    assert!(t.tau.windows(2).all(|w| w[0] < w[1]));
    assert!(t.rho.windows(2).all(|w| w[0] <= w[1]));
    assert!(t.delta.windows(2).all(|w| w[0] <= w[1]));
    for k in 0..3 {
        assert!(t.rho[k] >= t.rho_max[k]);
        assert!(t.delta[k] >= t.rho[k]);
    }
    // ρ_max = e^{τ/4} + sup G; the first snapshot has sup G = 0.01.
    let expect = (t.tau[0] / 4.0).exp() + 0.01;
    assert!((t.rho_max[0] - expect).abs() <= 1e-12);
}
