use std::sync::OnceLock;

use solab_core::barrier::{self, BarrierFunction, Provenance};
use solab_core::config::SeedProfile;
use solab_core::flow::{self, ErrorModel, FlowTrajectory};
use solab_core::geometry::RadialProfile;
use solab_core::numerics::linspace;
use solab_core::{RunConfig, SolabError};

fn built(a: f64) -> &'static BarrierFunction {
    static A50: OnceLock<BarrierFunction> = OnceLock::new();
    static A100: OnceLock<BarrierFunction> = OnceLock::new();
    let cell = if a == 50.0 { &A50 } else { &A100 };
    cell.get_or_init(|| barrier::construct_barrier(a).unwrap())
}

#[test]
fn constructed_barriers_verify() {
    for a in [50.0, 100.0] {
        let bf = built(a);
        assert_eq!(bf.provenance, Provenance::Constructed);
        assert_eq!(bf.domain(), (0.5 / a, barrier::right_end(a)));
        assert!(bf.x.len() >= 10_000);
        let v = barrier::verify_barrier(bf).unwrap();
        assert!(v.pass, "a = {a}: {:?} {:?} {:?}", v.ode_inner, v.ode_outer, v.properties);
        assert!(v.ode_inner.min_margin >= -1e-10 && v.ode_outer.min_margin >= -1e-10);
        for p in &v.properties {
            assert!(p.min_margin >= -1e-10, "{p:?}");
            assert!(p.points > 0, "{} never evaluated", p.name);
        }
        assert!(bf.psi[0] >= 1.5);
        let floor = a.powi(-4) / 32.0;
        assert!(bf.psi.iter().all(|&p| p >= floor));
        assert!(v.margin_ode.len() == bf.x.len() && v.margin_props.len() == bf.x.len());
    }
}

#[test]
fn parabolic_form_holds_on_a_grid() {
    for a in [50.0, 100.0] {
        let r = barrier::parabolic_check(built(a), 200, 1.0, 100.0).unwrap();
        assert_eq!(r.points, 40_000);
        assert!(r.pass, "a = {a}: {r:?}");
    }
    assert!(barrier::parabolic_check(built(50.0), 1, 1.0, 2.0).is_err());
    assert!(barrier::parabolic_check(built(50.0), 10, 2.0, 1.0).is_err());
}

#[test]
fn constant_candidate_fails() {
    let a = 50.0;
    let x = barrier::sample_grid(a, 1000);
    let n = x.len();
    let bf = BarrierFunction::user_supplied(a, 0.5, x, vec![1.0; n], vec![0.0; n]).unwrap();
    let v = barrier::verify_barrier(&bf).unwrap();
    assert!(!v.pass);
    // LHS vanishes for ψ ≡ 1, so the inner margin is exactly −a/2.
    assert!((v.ode_inner.min_margin + 25.0).abs() <= 1e-9);
}

#[test]
fn low_left_value_is_flagged() {
    let mut bf = built(50.0).clone();
    bf.psi[0] = 1.0;
    let v = barrier::verify_barrier(&bf).unwrap();
    assert!(!v.pass);
    let left = v.properties.iter().find(|p| p.name == "left_value_3/2").unwrap();
    assert!((left.min_margin + 0.5).abs() <= 1e-12);
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(matches!(barrier::construct_barrier(49.0), Err(SolabError::Parameter(_))));
    assert!(matches!(barrier::construct_barrier(f64::NAN), Err(SolabError::Parameter(_))));
    assert!(barrier::construct_barrier_with(50.0, 10).is_err());
    assert!(BarrierFunction::user_supplied(50.0, 0.5, vec![0.1, 0.2], vec![1.0; 2], vec![0.0; 2]).is_err());
}

#[test]
fn wrong_domain_is_a_mismatch() {
    let a = 50.0;
    let x = linspace(0.5 / a, 1.0, 200);
    let bf = BarrierFunction::user_supplied(a, 0.5, x, vec![1.0; 200], vec![0.0; 200]).unwrap();
    assert!(matches!(barrier::verify_barrier(&bf), Err(SolabError::DomainMismatch(_))));
}

#[test]
fn interpolation_reproduces_samples() {
    let bf = built(50.0);
    for i in (0..bf.x.len()).step_by(97) {
        assert!((bf.eval(bf.x[i]) - bf.psi[i]).abs() <= 1e-14 * bf.psi[i].abs().max(1.0));
    }
    let s: f64 = 7.0;
    let x = bf.x[500];
    assert_eq!(bf.parabolic(x * (2.0 * s).sqrt(), s), bf.eval(x * (2.0 * s).sqrt() / (2.0 * s).sqrt()));
}

fn sphere_profile(rho: f64, cells: usize) -> RadialProfile {
    let half = std::f64::consts::FRAC_PI_2 * rho;
    let z = linspace(-half, half, cells + 1);
    let mut f: Vec<f64> = z.iter().map(|v| rho * (v / rho).cos()).collect();
    f[0] = 0.0;
    f[cells] = 0.0;
    RadialProfile::new(z, f, rho * rho / 4.0, true).unwrap()
}

#[test]
fn u_on_the_sphere() {
    // F = ρ cos(z/ρ): u = F_z² = 1 − r²/ρ² on both arcs.
    let rho = 3.0;
    let arcs = barrier::u_from_profile(&sphere_profile(rho, 2000)).unwrap();
    assert_eq!(arcs.len(), 2);
    assert_eq!((arcs[0].direction, arcs[1].direction), (1, -1));
    for arc in &arcs {
        assert!(arc.r.windows(2).all(|w| w[0] < w[1]));
        for k in 0..arc.r.len() {
            let exact = 1.0 - (arc.r[k] / rho).powi(2);
            assert!((arc.u[k] - exact).abs() <= 1e-4, "r = {}: {} vs {exact}", arc.r[k], arc.u[k]);
        }
    }
}

#[test]
fn u_on_the_cylinder() {
    let z = linspace(-2.0, 2.0, 41);
    let p = RadialProfile::new(z, vec![2.0; 41], 2.0, false).unwrap();
    let arcs = barrier::u_from_profile(&p).unwrap();
    assert_eq!(arcs.len(), 1);
    assert_eq!(arcs[0].direction, 0);
    assert!(arcs[0].u.iter().all(|&u| u <= 1e-20));
    // Cylinder u ≡ 0 is a solution.
    assert_eq!(barrier::u_rhs(&ErrorModel::zero(), 2.0, 0.0, 0.0, 0.0), 0.0);
}

fn sphere_run(n: usize, snapshots: usize) -> FlowTrajectory {
    let mut cfg = RunConfig::default();
    cfg.flow.s1 = 4.0;
    cfg.flow.s0 = 3.6;
    cfg.flow.snapshots = snapshots;
    cfg.flow.seed = SeedProfile::Sphere;
    cfg.grid.n = n;
    flow::run(&cfg).unwrap()
}

#[test]
fn u_equation_residual_converges() {
    let l2: Vec<f64> = [(256, 9), (512, 17), (1024, 33)]
        .iter()
        .map(|&(n, k)| {
            barrier::u_residual(&sphere_run(n, k))
                .unwrap()
                .iter()
                .map(|r| r.l2)
                .fold(0.0, f64::max)
        })
        .collect();
    assert!(l2[2] < l2[1] && l2[1] < l2[0], "{l2:?}");
    assert!(l2[1] / l2[2] >= 2.5, "{l2:?}");
}

#[test]
fn cylinder_is_a_trivial_supersolution() {
    let mut cfg = RunConfig::default();
    cfg.grid.n = 128;
    cfg.flow.snapshots = 3;
    let traj = flow::run(&cfg).unwrap();
    let r = barrier::supersolution_check_with(&traj, built(50.0)).unwrap();
    assert!(r.hypothesis_ok);
    assert!((r.hypothesis_value - 1.0).abs() <= 1e-6);
    assert_eq!(r.pass, Some(true));
    assert!(r.points > 0);
}

#[test]
fn violated_hypothesis_gives_no_verdict() {
    let s: f64 = 10.0;
    let z = linspace(-5.0, 5.0, 101);
    let f: Vec<f64> = z.iter().map(|v| (2.0 * s).sqrt() * (1.0 + 0.01 * (-v * v).exp())).collect();
    let traj = FlowTrajectory::from_snapshots(vec![RadialProfile::new(z, f, s, false).unwrap()], ErrorModel::zero());
    let r = barrier::supersolution_check_with(&traj, built(50.0)).unwrap();
    assert!(!r.hypothesis_ok);
    assert_eq!(r.pass, None);
}
