mod common;

use std::f64::consts::SQRT_2;

use approx::assert_relative_eq;
use common::Synthetic;
use solab_core::flow;
use solab_core::rescaled::RescaledProfile;
use solab_core::spectral::{self, DichotomyLabel, HermiteBasis, Quadrature, Samples};

fn basis() -> HermiteBasis {
    HermiteBasis::new(8, 64)
}

#[test]
fn gauss_hermite_matches_reference_tables() {
    // Reference values from an independent evaluation (ascending nodes).
    let (x, w) = spectral::gauss_hermite(64);
    assert_relative_eq!(x[63], 10.526123167960547, max_relative = 1e-13);
    assert_relative_eq!(w[63], 5.535706535856702e-49, max_relative = 1e-10);
    assert_relative_eq!(x[32], 0.13830224498700971, max_relative = 1e-13);
    assert_relative_eq!(w[32], 0.2713774249413039, max_relative = 1e-12);
    assert!(x.windows(2).all(|p| p[0] < p[1]));
    assert_relative_eq!(w.iter().sum::<f64>(), std::f64::consts::PI.sqrt(), max_relative = 1e-13);
    let (x, w) = spectral::gauss_hermite(16);
    assert_relative_eq!(x[15], 4.688738939305819, max_relative = 1e-13);
    assert_relative_eq!(w[15], 2.6548074740111673e-10, max_relative = 1e-10);
    assert_relative_eq!(x[0], -x[15], max_relative = 1e-15);
}

#[test]
fn gaussian_moments() {
    let q = Quadrature::new(64);
    assert!((q.integrate(|_| 1.0) - 1.0).abs() <= 1e-12);
    assert!((q.integrate(|x| x * x) - 2.0).abs() <= 1e-8);
    assert!((q.integrate(|x| x.powi(4)) - 12.0).abs() <= 1e-8);
    assert!((q.integrate(|x| x.powi(6)) - 120.0).abs() <= 1e-8);
    assert!(q.integrate(|x| x.powi(5)).abs() <= 1e-10);
}

#[test]
fn basis_is_orthonormal() {
    let b = basis();
    for j in 0..8 {
        for k in 0..8 {
            let v = b.quad.integrate(|x| b.eval(j, x) * b.eval(k, x));
            let expect = if j == k { 1.0 } else { 0.0 };
            assert!((v - expect).abs() <= 1e-8, "<h{j}, h{k}> = {v}");
        }
    }
}

#[test]
fn recurrence_matches_coefficients() {
    let b = basis();
    for k in 0..8 {
        for x in [-3.1, -0.4, 0.0, 1.7, 5.0] {
            let p = spectral::poly_eval(&b.coeffs[k], x);
            assert!((b.eval(k, x) - p).abs() <= 1e-10 * p.abs().max(1.0));
        }
    }
    // h₂ = (ξ² − 2)/(2√2).
    assert_relative_eq!(b.eval(2, 3.0), 7.0 / (2.0 * SQRT_2), max_relative = 1e-14);
}

#[test]
fn eigen_relation() {
    let b = basis();
    for k in 0..8 {
        let lh = spectral::apply_l(&b.coeffs[k]);
        let lambda = b.eigenvalues[k];
        assert_eq!(lambda, 1.0 - k as f64 / 2.0);
        let defect = b
            .quad
            .integrate(|x| (spectral::poly_eval(&lh, x) - lambda * b.eval(k, x)).powi(2))
            .sqrt();
        assert!(defect <= 1e-6, "k = {k}: {defect:e}");
    }
}

#[test]
fn operator_is_self_adjoint() {
    let b = basis();
    let polys = [
        vec![0.3, -1.0, 0.5, 0.2],
        vec![1.0, 0.0, -0.25, 0.0, 0.05],
        vec![-0.7, 0.4, 0.0, 0.1, 0.0, -0.02],
    ];
    for u in &polys {
        for v in &polys {
            let (lu, lv) = (spectral::apply_l(u), spectral::apply_l(v));
            let a = b.quad.integrate(|x| spectral::poly_eval(&lu, x) * spectral::poly_eval(v, x));
            let c = b.quad.integrate(|x| spectral::poly_eval(u, x) * spectral::poly_eval(&lv, x));
            assert!((a - c).abs() <= 1e-8, "{a} vs {c}");
        }
    }
}

#[test]
fn plateau_function() {
    assert_eq!(spectral::eta(0.0), 1.0);
    assert_eq!(spectral::eta(-0.5), 1.0);
    assert_eq!(spectral::eta(1.0), 0.0);
    assert_eq!(spectral::eta(3.0), 0.0);
    assert!((spectral::eta(0.75) - 0.5).abs() <= 1e-15);
    let t: Vec<f64> = (0..=100).map(|i| 0.5 + 0.005 * i as f64).collect();
    assert!(t.windows(2).all(|w| spectral::eta(w[0]) >= spectral::eta(w[1])));
}

fn mode_view(tau: f64, amplitude: f64) -> RescaledProfile {
    let xi = flow::symmetric_grid(1000, 25.0).unwrap();
    let g = xi.iter().map(|&x| amplitude * (x * x - 2.0) / (2.0 * SQRT_2)).collect();
    RescaledProfile {
        xi,
        g,
        tau,
        closed: false,
    }
}

#[test]
fn projection_recovers_a_pure_mode() {
    let b = basis();
    let v = mode_view(-20.0, 1.0 / 40.0);
    let p = spectral::project(&Samples { xi: v.xi.clone(), values: v.g.clone() }, &b);
    assert_relative_eq!(p.a[2], 1.0 / 40.0, max_relative = 1e-9);
    for (k, a) in p.a.iter().enumerate() {
        if k != 2 {
            assert!(a.abs() <= 1e-10, "a{k} = {a:e}");
        }
    }
    assert!(p.parseval_defect.abs() <= 1e-10);
    assert!(p.gamma_minus <= 1e-10 && !p.clamped && !p.extended);
}

#[test]
fn short_samples_are_flagged_as_extended() {
    let b = basis();
    let xi = flow::symmetric_grid(100, 4.0).unwrap();
    let u = Samples::from_fn(xi, |x| x);
    let w = spectral::inner(&u, &u, &b.quad);
    assert!(w.extended);
    assert!(w.value < 2.0 && w.value > 1.0);
    assert!(spectral::dnorm(&u, &b.quad).extended);
}

#[test]
fn analysis_of_a_small_neutral_series() {
    // Small amplitude keeps δ small, so the cutoff plateau covers the
    // region where ν has mass and the projection is undisturbed.
    let b = basis();
    let eps = 1e-5;
    let views: Vec<RescaledProfile> = (0..6).map(|k| mode_view(-20.0 + 0.02 * k as f64, eps)).collect();
    let rep = spectral::analyze_rescaled(&views, &b, 0.66).unwrap();
    assert_eq!(rep.len(), 6);
    assert!(rep.delta[0] < 0.01);
    for k in 0..6 {
        assert_relative_eq!(rep.alpha[k], eps, max_relative = 1e-6);
        assert!(rep.gamma_minus[k] <= 1e-12 * rep.gamma_zero[k].max(1e-30) + 1e-20);
    }
    assert!(rep.Gamma.iter().zip(&rep.Gamma_raw).all(|(g, r)| g >= r));
    assert!(rep.A.windows(2).all(|w| w[0] <= w[1]));
    let d = spectral::dichotomy_classify(&rep, 0.5).unwrap();
    assert_eq!(d.label, DichotomyLabel::NeutralDominates);
}

#[test]
fn dichotomy_on_synthetic_series() {
    for (kind, label) in [
        (Synthetic::NeutralDominant, DichotomyLabel::NeutralDominates),
        (Synthetic::PositiveDominant, DichotomyLabel::PositiveDominates),
        (Synthetic::Balanced, DichotomyLabel::Inconclusive),
    ] {
        let d = spectral::dichotomy_classify(&common::dichotomy_series(kind), 0.5).unwrap();
        assert_eq!(d.label, label, "{kind:?}");
    }
}

#[test]
fn dichotomy_needs_five_snapshots() {
    let tau = common::taus(4, 1.0);
    let r = common::report(tau, vec![1.0; 4], vec![1.0; 4], vec![1.0; 4], 0.1);
    assert!(spectral::dichotomy_classify(&r, 0.5).is_err());
}

#[test]
fn recursion_recovers_geometric_constant() {
    for delta in [1e-3, 0.05] {
        let ledger = spectral::mode_recursion_check(&common::geometric_series(delta), 1.0).unwrap();
        let expect = common::geometric_constant(delta);
        assert!(ledger.gamma_sup_steps.len() >= 5);
        for step in &ledger.gamma_sup_steps {
            assert!((step.c_plus - expect).abs() <= 0.05 * expect, "{} vs {expect}", step.c_plus);
            assert_eq!((step.c_zero, step.c_minus), (0.0, 0.0));
        }
        assert!(ledger.pass);
        let strict = spectral::mode_recursion_check(&common::geometric_series(delta), 0.1).unwrap();
        assert!(!strict.pass);
    }
}

#[test]
fn recursion_needs_a_window() {
    let tau = common::taus(3, 0.5);
    let r = common::report(tau, vec![1.0; 3], vec![0.0; 3], vec![0.0; 3], 0.1);
    assert!(spectral::mode_recursion_check(&r, 1.0).is_err());
}
