//! Synthetic fixtures shared by the integration tests.
#![allow(dead_code)]

use solab_core::spectral::SpectralReport;

pub const TAU_END: f64 = -20.0;

pub fn taus(n: usize, spacing: f64) -> Vec<f64> {
    (0..n).map(|i| TAU_END - spacing * (n - 1 - i) as f64).collect()
}

/// Report assembled directly from mode energies, with no `ρ` augmentation.
pub fn report(tau: Vec<f64>, gp: Vec<f64>, g0: Vec<f64>, gm: Vec<f64>, delta: f64) -> SpectralReport {
    let n = tau.len();
    let a = (0..n).map(|i| vec![gp[i].sqrt(), 0.0, g0[i].sqrt()]).collect();
    SpectralReport::from_energies(tau, a, gp, g0, gm, vec![0.0; n], vec![0.0; n], vec![delta; n], 0.66)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Synthetic {
    NeutralDominant,
    PositiveDominant,
    Balanced,
}

/// Ten snapshots one unit of `τ` apart; the dominant family is constant and
/// the others decay geometrically toward small `τ`.
pub fn dichotomy_series(kind: Synthetic) -> SpectralReport {
    let tau = taus(10, 1.0);
    let small: Vec<f64> = tau.iter().map(|t| 0.01 * (t - TAU_END).exp()).collect();
    let one = vec![1.0; tau.len()];
    let (gp, g0, gm) = match kind {
        Synthetic::NeutralDominant => (small.clone(), one, small),
        Synthetic::PositiveDominant => (one, small.clone(), small),
        Synthetic::Balanced => (one.clone(), one.clone(), one),
    };
    report(tau, gp, g0, gm, 1e-3)
}

/// `Γ⁺ = Γ = e^{τ/2}`, sampled every half unit; the minimal `Γ⁺` constant is
/// `(e^{−1/2} − e^{−1})δ^{−1/200}`.
pub fn geometric_series(delta: f64) -> SpectralReport {
    let tau = taus(13, 0.5);
    let gp: Vec<f64> = tau.iter().map(|t| (t / 2.0).exp()).collect();
    let zero = vec![0.0; tau.len()];
    report(tau, gp, zero.clone(), zero, delta)
}

pub fn geometric_constant(delta: f64) -> f64 {
    ((-0.5_f64).exp() - (-1.0_f64).exp()) * delta.powf(-1.0 / 200.0)
}
