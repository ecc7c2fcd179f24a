//! Gaussian-weighted Hermite analysis of the rescaled deviation `G`.
//!
//! The measure is `dν = (4π)^{-1/2} e^{−ξ²/4} dξ`; the unit eigenfunctions of
//! `𝓛u = u_ξξ − (ξ/2)u_ξ + u` are `h_k(ξ) = He_k(ξ/√2)/√(k!)` with
//! eigenvalue `1 − k/2`.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolabError};
use crate::flow::FlowTrajectory;
use crate::numerics::{CubicSpline, Pchip};
use crate::rescaled::{self, RescaledProfile};

/// Exponent of `ρ_max` in the augmentation of `Γ` and `Γ⁺`.
pub const RHO_AUGMENT_EXPONENT: f64 = 8.0 - 1.0 / 200.0;

/// Gauss–Hermite rule for weight `e^{−x²}` (Newton iteration on the
/// orthonormal recurrence, started from the usual asymptotic guesses).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let pim4 = PI.powf(-0.25);
    let nf = n as f64;
    let m = n.div_ceil(2);
    let mut z = 0.0_f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    // Ascending order.
    x.reverse();
    w.reverse();
    (x, w)
}

/// Quadrature for `ν`: nodes `ξ_i = 2x_i`, weights `w_i/√π`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    pub fn new(n: usize) -> Self {
        let (x, w) = gauss_hermite(n);
        let norm = PI.sqrt().recip();
        Self {
            nodes: x.iter().map(|v| 2.0 * v).collect(),
            weights: w.iter().map(|v| v * norm).collect(),
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }

    fn integrate_values(&self, v: &[f64]) -> f64 {
        v.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }
}

/// Orthonormal Hermite eigenfunctions with their quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermiteBasis {
    pub n_modes: usize,
    /// `coeffs[k][j]` multiplies `ξ^j` in `h_k`.
    pub coeffs: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub quad: Quadrature,
}

impl HermiteBasis {
    pub fn new(n_modes: usize, n_quad: usize) -> Self {
        // Probabilists' Hermite polynomials in x = ξ/√2.
        let mut he: Vec<Vec<f64>> = vec![vec![1.0], vec![0.0, 1.0]];
        for k in 1..n_modes.max(2) {
            let mut next = vec![0.0; k + 2];
            for (j, c) in he[k].iter().enumerate() {
                next[j + 1] += c;
            }
            for (j, c) in he[k - 1].iter().enumerate() {
                next[j] -= k as f64 * c;
            }
            he.push(next);
        }
        let mut fact = 1.0;
        let mut coeffs = Vec::with_capacity(n_modes);
        for (k, poly) in he.iter().enumerate().take(n_modes) {
            if k > 0 {
                fact *= k as f64;
            }
            let norm = fact.sqrt();
            coeffs.push(
                poly.iter()
                    .enumerate()
                    .map(|(j, c)| c / (2.0_f64.sqrt().powi(j as i32) * norm))
                    .collect(),
            );
        }
        Self {
            n_modes,
            coeffs,
            eigenvalues: (0..n_modes).map(|k| 1.0 - k as f64 / 2.0).collect(),
            quad: Quadrature::new(n_quad),
        }
    }

    /// `h_k(ξ)` via the normalised three-term recurrence.
    pub fn eval(&self, k: usize, xi: f64) -> f64 {
        let x = xi / 2.0_f64.sqrt();
        let (mut prev, mut cur) = (0.0, 1.0);
        for j in 0..k {
            let jf = j as f64;
            let next = (x * cur - jf.sqrt() * prev) / (jf + 1.0).sqrt();
            prev = cur;
            cur = next;
        }
        cur
    }
}

/// Evaluate a polynomial given by ascending coefficients.
pub fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * x + v)
}

pub fn poly_derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(j, v)| j as f64 * v).collect()
}

/// `𝓛u = u'' − (ξ/2)u' + u` on polynomial coefficients.
pub fn apply_l(c: &[f64]) -> Vec<f64> {
    let d1 = poly_derivative(c);
    let d2 = poly_derivative(&d1);
    let mut out = c.to_vec();
    for (j, v) in d2.iter().enumerate() {
        out[j] += v;
    }
    for (j, v) in d1.iter().enumerate() {
        out[j + 1] -= 0.5 * v;
    }
    out
}

/// Function samples on an increasing `ξ` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Samples {
    pub xi: Vec<f64>,
    pub values: Vec<f64>,
}

impl Samples {
    pub fn from_fn<F: Fn(f64) -> f64>(xi: Vec<f64>, f: F) -> Self {
        let values = xi.iter().map(|&x| f(x)).collect();
        Self { xi, values }
    }

    /// Values and derivatives at the quadrature nodes; nodes outside the
    /// sampled support get zero (extension by zero), reported by the flag.
    fn at_nodes(&self, quad: &Quadrature) -> (Vec<f64>, Vec<f64>, bool) {
        let spline = CubicSpline::new(&self.xi, &self.values);
        let (a, b) = spline.support();
        let mut extended = false;
        let mut v = Vec::with_capacity(quad.nodes.len());
        let mut d = Vec::with_capacity(quad.nodes.len());
        for &x in &quad.nodes {
            if x < a || x > b {
                extended = true;
                v.push(0.0);
                d.push(0.0);
            } else {
                v.push(spline.eval(x));
                d.push(spline.derivative(x));
            }
        }
        (v, d, extended)
    }
}

/// A quadrature value with the extension-by-zero flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weighted {
    pub value: f64,
    pub extended: bool,
}

/// `⟨u, v⟩_H = ∫ u v dν`.
pub fn inner(u: &Samples, v: &Samples, quad: &Quadrature) -> Weighted {
    let (a, _, ea) = u.at_nodes(quad);
    let (b, _, eb) = v.at_nodes(quad);
    let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    Weighted {
        value: quad.integrate_values(&prod),
        extended: ea || eb,
    }
}

/// `‖u‖_D = (∫ u² + u_ξ² dν)^{1/2}`, differentiating the spline interpolant.
pub fn dnorm(u: &Samples, quad: &Quadrature) -> Weighted {
    let (a, d, extended) = u.at_nodes(quad);
    let sq: Vec<f64> = a.iter().zip(&d).map(|(x, y)| x * x + y * y).collect();
    Weighted {
        value: quad.integrate_values(&sq).sqrt(),
        extended,
    }
}

/// Smooth plateau: 1 on `|t| ≤ 1/2`, 0 on `|t| ≥ 1`, and in between
/// `S(2(1 − |t|))` with `S(u) = e^{−1/u} / (e^{−1/u} + e^{−1/(1−u)})`.
pub fn eta(t: f64) -> f64 {
    let a = t.abs();
    if a <= 0.5 {
        return 1.0;
    }
    if a >= 1.0 {
        return 0.0;
    }
    let u = 2.0 * (1.0 - a);
    let f = |v: f64| if v <= 0.0 { 0.0 } else { (-1.0 / v).exp() };
    let p = f(u);
    p / (p + f(1.0 - u))
}

/// `Ĝ = η(δ^{exponent} ξ)·G`.
pub fn cutoff(g: &RescaledProfile, delta: f64, exponent: f64) -> Samples {
    let k = delta.powf(exponent);
    Samples {
        xi: g.xi.clone(),
        values: g.xi.iter().zip(&g.g).map(|(x, v)| eta(k * x) * v).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub a: Vec<f64>,
    pub norm2: f64,
    pub gamma_plus: f64,
    pub gamma_zero: f64,
    pub gamma_minus: f64,
    /// `‖Ĝ‖² − Σ a_k²`.
    pub parseval_defect: f64,
    /// `γ⁻` was negative beyond tolerance before clamping.
    pub clamped: bool,
    pub extended: bool,
}

pub fn project(ghat: &Samples, basis: &HermiteBasis) -> Projection {
    let (v, _, extended) = ghat.at_nodes(&basis.quad);
    let a: Vec<f64> = (0..basis.n_modes)
        .map(|k| {
            let prod: Vec<f64> = basis
                .quad
                .nodes
                .iter()
                .zip(&v)
                .map(|(x, g)| g * basis.eval(k, *x))
                .collect();
            basis.quad.integrate_values(&prod)
        })
        .collect();
    let sq: Vec<f64> = v.iter().map(|g| g * g).collect();
    let norm2 = basis.quad.integrate_values(&sq);
    let gp = a[0] * a[0] + a[1] * a[1];
    let g0 = a[2] * a[2];
    let gm_raw = norm2 - gp - g0;
    let clamped = gm_raw < -1e-10;
    Projection {
        parseval_defect: norm2 - a.iter().map(|x| x * x).sum::<f64>(),
        a,
        norm2,
        gamma_plus: gp,
        gamma_zero: g0,
        gamma_minus: gm_raw.max(0.0),
        clamped,
        extended,
    }
}

/// Per-`τ` spectral quantities over a window (increasing `τ`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct SpectralReport {
    pub tau: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub gamma: Vec<f64>,
    pub gamma_plus: Vec<f64>,
    pub gamma_zero: Vec<f64>,
    pub gamma_minus: Vec<f64>,
    /// Running sups; `Gamma` and `Gamma_plus` include `ρ_max^{8−1/200}`.
    pub Gamma: Vec<f64>,
    pub Gamma_plus: Vec<f64>,
    pub Gamma_zero: Vec<f64>,
    pub Gamma_minus: Vec<f64>,
    /// The same sups without the `ρ_max` augmentation.
    pub Gamma_raw: Vec<f64>,
    pub Gamma_plus_raw: Vec<f64>,
    pub rho_max: Vec<f64>,
    pub rho: Vec<f64>,
    pub delta: Vec<f64>,
    pub alpha: Vec<f64>,
    pub A: Vec<f64>,
    pub cutoff_exponent: f64,
    pub warnings: Vec<String>,
}

fn running_sup(v: &[f64]) -> Vec<f64> {
    let mut m = f64::NEG_INFINITY;
    v.iter()
        .map(|x| {
            m = m.max(*x);
            m
        })
        .collect()
}

impl SpectralReport {
    /// Assemble the running sups from per-`τ` mode energies.
    #[allow(clippy::too_many_arguments)]
    pub fn from_energies(
        tau: Vec<f64>,
        a: Vec<Vec<f64>>,
        gamma_plus: Vec<f64>,
        gamma_zero: Vec<f64>,
        gamma_minus: Vec<f64>,
        rho_max: Vec<f64>,
        rho: Vec<f64>,
        delta: Vec<f64>,
        cutoff_exponent: f64,
    ) -> Self {
        let n = tau.len();
        let aug: Vec<f64> = rho_max.iter().map(|r| r.max(0.0).powf(RHO_AUGMENT_EXPONENT)).collect();
        let gamma: Vec<f64> = (0..n).map(|i| gamma_plus[i] + gamma_zero[i] + gamma_minus[i]).collect();
        let gp_aug: Vec<f64> = (0..n).map(|i| gamma_plus[i] + aug[i]).collect();
        let g_aug: Vec<f64> = (0..n).map(|i| gamma[i] + aug[i]).collect();
        let alpha: Vec<f64> = a.iter().map(|c| c.get(2).copied().unwrap_or(0.0)).collect();
        let abs_alpha: Vec<f64> = alpha.iter().map(|x| x.abs()).collect();
        Self {
            Gamma: running_sup(&g_aug),
            Gamma_plus: running_sup(&gp_aug),
            Gamma_zero: running_sup(&gamma_zero),
            Gamma_minus: running_sup(&gamma_minus),
            Gamma_raw: running_sup(&gamma),
            Gamma_plus_raw: running_sup(&gamma_plus),
            A: running_sup(&abs_alpha),
            tau,
            a,
            gamma,
            gamma_plus,
            gamma_zero,
            gamma_minus,
            rho_max,
            rho,
            delta,
            alpha,
            cutoff_exponent,
            warnings: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }
}

/// Full spectral report for a trajectory.
pub fn analyze(traj: &FlowTrajectory, basis: &HermiteBasis, exponent: f64) -> Result<SpectralReport> {
    if traj.is_empty() {
        return Err(SolabError::InsufficientData("empty trajectory".into()));
    }
    let views: Vec<RescaledProfile> = traj.snapshots.iter().map(rescaled::to_rescaled).collect();
    analyze_rescaled(&views, basis, exponent)
}

pub fn analyze_rescaled(views: &[RescaledProfile], basis: &HermiteBasis, exponent: f64) -> Result<SpectralReport> {
    let tr = rescaled::trackers_from_rescaled(views);
    let mut order: Vec<usize> = (0..views.len()).collect();
    order.sort_by(|&a, &b| views[a].tau.partial_cmp(&views[b].tau).expect("finite τ"));
    let mut warnings = Vec::new();
    let (mut a, mut gp, mut g0, mut gm) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (j, &i) in order.iter().enumerate() {
        let ghat = cutoff(&views[i], tr.delta[j], exponent);
        let p = project(&ghat, basis);
        if p.clamped {
            warnings.push(format!("gamma_minus clamped at tau = {}", views[i].tau));
        }
        a.push(p.a);
        gp.push(p.gamma_plus);
        g0.push(p.gamma_zero);
        gm.push(p.gamma_minus);
    }
    let mut report = SpectralReport::from_energies(tr.tau, a, gp, g0, gm, tr.rho_max, tr.rho, tr.delta, exponent);
    report.warnings = warnings;
    Ok(report)
}

/// Minimal constants in the three recursion inequalities at one `τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecursionStep {
    pub tau: f64,
    pub c_plus: f64,
    pub c_zero: f64,
    pub c_minus: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionLedger {
    pub cap: f64,
    /// `Γ`-level inequalities.
    pub gamma_sup_steps: Vec<RecursionStep>,
    /// `γ`-level inequalities with the exponential and `e^{2τ}` terms.
    pub gamma_steps: Vec<RecursionStep>,
    pub pass: bool,
}

/// Check the one-unit-of-`τ` recursion inequalities, interpolating the
/// series (monotone cubic) to unit spacing ending at the last sample.
#[allow(non_snake_case)]
pub fn mode_recursion_check(report: &SpectralReport, cap: f64) -> Result<RecursionLedger> {
    let n = report.len();
    if n < 2 || report.tau[n - 1] - report.tau[0] < 2.0 {
        return Err(SolabError::InsufficientData(
            "recursion check needs a window of at least 2 in tau".into(),
        ));
    }
    let t = &report.tau;
    let Gp = Pchip::new(t, &report.Gamma_plus);
    let G0 = Pchip::new(t, &report.Gamma_zero);
    let Gm = Pchip::new(t, &report.Gamma_minus);
    let G = Pchip::new(t, &report.Gamma);
    let gp = Pchip::new(t, &report.gamma_plus);
    let g0 = Pchip::new(t, &report.gamma_zero);
    let gm = Pchip::new(t, &report.gamma_minus);
    let g = Pchip::new(t, &report.gamma);
    let dl = Pchip::new(t, &report.delta);
    let guard = |num: f64, den: f64| if num <= 0.0 { 0.0 } else if den > 0.0 { num / den } else { f64::INFINITY };
    let mut sup_steps = Vec::new();
    let mut steps = Vec::new();
    let mut tau = t[n - 1];
    while tau - 1.0 >= t[0] - 1e-12 {
        let d = dl.eval(tau).max(0.0);
        let d200 = d.powf(1.0 / 200.0);
        let gam = G.eval(tau);
        let den = d200 * gam;
        let cp = guard(Gp.eval(tau - 1.0) - Gp.eval(tau) / E, den);
        let c0 = guard((G0.eval(tau - 1.0) - G0.eval(tau)).abs(), den);
        let cm = guard(E * Gm.eval(tau) - Gm.eval(tau - 1.0), den);
        sup_steps.push(RecursionStep {
            tau,
            c_plus: cp,
            c_zero: c0,
            c_minus: cm,
            pass: cp <= cap && c0 <= cap && cm <= cap,
        });
        // γ-level: sup over [τ−1, τ] from samples inside plus the ends.
        let mut sup_g = g.eval(tau).max(g.eval(tau - 1.0));
        for (k, &tk) in t.iter().enumerate() {
            if tk >= tau - 1.0 && tk <= tau {
                sup_g = sup_g.max(report.gamma[k]);
            }
        }
        let tail = if d > 0.0 { (-d.powf(-1.0 / 50.0) / 64.0).exp() } else { 0.0 } + (2.0 * tau).exp();
        let den_g = d200 * sup_g + tail;
        let cp = guard(gp.eval(tau - 1.0) - gp.eval(tau) / E, den_g);
        let c0 = guard((g0.eval(tau - 1.0) - g0.eval(tau)).abs() - d200 * sup_g, tail);
        let cm = guard(E * gm.eval(tau) - gm.eval(tau - 1.0), den_g);
        steps.push(RecursionStep {
            tau,
            c_plus: cp,
            c_zero: c0,
            c_minus: cm,
            pass: cp <= cap && c0 <= cap && cm <= cap,
        });
        tau -= 1.0;
    }
    sup_steps.reverse();
    steps.reverse();
    let pass = sup_steps.iter().all(|s| s.pass);
    Ok(RecursionLedger {
        cap,
        gamma_sup_steps: sup_steps,
        gamma_steps: steps,
        pass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DichotomyLabel {
    NeutralDominates,
    PositiveDominates,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dichotomy {
    pub label: DichotomyLabel,
    /// `(Γ⁺ + Γ⁻)/Γ⁰`.
    pub neutral_ratio: Vec<f64>,
    /// `(Γ⁰ + Γ⁻)/Γ⁺`.
    pub positive_ratio: Vec<f64>,
    pub threshold: f64,
}

/// Fraction of consecutive pairs along which the ratio decreases toward
/// small `τ`.
fn trends_down_toward_small_tau(r: &[f64]) -> bool {
    let n = r.len();
    let good = r.windows(2).filter(|w| w[0] <= w[1]).count();
    good as f64 >= 0.8 * (n - 1) as f64 && r[0] < r[n - 1]
}

/// Classify which mode family dominates toward the small-`τ` end.
#[allow(non_snake_case)]
pub fn dichotomy_classify(report: &SpectralReport, threshold: f64) -> Result<Dichotomy> {
    let n = report.len();
    if n < 5 {
        return Err(SolabError::InsufficientData(format!(
            "dichotomy needs at least 5 snapshots, got {n}"
        )));
    }
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { f64::INFINITY };
    let neutral_ratio: Vec<f64> = (0..n)
        .map(|i| ratio(report.Gamma_plus[i] + report.Gamma_minus[i], report.Gamma_zero[i]))
        .collect();
    let positive_ratio: Vec<f64> = (0..n)
        .map(|i| ratio(report.Gamma_zero[i] + report.Gamma_minus[i], report.Gamma_plus[i]))
        .collect();
    let dominated = |r: &[f64]| r[0].is_finite() && r[0] < threshold && trends_down_toward_small_tau(r);
    let label = if dominated(&neutral_ratio) {
        DichotomyLabel::NeutralDominates
    } else if dominated(&positive_ratio) {
        DichotomyLabel::PositiveDominates
    } else {
        DichotomyLabel::Inconclusive
    };
    Ok(Dichotomy {
        label,
        neutral_ratio,
        positive_ratio,
        threshold,
    })
}
