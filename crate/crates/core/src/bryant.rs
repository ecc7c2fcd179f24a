//! The 3d Bryant soliton as a rotationally symmetric ODE integrated from its
//! tip, normalised so that `R(0) = 1`.
//!
//! With `Ric = ∇²f` and warping function `φ(r)`, writing `ψ = φ′`, `w = f′`:
//!
//! ```text
//! φ′ = ψ,   ψ′ = −wψ + (1 − ψ²)/φ,   w′ = −2ψ′/φ,
//! R  = 4wψ/φ − 2(1 − ψ²)/φ²,         R + w² = 1 along solutions.
//! ```
//!
//! In this convention the potential is convex, so `f′` rises from 0 to 1.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolabError};
use crate::geometry::{self, RadialProfile};
use crate::numerics::{self, CubicSpline};

/// Tip series `φ = r + c₃r³ + c₅r⁵ + c₇r⁷`, `f′ = w₁r + w₃r³ + w₅r⁵`.
pub const C3: f64 = -1.0 / 36.0;
pub const C5: f64 = 29.0 / 21600.0;
pub const C7: f64 = -2603.0 / 38_102_400.0;
pub const W1: f64 = 1.0 / 3.0;
pub const W3: f64 = -2.0 / 135.0;
pub const W5: f64 = 23.0 / 28350.0;

/// Radius at which the integration leaves the series.
pub const R_START: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BryantProfile {
    pub r: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_prime: Vec<f64>,
    pub fprime: Vec<f64>,
    #[serde(rename = "R")]
    pub scalar: Vec<f64>,
    pub note: String,
}

/// Series state `(φ, φ′, f′)` at small `r`.
pub fn tip_series(r: f64) -> [f64; 3] {
    let r2 = r * r;
    let phi = r * (1.0 + r2 * (C3 + r2 * (C5 + r2 * C7)));
    let dphi = 1.0 + r2 * (3.0 * C3 + r2 * (5.0 * C5 + r2 * 7.0 * C7));
    let w = r * (W1 + r2 * (W3 + r2 * W5));
    [phi, dphi, w]
}

fn field(y: &[f64]) -> Vec<f64> {
    let (phi, psi, w) = (y[0], y[1], y[2]);
    let dpsi = -w * psi + (1.0 - psi * psi) / phi;
    vec![psi, dpsi, -2.0 * dpsi / phi]
}

pub fn scalar_from_state(y: &[f64]) -> f64 {
    let (phi, psi, w) = (y[0], y[1], y[2]);
    4.0 * w * psi / phi - 2.0 * (1.0 - psi * psi) / (phi * phi)
}

/// Step-size rule: uniform near the tip, proportional to `r` further out,
/// capped at `h_max`. `scale` refines all three uniformly.
fn step_size(r: f64, scale: f64) -> f64 {
    let h_min = 1e-4 * scale;
    let h_max = 0.05 * scale;
    (0.01 * scale * r).clamp(h_min, h_max)
}

/// Integrate to `r_max` with the default step rule and check the invariants.
pub fn solve_bryant(r_max: f64, tol: f64) -> Result<BryantProfile> {
    solve_bryant_scaled(r_max, tol, 1.0)
}

/// As [`solve_bryant`] with every step multiplied by `scale`.
pub fn solve_bryant_scaled(r_max: f64, tol: f64, scale: f64) -> Result<BryantProfile> {
    if !(r_max > R_START && r_max.is_finite()) {
        return Err(SolabError::Parameter(format!("r_max = {r_max} must exceed {R_START}")));
    }
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(SolabError::Parameter("step scale must lie in (0, 1]".into()));
    }
    let mut r = vec![0.0];
    let mut phi = vec![0.0];
    let mut dphi = vec![1.0];
    let mut w = vec![0.0];
    let mut scal = vec![1.0];
    // Series samples on the uniform near-tip spacing.
    let h0 = step_size(0.0, scale);
    let mut k = 1;
    while (k as f64) * h0 < R_START * (1.0 - 1e-9) {
        let x = k as f64 * h0;
        let y = tip_series(x);
        r.push(x);
        phi.push(y[0]);
        dphi.push(y[1]);
        w.push(y[2]);
        scal.push(1.0 - y[2] * y[2]);
        k += 1;
    }
    let mut x = R_START;
    let mut y = tip_series(x).to_vec();
    let record = |x: f64, y: &[f64], r: &mut Vec<f64>, phi: &mut Vec<f64>, dphi: &mut Vec<f64>, w: &mut Vec<f64>, scal: &mut Vec<f64>| {
        r.push(x);
        phi.push(y[0]);
        dphi.push(y[1]);
        w.push(y[2]);
        scal.push(scalar_from_state(y));
    };
    record(x, &y, &mut r, &mut phi, &mut dphi, &mut w, &mut scal);
    while x < r_max {
        let mut h = step_size(x, scale);
        if x + h > r_max || r_max - (x + h) < 1e-3 * h {
            h = r_max - x;
        }
        y = numerics::rk4_step(x, &y, h, |_, v| field(v));
        x = if h == r_max - x { r_max } else { x + h };
        record(x, &y, &mut r, &mut phi, &mut dphi, &mut w, &mut scal);
        let drift = scal.last().copied().unwrap_or(0.0) + y[2] * y[2] - 1.0;
        if !(drift.abs() <= tol) {
            return Err(SolabError::Drift(format!(
                "|R + f'^2 - 1| = {:.3e} at r = {x}",
                drift.abs()
            )));
        }
    }
    Ok(BryantProfile {
        r,
        phi,
        phi_prime: dphi,
        fprime: w,
        scalar: scal,
        note: "R(0) = 1; R + (f')^2 = 1; Ric = Hess f, so f' increases from 0 toward 1".into(),
    })
}

/// Summary of the profile invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BryantInvariants {
    pub max_identity_drift: f64,
    pub phi_prime_decreasing: bool,
    pub scalar_decreasing: bool,
    pub final_phi_prime: f64,
    pub fprime_nonnegative: bool,
}

pub fn invariants(b: &BryantProfile) -> BryantInvariants {
    let max_identity_drift = b
        .scalar
        .iter()
        .zip(&b.fprime)
        .map(|(r, w)| (r + w * w - 1.0).abs())
        .fold(0.0, f64::max);
    BryantInvariants {
        max_identity_drift,
        phi_prime_decreasing: b.phi_prime.windows(2).all(|p| p[1] < p[0]),
        scalar_decreasing: b.scalar.windows(2).all(|p| p[1] < p[0]),
        final_phi_prime: *b.phi_prime.last().unwrap_or(&1.0),
        fprime_nonnegative: b.fprime.iter().all(|&w| w >= 0.0),
    }
}

impl BryantProfile {
    /// Interpolated `φ(r)` (natural cubic spline on the samples).
    pub fn phi_spline(&self) -> CubicSpline {
        CubicSpline::new(&self.r, &self.phi)
    }

    /// One-tipped radial profile `z = r`, `F = φ` (tip at the left end).
    pub fn to_profile(&self) -> Result<RadialProfile> {
        RadialProfile::new(self.r.clone(), self.phi.clone(), 1.0, false)
    }

    /// Radius at which `φ′` falls to `slope`, with `φ` there.
    pub fn where_slope(&self, slope: f64) -> Option<(f64, f64)> {
        let k = self.phi_prime.windows(2).position(|p| p[0] >= slope && p[1] < slope)?;
        let t = (self.phi_prime[k] - slope) / (self.phi_prime[k] - self.phi_prime[k + 1]);
        let r = self.r[k] + t * (self.r[k + 1] - self.r[k]);
        Some((r, self.phi_spline().eval(r)))
    }
}

/// Result of matching a snapshot's tip against the Bryant profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TipComparison {
    pub r_tip: f64,
    /// Tip length scale `R_tip^{-1/2}`.
    pub scale: f64,
    pub discrepancy: f64,
    pub overlap_points: usize,
}

/// Minimum number of samples required in the tip region.
pub const MIN_TIP_POINTS: usize = 20;

/// Distances from a tip and the corresponding radii, tip first.
fn tip_side(p: &RadialProfile) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = p.len();
    if p.f[0] == 0.0 {
        Some((p.z.iter().map(|z| z - p.z[0]).collect(), p.f.clone()))
    } else if p.f[n - 1] == 0.0 {
        Some((
            p.z.iter().rev().map(|z| p.z[n - 1] - z).collect(),
            p.f.iter().rev().copied().collect(),
        ))
    } else {
        None
    }
}

/// Tip scalar curvature: least-squares fit `R̄ ≈ A + B d² + C (h/d)²` over
/// the samples with `d_v ≤ d ≤ 3d_v`, where `d` is the distance to the tip,
/// `h` the local spacing and `d_v` the first distance exceeding `resolution`
/// spacings. The `(h/d)²` term absorbs the finite-difference error of the
/// orbital curvature near `F = 0`; `A` is the estimate.
pub fn estimate_tip_curvature(p: &RadialProfile, resolution: f64) -> Result<f64> {
    let (d, _) = tip_side(p).ok_or_else(|| SolabError::InsufficientData("insufficient resolution: no tip".into()))?;
    let flip = p.f[0] != 0.0;
    let rbar_eval = geometry::scalar_curvature(p)?;
    let range = p.eval_range();
    let mut rbar = vec![f64::NAN; p.len()];
    for (k, i) in range.enumerate() {
        rbar[i] = rbar_eval[k];
    }
    if flip {
        rbar.reverse();
    }
    let n = d.len();
    let v = (1..n - 1)
        .find(|&i| d[i] >= resolution * (d[i + 1] - d[i - 1]) * 0.5)
        .ok_or_else(|| SolabError::InsufficientData("insufficient resolution: tip not resolved".into()))?;
    let h = 0.5 * (d[v + 1] - d[v - 1]);
    let (mut rows, mut ys) = (Vec::new(), Vec::new());
    for i in v..n - 1 {
        if d[i] > 3.0 * d[v] {
            break;
        }
        if rbar[i].is_finite() {
            let q = h / d[i];
            rows.push(vec![1.0, d[i] * d[i], q * q]);
            ys.push(rbar[i]);
        }
    }
    if rows.len() < 4 {
        return Err(SolabError::InsufficientData("insufficient resolution: tip region too short".into()));
    }
    let c = numerics::least_squares(&rows, &ys)
        .ok_or_else(|| SolabError::InsufficientData("insufficient resolution: degenerate tip fit".into()))?;
    if !(c[0] > 0.0) {
        return Err(SolabError::InsufficientData("insufficient resolution: non-positive tip curvature".into()));
    }
    Ok(c[0])
}

/// Default resolution (grid spacings) for the tip curvature fit.
pub const TIP_RESOLUTION: f64 = 10.0;

/// Rescale the snapshot's tip by its curvature and report the sup relative
/// difference of radius profiles over the tip region `F ≤ 10·R_tip^{-1/2}`.
pub fn compare_tip(snapshot: &RadialProfile, bryant: &BryantProfile) -> Result<TipComparison> {
    let (d, f) = tip_side(snapshot).ok_or_else(|| SolabError::InsufficientData("insufficient resolution: snapshot has no tip".into()))?;
    let r_tip = estimate_tip_curvature(snapshot, TIP_RESOLUTION)?;
    let scale = 1.0 / r_tip.sqrt();
    let spline = bryant.phi_spline();
    let (_, r_end) = spline.support();
    let mut worst = 0.0_f64;
    let mut count = 0;
    for i in 1..d.len() {
        if f[i] > 10.0 * scale {
            break;
        }
        let rho = d[i] / scale;
        if rho > r_end {
            break;
        }
        let phi_b = spline.eval(rho);
        worst = worst.max((f[i] / scale - phi_b).abs() / phi_b);
        count += 1;
    }
    if count < MIN_TIP_POINTS {
        return Err(SolabError::InsufficientData(format!(
            "insufficient resolution: {count} tip-region samples (need {MIN_TIP_POINTS})"
        )));
    }
    Ok(TipComparison {
        r_tip,
        scale,
        discrepancy: worst,
        overlap_points: count,
    })
}
