//! Parabolic rescaling `ξ = z/√s`, `τ = −log s`, `G = F/√s − √2`, the
//! evolution of `G`, and the trackers `ρ_max`, `ρ`, `δ`.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolabError};
use crate::flow::{ErrorModel, FlowTrajectory};
use crate::geometry::RadialProfile;
use crate::numerics;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaledProfile {
    pub xi: Vec<f64>,
    pub g: Vec<f64>,
    pub tau: f64,
    pub closed: bool,
}

impl RescaledProfile {
    pub fn s(&self) -> f64 {
        (-self.tau).exp()
    }

    /// `G_ξ` by the same finite differences used for `F_z`.
    pub fn g_xi(&self) -> Vec<f64> {
        numerics::derivatives(&self.xi, &self.g).0
    }

    /// `G(0, τ)` (linear interpolation if 0 is not a node).
    pub fn at_origin(&self) -> f64 {
        numerics::interp_linear(&self.xi, &self.g, 0.0)
    }
}

pub fn to_rescaled(profile: &RadialProfile) -> RescaledProfile {
    let root = profile.s.sqrt();
    RescaledProfile {
        xi: profile.z.iter().map(|z| z / root).collect(),
        g: profile.f.iter().map(|f| f / root - SQRT_2).collect(),
        tau: -profile.s.ln(),
        closed: profile.closed,
    }
}

pub fn from_rescaled(r: &RescaledProfile) -> Result<RadialProfile> {
    let s = r.s();
    let root = s.sqrt();
    let mut f: Vec<f64> = r.g.iter().map(|g| (g + SQRT_2) * root).collect();
    if r.closed {
        let n = f.len();
        f[0] = 0.0;
        f[n - 1] = 0.0;
    }
    RadialProfile::new(r.xi.iter().map(|x| x * root).collect(), f, s, r.closed)
}

/// `G_τ` from the rescaled equation
///
/// ```text
/// G_τ = (√2+G)/2 − (ξ/2)G_ξ + G_ξξ − (1 − G_ξ²)/(√2+G)
///       − 2G_ξ ∫₀^ξ G_ξξ/(√2+G) − 𝓔^orb/(√2+G) + G_ξ ∫₀^ξ 𝓔^rad,
/// ```
///
/// with `𝓔^rad = e^{−τ}Ē^rad` and `𝓔^orb = Ē^orb` evaluated at
/// `F = e^{−τ/2}(√2+G)`. Tip endpoints (`√2 + G = 0`) carry 0.
pub fn g_rhs(profile: &RescaledProfile, model: &ErrorModel) -> Result<Vec<f64>> {
    let n = profile.xi.len();
    let anchor = profile
        .xi
        .iter()
        .position(|&x| x == 0.0)
        .ok_or_else(|| SolabError::Config("ξ = 0 must be a grid node".into()))?;
    let root_s = (-0.5 * profile.tau).exp();
    let w: Vec<f64> = profile.g.iter().map(|g| SQRT_2 + g).collect();
    let tip = |i: usize| profile.closed && (i == 0 || i == n - 1);
    for (i, &v) in w.iter().enumerate() {
        if !tip(i) && v <= 0.0 {
            return Err(SolabError::InvalidProfile {
                index: i,
                reason: format!("√2 + G = {v} is not positive"),
            });
        }
    }
    let (gx, gxx) = numerics::derivatives(&profile.xi, &profile.g);
    let e_tau = (-profile.tau).exp();
    let mut e_rad = Vec::with_capacity(n);
    let mut e_orb = Vec::with_capacity(n);
    for &wi in &w {
        let (er, eo) = model.at(root_s * wi);
        e_rad.push(e_tau * er);
        e_orb.push(eo);
    }
    let q: Vec<f64> = (0..n).map(|i| if tip(i) { 0.0 } else { gxx[i] / w[i] }).collect();
    let i1 = numerics::cumulative_trapezoid(&profile.xi, &q, anchor);
    let i2 = numerics::cumulative_trapezoid(&profile.xi, &e_rad, anchor);
    Ok((0..n)
        .map(|i| {
            if tip(i) {
                return 0.0;
            }
            w[i] / 2.0 - 0.5 * profile.xi[i] * gx[i] + gxx[i] - (1.0 - gx[i] * gx[i]) / w[i]
                - 2.0 * gx[i] * i1[i]
                - e_orb[i] / w[i]
                + gx[i] * i2[i]
        })
        .collect())
}

/// Windowed trackers for every snapshot (increasing `τ`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trackers {
    pub tau: Vec<f64>,
    /// `e^{τ/4} + sup_ξ G`.
    pub rho_max: Vec<f64>,
    /// Running sup of `ρ_max` over the window (a lower bound for the
    /// all-time quantity).
    pub rho: Vec<f64>,
    /// `ρ + sup_{σ≤τ} |G(0, σ)|` over the window.
    pub delta: Vec<f64>,
    pub window_start: f64,
}

pub fn trackers(traj: &FlowTrajectory) -> Trackers {
    let views: Vec<RescaledProfile> = traj.snapshots.iter().map(to_rescaled).collect();
    trackers_from_rescaled(&views)
}

/// Trackers from rescaled profiles; they are sorted by `τ` first.
pub fn trackers_from_rescaled(views: &[RescaledProfile]) -> Trackers {
    let mut order: Vec<usize> = (0..views.len()).collect();
    order.sort_by(|&a, &b| views[a].tau.partial_cmp(&views[b].tau).expect("finite τ"));
    let mut out = Trackers {
        tau: Vec::with_capacity(views.len()),
        rho_max: Vec::with_capacity(views.len()),
        rho: Vec::with_capacity(views.len()),
        delta: Vec::with_capacity(views.len()),
        window_start: order.first().map(|&i| views[i].tau).unwrap_or(f64::NAN),
    };
    let mut run_rho = f64::NEG_INFINITY;
    let mut run_g0 = 0.0_f64;
    for &i in &order {
        let v = &views[i];
        let sup_g = v.g.iter().fold(f64::NEG_INFINITY, |m, g| m.max(*g));
        let rm = (0.25 * v.tau).exp() + sup_g;
        run_rho = run_rho.max(rm);
        run_g0 = run_g0.max(v.at_origin().abs());
        out.tau.push(v.tau);
        out.rho_max.push(rm);
        out.rho.push(run_rho);
        out.delta.push(run_rho + run_g0);
    }
    out
}
