//! Curvature of rotationally symmetric 3-metrics `dz² + F(z)² g_{S²}`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolabError};
use crate::numerics;

/// Minimum number of interior samples a profile must carry.
pub const MIN_INTERIOR: usize = 8;

/// Slack used by the regime validation (`|F_z| ≤ 1`, `F_zz ≤ 0`).
pub const REGIME_TOL: f64 = 1e-6;

/// One level set: radius `F` of the symmetry sphere over arclength `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub z: Vec<f64>,
    pub f: Vec<f64>,
    pub s: f64,
    /// Both endpoints are tips (`F = 0`).
    pub closed: bool,
}

impl RadialProfile {
    /// Build and validate a profile.
    pub fn new(z: Vec<f64>, f: Vec<f64>, s: f64, closed: bool) -> Result<Self> {
        let p = Self { z, f, s, closed };
        p.validate()?;
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.z.len();
        if self.f.len() != n {
            return Err(SolabError::InvalidProfile {
                index: n.min(self.f.len()),
                reason: format!("z has {} samples but F has {}", n, self.f.len()),
            });
        }
        if n < MIN_INTERIOR + 2 {
            return Err(SolabError::InvalidProfile {
                index: 0,
                reason: format!("need at least {} interior points, got {}", MIN_INTERIOR, n.saturating_sub(2)),
            });
        }
        if !(self.s.is_finite() && self.s > 0.0) {
            return Err(SolabError::InvalidProfile {
                index: 0,
                reason: format!("s must be positive, got {}", self.s),
            });
        }
        for i in 0..n {
            if !self.z[i].is_finite() || !self.f[i].is_finite() {
                return Err(SolabError::InvalidProfile {
                    index: i,
                    reason: "non-finite sample".into(),
                });
            }
            if i > 0 && self.z[i] <= self.z[i - 1] {
                return Err(SolabError::InvalidProfile {
                    index: i,
                    reason: "z grid not strictly increasing".into(),
                });
            }
            let interior = i > 0 && i < n - 1;
            if interior && self.f[i] <= 0.0 {
                return Err(SolabError::InvalidProfile {
                    index: i,
                    reason: format!("F = {} at an interior point", self.f[i]),
                });
            }
            if !interior && self.f[i] < 0.0 {
                return Err(SolabError::InvalidProfile {
                    index: i,
                    reason: "negative F at an endpoint".into(),
                });
            }
        }
        if self.closed && (self.f[0] != 0.0 || self.f[n - 1] != 0.0) {
            let index = if self.f[0] != 0.0 { 0 } else { n - 1 };
            return Err(SolabError::InvalidProfile {
                index,
                reason: "closed profile must vanish at both endpoints".into(),
            });
        }
        Ok(())
    }

    /// Indices at which curvature is reported: all nodes with `F > 0`.
    pub fn eval_range(&self) -> std::ops::Range<usize> {
        let n = self.len();
        let lo = usize::from(self.f[0] == 0.0);
        let hi = if self.f[n - 1] == 0.0 { n - 1 } else { n };
        lo..hi
    }

    /// Discrete `(F_z, F_zz)` on the full grid.
    pub fn derivatives(&self) -> (Vec<f64>, Vec<f64>) {
        numerics::derivatives(&self.z, &self.f)
    }

    /// Reversed orientation `z ↦ −z`.
    pub fn reversed(&self) -> Self {
        Self {
            z: self.z.iter().rev().map(|v| -v).collect(),
            f: self.f.iter().rev().copied().collect(),
            s: self.s,
            closed: self.closed,
        }
    }

    /// Grid with z = 0 as a node, if any.
    pub fn origin_index(&self) -> Option<usize> {
        self.z.iter().position(|&v| v == 0.0)
    }
}

/// Pointwise curvature from given derivative values.
pub fn curvatures_from_derivatives(f: f64, fz: f64, fzz: f64) -> (f64, f64) {
    (-fzz / f, (1.0 - fz * fz) / (f * f))
}

/// Radial and orbital sectional curvatures at the evaluation points.
pub fn sectional_curvatures(profile: &RadialProfile) -> Result<(Vec<f64>, Vec<f64>)> {
    profile.validate()?;
    let (fz, fzz) = profile.derivatives();
    let range = profile.eval_range();
    let mut k_rad = Vec::with_capacity(range.len());
    let mut k_orb = Vec::with_capacity(range.len());
    for i in range {
        let (kr, ko) = curvatures_from_derivatives(profile.f[i], fz[i], fzz[i]);
        k_rad.push(kr);
        k_orb.push(ko);
    }
    Ok((k_rad, k_orb))
}

/// Ricci tensor components: `Ric_rad` (dz² coefficient) and the g_{S²}
/// coefficient `F²(K_rad + K_orb)`.
pub fn ricci(profile: &RadialProfile) -> Result<(Vec<f64>, Vec<f64>)> {
    let (k_rad, k_orb) = sectional_curvatures(profile)?;
    let range = profile.eval_range();
    let ric_rad = k_rad.iter().map(|k| 2.0 * k).collect();
    let ric_orb = range
        .zip(k_rad.iter().zip(&k_orb))
        .map(|(i, (kr, ko))| profile.f[i] * profile.f[i] * (kr + ko))
        .collect();
    Ok((ric_rad, ric_orb))
}

/// Scalar curvature `4K_rad + 2K_orb`.
pub fn scalar_curvature(profile: &RadialProfile) -> Result<Vec<f64>> {
    let (k_rad, k_orb) = sectional_curvatures(profile)?;
    Ok(k_rad.iter().zip(&k_orb).map(|(r, o)| 4.0 * r + 2.0 * o).collect())
}

pub fn max_radius(profile: &RadialProfile) -> f64 {
    profile.f.iter().fold(0.0_f64, |m, v| m.max(*v))
}

/// Outcome of the slope/concavity check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub max_abs_fz: f64,
    pub max_fzz: f64,
    pub ok: bool,
}

/// Check `|F_z| ≤ 1 + tol` and `F_zz ≤ tol` at the evaluation points.
pub fn regime_check(profile: &RadialProfile) -> RegimeReport {
    let (fz, fzz) = profile.derivatives();
    let mut max_abs_fz = 0.0_f64;
    let mut max_fzz = f64::NEG_INFINITY;
    let n = profile.len();
    for i in 1..n - 1 {
        max_abs_fz = max_abs_fz.max(fz[i].abs());
        max_fzz = max_fzz.max(fzz[i]);
    }
    RegimeReport {
        max_abs_fz,
        max_fzz,
        ok: max_abs_fz <= 1.0 + REGIME_TOL && max_fzz <= REGIME_TOL,
    }
}
