//! Initial profiles: cylinder, round sphere and the neutral-mode ansatz
//! closed off by Bryant caps.

use crate::asymptotics::cylindrical_formula;
use crate::bryant::{self, BryantProfile};
use crate::error::{Result, SolabError};
use crate::numerics::CubicSpline;

/// `F ≡ √(2s)`.
pub fn cylinder(z: &[f64], s: f64) -> Vec<f64> {
    vec![(2.0 * s).sqrt(); z.len()]
}

/// Round sphere of radius `2√s`, which the zero-error flow keeps round
/// (`ρ² = 4s`). Centered at `z = 0`; zero beyond the tips.
pub fn round_sphere(z: &[f64], s: f64) -> Vec<f64> {
    let rho = 2.0 * s.sqrt();
    let half = std::f64::consts::FRAC_PI_2 * rho;
    z.iter()
        .map(|&v| if v.abs() < half { rho * (v / rho).cos() } else { 0.0 })
        .collect()
}

/// Half-width (in units of `√s`) over which the ansatz is used before the
/// caps take over.
pub const NEUTRAL_GLUE_L: f64 = 4.0;

/// Neutral-mode ansatz on `|z| ≤ L√s`, C¹-glued to scaled Bryant caps.
#[derive(Debug, Clone)]
pub struct NeutralSeed {
    pub s: f64,
    pub z_glue: f64,
    pub z_tip: f64,
    /// Bryant scale `λ`: the cap is `λ·φ_B((z_tip − |z|)/λ)`.
    pub lambda: f64,
    pub r_glue: f64,
    spline: CubicSpline,
}

impl NeutralSeed {
    pub fn new(s: f64, glue_l: f64) -> Result<Self> {
        if !(s > std::f64::consts::E.powi(2)) {
            return Err(SolabError::Parameter(format!("neutral seed needs s > e², got {s}")));
        }
        let b = bryant::solve_bryant(4000.0, 1e-6)?;
        Self::with_bryant(s, glue_l, &b)
    }

    pub fn with_bryant(s: f64, glue_l: f64, b: &BryantProfile) -> Result<Self> {
        let z_glue = glue_l * s.sqrt();
        let f_glue = cylindrical_formula(s, z_glue);
        let slope = z_glue / (2.0 * std::f64::consts::SQRT_2 * s.ln() * s.sqrt());
        if !(f_glue > 0.0) {
            return Err(SolabError::Parameter("ansatz vanishes before the glue point".into()));
        }
        let (r_glue, phi_glue) = b
            .where_slope(slope)
            .ok_or_else(|| SolabError::Parameter(format!("Bryant profile too short to reach slope {slope}")))?;
        let lambda = f_glue / phi_glue;
        Ok(Self {
            s,
            z_glue,
            z_tip: z_glue + lambda * r_glue,
            lambda,
            r_glue,
            spline: b.phi_spline(),
        })
    }

    pub fn eval(&self, z: f64) -> f64 {
        let a = z.abs();
        if a <= self.z_glue {
            cylindrical_formula(self.s, z)
        } else if a < self.z_tip {
            self.lambda * self.spline.eval((self.z_tip - a) / self.lambda)
        } else {
            0.0
        }
    }
}
