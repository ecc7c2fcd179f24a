//! Run configuration tree; parsed from `key = value` text by [`crate::io`].

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::asymptotics::RegionParams;
use crate::error::{Result, SolabError};
use crate::flow::ErrorModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    /// Number of cells (even, so that `z = 0` is a node).
    pub n: usize,
    /// Half-width of the grid; `None` picks a seed-dependent default.
    pub zmax: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedProfile {
    Cylinder,
    Sphere,
    NeutralAnsatz,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub s1: f64,
    pub s0: f64,
    pub snapshots: usize,
    pub seed: SeedProfile,
    pub cfl: f64,
    pub min_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    pub n_modes: usize,
    pub cutoff_exponent: f64,
    pub n_quad: usize,
    /// Cap on the fitted recursion constants.
    pub recursion_cap: f64,
    pub dichotomy_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierConfig {
    pub a: f64,
    /// Samples on the uniform part of the verification grid.
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BryantConfig {
    pub r_max: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub formats: Vec<OutputFormat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub flow: FlowConfig,
    pub error: ErrorModel,
    pub spectral: SpectralConfig,
    pub barrier: BarrierConfig,
    pub bryant: BryantConfig,
    pub asymptotics: RegionParams,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig { n: 512, zmax: None },
            flow: FlowConfig {
                s1: 100.0,
                s0: 50.0,
                snapshots: 10,
                seed: SeedProfile::Cylinder,
                cfl: crate::flow::DEFAULT_CFL,
                min_steps: 1,
            },
            error: ErrorModel::standard(),
            spectral: SpectralConfig {
                n_modes: 8,
                cutoff_exponent: 0.01,
                n_quad: 64,
                recursion_cap: 1.0,
                dichotomy_threshold: 0.5,
            },
            barrier: BarrierConfig { a: 50.0, samples: 10_000 },
            bryant: BryantConfig { r_max: 1000.0, tol: 1e-8 },
            asymptotics: RegionParams::default(),
            output: OutputConfig {
                dir: PathBuf::from("out"),
                formats: vec![OutputFormat::Csv, OutputFormat::Json],
            },
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SolabError::Config(m));
        let finite = [
            ("flow.s1", self.flow.s1),
            ("flow.s0", self.flow.s0),
            ("flow.cfl", self.flow.cfl),
            ("spectral.cutoff_exponent", self.spectral.cutoff_exponent),
            ("barrier.a", self.barrier.a),
            ("bryant.r_max", self.bryant.r_max),
        ];
        for (k, v) in finite {
            if !v.is_finite() {
                return bad(format!("{k} must be finite"));
            }
        }
        if self.grid.n < 64 {
            return bad(format!("grid.n = {} must be at least 64", self.grid.n));
        }
        if self.grid.n % 2 != 0 {
            return bad(format!("grid.n = {} must be even", self.grid.n));
        }
        if let Some(z) = self.grid.zmax {
            if !(z.is_finite() && z > 0.0) {
                return bad("grid.zmax must be positive".into());
            }
        }
        if !(self.flow.s0 > 0.0) {
            return bad("flow.s0 must be positive".into());
        }
        if !(self.flow.s0 < self.flow.s1) {
            return bad(format!(
                "flow.s0 = {} must be smaller than flow.s1 = {}",
                self.flow.s0, self.flow.s1
            ));
        }
        if self.flow.snapshots < 2 {
            return bad("flow.snapshots must be at least 2".into());
        }
        if !(self.flow.cfl > 0.0 && self.flow.cfl <= 0.5) {
            return bad("flow.cfl must lie in (0, 0.5]".into());
        }
        if self.spectral.n_modes < 3 || self.spectral.n_modes > 32 {
            return bad("spectral.n_modes must lie in [3, 32]".into());
        }
        if !(self.spectral.cutoff_exponent > 0.0 && self.spectral.cutoff_exponent <= 1.0) {
            return bad("spectral.cutoff_exponent must lie in (0, 1]".into());
        }
        if self.spectral.n_quad < 16 || self.spectral.n_quad > 200 {
            return bad("spectral.n_quad must lie in [16, 200]".into());
        }
        if self.barrier.samples < 100 {
            return bad("barrier.samples must be at least 100".into());
        }
        if !(self.bryant.r_max > 0.0) {
            return bad("bryant.r_max must be positive".into());
        }
        self.asymptotics.validate()?;
        Ok(())
    }
}
