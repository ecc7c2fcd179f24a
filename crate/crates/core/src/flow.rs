//! Level-set profile flow `F(z, s)` in commuting variables, integrated with
//! `ds < 0` (the parabolically well-posed direction).
//!
//! The evolution is implemented in the algebraically equivalent form
//!
//! ```text
//! −F_s = F_zz − F⁻¹(1 − F_z²) − 2F_z ∫₀^z F_zz/F − F⁻¹E_orb + F_z ∫₀^z E_rad
//! ```
//!
//! obtained from the `(F_z/F)(0) − ∫₀^z F_z²/F²` form by integrating
//! `(F_z/F)_z = F_zz/F − F_z²/F²`. The rewritten form keeps `1 − F_z²`
//! together, which stays bounded at tips where `F → 0`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, SeedProfile};
use crate::error::{Result, SolabError};
use crate::geometry::{self, RadialProfile};
use crate::numerics;
use crate::seeds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Zero,
    Default,
    Custom,
}

/// Phenomenological stand-in for the ambient error terms.
///
/// `R_mod = 2/(2 + F²)`, `E_orb = c_orb·F²·R_mod²`, `E_rad = c_rad·R_mod²`.
/// `bound` is the constant `C` in `E_rad ≤ C F⁻⁴`, `E_orb ≤ C F⁻²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorModel {
    pub kind: ErrorKind,
    pub c_rad: f64,
    pub c_orb: f64,
    pub bound: f64,
}

impl ErrorModel {
    pub fn zero() -> Self {
        Self {
            kind: ErrorKind::Zero,
            c_rad: 0.0,
            c_orb: 0.0,
            bound: 0.0,
        }
    }

    /// `c_rad = c_orb = 1/2`, for which `C = 2` holds.
    pub fn standard() -> Self {
        Self {
            kind: ErrorKind::Default,
            c_rad: 0.5,
            c_orb: 0.5,
            bound: 2.0,
        }
    }

    pub fn custom(c_rad: f64, c_orb: f64, bound: f64) -> Result<Self> {
        for (name, v) in [("c_rad", c_rad), ("c_orb", c_orb), ("bound", bound)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(SolabError::Config(format!("error.{name} must be finite and nonnegative")));
            }
        }
        Ok(Self {
            kind: ErrorKind::Custom,
            c_rad,
            c_orb,
            bound,
        })
    }

    /// `(E_rad, E_orb)` at a single radius.
    pub fn at(&self, f: f64) -> (f64, f64) {
        match self.kind {
            ErrorKind::Zero => (0.0, 0.0),
            _ => {
                let r = 2.0 / (2.0 + f * f);
                (self.c_rad * r * r, self.c_orb * f * f * r * r)
            }
        }
    }
}

impl Default for ErrorModel {
    fn default() -> Self {
        Self::standard()
    }
}

/// Error terms on the profile grid; custom models are checked against their
/// declared bound.
pub fn eval_error(model: &ErrorModel, profile: &RadialProfile) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = profile.len();
    let mut e_rad = Vec::with_capacity(n);
    let mut e_orb = Vec::with_capacity(n);
    for (i, &f) in profile.f.iter().enumerate() {
        let (er, eo) = model.at(f);
        if model.kind == ErrorKind::Custom && f > 0.0 {
            let f2 = f * f;
            let slack = 1.0 + 1e-12;
            if er * f2 * f2 > model.bound * slack {
                return Err(SolabError::ModelRejected {
                    z: profile.z[i],
                    reason: format!("E_rad·F⁴ = {} exceeds C = {}", er * f2 * f2, model.bound),
                });
            }
            if eo * f2 > model.bound * slack {
                return Err(SolabError::ModelRejected {
                    z: profile.z[i],
                    reason: format!("E_orb·F² = {} exceeds C = {}", eo * f2, model.bound),
                });
            }
        }
        e_rad.push(er);
        e_orb.push(eo);
    }
    Ok((e_rad, e_orb))
}

/// Pieces of the right-hand side, shared with the rescaled and `H̃` views.
#[derive(Debug, Clone)]
pub struct RhsTerms {
    pub fz: Vec<f64>,
    pub fzz: Vec<f64>,
    pub e_rad: Vec<f64>,
    pub e_orb: Vec<f64>,
    /// `∫_{z₀}^z F_zz/F`.
    pub int_fzz_over_f: Vec<f64>,
    /// `∫_{z₀}^z E_rad`.
    pub int_e_rad: Vec<f64>,
}

/// Derivatives, error terms and nonlocal integrals anchored at node `anchor`.
pub fn rhs_terms(profile: &RadialProfile, model: &ErrorModel, anchor: usize) -> Result<RhsTerms> {
    let (fz, fzz) = profile.derivatives();
    let (e_rad, e_orb) = eval_error(model, profile)?;
    let q: Vec<f64> = profile
        .f
        .iter()
        .zip(&fzz)
        .map(|(&f, &d2)| if f > 0.0 { d2 / f } else { 0.0 })
        .collect();
    let int_fzz_over_f = numerics::cumulative_trapezoid(&profile.z, &q, anchor);
    let int_e_rad = numerics::cumulative_trapezoid(&profile.z, &e_rad, anchor);
    Ok(RhsTerms {
        fz,
        fzz,
        e_rad,
        e_orb,
        int_fzz_over_f,
        int_e_rad,
    })
}

fn origin(profile: &RadialProfile) -> Result<usize> {
    profile
        .origin_index()
        .ok_or_else(|| SolabError::Config("z = 0 must be a grid node".into()))
}

/// `F_s` on the profile grid. Tip endpoints (where `F = 0`) carry 0.
pub fn rhs(profile: &RadialProfile, model: &ErrorModel) -> Result<Vec<f64>> {
    profile.validate()?;
    let anchor = origin(profile)?;
    let t = rhs_terms(profile, model, anchor)?;
    let mut out = vec![0.0; profile.len()];
    for i in profile.eval_range() {
        let f = profile.f[i];
        let fz = t.fz[i];
        let minus_fs = t.fzz[i] - (1.0 - fz * fz) / f - 2.0 * fz * t.int_fzz_over_f[i] - t.e_orb[i] / f
            + fz * t.int_e_rad[i];
        out[i] = -minus_fs;
    }
    Ok(out)
}

/// Largest admissible `|ds|` for the profile's grid.
pub fn stability_bound(profile: &RadialProfile, cfl: f64) -> f64 {
    let h = profile
        .z
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    cfl * h * h
}

pub const DEFAULT_CFL: f64 = 0.2;

fn with_values(base: &RadialProfile, f: Vec<f64>) -> Result<RadialProfile> {
    let mut p = RadialProfile {
        z: base.z.clone(),
        f,
        s: base.s,
        closed: base.closed,
    };
    let n = p.len();
    if p.closed {
        // Tips sit where F extrapolates linearly to zero with |F_z| = 1.
        p.z[0] = p.z[1] - p.f[1];
        p.z[n - 1] = p.z[n - 2] + p.f[n - 2];
        p.f[0] = 0.0;
        p.f[n - 1] = 0.0;
    }
    for i in 1..n - 1 {
        if p.f[i] <= 0.0 {
            return Err(SolabError::Singularity { z: p.z[i], s: p.s });
        }
    }
    Ok(p)
}

/// One RK4 step of size `ds < 0`.
pub fn step(state: &RadialProfile, model: &ErrorModel, ds: f64) -> Result<RadialProfile> {
    step_with_cfl(state, model, ds, DEFAULT_CFL)
}

pub fn step_with_cfl(state: &RadialProfile, model: &ErrorModel, ds: f64, cfl: f64) -> Result<RadialProfile> {
    if !(ds < 0.0) {
        return Err(SolabError::StepDirection(ds));
    }
    let bound = stability_bound(state, cfl);
    if -ds > bound * (1.0 + 1e-12) {
        return Err(SolabError::StepTooLarge { ds: -ds, bound });
    }
    let n = state.len();
    let movable = |i: usize| !(state.closed && (i == 0 || i == n - 1));
    let stage = |base: &RadialProfile, k: &[f64], c: f64, s: f64| -> Result<RadialProfile> {
        let f: Vec<f64> = (0..n)
            .map(|i| if movable(i) { state.f[i] + c * ds * k[i] } else { 0.0 })
            .collect();
        let mut p = with_values(base, f)?;
        p.s = s;
        Ok(p)
    };
    let k1 = rhs(state, model)?;
    let p2 = stage(state, &k1, 0.5, state.s + 0.5 * ds)?;
    let k2 = rhs(&p2, model)?;
    let p3 = stage(state, &k2, 0.5, state.s + 0.5 * ds)?;
    let k3 = rhs(&p3, model)?;
    let p4 = stage(state, &k3, 1.0, state.s + ds)?;
    let k4 = rhs(&p4, model)?;
    let f: Vec<f64> = (0..n)
        .map(|i| {
            if movable(i) {
                state.f[i] + ds / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            } else {
                0.0
            }
        })
        .collect();
    let mut out = with_values(state, f)?;
    out.s = state.s + ds;
    Ok(out)
}

/// Build a symmetric uniform grid of `2m + 1` nodes on `[−zmax, zmax]`
/// whose middle node is exactly zero.
pub fn symmetric_grid(cells: usize, zmax: f64) -> Result<Vec<f64>> {
    if cells < 2 || cells % 2 != 0 {
        return Err(SolabError::Config(format!("grid.n = {cells} must be an even cell count")));
    }
    let m = cells / 2;
    let dz = zmax / m as f64;
    Ok((0..=cells).map(|i| dz * (i as f64 - m as f64)).collect())
}

/// Fixed uniform background grid with an active window between two tips.
#[derive(Debug, Clone)]
pub struct FlowSolver {
    z: Vec<f64>,
    f: Vec<f64>,
    s: f64,
    closed: bool,
    dz: f64,
    origin: usize,
    lo: usize,
    hi: usize,
    model: ErrorModel,
    cfl: f64,
}

impl FlowSolver {
    /// `f` is sampled on `z`, which must contain 0 as a node and be uniform.
    pub fn new(z: Vec<f64>, f: Vec<f64>, s: f64, closed: bool, model: ErrorModel, cfl: f64) -> Result<Self> {
        if z.len() != f.len() || z.len() < geometry::MIN_INTERIOR + 2 {
            return Err(SolabError::Config("seed grid too small or mismatched".into()));
        }
        let origin = z
            .iter()
            .position(|&v| v == 0.0)
            .ok_or_else(|| SolabError::Config("z = 0 must be a grid node".into()))?;
        let dz = z[1] - z[0];
        let mut solver = Self {
            z,
            f,
            s,
            closed,
            dz,
            origin,
            lo: 0,
            hi: 0,
            model,
            cfl,
        };
        solver.resync()?;
        Ok(solver)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn dz(&self) -> f64 {
        self.dz
    }

    pub fn max_step(&self) -> f64 {
        self.cfl * self.dz * self.dz
    }

    fn threshold(&self) -> f64 {
        3.0 * self.dz
    }

    /// Recompute the active window, tips and near-tip extrapolation.
    fn resync(&mut self) -> Result<()> {
        let n = self.z.len();
        if !self.closed {
            self.lo = 0;
            self.hi = n - 1;
            return Ok(());
        }
        let thr = self.threshold();
        if self.f[self.origin] < thr {
            return Err(SolabError::Singularity { z: 0.0, s: self.s });
        }
        let mut hi = self.origin;
        while hi + 1 < n && self.f[hi + 1] >= thr {
            hi += 1;
        }
        let mut lo = self.origin;
        while lo > 0 && self.f[lo - 1] >= thr {
            lo -= 1;
        }
        if hi - lo < geometry::MIN_INTERIOR {
            return Err(SolabError::InsufficientData("active window too small".into()));
        }
        if hi == n - 1 || lo == 0 {
            return Err(SolabError::Config("tip left the computational domain; increase grid.zmax".into()));
        }
        // Any resolved radius beyond the window means the profile pinched.
        let stray = (hi + 1..n).chain(0..lo).find(|&k| self.f[k] >= thr);
        if let Some(k) = stray {
            let range = if k > hi { hi..k } else { k..lo };
            let pinch = range
                .min_by(|&a, &b| self.f[a].partial_cmp(&self.f[b]).expect("finite"))
                .unwrap_or(k);
            return Err(SolabError::Singularity {
                z: self.z[pinch],
                s: self.s,
            });
        }
        self.lo = lo;
        self.hi = hi;
        let (tlo, thi) = self.tips();
        self.extrapolate(hi, hi - 1, thi, true);
        self.extrapolate(lo, lo + 1, tlo, false);
        Ok(())
    }

    fn extrapolate(&mut self, last: usize, prev: usize, tip: f64, upward: bool) {
        let (x0, y0) = (self.z[prev], self.f[prev]);
        let (x1, y1) = (self.z[last], self.f[last]);
        let x2 = tip;
        let quad = |x: f64| {
            y0 * (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2)) + y1 * (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2))
        };
        let n = self.z.len();
        let mut k = last;
        loop {
            k = if upward {
                if k + 1 >= n {
                    break;
                }
                k + 1
            } else {
                if k == 0 {
                    break;
                }
                k - 1
            };
            let x = self.z[k];
            let inside = if upward { x < tip } else { x > tip };
            self.f[k] = if inside { quad(x).clamp(0.0, self.f[last]) } else { 0.0 };
        }
    }

    /// `(z_tip_low, z_tip_high)`; open profiles report the grid ends.
    pub fn tips(&self) -> (f64, f64) {
        if self.closed {
            (self.z[self.lo] - self.f[self.lo], self.z[self.hi] + self.f[self.hi])
        } else {
            (self.z[0], self.z[self.z.len() - 1])
        }
    }

    /// Active nodes plus tip endpoints (closed) as a validated profile.
    pub fn profile(&self) -> Result<RadialProfile> {
        if !self.closed {
            return RadialProfile::new(self.z.clone(), self.f.clone(), self.s, false);
        }
        let (tlo, thi) = self.tips();
        let mut z = Vec::with_capacity(self.hi - self.lo + 3);
        let mut f = Vec::with_capacity(self.hi - self.lo + 3);
        z.push(tlo);
        f.push(0.0);
        z.extend_from_slice(&self.z[self.lo..=self.hi]);
        f.extend_from_slice(&self.f[self.lo..=self.hi]);
        z.push(thi);
        f.push(0.0);
        RadialProfile::new(z, f, self.s, true)
    }

    /// Background grid and values, including extrapolated near-tip nodes.
    pub fn background(&self) -> (&[f64], &[f64]) {
        (&self.z, &self.f)
    }

    pub fn advance(&mut self, ds: f64) -> Result<()> {
        let work = self.profile()?;
        let bound = self.max_step();
        if -ds > bound * (1.0 + 1e-12) {
            return Err(SolabError::StepTooLarge { ds: -ds, bound });
        }
        // The working profile's tip segments are at least 3Δz long, so the
        // background spacing is the binding stability constraint.
        let next = step_with_cfl(&work, &self.model, ds, f64::INFINITY)?;
        let off = if self.closed { 1 } else { 0 };
        for (k, i) in (self.lo..=self.hi).enumerate() {
            self.f[i] = next.f[k + off];
        }
        self.s = next.s;
        self.resync()
    }
}

/// Termination status of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Singularity { z: f64, s: f64 },
}

/// Snapshots in integration order (`s` decreasing, `τ` increasing).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowTrajectory {
    pub snapshots: Vec<RadialProfile>,
    pub s_values: Vec<f64>,
    /// Distances from the reference point `z = 0` to each end.
    pub tip_distances: Vec<(f64, f64)>,
    pub error_model: ErrorModel,
    pub status: RunStatus,
}

impl FlowTrajectory {
    pub fn from_snapshots(snapshots: Vec<RadialProfile>, error_model: ErrorModel) -> Self {
        let s_values = snapshots.iter().map(|p| p.s).collect();
        let tip_distances = snapshots
            .iter()
            .map(|p| (-p.z[0], p.z[p.len() - 1]))
            .collect();
        Self {
            snapshots,
            s_values,
            tip_distances,
            error_model,
            status: RunStatus::Completed,
        }
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    fn push(&mut self, p: RadialProfile) {
        self.s_values.push(p.s);
        self.tip_distances.push((-p.z[0], p.z[p.len() - 1]));
        self.snapshots.push(p);
    }
}

/// Build the seed solver described by the configuration.
pub fn seed_solver(config: &RunConfig) -> Result<FlowSolver> {
    let s1 = config.flow.s1;
    let (grid, f, closed) = match &config.flow.seed {
        SeedProfile::Cylinder => {
            let zmax = config.grid.zmax.unwrap_or(4.0 * s1.sqrt());
            let z = symmetric_grid(config.grid.n, zmax)?;
            let f = seeds::cylinder(&z, s1);
            (z, f, false)
        }
        SeedProfile::Sphere => {
            let zmax = config.grid.zmax.unwrap_or(1.25 * std::f64::consts::PI * s1.sqrt());
            let z = symmetric_grid(config.grid.n, zmax)?;
            let f = seeds::round_sphere(&z, s1);
            (z, f, true)
        }
        SeedProfile::NeutralAnsatz => {
            let seed = seeds::NeutralSeed::new(s1, seeds::NEUTRAL_GLUE_L)?;
            let zmax = config.grid.zmax.unwrap_or(1.05 * seed.z_tip);
            let z = symmetric_grid(config.grid.n, zmax)?;
            let f = z.iter().map(|&v| seed.eval(v)).collect();
            (z, f, true)
        }
        SeedProfile::File(path) => {
            let text = std::fs::read_to_string(path)?;
            let read = crate::io::read_snapshot(&text)?;
            let p = read.profile;
            let zmax = config
                .grid
                .zmax
                .unwrap_or_else(|| p.z[0].abs().max(p.z[p.len() - 1].abs()));
            let z = symmetric_grid(config.grid.n, zmax)?;
            let f = z
                .iter()
                .map(|&v| {
                    if v < p.z[0] || v > p.z[p.len() - 1] {
                        0.0
                    } else {
                        numerics::interp_linear(&p.z, &p.f, v)
                    }
                })
                .collect();
            (z, f, p.closed)
        }
    };
    FlowSolver::new(grid, f, s1, closed, config.error, config.flow.cfl)
}

/// Integrate from `flow.s1` down to `flow.s0`, recording evenly spaced
/// snapshots (both ends included). A neck pinch ends the run early with a
/// partial trajectory.
pub fn run(config: &RunConfig) -> Result<FlowTrajectory> {
    config.validate()?;
    let mut solver = seed_solver(config)?;
    let targets = numerics::linspace(config.flow.s1, config.flow.s0, config.flow.snapshots);
    let mut traj = FlowTrajectory {
        snapshots: Vec::new(),
        s_values: Vec::new(),
        tip_distances: Vec::new(),
        error_model: config.error,
        status: RunStatus::Completed,
    };
    traj.push(solver.profile()?);
    for w in targets.windows(2) {
        let gap = w[0] - w[1];
        let m = ((gap / solver.max_step()).ceil() as usize).max(config.flow.min_steps).max(1);
        let ds = -gap / m as f64;
        for k in 0..m {
            let res = if k + 1 == m {
                // Land exactly on the requested snapshot value.
                solver.advance(w[1] - solver.s())
            } else {
                solver.advance(ds)
            };
            match res {
                Ok(()) => {}
                Err(SolabError::Singularity { z, s }) => {
                    traj.status = RunStatus::Singularity { z, s };
                    return Ok(traj);
                }
                Err(e) => return Err(e),
            }
        }
        traj.push(solver.profile()?);
    }
    Ok(traj)
}

/// Residual norms of `−F_s − RHS` for one interior snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualNorms {
    pub s: f64,
    pub sup: f64,
    pub l2: f64,
    /// `sup|F_s|` over the same nodes, for relative comparisons.
    pub fs_scale: f64,
    pub nodes: usize,
}

/// Time-difference residual of the evolution equation across snapshots.
pub fn pde_residual(traj: &FlowTrajectory) -> Result<Vec<ResidualNorms>> {
    pde_residual_in(traj, None)
}

/// As [`pde_residual`], restricted to `|z| ≤ zlim(s)` when given.
pub fn pde_residual_in(traj: &FlowTrajectory, zlim: Option<&dyn Fn(f64) -> f64>) -> Result<Vec<ResidualNorms>> {
    if traj.len() < 3 {
        return Err(SolabError::InsufficientData(format!(
            "residual needs at least 3 snapshots, got {}",
            traj.len()
        )));
    }
    let mut out = Vec::with_capacity(traj.len() - 2);
    for j in 1..traj.len() - 1 {
        let (a, b, c) = (&traj.snapshots[j - 1], &traj.snapshots[j], &traj.snapshots[j + 1]);
        let w = numerics::fornberg_weights(b.s, &[a.s, b.s, c.s], 1);
        let rhs_b = rhs(b, &traj.error_model)?;
        let index = |p: &RadialProfile| -> HashMap<u64, usize> {
            p.eval_range().map(|i| (p.z[i].to_bits(), i)).collect()
        };
        let (ia, ic) = (index(a), index(c));
        let limit = zlim.map(|g| g(b.s));
        let (mut sup, mut sq, mut scale, mut count) = (0.0_f64, 0.0, 0.0_f64, 0usize);
        for i in b.eval_range() {
            if let Some(l) = limit {
                if b.z[i].abs() > l {
                    continue;
                }
            }
            let key = b.z[i].to_bits();
            let (Some(&ka), Some(&kc)) = (ia.get(&key), ic.get(&key)) else {
                continue;
            };
            let fs = w[0] * a.f[ka] + w[1] * b.f[i] + w[2] * c.f[kc];
            let r = fs - rhs_b[i];
            sup = sup.max(r.abs());
            sq += r * r;
            scale = scale.max(fs.abs());
            count += 1;
        }
        if count == 0 {
            return Err(SolabError::InsufficientData("no common nodes between snapshots".into()));
        }
        out.push(ResidualNorms {
            s: b.s,
            sup,
            l2: (sq / count as f64).sqrt(),
            fs_scale: scale,
            nodes: count,
        });
    }
    Ok(out)
}
