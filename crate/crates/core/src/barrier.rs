//! Barrier `ψ_a` for the slope equation: shooting construction, pointwise
//! verification of the differential inequality and its five properties,
//! the parabolic form `Ψ_a(r, s) = ψ_a(r/√(2s))`, and the comparison
//! `F_z² ≤ ψ_a(F/√(2s))` along a trajectory.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolabError};
use crate::flow::{ErrorModel, FlowTrajectory, ResidualNorms};
use crate::geometry::{self, RadialProfile};
use crate::numerics::{self, CubicSpline};

pub const A_MIN: f64 = 50.0;
/// Left end of the domain in units of `a⁻¹`.
pub const R_STAR: f64 = 0.5;
/// Inner/outer split at `N a⁻¹`.
pub const N_SPLIT: f64 = 4.0;
/// Property 4 is checked on `[1 − θ, right end]`.
pub const THETA: f64 = 0.5;
/// Property 1: `ψ_a ≤ C a⁻²` on `[1/10, right end]`.
pub const C_BOUND: f64 = 200.0;
/// Margins may dip to `−SLACK` before counting as violations.
pub const SLACK: f64 = 1e-10;
/// Value at the left end.
pub const PSI_LEFT: f64 = 1.5;
/// Shooting target `ψ(right end) = VALUE_TARGET·a⁻⁴`.
pub const VALUE_TARGET: f64 = 0.8;
/// The ODE is integrated with these multiples of the required right sides,
/// leaving half of each as verified margin.
const INNER_FACTOR: f64 = 2.0;
const OUTER_FACTOR: f64 = 2.0;
const RTOL: f64 = 1e-12;
const ATOL: f64 = 1e-20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Constructed,
    UserSupplied,
}

/// Diagnostics of the shooting construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierFit {
    /// Initial slope `ψ'(r_*a⁻¹) = slope·a`.
    pub slope: f64,
    /// `ψ(1/2) / (a⁻²(2⁻² − 1))`.
    pub lambda2: f64,
    /// Largest `θ` for which property 4 holds on the samples.
    pub theta_fit: f64,
    /// Smallest `C` in property 1.
    pub c_fit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierFunction {
    pub a: f64,
    pub r_star: f64,
    #[serde(rename = "N")]
    pub n: f64,
    pub theta: f64,
    pub x: Vec<f64>,
    pub psi: Vec<f64>,
    pub psi_prime: Vec<f64>,
    pub provenance: Provenance,
    pub fit: Option<BarrierFit>,
}

/// Right end `1 + a⁻²/100` of the barrier domain.
pub fn right_end(a: f64) -> f64 {
    1.0 + a.powi(-2) / 100.0
}

/// The left side `ψψ'' − ½ψ'² + x⁻²(1−ψ)(xψ' + 2ψ) − xψ'` of the barrier
/// inequality.
pub fn barrier_lhs(x: f64, p: f64, dp: f64, ddp: f64) -> f64 {
    p * ddp - 0.5 * dp * dp + (1.0 - p) * (x * dp + 2.0 * p) / (x * x) - x * dp
}

/// Required upper bound for the left side: `−½a` on `[r_*a⁻¹, Na⁻¹)` and
/// `−¼a⁻⁴x⁻⁵` on `[Na⁻¹, right end]`.
pub fn required_rhs(a: f64, n: f64, x: f64) -> f64 {
    if x * a >= n {
        -0.25 * a.powi(-4) * x.powi(-5)
    } else {
        -0.5 * a
    }
}

impl BarrierFunction {
    /// A user-supplied candidate with the default `N` and `θ`.
    pub fn user_supplied(a: f64, r_star: f64, x: Vec<f64>, psi: Vec<f64>, psi_prime: Vec<f64>) -> Result<Self> {
        if x.len() != psi.len() || x.len() != psi_prime.len() || x.len() < 8 {
            return Err(SolabError::Parameter("candidate needs matching samples (at least 8)".into()));
        }
        if x.windows(2).any(|w| w[1] < w[0]) {
            return Err(SolabError::Parameter("candidate grid must be non-decreasing".into()));
        }
        Ok(Self {
            a,
            r_star,
            n: N_SPLIT,
            theta: THETA,
            x,
            psi,
            psi_prime,
            provenance: Provenance::UserSupplied,
            fit: None,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.r_star / self.a, right_end(self.a))
    }

    fn locate(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.binary_search_by(|v| v.partial_cmp(&t).expect("NaN in barrier grid")) {
            Ok(k) => k.min(n - 2),
            Err(0) => 0,
            Err(k) => (k - 1).min(n - 2),
        }
    }

    /// Cubic Hermite interpolation of the `(ψ, ψ')` samples.
    pub fn eval(&self, t: f64) -> f64 {
        let k = self.locate(t);
        let (x0, x1) = (self.x[k], self.x[k + 1]);
        let h = x1 - x0;
        if h <= 0.0 {
            return self.psi[k];
        }
        let u = (t - x0) / h;
        let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
        let h10 = u * (1.0 - u) * (1.0 - u);
        let h01 = u * u * (3.0 - 2.0 * u);
        let h11 = u * u * (u - 1.0);
        h00 * self.psi[k] + h10 * h * self.psi_prime[k] + h01 * self.psi[k + 1] + h11 * h * self.psi_prime[k + 1]
    }

    /// Parabolic form `Ψ_a(r, s) = ψ_a(r/√(2s))`.
    pub fn parabolic(&self, r: f64, s: f64) -> f64 {
        self.eval(r / (2.0 * s).sqrt())
    }
}

type State = [f64; 2];

/// The region is fixed per segment, so stages landing exactly on `Na⁻¹`
/// stay on the segment's side of the jump.
fn field(a: f64, outer: bool, x: f64, y: &State) -> State {
    let (p, d) = (y[0], y[1]);
    let target = if outer {
        -OUTER_FACTOR * 0.25 * a.powi(-4) * x.powi(-5)
    } else {
        -INNER_FACTOR * 0.5 * a
    };
    let rest = -0.5 * d * d + (1.0 - p) * (x * d + 2.0 * p) / (x * x) - x * d;
    [d, (target - rest) / p]
}

enum Stop {
    Died(f64),
}

/// Adaptive Dormand–Prince 5(4) from `x0` to `x1`; `h` carries the step
/// size between calls. Stops if `ψ` reaches zero.
fn dopri<F: Fn(f64, &State) -> State>(f: &F, x0: f64, y0: State, x1: f64, h: &mut f64) -> std::result::Result<State, Stop> {
    const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A2: [f64; 1] = [0.2];
    const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
    const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
    const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
    const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
    const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let comb = |y: &State, h: f64, ks: &[State], w: &[f64]| -> State {
        let mut out = *y;
        for (k, c) in ks.iter().zip(w) {
            out[0] += h * c * k[0];
            out[1] += h * c * k[1];
        }
        out
    };
    let mut x = x0;
    let mut y = y0;
    let span = x1 - x0;
    if span <= 0.0 {
        return Ok(y);
    }
    let floor = 1e-15 * x1.abs().max(1.0);
    while x < x1 {
        let last = x + *h >= x1;
        let step = if last { x1 - x } else { *h };
        let k1 = f(x, &y);
        let k2 = f(x + C[0] * step, &comb(&y, step, &[k1], &A2));
        let k3 = f(x + C[1] * step, &comb(&y, step, &[k1, k2], &A3));
        let k4 = f(x + C[2] * step, &comb(&y, step, &[k1, k2, k3], &A4));
        let k5 = f(x + C[3] * step, &comb(&y, step, &[k1, k2, k3, k4], &A5));
        let k6 = f(x + C[4] * step, &comb(&y, step, &[k1, k2, k3, k4, k5], &A6));
        let ynew = comb(&y, step, &[k1, k2, k3, k4, k5, k6], &B);
        let k7 = f(x + step, &ynew);
        let ks = [k1, k2, k3, k4, k5, k6, k7];
        let mut err = 0.0_f64;
        for i in 0..2 {
            let e: f64 = ks.iter().zip(&E).map(|(k, c)| c * k[i]).sum::<f64>() * step;
            let sc = ATOL + RTOL * y[i].abs().max(ynew[i].abs());
            err = err.max((e / sc).abs());
        }
        let bad = !(ynew[0] > 0.0) || !ynew[1].is_finite() || !err.is_finite();
        if bad || err > 1.0 {
            *h = step * if bad { 0.25 } else { (0.9 * err.powf(-0.2)).max(0.2) };
            if *h < floor {
                return Err(Stop::Died(x));
            }
            continue;
        }
        x = if last { x1 } else { x + step };
        y = ynew;
        let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        if !last {
            *h = step * grow;
        } else {
            *h = (*h).max(step * grow);
        }
    }
    Ok(y)
}

/// Integrate through `points` (increasing; the first is the start),
/// returning the state at each point. Splits at `Na⁻¹` are honoured by
/// including that point.
fn shoot_through(a: f64, n: f64, y0: State, points: &[f64]) -> std::result::Result<Vec<State>, Stop> {
    let mut out = Vec::with_capacity(points.len());
    out.push(y0);
    let mut y = y0;
    let mut h = 1e-6 * (points[points.len() - 1] - points[0]);
    for w in points.windows(2) {
        let outer = 0.5 * (w[0] + w[1]) * a >= n;
        let f = |x: f64, y: &State| field(a, outer, x, y);
        y = dopri(&f, w[0], y, w[1], &mut h)?;
        out.push(y);
    }
    Ok(out)
}

/// `ψ(right end)/a⁻⁴ − VALUE_TARGET` for the initial slope `slope·a`;
/// `−1` when `ψ` reaches zero first.
fn shooting_defect(a: f64, slope: f64) -> f64 {
    let x0 = R_STAR / a;
    let xs = [x0, N_SPLIT / a, right_end(a)];
    match shoot_through(a, N_SPLIT, [PSI_LEFT, slope * a], &xs) {
        Ok(states) => states[2][0] * a.powi(4) - VALUE_TARGET,
        Err(Stop::Died(_)) => -1.0,
    }
}

/// Verification grid: `samples` uniform points, Chebyshev clusters inside
/// the first and last uniform cells, and the split point `Na⁻¹`.
pub fn sample_grid(a: f64, samples: usize) -> Vec<f64> {
    let (x0, x1) = (R_STAR / a, right_end(a));
    let mut x = numerics::linspace(x0, x1, samples);
    let h = (x1 - x0) / (samples - 1) as f64;
    let m = 32;
    for k in 1..m {
        let c = 1.0 - (std::f64::consts::PI * k as f64 / (2.0 * m as f64)).cos();
        x.push(x0 + h * c);
        x.push(x1 - h * c);
    }
    x.push(N_SPLIT / a);
    x.sort_by(|p, q| p.partial_cmp(q).expect("finite grid"));
    x.dedup_by(|p, q| (*p - *q).abs() <= 1e-14 * q.abs());
    x
}

/// Build `ψ_a` by shooting from `r_*a⁻¹` with `ψ = 3/2`, bisecting the
/// initial slope so that the right-end value is `0.8·a⁻⁴`.
pub fn construct_barrier(a: f64) -> Result<BarrierFunction> {
    construct_barrier_with(a, 10_000)
}

pub fn construct_barrier_with(a: f64, samples: usize) -> Result<BarrierFunction> {
    if !(a >= A_MIN) || !a.is_finite() {
        return Err(SolabError::Parameter(format!("a = {a} must be at least {A_MIN}")));
    }
    if samples < 100 {
        return Err(SolabError::Parameter("barrier needs at least 100 samples".into()));
    }
    let scan = numerics::linspace(-6.0, -0.01, 25);
    let vals: Vec<f64> = scan.iter().map(|&d| shooting_defect(a, d)).collect();
    let k = (0..scan.len() - 1)
        .find(|&i| vals[i] < 0.0 && vals[i + 1] > 0.0)
        .ok_or_else(|| {
            SolabError::BarrierConstruction(format!(
                "no initial slope in [-6, -0.01]·a reaches the right-end target {VALUE_TARGET}·a^-4"
            ))
        })?;
    let (mut lo, mut hi) = (scan[k], scan[k + 1]);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if shooting_defect(a, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = sample_grid(a, samples);
    let states = shoot_through(a, N_SPLIT, [PSI_LEFT, hi * a], &x).map_err(|Stop::Died(at)| {
        SolabError::BarrierConstruction(format!("psi reached zero at x = {at} on the final shot"))
    })?;
    let psi: Vec<f64> = states.iter().map(|s| s[0]).collect();
    let psi_prime: Vec<f64> = states.iter().map(|s| s[1]).collect();
    let b = a.powi(-2);
    let mut barrier = BarrierFunction {
        a,
        r_star: R_STAR,
        n: N_SPLIT,
        theta: THETA,
        x,
        psi,
        psi_prime,
        provenance: Provenance::Constructed,
        fit: None,
    };
    let half = barrier.eval(0.5);
    let c_fit = barrier
        .x
        .iter()
        .zip(&barrier.psi)
        .filter(|(x, _)| **x >= 0.1)
        .map(|(_, p)| p / b)
        .fold(0.0, f64::max);
    let theta_fit = match barrier
        .x
        .iter()
        .zip(&barrier.psi)
        .rposition(|(x, p)| *p < b * (x.powi(-2) - 1.0) + b * b / 16.0)
    {
        Some(i) if i + 1 < barrier.x.len() => 1.0 - barrier.x[i + 1],
        Some(_) => 0.0,
        None => 1.0,
    };
    barrier.fit = Some(BarrierFit {
        slope: hi,
        lambda2: half / (b * 3.0),
        theta_fit,
        c_fit,
    });
    let verdict = verify_barrier(&barrier)?;
    if let Some(p) = verdict.properties.iter().find(|p| p.min_margin < -SLACK) {
        return Err(SolabError::BarrierConstruction(format!(
            "property '{}' violated at x = {} (margin {:e})",
            p.name, p.location, p.min_margin
        )));
    }
    if verdict.ode_inner.min_margin < -SLACK || verdict.ode_outer.min_margin < -SLACK {
        return Err(SolabError::BarrierConstruction("differential inequality violated".into()));
    }
    Ok(barrier)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub name: String,
    pub min_margin: f64,
    pub location: f64,
    pub points: usize,
}

impl Margin {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            min_margin: f64::INFINITY,
            location: f64::NAN,
            points: 0,
        }
    }

    fn record(&mut self, x: f64, m: f64) {
        self.points += 1;
        if m < self.min_margin {
            self.min_margin = m;
            self.location = x;
        }
    }

    fn ok(&self) -> bool {
        self.min_margin >= -SLACK
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierVerdict {
    pub x: Vec<f64>,
    /// Required right side minus the left side, per sample.
    pub margin_ode: Vec<f64>,
    /// Smallest applicable property margin per sample.
    pub margin_props: Vec<f64>,
    pub ode_inner: Margin,
    pub ode_outer: Margin,
    pub properties: Vec<Margin>,
    /// Largest jump of `ψ'` across duplicated joints.
    pub c1_jump: f64,
    pub pass: bool,
}

fn second_derivative_by_region(bf: &BarrierFunction) -> Vec<f64> {
    let split = bf.n / bf.a;
    let nx = bf.x.len();
    let mut out = vec![f64::NAN; nx];
    // The split node belongs to both regions; the outer value wins there.
    let k = bf.x.iter().position(|&x| x >= split).unwrap_or(nx);
    let inner_hi = if k < nx && (bf.x[k] - split).abs() <= 1e-14 * split { k + 1 } else { k };
    for (lo, hi) in [(0, inner_hi), (k, nx)] {
        if hi - lo >= 4 {
            let (d, _) = numerics::derivatives(&bf.x[lo..hi], &bf.psi_prime[lo..hi]);
            out[lo..hi].copy_from_slice(&d);
        }
    }
    out
}

/// Pointwise margins of the differential inequality and the five
/// properties. `ψ''` is differenced from the `ψ'` samples separately on each
/// side of `Na⁻¹`.
pub fn verify_barrier(bf: &BarrierFunction) -> Result<BarrierVerdict> {
    let (lo, hi) = bf.domain();
    let nx = bf.x.len();
    let tol = 1e-12 * hi;
    if (bf.x[0] - lo).abs() > tol || (bf.x[nx - 1] - hi).abs() > tol {
        return Err(SolabError::DomainMismatch(format!(
            "samples cover [{}, {}], expected [{lo}, {hi}]",
            bf.x[0],
            bf.x[nx - 1]
        )));
    }
    let a = bf.a;
    let b = a.powi(-2);
    let ddp = second_derivative_by_region(bf);
    let mut ode_inner = Margin::new("ode_inner");
    let mut ode_outer = Margin::new("ode_outer");
    let mut props = [
        Margin::new("upper_c_a^-2"),
        Margin::new("upper_2a^-2x^-2"),
        Margin::new("lower_a^-4/32"),
        Margin::new("lower_near_right_end"),
        Margin::new("left_value_3/2"),
    ];
    let mut margin_ode = Vec::with_capacity(nx);
    let mut margin_props = Vec::with_capacity(nx);
    for i in 0..nx {
        let (x, p, dp) = (bf.x[i], bf.psi[i], bf.psi_prime[i]);
        let m = required_rhs(a, bf.n, x) - barrier_lhs(x, p, dp, ddp[i]);
        if x * a >= bf.n {
            ode_outer.record(x, m);
        } else {
            ode_inner.record(x, m);
        }
        margin_ode.push(m);
        let mut mp = f64::INFINITY;
        let mut rec = |k: usize, v: f64| {
            props[k].record(x, v);
            mp = mp.min(v);
        };
        if x >= 0.1 {
            rec(0, C_BOUND * b - p);
        }
        if x * a >= bf.n {
            rec(1, 2.0 * b / (x * x) - p);
        }
        rec(2, p - b * b / 32.0);
        if x >= 1.0 - bf.theta {
            rec(3, p - (b * (x.powi(-2) - 1.0) + b * b / 16.0));
        }
        if i == 0 {
            rec(4, p - 1.5);
        }
        margin_props.push(mp);
    }
    let c1_jump = (1..nx)
        .filter(|&i| bf.x[i] == bf.x[i - 1])
        .map(|i| (bf.psi_prime[i] - bf.psi_prime[i - 1]).abs())
        .fold(0.0, f64::max);
    let pass = ode_inner.ok() && ode_outer.ok() && props.iter().all(|p| p.ok()) && c1_jump <= 1e-8;
    Ok(BarrierVerdict {
        x: bf.x.clone(),
        margin_ode,
        margin_props,
        ode_inner,
        ode_outer,
        properties: props.to_vec(),
        c1_jump,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParabolicReport {
    pub points: usize,
    pub min_margin: f64,
    pub worst_r: f64,
    pub worst_s: f64,
    pub pass: bool,
}

/// Check `−Ψ_s − [ΨΨ_rr − ½Ψ_r² + r⁻²(1−Ψ)(rΨ_r + 2Ψ)] ≥ Q_min` for
/// `Ψ(r, s) = ψ(r/√(2s))` on an `m × m` grid, with `Q_min = ⅛a⁻⁴x⁻⁵/s`
/// on the outer region and `¼a/s` on the inner one. The `x` values are
/// taken from the sample grid; `s` ranges over `[s_lo, s_hi]`.
pub fn parabolic_check(bf: &BarrierFunction, m: usize, s_lo: f64, s_hi: f64) -> Result<ParabolicReport> {
    if m < 2 || !(s_lo > 0.0 && s_lo < s_hi) {
        return Err(SolabError::Parameter("parabolic grid needs m ≥ 2 and 0 < s_lo < s_hi".into()));
    }
    let ddp = second_derivative_by_region(bf);
    let nx = bf.x.len();
    let a = bf.a;
    let idx: Vec<usize> = (0..m).map(|k| k * (nx - 1) / (m - 1)).collect();
    let mut report = ParabolicReport {
        points: 0,
        min_margin: f64::INFINITY,
        worst_r: f64::NAN,
        worst_s: f64::NAN,
        pass: true,
    };
    for s in numerics::linspace(s_lo, s_hi, m) {
        let root = (2.0 * s).sqrt();
        for &i in &idx {
            let x = bf.x[i];
            let r = x * root;
            let psi = bf.psi[i];
            let psi_r = bf.psi_prime[i] / root;
            let psi_rr = ddp[i] / (2.0 * s);
            let psi_s = -x * bf.psi_prime[i] / (2.0 * s);
            let rhs = psi * psi_rr - 0.5 * psi_r * psi_r + (1.0 - psi) * (r * psi_r + 2.0 * psi) / (r * r);
            let q = -psi_s - rhs;
            let q_min = if x * a >= bf.n {
                0.125 * a.powi(-4) * x.powi(-5) / s
            } else {
                0.25 * a / s
            };
            let margin = q - q_min;
            report.points += 1;
            if margin < report.min_margin {
                report.min_margin = margin;
                report.worst_r = r;
                report.worst_s = s;
            }
        }
    }
    report.pass = report.min_margin >= 0.0;
    Ok(report)
}

/// `u(r) = F_z²` along one arc on which `F` is monotone in `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UArc {
    /// +1 where `F` increases with `z`, −1 where it decreases, 0 if flat.
    pub direction: i8,
    pub z: Vec<f64>,
    /// Increasing radii (arc order for flat arcs).
    pub r: Vec<f64>,
    pub u: Vec<f64>,
}

/// Split the resolved part of the profile into maximal arcs of constant
/// monotonicity and sample `u = F_z²` against `r = F` on each.
pub fn u_from_profile(p: &RadialProfile) -> Result<Vec<UArc>> {
    let (fz, _) = p.derivatives();
    let range: Vec<usize> = p.eval_range().collect();
    if range.len() < 2 {
        return Err(SolabError::InsufficientData("profile too short for arcs".into()));
    }
    let sign = |i: usize| -> i8 {
        let d = p.f[i + 1] - p.f[i];
        if d > 0.0 {
            1
        } else if d < 0.0 {
            -1
        } else {
            0
        }
    };
    let mut arcs = Vec::new();
    let mut start = 0usize;
    while start + 1 < range.len() {
        let dir = sign(range[start]);
        let mut end = start + 1;
        while end + 1 < range.len() && sign(range[end]) == dir {
            end += 1;
        }
        let nodes = &range[start..=end];
        let mut pts: Vec<(f64, f64, f64)> = nodes.iter().map(|&i| (p.z[i], p.f[i], fz[i] * fz[i])).collect();
        if dir < 0 {
            pts.reverse();
        }
        arcs.push(UArc {
            direction: dir,
            z: pts.iter().map(|t| t.0).collect(),
            r: pts.iter().map(|t| t.1).collect(),
            u: pts.iter().map(|t| t.2).collect(),
        });
        start = end;
    }
    Ok(arcs)
}

/// Right side of the `u`-equation with this crate's error model, where
/// `E_rad`, `E_orb` are evaluated at `F = r`:
///
/// ```text
/// −u_s = u u_rr − ½u_r² + r⁻²(1−u)(r u_r + 2u) + 2u E_rad + r⁻¹u_r E_orb − 2u (E_orb/r)_r
/// ```
pub fn u_rhs(model: &ErrorModel, r: f64, u: f64, u_r: f64, u_rr: f64) -> f64 {
    let (e_rad, e_orb) = model.at(r);
    let h = 1e-5 * r;
    let q = |v: f64| model.at(v).1 / v;
    let dq = (q(r + h) - q(r - h)) / (2.0 * h);
    u * u_rr - 0.5 * u_r * u_r + (1.0 - u) * (r * u_r + 2.0 * u) / (r * r) + 2.0 * u * e_rad + u_r * e_orb / r
        - 2.0 * u * dq
}

/// Residual of the `u`-equation across neighbouring snapshots, on the
/// monotone arcs of each interior snapshot (three nodes trimmed at each arc
/// end). `u_s` is differenced at fixed `r` by interpolating the matching
/// arcs of the neighbours.
pub fn u_residual(traj: &FlowTrajectory) -> Result<Vec<ResidualNorms>> {
    if traj.len() < 3 {
        return Err(SolabError::InsufficientData("u residual needs at least 3 snapshots".into()));
    }
    let arcs: Vec<Vec<UArc>> = traj.snapshots.iter().map(u_from_profile).collect::<Result<_>>()?;
    let splines: Vec<Vec<(i8, f64, f64, CubicSpline)>> = arcs
        .iter()
        .map(|list| {
            list.iter()
                .filter(|a| a.direction != 0 && a.r.len() >= 4)
                .map(|a| (a.direction, a.r[0], a.r[a.r.len() - 1], CubicSpline::new(&a.r, &a.u)))
                .collect()
        })
        .collect();
    let lookup = |j: usize, dir: i8, r: f64| -> Option<f64> {
        splines[j]
            .iter()
            .find(|(d, lo, hi, _)| *d == dir && r >= *lo && r <= *hi)
            .map(|(_, _, _, sp)| sp.eval(r))
    };
    let mut out = Vec::new();
    for j in 1..traj.len() - 1 {
        let (sa, sb, sc) = (traj.s_values[j - 1], traj.s_values[j], traj.s_values[j + 1]);
        let w = numerics::fornberg_weights(sb, &[sa, sb, sc], 1);
        let (mut sup, mut sq, mut scale, mut count) = (0.0_f64, 0.0, 0.0_f64, 0usize);
        for arc in arcs[j].iter().filter(|a| a.direction != 0 && a.r.len() >= 10) {
            let (u_r, u_rr) = numerics::derivatives(&arc.r, &arc.u);
            for k in 3..arc.r.len() - 3 {
                let r = arc.r[k];
                let (Some(ua), Some(uc)) = (lookup(j - 1, arc.direction, r), lookup(j + 1, arc.direction, r)) else {
                    continue;
                };
                let u_s = w[0] * ua + w[1] * arc.u[k] + w[2] * uc;
                let res = -u_s - u_rhs(&traj.error_model, r, arc.u[k], u_r[k], u_rr[k]);
                sup = sup.max(res.abs());
                sq += res * res;
                scale = scale.max(u_s.abs());
                count += 1;
            }
        }
        if count > 0 {
            out.push(ResidualNorms {
                s: sb,
                sup,
                l2: (sq / count as f64).sqrt(),
                fs_scale: scale,
                nodes: count,
            });
        }
    }
    if out.is_empty() {
        return Err(SolabError::InsufficientData("no monotone arcs shared between snapshots".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupersolutionReport {
    pub a: f64,
    /// `max_s r_max(s)/√(2s)` over the window.
    pub hypothesis_value: f64,
    /// Allowed `1 + a⁻²/100`.
    pub hypothesis_bound: f64,
    pub hypothesis_ok: bool,
    /// `None` when the hypothesis fails (no verdict is given).
    pub pass: Option<bool>,
    /// Minimal `ψ_a(F/√(2s)) − F_z²`.
    pub min_margin: f64,
    pub worst_z: f64,
    pub worst_s: f64,
    pub points: usize,
}

pub fn supersolution_check(traj: &FlowTrajectory, a: f64) -> Result<SupersolutionReport> {
    let bf = construct_barrier(a)?;
    supersolution_check_with(traj, &bf)
}

/// Compare `F_z²` with `ψ_a(F/√(2s))` wherever `F ≥ r_*a⁻¹√(2s)`, after
/// checking `r_max(s)/√(2s) ≤ 1 + a⁻²/100` on the window.
pub fn supersolution_check_with(traj: &FlowTrajectory, bf: &BarrierFunction) -> Result<SupersolutionReport> {
    if traj.is_empty() {
        return Err(SolabError::InsufficientData("empty trajectory".into()));
    }
    let (lo, hi) = bf.domain();
    let hyp = traj
        .snapshots
        .iter()
        .map(|p| geometry::max_radius(p) / (2.0 * p.s).sqrt())
        .fold(0.0, f64::max);
    let mut report = SupersolutionReport {
        a: bf.a,
        hypothesis_value: hyp,
        hypothesis_bound: hi,
        hypothesis_ok: hyp <= hi,
        pass: None,
        min_margin: f64::INFINITY,
        worst_z: f64::NAN,
        worst_s: f64::NAN,
        points: 0,
    };
    if !report.hypothesis_ok {
        return Ok(report);
    }
    for p in &traj.snapshots {
        let (fz, _) = p.derivatives();
        let root = (2.0 * p.s).sqrt();
        for i in p.eval_range() {
            let x = p.f[i] / root;
            if x < lo {
                continue;
            }
            let m = bf.eval(x.min(hi)) - fz[i] * fz[i];
            report.points += 1;
            if m < report.min_margin {
                report.min_margin = m;
                report.worst_z = p.z[i];
                report.worst_s = p.s;
            }
        }
    }
    report.pass = Some(report.min_margin >= 0.0);
    Ok(report)
}
