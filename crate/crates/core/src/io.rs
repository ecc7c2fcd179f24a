//! Plain-text configuration, CSV persistence, JSON verdicts/manifests and
//! SVG plots. Every writer is deterministic: fixed float formatting, no
//! timestamps.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::barrier::{BarrierFunction, BarrierVerdict};
use crate::bryant::BryantProfile;
use crate::config::{OutputFormat, RunConfig, SeedProfile};
use crate::error::{Result, SolabError};
use crate::flow::{self, ErrorKind, ErrorModel, FlowTrajectory};
use crate::geometry::{self, RadialProfile};
use crate::rescaled;
use crate::spectral::SpectralReport;

pub const SNAPSHOT_VERSION: u32 = 1;

pub const SNAPSHOT_COLUMNS: [&str; 10] = ["s", "z", "F", "F_z", "F_zz", "K_rad", "K_orb", "Rbar", "E_rad", "E_orb"];

/// Every key accepted by [`parse_config`].
pub const CONFIG_KEYS: [&str; 31] = [
    "grid.n",
    "grid.zmax",
    "flow.s1",
    "flow.s0",
    "flow.snapshots",
    "flow.seed_profile",
    "flow.seed_file",
    "flow.cfl",
    "flow.min_steps",
    "error.model",
    "error.c_rad",
    "error.c_orb",
    "error.bound",
    "spectral.n_modes",
    "spectral.cutoff_exponent",
    "spectral.n_quad",
    "spectral.recursion_cap",
    "spectral.dichotomy_threshold",
    "barrier.a",
    "barrier.samples",
    "bryant.r_max",
    "bryant.tol",
    "asymptotics.theta",
    "asymptotics.M",
    "asymptotics.L",
    "asymptotics.C_theta",
    "asymptotics.eta",
    "asymptotics.alpha",
    "asymptotics.gamma",
    "output.dir",
    "output.formats",
];

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| SolabError::Config(format!("{key}: cannot parse '{v}'")))
}

/// Parse `key = value` lines (`#` starts a comment) over the defaults and
/// validate the result.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut unknown = Vec::new();
    let mut seen = BTreeSet::new();
    let mut model: Option<String> = None;
    let (mut c_rad, mut c_orb, mut bound) = (None, None, None);
    let mut seed_file: Option<PathBuf> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| SolabError::Config(format!("line {}: expected 'key = value'", lineno + 1)))?;
        let (key, v) = (key.trim(), value.trim());
        if !CONFIG_KEYS.contains(&key) {
            unknown.push(key.to_string());
            continue;
        }
        if !seen.insert(key.to_string()) {
            return Err(SolabError::Config(format!("duplicate key {key}")));
        }
        match key {
            "grid.n" => cfg.grid.n = num(key, v)?,
            "grid.zmax" => cfg.grid.zmax = if v == "auto" { None } else { Some(num(key, v)?) },
            "flow.s1" => cfg.flow.s1 = num(key, v)?,
            "flow.s0" => cfg.flow.s0 = num(key, v)?,
            "flow.snapshots" => cfg.flow.snapshots = num(key, v)?,
            "flow.seed_profile" => {
                cfg.flow.seed = match v {
                    "cylinder" => SeedProfile::Cylinder,
                    "sphere" => SeedProfile::Sphere,
                    "neutral_ansatz" => SeedProfile::NeutralAnsatz,
                    "file" => SeedProfile::File(PathBuf::new()),
                    _ => return Err(SolabError::Config(format!("flow.seed_profile: unknown seed '{v}'"))),
                }
            }
            "flow.seed_file" => seed_file = Some(PathBuf::from(v)),
            "flow.cfl" => cfg.flow.cfl = num(key, v)?,
            "flow.min_steps" => cfg.flow.min_steps = num(key, v)?,
            "error.model" => model = Some(v.to_string()),
            "error.c_rad" => c_rad = Some(num::<f64>(key, v)?),
            "error.c_orb" => c_orb = Some(num::<f64>(key, v)?),
            "error.bound" => bound = Some(num::<f64>(key, v)?),
            "spectral.n_modes" => cfg.spectral.n_modes = num(key, v)?,
            "spectral.cutoff_exponent" => cfg.spectral.cutoff_exponent = num(key, v)?,
            "spectral.n_quad" => cfg.spectral.n_quad = num(key, v)?,
            "spectral.recursion_cap" => cfg.spectral.recursion_cap = num(key, v)?,
            "spectral.dichotomy_threshold" => cfg.spectral.dichotomy_threshold = num(key, v)?,
            "barrier.a" => cfg.barrier.a = num(key, v)?,
            "barrier.samples" => cfg.barrier.samples = num(key, v)?,
            "bryant.r_max" => cfg.bryant.r_max = num(key, v)?,
            "bryant.tol" => cfg.bryant.tol = num(key, v)?,
            "asymptotics.theta" => cfg.asymptotics.theta = num(key, v)?,
            "asymptotics.M" => cfg.asymptotics.m = num(key, v)?,
            "asymptotics.L" => cfg.asymptotics.l = num(key, v)?,
            "asymptotics.C_theta" => cfg.asymptotics.c_theta = num(key, v)?,
            "asymptotics.eta" => cfg.asymptotics.eta = num(key, v)?,
            "asymptotics.alpha" => cfg.asymptotics.alpha = num(key, v)?,
            "asymptotics.gamma" => cfg.asymptotics.gamma = num(key, v)?,
            "output.dir" => cfg.output.dir = PathBuf::from(v),
            "output.formats" => {
                let mut formats = Vec::new();
                for f in v.split(',').map(str::trim).filter(|f| !f.is_empty()) {
                    let fmt = match f {
                        "csv" => OutputFormat::Csv,
                        "json" => OutputFormat::Json,
                        "svg" => OutputFormat::Svg,
                        _ => return Err(SolabError::Config(format!("output.formats: unknown format '{f}'"))),
                    };
                    if !formats.contains(&fmt) {
                        formats.push(fmt);
                    }
                }
                cfg.output.formats = formats;
            }
            _ => unreachable!("key list and match arms agree"),
        }
    }
    if !unknown.is_empty() {
        return Err(SolabError::Config(format!("unknown keys: {}", unknown.join(", "))));
    }
    if let SeedProfile::File(_) = cfg.flow.seed {
        let path = seed_file.ok_or_else(|| SolabError::Config("flow.seed_profile = file needs flow.seed_file".into()))?;
        cfg.flow.seed = SeedProfile::File(path);
    } else if seed_file.is_some() {
        return Err(SolabError::Config("flow.seed_file is only used with flow.seed_profile = file".into()));
    }
    cfg.error = match model.as_deref() {
        None | Some("default") => {
            if c_rad.is_some() || c_orb.is_some() || bound.is_some() {
                return Err(SolabError::Config("error.c_rad/c_orb/bound need error.model = custom".into()));
            }
            ErrorModel::standard()
        }
        Some("zero") => {
            if c_rad.is_some() || c_orb.is_some() || bound.is_some() {
                return Err(SolabError::Config("error.c_rad/c_orb/bound need error.model = custom".into()));
            }
            ErrorModel::zero()
        }
        Some("custom") => {
            let d = ErrorModel::standard();
            ErrorModel::custom(c_rad.unwrap_or(d.c_rad), c_orb.unwrap_or(d.c_orb), bound.unwrap_or(d.bound))?
        }
        Some(other) => return Err(SolabError::Config(format!("error.model: unknown model '{other}'"))),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Render a configuration back to `key = value` text that [`parse_config`]
/// accepts.
pub fn format_config(cfg: &RunConfig) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    kv("grid.n", cfg.grid.n.to_string());
    kv("grid.zmax", cfg.grid.zmax.map_or("auto".into(), |z| z.to_string()));
    kv("flow.s1", cfg.flow.s1.to_string());
    kv("flow.s0", cfg.flow.s0.to_string());
    kv("flow.snapshots", cfg.flow.snapshots.to_string());
    match &cfg.flow.seed {
        SeedProfile::Cylinder => kv("flow.seed_profile", "cylinder".into()),
        SeedProfile::Sphere => kv("flow.seed_profile", "sphere".into()),
        SeedProfile::NeutralAnsatz => kv("flow.seed_profile", "neutral_ansatz".into()),
        SeedProfile::File(p) => {
            kv("flow.seed_profile", "file".into());
            kv("flow.seed_file", p.display().to_string());
        }
    }
    kv("flow.cfl", cfg.flow.cfl.to_string());
    kv("flow.min_steps", cfg.flow.min_steps.to_string());
    match cfg.error.kind {
        ErrorKind::Zero => kv("error.model", "zero".into()),
        ErrorKind::Default => kv("error.model", "default".into()),
        ErrorKind::Custom => {
            kv("error.model", "custom".into());
            kv("error.c_rad", cfg.error.c_rad.to_string());
            kv("error.c_orb", cfg.error.c_orb.to_string());
            kv("error.bound", cfg.error.bound.to_string());
        }
    }
    kv("spectral.n_modes", cfg.spectral.n_modes.to_string());
    kv("spectral.cutoff_exponent", cfg.spectral.cutoff_exponent.to_string());
    kv("spectral.n_quad", cfg.spectral.n_quad.to_string());
    kv("spectral.recursion_cap", cfg.spectral.recursion_cap.to_string());
    kv("spectral.dichotomy_threshold", cfg.spectral.dichotomy_threshold.to_string());
    kv("barrier.a", cfg.barrier.a.to_string());
    kv("barrier.samples", cfg.barrier.samples.to_string());
    kv("bryant.r_max", cfg.bryant.r_max.to_string());
    kv("bryant.tol", cfg.bryant.tol.to_string());
    kv("asymptotics.theta", cfg.asymptotics.theta.to_string());
    kv("asymptotics.M", cfg.asymptotics.m.to_string());
    kv("asymptotics.L", cfg.asymptotics.l.to_string());
    kv("asymptotics.C_theta", cfg.asymptotics.c_theta.to_string());
    kv("asymptotics.eta", cfg.asymptotics.eta.to_string());
    kv("asymptotics.alpha", cfg.asymptotics.alpha.to_string());
    kv("asymptotics.gamma", cfg.asymptotics.gamma.to_string());
    kv("output.dir", cfg.output.dir.display().to_string());
    let formats: Vec<&str> = cfg
        .output
        .formats
        .iter()
        .map(|f| match f {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Svg => "svg",
        })
        .collect();
    kv("output.formats", formats.join(", "));
    out
}

/// Floats with 17 significant digits (exact round trip).
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_row(out: &mut String, values: &[f64]) {
    let cells: Vec<String> = values.iter().map(|v| fmt(*v)).collect();
    out.push_str(&cells.join(","));
    out.push('\n');
}

/// Snapshot CSV text. Curvatures are `NaN` at tips.
pub fn write_snapshot(p: &RadialProfile, model: &ErrorModel) -> Result<String> {
    p.validate()?;
    let (fz, fzz) = p.derivatives();
    let (e_rad, e_orb) = flow::eval_error(model, p)?;
    let mut out = String::new();
    let _ = writeln!(out, "# solab snapshot");
    let _ = writeln!(out, "# version = {SNAPSHOT_VERSION}");
    let _ = writeln!(out, "# s = {}", fmt(p.s));
    let _ = writeln!(out, "# closed = {}", p.closed);
    out.push_str(&SNAPSHOT_COLUMNS.join(","));
    out.push('\n');
    let range = p.eval_range();
    for i in 0..p.len() {
        let (kr, ko) = if range.contains(&i) {
            geometry::curvatures_from_derivatives(p.f[i], fz[i], fzz[i])
        } else {
            (f64::NAN, f64::NAN)
        };
        csv_row(
            &mut out,
            &[p.s, p.z[i], p.f[i], fz[i], fzz[i], kr, ko, 4.0 * kr + 2.0 * ko, e_rad[i], e_orb[i]],
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotRead {
    pub profile: RadialProfile,
    pub warnings: Vec<String>,
}

/// Parse a snapshot CSV; the profile is rebuilt from the `s`, `z`, `F`
/// columns and the `closed` header.
pub fn read_snapshot(text: &str) -> Result<SnapshotRead> {
    let mut warnings = Vec::new();
    let mut closed = None;
    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut version_seen = false;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            if let Some((k, v)) = c.split_once('=') {
                match k.trim() {
                    "version" => {
                        version_seen = true;
                        if v.trim() != SNAPSHOT_VERSION.to_string() {
                            warnings.push(format!(
                                "snapshot version {} differs from supported version {SNAPSHOT_VERSION}",
                                v.trim()
                            ));
                        }
                    }
                    "closed" => {
                        closed = Some(v.trim().parse::<bool>().map_err(|_| {
                            SolabError::Schema(format!("closed flag '{}' is not a boolean", v.trim()))
                        })?)
                    }
                    _ => {}
                }
            }
            continue;
        }
        if header.is_none() {
            header = Some(line.split(',').map(|c| c.trim().to_string()).collect());
            continue;
        }
        let row = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|_| SolabError::Schema(format!("line {}: non-numeric cell", lineno + 1)))?;
        rows.push(row);
    }
    if !version_seen {
        warnings.push("snapshot has no version field".into());
    }
    let header = header.ok_or_else(|| SolabError::Schema("missing column header".into()))?;
    let missing: Vec<&str> = SNAPSHOT_COLUMNS
        .iter()
        .copied()
        .filter(|c| !header.iter().any(|h| h == c))
        .collect();
    if !missing.is_empty() {
        return Err(SolabError::Schema(format!("missing columns: {}", missing.join(", "))));
    }
    let col = |name: &str| header.iter().position(|h| h == name).expect("checked above");
    let (is, iz, iff) = (col("s"), col("z"), col("F"));
    if rows.is_empty() {
        return Err(SolabError::Schema("snapshot has no rows".into()));
    }
    for (k, r) in rows.iter().enumerate() {
        if r.len() != header.len() {
            return Err(SolabError::Schema(format!("row {k} has {} cells, expected {}", r.len(), header.len())));
        }
    }
    let s = rows[0][is];
    if rows.iter().any(|r| r[is].to_bits() != s.to_bits()) {
        return Err(SolabError::Schema("rows disagree on s".into()));
    }
    let z = rows.iter().map(|r| r[iz]).collect();
    let f = rows.iter().map(|r| r[iff]).collect();
    let closed = closed.unwrap_or_else(|| {
        warnings.push("snapshot has no closed flag; assuming open".into());
        false
    });
    Ok(SnapshotRead {
        profile: RadialProfile::new(z, f, s, closed)?,
        warnings,
    })
}

/// Rescaled CSV (`tau, xi, G, G_xi`) for all snapshots.
pub fn write_rescaled(traj: &FlowTrajectory) -> String {
    let mut out = String::from("tau,xi,G,G_xi\n");
    for p in &traj.snapshots {
        let v = rescaled::to_rescaled(p);
        let gx = v.g_xi();
        for i in 0..v.xi.len() {
            csv_row(&mut out, &[v.tau, v.xi[i], v.g[i], gx[i]]);
        }
    }
    out
}

pub fn write_spectral(r: &SpectralReport) -> String {
    let modes = r.a.first().map_or(0, Vec::len);
    let mut cols: Vec<String> = vec!["tau".into()];
    cols.extend((0..modes).map(|k| format!("a{k}")));
    cols.extend(
        [
            "gamma_plus",
            "gamma_0",
            "gamma_minus",
            "Gamma_plus",
            "Gamma_0",
            "Gamma_minus",
            "rho_max",
            "rho",
            "delta",
            "alpha",
            "A",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    let mut out = cols.join(",");
    out.push('\n');
    for i in 0..r.len() {
        let mut row = vec![r.tau[i]];
        row.extend_from_slice(&r.a[i]);
        row.extend_from_slice(&[
            r.gamma_plus[i],
            r.gamma_zero[i],
            r.gamma_minus[i],
            r.Gamma_plus[i],
            r.Gamma_zero[i],
            r.Gamma_minus[i],
            r.rho_max[i],
            r.rho[i],
            r.delta[i],
            r.alpha[i],
            r.A[i],
        ]);
        csv_row(&mut out, &row);
    }
    out
}

pub fn write_barrier(b: &BarrierFunction, v: &BarrierVerdict) -> String {
    let mut out = String::from("s_hat,psi,psi_prime,margin_ode,margin_props\n");
    for i in 0..b.x.len() {
        csv_row(&mut out, &[b.x[i], b.psi[i], b.psi_prime[i], v.margin_ode[i], v.margin_props[i]]);
    }
    out
}

pub fn write_bryant(b: &BryantProfile) -> String {
    let mut out = String::from("r,phi,phi_prime,fprime,R\n");
    for i in 0..b.r.len() {
        csv_row(&mut out, &[b.r[i], b.phi[i], b.phi_prime[i], b.fprime[i], b.scalar[i]]);
    }
    out
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| SolabError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: &'a RunConfig,
    pub files: Vec<String>,
}

pub fn manifest<'a>(command: &str, config: &'a RunConfig, files: &[PathBuf]) -> Manifest<'a> {
    let mut names: Vec<String> = files
        .iter()
        .map(|p| p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned()))
        .collect();
    names.sort();
    Manifest {
        tool: "solab",
        version: env!("CARGO_PKG_VERSION"),
        command: command.to_string(),
        config,
        files: names,
    }
}

/// Write `contents` to `dir/name`, creating `dir`; returns the path.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

/// One polyline series for [`svg_plot`].
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Minimal line plot. Non-finite points (and non-positive ones on a log
/// axis) are dropped; returns `None` when nothing is left to draw.
pub fn svg_plot(title: &str, x_label: &str, y_label: &str, series: &[Series], log_y: bool) -> Option<String> {
    let (w, h, m) = (640.0, 400.0, 56.0);
    let ty = |y: f64| if log_y { y.log10() } else { y };
    let clean: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite() && (!log_y || *y > 0.0))
                .map(|&(x, y)| (x, ty(y)))
                .collect()
        })
        .collect();
    let all: Vec<(f64, f64)> = clean.iter().flatten().copied().collect();
    if all.is_empty() {
        return None;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 - x0 <= 0.0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 <= 1e-12 * y1.abs().max(1e-300) {
        let pad = if y1 == 0.0 { 1.0 } else { 0.05 * y1.abs() };
        y0 -= pad;
        y1 += pad;
    }
    let px = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" font-size="16" text-anchor="middle">{}</text>"#,
        w / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * m,
        h - 2.0 * m
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
        w / 2.0,
        h - 12.0,
        escape(x_label)
    );
    let ylab = if log_y { format!("log10 {y_label}") } else { y_label.to_string() };
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        h / 2.0,
        h / 2.0,
        escape(&ylab)
    );
    for (v, anchor, x, y) in [
        (x0, "start", m, h - m + 16.0),
        (x1, "end", w - m, h - m + 16.0),
    ] {
        let _ = writeln!(s, r#"<text x="{x}" y="{y}" font-size="10" text-anchor="{anchor}">{v:.4e}</text>"#);
    }
    for (v, y) in [(y0, h - m), (y1, m + 10.0)] {
        let _ = writeln!(s, r#"<text x="{}" y="{y}" font-size="10" text-anchor="end">{v:.4e}</text>"#, m - 4.0);
    }
    for (k, (pts, ser)) in clean.iter().zip(series).enumerate() {
        if pts.is_empty() {
            continue;
        }
        let color = PALETTE[k % PALETTE.len()];
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.3},{:.3}", px(x), py(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#,
            coords.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="11" fill="{color}">{}</text>"#,
            w - m - 150.0,
            m + 16.0 + 14.0 * k as f64,
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    Some(s)
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Plots produced by [`emit_plots`]: `(file name, svg)` plus warnings for
/// inputs that had nothing to draw.
#[derive(Debug, Clone, Default)]
pub struct Plots {
    pub files: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

/// Radius profiles, `α(τ)` against `1/(2τ)`, the `Γ` series and barrier
/// margins, for whichever inputs are given.
pub fn emit_plots(
    traj: Option<&FlowTrajectory>,
    spectral: Option<&SpectralReport>,
    barrier: Option<(&BarrierFunction, &BarrierVerdict)>,
) -> Plots {
    let mut plots = Plots::default();
    let mut add = |name: &str, svg: Option<String>, what: &str| match svg {
        Some(s) => plots.files.push((name.to_string(), s)),
        None => plots.warnings.push(format!("{what}: empty series, no plot written")),
    };
    if let Some(t) = traj {
        let series: Vec<Series> = t
            .snapshots
            .iter()
            .map(|p| Series {
                label: format!("s = {:.4e}", p.s),
                points: p.z.iter().copied().zip(p.f.iter().copied()).collect(),
            })
            .collect();
        add("profiles.svg", svg_plot("Radius profiles", "z", "F", &series, false), "profiles");
    }
    if let Some(r) = spectral {
        let alpha = Series {
            label: "alpha".into(),
            points: r.tau.iter().copied().zip(r.alpha.iter().copied()).collect(),
        };
        let reference = Series {
            label: "1/(2 tau)".into(),
            points: r.tau.iter().map(|&t| (t, 1.0 / (2.0 * t))).collect(),
        };
        add(
            "alpha.svg",
            svg_plot("Neutral mode coefficient", "tau", "alpha", &[alpha, reference], false),
            "alpha",
        );
        let zip = |v: &[f64]| r.tau.iter().copied().zip(v.iter().copied()).collect::<Vec<_>>();
        let gammas = [
            Series { label: "Gamma+".into(), points: zip(&r.Gamma_plus) },
            Series { label: "Gamma0".into(), points: zip(&r.Gamma_zero) },
            Series { label: "Gamma-".into(), points: zip(&r.Gamma_minus) },
        ];
        add("gamma.svg", svg_plot("Mode energies", "tau", "Gamma", &gammas, true), "gamma");
    }
    if let Some((b, v)) = barrier {
        let ode = Series {
            label: "ODE margin".into(),
            points: b.x.iter().copied().zip(v.margin_ode.iter().copied()).collect(),
        };
        let props = Series {
            label: "property margin".into(),
            points: b.x.iter().copied().zip(v.margin_props.iter().copied()).collect(),
        };
        add("barrier.svg", svg_plot("Barrier margins", "s_hat", "margin", &[ode, props], true), "barrier");
    }
    plots
}
