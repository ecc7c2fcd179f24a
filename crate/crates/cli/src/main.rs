use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use solab_core::asymptotics::{self, CheckStatus};
use solab_core::barrier::{self, BarrierFunction, BarrierVerdict};
use solab_core::bryant;
use solab_core::config::OutputFormat;
use solab_core::flow::{self, FlowTrajectory, RunStatus};
use solab_core::io;
use solab_core::spectral::{self, HermiteBasis, SpectralReport};
use solab_core::{RunConfig, SolabError};

/// Numerical laboratory for the level-set profile flow of rotationally
/// symmetric steady solitons.
#[derive(Parser, Debug)]
#[command(name = "solab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate the profile flow and write the snapshots.
    Simulate(Common),
    /// Run the flow, project onto Hermite modes and classify the window.
    AnalyzeSpectral(Common),
    /// Construct or verify the barrier function for `barrier.a`.
    Barrier {
        #[command(subcommand)]
        action: BarrierAction,
    },
    /// Solve the Bryant soliton ODE and check its invariants.
    Bryant(Common),
    /// Run the flow and compare it against the asymptotic predictions.
    VerifyAsymptotics(Common),
    /// Everything above, with plots.
    Report(Common),
}

#[derive(Subcommand, Debug)]
enum BarrierAction {
    Construct(Common),
    Verify(Common),
}

#[derive(clap::Args, Debug)]
struct Common {
    /// Configuration file (`key = value` lines); defaults if omitted.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Exit status: pass, failed check, or usage/configuration problem.
enum Status {
    Pass,
    Fail,
}

enum Failure {
    Usage(String),
    Runtime(SolabError),
}

impl From<SolabError> for Failure {
    fn from(e: SolabError) -> Self {
        match e {
            SolabError::Config(_) | SolabError::Schema(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other),
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, Failure> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            io::parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if let Ok(dir) = std::env::var("SOLAB_OUTPUT_DIR") {
        if !dir.is_empty() {
            cfg.output.dir = PathBuf::from(dir);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Collects output files and records them in the manifest.
struct Outputs<'a> {
    cfg: &'a RunConfig,
    written: Vec<PathBuf>,
}

impl<'a> Outputs<'a> {
    fn new(cfg: &'a RunConfig) -> Self {
        Self { cfg, written: Vec::new() }
    }

    fn wants(&self, f: OutputFormat) -> bool {
        self.cfg.output.formats.contains(&f)
    }

    fn put(&mut self, format: OutputFormat, name: &str, contents: impl FnOnce() -> Result<String, SolabError>) -> Result<(), SolabError> {
        if self.wants(format) {
            let path = io::write_file(&self.cfg.output.dir, name, &contents()?)?;
            self.written.push(path);
        }
        Ok(())
    }

    fn plots(&mut self, traj: Option<&FlowTrajectory>, rep: Option<&SpectralReport>, bar: Option<(&BarrierFunction, &BarrierVerdict)>) -> Result<(), SolabError> {
        if !self.wants(OutputFormat::Svg) {
            return Ok(());
        }
        let plots = io::emit_plots(traj, rep, bar);
        for w in &plots.warnings {
            eprintln!("warning: {w}");
        }
        for (name, svg) in plots.files {
            self.put(OutputFormat::Svg, &name, || Ok(svg))?;
        }
        Ok(())
    }

    fn finish(self, command: &str) -> Result<(), SolabError> {
        let mut files = self.written;
        let manifest = io::manifest(command, self.cfg, &files);
        files.push(io::write_file(&self.cfg.output.dir, "manifest.json", &io::to_json(&manifest)?)?);
        for f in &files {
            println!("wrote {}", f.display());
        }
        Ok(())
    }
}

fn simulate(cfg: &RunConfig, out: &mut Outputs) -> Result<(FlowTrajectory, Status), SolabError> {
    let traj = flow::run(cfg)?;
    for (k, p) in traj.snapshots.iter().enumerate() {
        out.put(OutputFormat::Csv, &format!("snapshot_{k:03}.csv"), || io::write_snapshot(p, &traj.error_model))?;
    }
    out.put(OutputFormat::Csv, "rescaled.csv", || Ok(io::write_rescaled(&traj)))?;
    out.put(OutputFormat::Json, "trajectory.json", || {
        io::to_json(&(&traj.status, &traj.s_values, &traj.tip_distances))
    })?;
    let status = match traj.status {
        RunStatus::Completed => Status::Pass,
        RunStatus::Singularity { z, s } => {
            eprintln!("neck pinch at z = {z}, s = {s}; trajectory truncated");
            Status::Fail
        }
    };
    Ok((traj, status))
}

fn analyze(cfg: &RunConfig, traj: &FlowTrajectory, out: &mut Outputs) -> Result<(SpectralReport, Status), SolabError> {
    let basis = HermiteBasis::new(cfg.spectral.n_modes, cfg.spectral.n_quad);
    let rep = spectral::analyze(traj, &basis, cfg.spectral.cutoff_exponent)?;
    let dichotomy = spectral::dichotomy_classify(&rep, cfg.spectral.dichotomy_threshold);
    let ledger = spectral::mode_recursion_check(&rep, cfg.spectral.recursion_cap);
    out.put(OutputFormat::Csv, "spectral.csv", || Ok(io::write_spectral(&rep)))?;
    out.put(OutputFormat::Json, "spectral.json", || io::to_json(&rep))?;
    let mut status = Status::Pass;
    match &dichotomy {
        Ok(d) => {
            println!("dichotomy: {:?}", d.label);
            out.put(OutputFormat::Json, "dichotomy.json", || io::to_json(d))?;
        }
        Err(e) => eprintln!("dichotomy skipped: {e}"),
    }
    match &ledger {
        Ok(l) => {
            println!("mode recursion: {}", if l.pass { "pass" } else { "fail" });
            out.put(OutputFormat::Json, "recursion.json", || io::to_json(l))?;
            if !l.pass {
                status = Status::Fail;
            }
        }
        Err(e) => eprintln!("mode recursion skipped: {e}"),
    }
    for w in &rep.warnings {
        eprintln!("warning: {w}");
    }
    Ok((rep, status))
}

fn barrier_verdict(cfg: &RunConfig, out: &mut Outputs, verify: bool) -> Result<(BarrierFunction, BarrierVerdict, Status), SolabError> {
    let bf = barrier::construct_barrier_with(cfg.barrier.a, cfg.barrier.samples)?;
    let v = barrier::verify_barrier(&bf)?;
    out.put(OutputFormat::Csv, "barrier.csv", || Ok(io::write_barrier(&bf, &v)))?;
    out.put(OutputFormat::Json, "barrier_fit.json", || io::to_json(&bf.fit))?;
    let mut pass = v.pass;
    if verify {
        let par = barrier::parabolic_check(&bf, 200, 1.0, 100.0)?;
        println!("parabolic form: {} (min margin {:e})", if par.pass { "pass" } else { "fail" }, par.min_margin);
        out.put(OutputFormat::Json, "barrier_verdict.json", || {
            io::to_json(&(&v.ode_inner, &v.ode_outer, &v.properties, &par))
        })?;
        pass &= par.pass;
    }
    println!("barrier a = {}: {}", cfg.barrier.a, if v.pass { "verified" } else { "not verified" });
    Ok((bf, v, if pass { Status::Pass } else { Status::Fail }))
}

fn bryant_run(cfg: &RunConfig, out: &mut Outputs) -> Result<Status, SolabError> {
    let b = bryant::solve_bryant(cfg.bryant.r_max, cfg.bryant.tol)?;
    let inv = bryant::invariants(&b);
    out.put(OutputFormat::Csv, "bryant.csv", || Ok(io::write_bryant(&b)))?;
    out.put(OutputFormat::Json, "bryant_invariants.json", || io::to_json(&inv))?;
    println!("bryant: identity drift {:e}, final phi' {}", inv.max_identity_drift, inv.final_phi_prime);
    let ok = inv.max_identity_drift <= cfg.bryant.tol && inv.phi_prime_decreasing && inv.fprime_nonnegative;
    Ok(if ok { Status::Pass } else { Status::Fail })
}

fn verify(cfg: &RunConfig, traj: &FlowTrajectory, rep: Option<&SpectralReport>, out: &mut Outputs) -> Result<Status, SolabError> {
    let v = asymptotics::verify_trajectory(traj, rep, &cfg.asymptotics)?;
    let json = io::to_json(&v)?;
    print!("{json}");
    out.put(OutputFormat::Json, "verdict.json", || Ok(json))?;
    Ok(if v.overall == CheckStatus::Fail { Status::Fail } else { Status::Pass })
}

fn worst(a: Status, b: Status) -> Status {
    match (a, b) {
        (Status::Pass, Status::Pass) => Status::Pass,
        _ => Status::Fail,
    }
}

fn dispatch(command: Command) -> Result<Status, Failure> {
    let (name, common) = match &command {
        Command::Simulate(c) => ("simulate", c),
        Command::AnalyzeSpectral(c) => ("analyze-spectral", c),
        Command::Barrier { action: BarrierAction::Construct(c) } => ("barrier construct", c),
        Command::Barrier { action: BarrierAction::Verify(c) } => ("barrier verify", c),
        Command::Bryant(c) => ("bryant", c),
        Command::VerifyAsymptotics(c) => ("verify-asymptotics", c),
        Command::Report(c) => ("report", c),
    };
    let cfg = load_config(common.config.as_deref())?;
    let mut out = Outputs::new(&cfg);
    let status = match command {
        Command::Simulate(_) => {
            let (traj, status) = simulate(&cfg, &mut out)?;
            out.plots(Some(&traj), None, None)?;
            status
        }
        Command::AnalyzeSpectral(_) => {
            let (traj, s1) = simulate(&cfg, &mut out)?;
            let (rep, s2) = analyze(&cfg, &traj, &mut out)?;
            out.plots(None, Some(&rep), None)?;
            worst(s1, s2)
        }
        Command::Barrier { action } => {
            let verify = matches!(action, BarrierAction::Verify(_));
            let (bf, v, status) = barrier_verdict(&cfg, &mut out, verify)?;
            out.plots(None, None, Some((&bf, &v)))?;
            status
        }
        Command::Bryant(_) => bryant_run(&cfg, &mut out)?,
        Command::VerifyAsymptotics(_) => {
            let (traj, s1) = simulate(&cfg, &mut out)?;
            let basis = HermiteBasis::new(cfg.spectral.n_modes, cfg.spectral.n_quad);
            let rep = spectral::analyze(&traj, &basis, cfg.spectral.cutoff_exponent).ok();
            worst(s1, verify(&cfg, &traj, rep.as_ref(), &mut out)?)
        }
        Command::Report(_) => {
            let (traj, s1) = simulate(&cfg, &mut out)?;
            let (rep, s2) = analyze(&cfg, &traj, &mut out)?;
            let s3 = verify(&cfg, &traj, Some(&rep), &mut out)?;
            let (bf, v, s4) = barrier_verdict(&cfg, &mut out, true)?;
            let sup = barrier::supersolution_check_with(&traj, &bf)?;
            match sup.pass {
                Some(p) => println!("supersolution: {}", if p { "pass" } else { "fail" }),
                None => println!(
                    "supersolution: no verdict (hypothesis {} exceeds {})",
                    sup.hypothesis_value, sup.hypothesis_bound
                ),
            }
            out.put(OutputFormat::Json, "supersolution.json", || io::to_json(&sup))?;
            let s5 = bryant_run(&cfg, &mut out)?;
            out.plots(Some(&traj), Some(&rep), Some((&bf, &v)))?;
            let s6 = if sup.pass == Some(false) { Status::Fail } else { Status::Pass };
            [s2, s3, s4, s5, s6].into_iter().fold(s1, worst)
        }
    };
    out.finish(name)?;
    Ok(status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
