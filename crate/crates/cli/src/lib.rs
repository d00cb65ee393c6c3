//! Command-line front end: config parsing, orchestration and report files.

pub mod battery;
pub mod config;
pub mod manifest;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use inelastic_core::audit::{audit_operator_bounds, audit_pointwise_inequalities, audit_steady_profile};
use inelastic_core::linearized::{assemble_l0, kernel_residual, spectral_gap_estimate, DEFAULT_WEIGHT};
use inelastic_core::maxwell_fourier::{contraction_measurement, sigma_rate, FourierField, FourierGrid};
use inelastic_core::profile::lambda0;
use inelastic_core::selfsim::{gamma_sweep, relax_to_steady, SolverConfig};
use inelastic_core::{Error, Result};
use serde::Serialize;

use crate::battery::{Battery, Settings};
use crate::config::Config;
use crate::manifest::RunManifest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "inelastic-lab", version, about = "Self-similar profiles of the 1-D inelastic Boltzmann equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Thread budget recorded in the manifest; the solvers run on one thread.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Relax to a steady profile and audit it.
    Steady,
    /// Steady profiles over a list of gamma values.
    Sweep,
    /// Fourier-side contraction towards the Maxwellian (c = 1/4, gamma = 0).
    Maxwell,
    /// Assemble the linearized operator and estimate its spectral gap.
    Linearize,
    /// Pointwise inequality and operator bound audits.
    Audit,
    /// The full acceptance battery.
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Self::Steady => "steady",
            Self::Sweep => "sweep",
            Self::Maxwell => "maxwell",
            Self::Linearize => "linearize",
            Self::Audit => "audit",
            Self::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

/// Exit code for an error that ends a run.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidParameter(_) | Error::InvalidGrid(_) | Error::Io(_) => EXIT_CONFIG,
        Error::NotConverged { .. } => EXIT_NOT_CONVERGED,
        _ => EXIT_CHECK_FAILED,
    }
}

struct Run<'a> {
    cli: &'a Cli,
    cfg: Config,
    manifest: RunManifest,
}

impl Run<'_> {
    fn csv(&mut self, name: &str, text: &str) -> Result<()> {
        if self.cli.format != Format::Json {
            self.manifest.emit(name, text)?;
        }
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        if self.cli.format != Format::Csv {
            self.manifest.emit(name, &(serde_json::to_string_pretty(value)? + "\n"))?;
        }
        Ok(())
    }
}

/// Parse `argv` (program name first), run, and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.to_string().lines().next().unwrap_or_default());
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Config("--config is required".into()))?;
    let cfg = Config::load(path)?;
    if cli.threads == 0 {
        return Err(Error::Config("--threads must be at least 1".into()));
    }
    std::fs::create_dir_all(&cli.out)?;
    let manifest = RunManifest::new(cli.command.name(), path, &cfg.text, &cli.out, cli.seed, cli.threads);
    let mut run = Run { cli, cfg, manifest };
    let start = Instant::now();
    let code = match cli.command {
        Command::Steady => steady(&mut run),
        Command::Sweep => sweep(&mut run),
        Command::Maxwell => maxwell(&mut run),
        Command::Linearize => linearize(&mut run),
        Command::Audit => audit(&mut run),
        Command::Verify => verify(&mut run),
    };
    // a failed run still leaves a manifest for what it wrote
    run.manifest.finish(start.elapsed().as_secs_f64())?;
    code
}

fn solver_config(cfg: &Config) -> Result<SolverConfig> {
    let p = cfg.physics()?;
    let mut sc = SolverConfig::new(p.grid()?, p.gamma, p.c);
    sc.steady_tol = cfg.f64_or("solver", "steady_tol", sc.steady_tol)?;
    sc.max_time = cfg.f64_or("solver", "max_time", sc.max_time)?;
    sc.cfl = cfg.f64_or("solver", "cfl", sc.cfl)?;
    sc.clip_budget = cfg.f64_or("solver", "clip_budget", sc.clip_budget)?;
    sc.record_every = cfg.f64_or("solver", "record_every", sc.record_every)?;
    sc.rebalance = cfg.get_or("solver", "rebalance", sc.rebalance)?;
    sc.init = cfg.init("solver", "init")?;
    if cfg.has("solver", "dt") {
        sc.dt = Some(cfg.f64("solver", "dt")?);
    }
    sc.validate()?;
    Ok(sc)
}

fn steady(run: &mut Run) -> Result<i32> {
    let sc = solver_config(&run.cfg)?;
    let init = sc.init.sample(sc.grid)?;
    let (res, code) = match relax_to_steady(&init, &sc) {
        Ok(r) => (r, EXIT_OK),
        Err(Error::NotConverged { best, .. }) => (*best, EXIT_NOT_CONVERGED),
        Err(e) => return Err(e),
    };
    run.csv("profile.csv", &res.profile.to_csv())?;
    run.csv("history.csv", &res.history_csv())?;
    run.json("steady.json", &res)?;
    let audit = audit_steady_profile(&res, None)?;
    run.csv("audit.csv", &audit.to_csv())?;
    run.json("audit.json", &audit)?;
    println!(
        "t = {:.3}, residual = {:.3e}, M2 = {:.6}, lambda_hat = {:.6}, audit {}",
        res.t,
        res.residual,
        res.m2,
        res.lambda_hat,
        if audit.passed() { "clean" } else { "has violations" }
    );
    Ok(if code != EXIT_OK { code } else if audit.passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn sweep(run: &mut Run) -> Result<i32> {
    let mut sc = solver_config(&run.cfg)?;
    sc.init = run.cfg.init_or("sweep", "init", sc.init.clone())?;
    let gammas = run.cfg.list("sweep", "gammas")?;
    let entries = gamma_sweep(&gammas, &sc)?;
    let mut table = String::from("gamma,converged,lambda_hat,distance_to_limit,i_gamma,residual,M2\n");
    for e in &entries {
        let _ = writeln!(
            table,
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            e.gamma, e.converged, e.lambda_hat, e.distance_to_limit, e.i_gamma, e.result.residual, e.result.m2
        );
        run.csv(&format!("profile_gamma_{}.csv", e.gamma), &e.result.profile.to_csv())?;
        println!("gamma = {}: lambda_hat = {:.4}, distance = {:.4}", e.gamma, e.lambda_hat, e.distance_to_limit);
    }
    run.csv("sweep.csv", &table)?;
    run.json("sweep.json", &entries)?;
    Ok(if entries.iter().all(|e| e.converged) { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

#[derive(Serialize)]
struct MaxwellReport<'a> {
    #[serde(flatten)]
    report: &'a inelastic_core::maxwell_fourier::ContractionReport,
    energy: f64,
    lambda: f64,
    rate_over_sigma: f64,
    passed: bool,
}

fn maxwell(run: &mut Run) -> Result<i32> {
    let p = run.cfg.physics()?;
    if p.c != 0.25 || p.gamma != 0.0 {
        return Err(Error::Config(format!(
            "the Fourier scheme needs gamma = 0 and c = 0.25, got gamma = {}, c = {}",
            p.gamma, p.c
        )));
    }
    let c = &run.cfg;
    let grid = FourierGrid::new(c.f64("maxwell", "xi_min")?, c.f64("maxwell", "xi_max")?, c.usize("maxwell", "m")?)?;
    let k = c.f64("maxwell", "k")?;
    let energy = c.f64("maxwell", "energy")?;
    let lambda = c.f64("maxwell", "lambda")?;
    let t_end = c.f64("maxwell", "t_end")?;
    let phi = FourierField::gaussian(grid, energy)?;
    let report = contraction_measurement(&phi, lambda, k, t_end)?;
    let sigma = sigma_rate(k);
    let passed = report.fitted_rate >= 0.9 * sigma && report.monotonicity_violations == 0;
    run.csv("decay.csv", &report.decay_csv())?;
    run.json(
        "report.json",
        &MaxwellReport { report: &report, energy, lambda, rate_over_sigma: report.fitted_rate / sigma, passed },
    )?;
    println!(
        "fitted rate {:.5} = {:.3} sigma_k, {} monotonicity violations",
        report.fitted_rate,
        report.fitted_rate / sigma,
        report.monotonicity_violations
    );
    Ok(if passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn linearize(run: &mut Run) -> Result<i32> {
    let grid = run.cfg.physics()?.grid()?;
    let a = run.cfg.f64_or("linearize", "a", DEFAULT_WEIGHT)?;
    let probes = run.cfg.get_or("linearize", "probes", 200usize)?;
    let l0 = lambda0();
    let op = assemble_l0(grid, l0)?;
    let residual = kernel_residual(&op, l0)?;
    let gap = spectral_gap_estimate(&op, a, probes, run.cli.seed)?;
    let violations = gap.mechanism_violations(1e-8, 10.0);
    let mut csv = String::from("singular_value,i0_with_g0,m2,alignment_with_phi0\n");
    for v in &gap.near_kernel {
        let _ = writeln!(csv, "{:.16e},{:.16e},{:.16e},{:.16e}", v.singular_value, v.i0_with_g0, v.m2, v.alignment_with_phi0);
    }
    run.csv("near_kernel.csv", &csv)?;
    run.json("linearize.json", &gap)?;
    println!(
        "kernel residual {residual:.4e}, l2 gap proxy {:.4e}, l1 gap probe {:.4e}, {violations} mechanism violations",
        gap.gap_l2_proxy, gap.gap_l1_probe
    );
    let ok = gap.gap_l2_proxy > 0.0 && gap.gap_l1_probe > 0.0 && violations == 0;
    Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn audit(run: &mut Run) -> Result<i32> {
    let samples = run.cfg.get_or("audit", "samples", 1_000_000u64)?;
    let trials = run.cfg.get_or("audit", "trials", 50usize)?;
    let mut report = audit_pointwise_inequalities(samples, run.cli.seed)?;
    report.extend(audit_operator_bounds(trials, run.cli.seed)?);
    run.csv("audit.csv", &report.to_csv())?;
    run.json("audit.json", &report)?;
    for c in &report.checks {
        println!("{:<36} {:>9} samples  {:>4} violations", c.name, c.samples, c.violations);
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn verify(run: &mut Run) -> Result<i32> {
    let settings = Settings::from_config(&run.cfg, run.cli.seed)?;
    let mut battery = Battery::new(settings);
    let outcomes = battery.run_all(|o| println!("{}", o.line()));
    let table = battery::table(&outcomes);
    println!("{}", table.lines().last().unwrap_or_default());
    run.csv("verify.csv", &battery::outcomes_csv(&outcomes))?;
    run.json("verify.json", &outcomes)?;
    Ok(if outcomes.iter().all(|o| o.passed) { EXIT_OK } else { EXIT_CHECK_FAILED })
}

/// Convenience for tests: the shipped config directory.
pub fn shipped_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}
