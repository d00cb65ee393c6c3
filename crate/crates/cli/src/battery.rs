//! The acceptance battery behind `verify`.
//!
//! Grids come from the config; targets and tolerances are fixed here.

use std::time::Instant;

use inelastic_core::audit::{self, Mixture};
use inelastic_core::collision::{q_apply, q_gain, q_gain_fast_maxwell, q_weak, Monomial};
use inelastic_core::functionals::{i0_functional, i0_maxwell_exact, i0_maxwell_truncation, i_gamma_functional};
use inelastic_core::linearized::{assemble_l0, kernel_residual, spectral_gap_estimate};
use inelastic_core::maxwell_fourier::{contraction_measurement, sigma_rate, FourierField, FourierGrid};
use inelastic_core::profile::{lambda0, maxwell_profile, weighted_norm};
use inelastic_core::selfsim::{
    energy_growth_rate, gamma_sweep, relax_to_steady, uniqueness_test, InitialCondition, SolverConfig,
    SteadyResult, SweepEntry,
};
use inelastic_core::{Error, Grid, Lp, Profile, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Config;

pub const CRITERIA: [(u8, &str); 14] = [
    (1, "conservation"),
    (2, "dissipation_identity"),
    (3, "maxwell_steady_state"),
    (4, "energy_growth_control"),
    (5, "fourier_contraction"),
    (6, "limit_temperature"),
    (7, "stability_trend"),
    (8, "uniqueness"),
    (9, "steady_identities"),
    (10, "linearized_operator"),
    (11, "operator_bounds"),
    (12, "pointwise_inequalities"),
    (13, "fast_maxwell_gain"),
    (14, "functional_targets"),
];

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub measured: String,
    pub target: String,
    pub details: Value,
    #[serde(skip)]
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "[{:>2}] {:<24} {}  measured: {}  target: {}  ({:.1} s)",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.measured,
            self.target,
            self.seconds
        )
    }
}

struct Verdict {
    passed: bool,
    measured: String,
    target: String,
    details: Value,
}

fn verdict(passed: bool, measured: String, target: &str, details: Value) -> Verdict {
    Verdict { passed, measured, target: target.to_string(), details }
}

/// Criterion parameters read from the config.
#[derive(Debug, Clone)]
pub struct Settings {
    pub c: f64,
    pub seed: u64,
    pub steady_tol: f64,
    pub max_time: f64,
    pub sweep_grid: Grid,
    pub sweep_coarse_cells: usize,
    pub sweep_gammas: Vec<f64>,
    pub sweep_init: InitialCondition,
    pub maxwell_grid: Grid,
    pub maxwell_coarse_cells: usize,
    pub maxwell_init: InitialCondition,
    pub control_grid: Grid,
    pub control_c: f64,
    pub control_max_time: f64,
    pub unique_grid: Grid,
    pub unique_gamma: f64,
    pub unique_a: InitialCondition,
    pub unique_b: InitialCondition,
    pub unique_control_a: InitialCondition,
    pub unique_control_b: InitialCondition,
    pub fourier: FourierGrid,
    pub fourier_k: f64,
    pub fourier_energy: f64,
    pub fourier_lambda: f64,
    pub fourier_t_end: f64,
    pub lin_half_width: f64,
    pub lin_cells: Vec<usize>,
    pub lin_weight: f64,
    pub lin_probes: usize,
    pub audit_samples: u64,
    pub audit_trials: usize,
    pub collision_grid: Grid,
    pub functional_grid: Grid,
}

fn grid_of(cfg: &Config, section: &str) -> Result<Grid> {
    Grid::new(cfg.f64(section, "L")?, cfg.usize(section, "N")?)
}

impl Settings {
    pub fn from_config(cfg: &Config, seed: u64) -> Result<Self> {
        let phys = cfg.physics()?;
        let sweep_grid = grid_of(cfg, "sweep")?;
        let maxwell_grid = grid_of(cfg, "maxwell_steady")?;
        Ok(Self {
            c: phys.c,
            seed,
            steady_tol: cfg.f64_or("solver", "steady_tol", 1e-8)?,
            max_time: cfg.f64_or("solver", "max_time", 2000.0)?,
            sweep_grid,
            sweep_coarse_cells: cfg.usize("sweep", "coarse_N")?,
            sweep_gammas: cfg.list("sweep", "gammas")?,
            sweep_init: cfg.init("sweep", "init")?,
            maxwell_grid,
            maxwell_coarse_cells: cfg.usize("maxwell_steady", "coarse_N")?,
            maxwell_init: cfg.init("maxwell_steady", "init")?,
            control_grid: grid_of(cfg, "control")?,
            control_c: cfg.f64("control", "c")?,
            control_max_time: cfg.f64("control", "max_time")?,
            unique_grid: grid_of(cfg, "uniqueness")?,
            unique_gamma: cfg.f64("uniqueness", "gamma")?,
            unique_a: cfg.init("uniqueness", "init_a")?,
            unique_b: cfg.init("uniqueness", "init_b")?,
            unique_control_a: cfg.init("uniqueness", "control_a")?,
            unique_control_b: cfg.init("uniqueness", "control_b")?,
            fourier: FourierGrid::new(cfg.f64("maxwell", "xi_min")?, cfg.f64("maxwell", "xi_max")?, cfg.usize("maxwell", "m")?)?,
            fourier_k: cfg.f64("maxwell", "k")?,
            fourier_energy: cfg.f64("maxwell", "energy")?,
            fourier_lambda: cfg.f64("maxwell", "lambda")?,
            fourier_t_end: cfg.f64("maxwell", "t_end")?,
            lin_half_width: cfg.f64("linearize", "L")?,
            lin_cells: cfg.list("linearize", "N_series")?.into_iter().map(|v| v as usize).collect(),
            lin_weight: cfg.f64("linearize", "a")?,
            lin_probes: cfg.usize("linearize", "probes")?,
            audit_samples: cfg.get_or("audit", "samples", 1_000_000)?,
            audit_trials: cfg.get_or("audit", "trials", 50)?,
            collision_grid: grid_of(cfg, "collision")?,
            functional_grid: grid_of(cfg, "functionals")?,
        })
    }
}

/// Runs criteria and caches the sweeps shared by 6, 7 and 9.
pub struct Battery {
    pub settings: Settings,
    sweeps: Option<(Vec<SweepEntry>, Vec<SweepEntry>)>,
}

impl Battery {
    pub fn new(settings: Settings) -> Self {
        Self { settings, sweeps: None }
    }

    pub fn run_all(&mut self, mut progress: impl FnMut(&Outcome)) -> Vec<Outcome> {
        CRITERIA
            .iter()
            .map(|&(id, _)| {
                let o = self.run(id);
                progress(&o);
                o
            })
            .collect()
    }

    pub fn run(&mut self, id: u8) -> Outcome {
        let name = CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1).unwrap_or("unknown");
        let start = Instant::now();
        let res = match id {
            1 => self.conservation(),
            2 => self.dissipation_identity(),
            3 => self.maxwell_steady_state(),
            4 => self.energy_growth_control(),
            5 => self.fourier_contraction(),
            6 => self.limit_temperature(),
            7 => self.stability_trend(),
            8 => self.uniqueness(),
            9 => self.steady_identities(),
            10 => self.linearized_operator(),
            11 => self.operator_bounds(),
            12 => self.pointwise_inequalities(),
            13 => self.fast_maxwell_gain(),
            14 => self.functional_targets(),
            _ => Err(Error::InvalidParameter(format!("no criterion {id}"))),
        };
        let v = res.unwrap_or_else(|e| verdict(false, format!("error: {e}"), "-", Value::Null));
        Outcome {
            id,
            name: name.to_string(),
            passed: v.passed,
            measured: v.measured,
            target: v.target,
            details: v.details,
            seconds: start.elapsed().as_secs_f64(),
        }
    }

    fn solver(&self, grid: Grid, gamma: f64, c: f64, init: &InitialCondition) -> SolverConfig {
        let mut cfg = SolverConfig::new(grid, gamma, c);
        cfg.steady_tol = self.settings.steady_tol;
        cfg.max_time = self.settings.max_time;
        cfg.init = init.clone();
        cfg
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.settings.seed);
        rng.set_stream(stream);
        rng
    }

    fn conservation(&mut self) -> Result<Verdict> {
        let grid = self.settings.collision_grid;
        let xs = grid.centers();
        let dx = grid.dx();
        let mut rng = self.rng(1);
        let (mut worst_mass, mut worst_mom, mut weak_nonzero) = (0.0f64, 0.0f64, 0usize);
        for _ in 0..50 {
            let f = Mixture::random(&mut rng).sample(grid)?;
            let g = Mixture::random(&mut rng).sample(grid)?;
            let gamma = rng.gen_range(0.0..=1.0);
            let q = q_apply(&f, &g, gamma)?;
            // total loss mass int int f g |x-y|^gamma sets the scale
            let loss = inelastic_core::collision::q_loss(&f, &g, gamma)?;
            let scale = loss.values.iter().map(|v| v.abs()).sum::<f64>() * dx;
            let mass = q.rate.values.iter().sum::<f64>() * dx;
            let mom = q.rate.values.iter().zip(&xs).map(|(v, x)| v * x).sum::<f64>() * dx;
            worst_mass = worst_mass.max(mass.abs() / scale);
            worst_mom = worst_mom.max(mom.abs() / (scale * grid.half_width()));
            for k in [0, 1] {
                if q_weak(&f, &g, &Monomial(k), gamma)? != 0.0 {
                    weak_nonzero += 1;
                }
            }
        }
        Ok(verdict(
            worst_mass <= 1e-12 && worst_mom <= 1e-12 && weak_nonzero == 0,
            format!("mass {worst_mass:.1e}, momentum {worst_mom:.1e}, weak nonzero {weak_nonzero}"),
            "<= 1e-12 relative; weak form exactly 0",
            json!({"pairs": 50, "mass_rel": worst_mass, "momentum_rel": worst_mom, "weak_nonzero": weak_nonzero}),
        ))
    }

    fn dissipation_identity(&mut self) -> Result<Verdict> {
        let grid = self.settings.collision_grid;
        let mut rng = self.rng(2);
        let mut worst_weak = 0.0f64;
        for _ in 0..10 {
            let f = Mixture::random(&mut rng).sample(grid)?;
            let gamma = rng.gen_range(0.0..=1.0);
            let weak = q_weak(&f, &f, &Monomial(2), gamma)?;
            let direct = direct_dissipation(&f, gamma);
            worst_weak = worst_weak.max((weak - direct).abs() / direct.abs());
        }
        // energy of the deposited rate against the same sum, at three
        // resolutions of a smooth profile
        let gamma = 0.5;
        let mut errs = Vec::new();
        let mut dxs = Vec::new();
        let base = grid.half_width();
        for n in [grid.len() / 4, grid.len() / 2, grid.len()] {
            let g = Grid::new(base, n)?;
            let h = maxwell_profile(g, 1.0)?;
            let q = q_apply(&h, &h, gamma)?;
            let energy: f64 = q.rate.values.iter().zip(g.centers()).map(|(v, x)| v * x * x).sum::<f64>() * g.dx();
            errs.push((energy - direct_dissipation(&h, gamma)).abs());
            dxs.push(g.dx());
        }
        let c = (errs[0] - errs[1]) / (dxs[0].powi(2) - dxs[1].powi(2));
        let bound = 3.0 * c * dxs[2].powi(2);
        Ok(verdict(
            worst_weak <= 1e-12 && errs[2] <= bound,
            format!("weak rel {worst_weak:.1e}; energy err {:.2e} vs 3C dx^2 = {bound:.2e}", errs[2]),
            "<= 1e-12; <= 3 C dx^2",
            json!({"weak_rel": worst_weak, "energy_errors": errs, "dx": dxs, "richardson_c": c}),
        ))
    }

    fn maxwell_steady_state(&mut self) -> Result<Verdict> {
        let s = &self.settings;
        let fine = s.maxwell_grid;
        let coarse = Grid::new(fine.half_width(), s.maxwell_coarse_cells)?;
        let mut dist = Vec::new();
        let mut drift = 0.0f64;
        for grid in [coarse, fine] {
            let cfg = self.solver(grid, 0.0, s.c, &s.maxwell_init);
            let res = relax_to_steady(&cfg.init.sample(grid)?, &cfg)?;
            let lambda = match s.maxwell_init {
                InitialCondition::Gaussian { energy } | InitialCondition::Uniform { energy } => energy.powf(-0.5),
                _ => res.lambda_hat,
            };
            let h = maxwell_profile(grid, lambda)?;
            dist.push(weighted_norm(&res.profile.sub(&h)?, 0.0, Lp::L1));
            let m0 = res.history.first().map(|r| r.m2).unwrap_or(res.m2);
            drift = drift.max(((res.m2 - m0) / m0).abs());
        }
        let ratio = dist[0] / dist[1];
        Ok(verdict(
            dist[1] <= 0.02 && ratio >= 1.8 && drift <= 0.01,
            format!("L1 {:.4} (coarse {:.4}, ratio {ratio:.2}), M2 drift {drift:.1e}", dist[1], dist[0]),
            "<= 0.02, ratio >= 1.8, drift <= 1%",
            json!({"distance": dist, "ratio": ratio, "m2_drift": drift}),
        ))
    }

    fn energy_growth_control(&mut self) -> Result<Verdict> {
        let s = &self.settings;
        let mut cfg = self.solver(s.control_grid, 0.0, s.control_c, &s.maxwell_init);
        cfg.max_time = s.control_max_time;
        let expected = 2.0 * s.control_c - 0.5;
        match relax_to_steady(&cfg.init.sample(cfg.grid)?, &cfg) {
            Err(Error::NotConverged { energy_growth_rate: rate, best, .. }) => {
                let fitted = energy_growth_rate(&best.history);
                let rel = (rate - expected).abs() / expected;
                Ok(verdict(
                    rel <= 0.1,
                    format!("NotConverged, rate {rate:.4} ({:.1}% off)", 100.0 * rel),
                    &format!("NotConverged, rate {expected} +- 10%"),
                    json!({"rate": rate, "history_fit": fitted, "expected": expected}),
                ))
            }
            Ok(r) => Ok(verdict(false, format!("converged at t = {:.2}", r.t), "NotConverged", Value::Null)),
            Err(e) => Err(e),
        }
    }

    fn fourier_contraction(&mut self) -> Result<Verdict> {
        let s = &self.settings;
        let phi = FourierField::gaussian(s.fourier, s.fourier_energy)?;
        let rep = contraction_measurement(&phi, s.fourier_lambda, s.fourier_k, s.fourier_t_end)?;
        let sigma = sigma_rate(s.fourier_k);
        let d0 = rep.series[0].1;
        let above = rep.series.iter().filter(|(t, d)| *d > d0 * (-sigma * t).exp() * (1.0 + 1e-3)).count();
        let ok = above == 0 && rep.fitted_rate >= 0.9 * sigma;
        Ok(verdict(
            ok,
            format!("rate {:.4} ({:.2} sigma), {above} points above the envelope", rep.fitted_rate, rep.fitted_rate / sigma),
            &format!(">= {:.5}, envelope respected", 0.9 * sigma),
            json!({"sigma": sigma, "fitted_rate": rep.fitted_rate, "above_envelope": above,
                   "fixed_point_drift": rep.fixed_point_drift}),
        ))
    }

    fn sweeps(&mut self) -> Result<&(Vec<SweepEntry>, Vec<SweepEntry>)> {
        if self.sweeps.is_none() {
            let s = &self.settings;
            let fine = self.solver(s.sweep_grid, s.sweep_gammas[0], s.c, &s.sweep_init);
            let coarse_grid = Grid::new(s.sweep_grid.half_width(), s.sweep_coarse_cells)?;
            let coarse = SolverConfig { grid: coarse_grid, ..fine.clone() };
            let f = gamma_sweep(&s.sweep_gammas, &fine)?;
            let c = gamma_sweep(&s.sweep_gammas, &coarse)?;
            self.sweeps = Some((f, c));
        }
        Ok(self.sweeps.as_ref().expect("just set"))
    }

    fn limit_temperature(&mut self) -> Result<Verdict> {
        let (fine, coarse) = self.sweeps()?;
        let l0 = lambda0();
        let gaps: Vec<f64> = fine.iter().map(|e| (e.lambda_hat - l0).abs()).collect();
        let monotone = gaps.windows(2).all(|w| w[1] < w[0]);
        let last = *gaps.last().unwrap_or(&f64::INFINITY);
        let coarse_last = coarse.last().map(|e| (e.lambda_hat - l0).abs()).unwrap_or(f64::INFINITY);
        let converged = fine.iter().all(|e| e.converged);
        let lambdas: Vec<f64> = fine.iter().map(|e| e.lambda_hat).collect();
        Ok(verdict(
            monotone && converged && last <= 0.17 && last < coarse_last,
            format!("lambda_hat {lambdas:.3?}, gap {last:.3} (coarse {coarse_last:.3})"),
            "monotone, gap <= 0.17, shrinking",
            json!({"gammas": fine.iter().map(|e| e.gamma).collect::<Vec<_>>(), "lambda_hat": lambdas,
                   "coarse_lambda_hat": coarse.iter().map(|e| e.lambda_hat).collect::<Vec<_>>(),
                   "converged": converged}),
        ))
    }

    fn stability_trend(&mut self) -> Result<Verdict> {
        let (fine, _) = self.sweeps()?;
        let d: Vec<f64> = fine.iter().map(|e| e.distance_to_limit).collect();
        Ok(verdict(
            d.windows(2).all(|w| w[1] < w[0]),
            format!("{d:.4?}"),
            "strictly decreasing",
            json!({"distance_to_limit": d}),
        ))
    }

    fn uniqueness(&mut self) -> Result<Verdict> {
        let s = &self.settings;
        let cfg = self.solver(s.unique_grid, s.unique_gamma, s.c, &s.unique_a);
        let rep = uniqueness_test(s.unique_gamma, &s.unique_a, &s.unique_b, &cfg)?;
        let ctl = uniqueness_test(0.0, &s.unique_control_a, &s.unique_control_b, &cfg)?;
        let ok = rep.converged == (true, true) && rep.distance <= 1e-3 && ctl.distance >= 0.1;
        Ok(verdict(
            ok,
            format!("distance {:.1e}, control {:.3}", rep.distance, ctl.distance),
            "<= 1e-3; control >= 0.1",
            json!({"report": rep, "control": ctl}),
        ))
    }

    fn steady_identities(&mut self) -> Result<Verdict> {
        let (fine, coarse) = self.sweeps()?;
        let pick = |v: &[SweepEntry]| -> Option<SteadyResult> {
            v.iter().find(|e| (e.gamma - 0.1).abs() < 1e-12).or(v.first()).map(|e| e.result.clone())
        };
        let (Some(a), b) = (pick(fine), pick(coarse)) else {
            return Err(Error::InvalidParameter("empty sweep".into()));
        };
        let rep = audit::audit_steady_profile(&a, b.as_ref())?;
        let failed: Vec<&str> = rep.checks.iter().filter(|c| c.violations > 0).map(|c| c.name.as_str()).collect();
        Ok(verdict(
            rep.passed(),
            if failed.is_empty() { format!("{} checks clean", rep.checks.len()) } else { format!("violations in {failed:?}") },
            "0 violations",
            serde_json::to_value(&rep)?,
        ))
    }

    fn linearized_operator(&mut self) -> Result<Verdict> {
        let s = &self.settings;
        let l0 = lambda0();
        let mut residuals = Vec::new();
        let mut gaps = Vec::new();
        for &n in &s.lin_cells {
            let a = assemble_l0(Grid::new(s.lin_half_width, n)?, l0)?;
            residuals.push(kernel_residual(&a, l0)?);
            if n >= 512 {
                gaps.push(spectral_gap_estimate(&a, s.lin_weight, s.lin_probes, s.seed)?);
            }
        }
        let monotone = residuals.windows(2).all(|w| w[1] < w[0]);
        let last = *residuals.last().unwrap_or(&f64::INFINITY);
        let positive = gaps.iter().all(|g| g.gap_l2_proxy > 0.0 && g.gap_l1_probe > 0.0);
        let within = |f: fn(&inelastic_core::linearized::GapReport) -> f64| {
            gaps.windows(2).all(|w| (f(&w[1]) / f(&w[0]) - 1.0).abs() <= 0.15)
        };
        let stable = gaps.len() >= 2 && within(|g| g.gap_l2_proxy) && within(|g| g.gap_l1_probe);
        let l2: Vec<f64> = gaps.iter().map(|g| g.gap_l2_proxy).collect();
        let l1: Vec<f64> = gaps.iter().map(|g| g.gap_l1_probe).collect();
        Ok(verdict(
            monotone && last <= 1e-2 && positive && stable,
            format!("residual {residuals:.4?}; l2 gap {l2:.4?}; l1 gap {l1:.4?}"),
            "residual <= 1e-2 and decreasing; gaps > 0 within 15%",
            json!({"cells": s.lin_cells, "kernel_residual": residuals, "gaps": gaps}),
        ))
    }

    fn operator_bounds(&mut self) -> Result<Verdict> {
        let rep = audit::audit_operator_bounds(self.settings.audit_trials, self.settings.seed)?;
        let v: u64 = rep.checks.iter().map(|c| c.violations).sum();
        Ok(verdict(
            rep.passed(),
            format!("{v} violations over {} checks", rep.checks.len()),
            "0 violations",
            serde_json::to_value(&rep)?,
        ))
    }

    fn pointwise_inequalities(&mut self) -> Result<Verdict> {
        let rep = audit::audit_pointwise_inequalities(self.settings.audit_samples, self.settings.seed)?;
        let v: u64 = rep.checks.iter().map(|c| c.violations).sum();
        let witness = rep.get("convexity_alpha_delta").map(|c| c.params.clone()).unwrap_or_default();
        let found = witness.get("alpha").is_some_and(|a| *a > 0.0) && witness.get("delta").is_some_and(|d| *d > 0.0);
        Ok(verdict(
            rep.passed() && found,
            format!("{v} violations; witness alpha {:.4}, delta {:.4}",
                witness.get("alpha").copied().unwrap_or(f64::NAN),
                witness.get("delta").copied().unwrap_or(f64::NAN)),
            "0 violations, witness found",
            serde_json::to_value(&rep)?,
        ))
    }

    fn fast_maxwell_gain(&mut self) -> Result<Verdict> {
        let grid = self.settings.collision_grid;
        let mut rng = self.rng(13);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let f = Mixture::random(&mut rng).sample(grid)?;
            let fast = q_gain_fast_maxwell(&f)?;
            let direct = q_gain(&f, &f, 0.0)?;
            let scale = direct.sup();
            let diff = fast.values.iter().zip(&direct.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst = worst.max(diff / scale);
        }
        Ok(verdict(worst <= 1e-10, format!("{worst:.1e}"), "<= 1e-10 relative", json!({"profiles": 20, "max_rel": worst})))
    }

    fn functional_targets(&mut self) -> Result<Verdict> {
        let grid = self.settings.functional_grid;
        let l = grid.half_width();
        let exact = i0_maxwell_exact();
        let corrected = |g: Grid| -> Result<f64> {
            let h = maxwell_profile(g, 1.0)?;
            Ok(i0_functional(&h, &h)? + i0_maxwell_truncation(g.half_width()))
        };
        let value = corrected(grid)?;
        let coarse = corrected(Grid::new(l, grid.len() / 2)?)?;
        let wide = corrected(Grid::new(2.0 * l, 2 * grid.len())?)?;
        // quadrature: change under halving; truncation remainder: twice the
        // change of the corrected value when the box doubles at fixed dx
        let budget = (value - coarse).abs() + 2.0 * (wide - value).abs();
        let err = (value - exact).abs();

        let h = maxwell_profile(grid, 1.0)?;
        let i0 = i0_functional(&h, &h)?;
        let gammas = [1e-1, 1e-2, 1e-3];
        let diffs: Vec<f64> =
            gammas.iter().map(|&g| i_gamma_functional(&h, &h, g).map(|v| (v - i0).abs())).collect::<Result<_>>()?;
        // least-squares slope through the origin
        let c = gammas.iter().zip(&diffs).map(|(g, d)| g * d).sum::<f64>() / gammas.iter().map(|g| g * g).sum::<f64>();
        let linear = gammas.iter().zip(&diffs).all(|(g, d)| *d <= 1.1 * c * g && *d >= 0.5 * c * g);
        Ok(verdict(
            err <= budget && linear,
            format!("I0 err {err:.1e} (budget {budget:.1e}); C = {c:.3}"),
            "err <= budget; |I_g - I_0| <= 1.1 C g",
            json!({"i0_corrected": value, "exact": exact, "error": err, "budget": budget,
                   "gammas": gammas, "differences": diffs, "slope": c}),
        ))
    }
}

/// `-1/4 dx^2 sum_i sum_j f_i f_j |x_i - x_j|^{gamma+2}`, summed directly.
fn direct_dissipation(f: &Profile, gamma: f64) -> f64 {
    let xs = f.grid.centers();
    let dx = f.dx();
    let mut s = 0.0;
    for (i, fi) in f.values.iter().enumerate() {
        for (j, fj) in f.values.iter().enumerate() {
            s += fi * fj * (xs[i] - xs[j]).abs().powf(gamma + 2.0);
        }
    }
    -0.25 * dx * dx * s
}

/// Fixed-width table of outcomes.
pub fn table(outcomes: &[Outcome]) -> String {
    let mut out = String::new();
    for o in outcomes {
        out.push_str(&o.line());
        out.push('\n');
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    out.push_str(&format!("{passed}/{} criteria passed\n", outcomes.len()));
    out
}

pub fn outcomes_csv(outcomes: &[Outcome]) -> String {
    let mut out = String::from("id,name,passed,measured,target\n");
    for o in outcomes {
        out.push_str(&format!(
            "{},{},{},\"{}\",\"{}\"\n",
            o.id,
            o.name,
            o.passed,
            o.measured.replace('"', "'"),
            o.target.replace('"', "'")
        ));
    }
    out
}
