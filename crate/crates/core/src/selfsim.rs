//! Time stepping of `dg/dt = Q_gamma(g,g) - c d/dx(x g)` towards a steady
//! self-similar profile.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::collision::CollisionOperator;
use crate::error::{Error, Result};
use crate::functionals::{i_gamma_functional, toeplitz_pair_sum};
use crate::grid::Grid;
use crate::profile::{lambda0, maxwell_h, maxwell_profile, weighted_norm, Lp, Profile};

/// Weight order used to compare steady profiles.
pub const COMPARISON_WEIGHT: f64 = 2.5;

/// Even initial data with unit mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialCondition {
    /// Centred Gaussian with second moment `energy`.
    Gaussian { energy: f64 },
    /// Uniform on `[-a, a]` with `a^2/3 = energy`.
    Uniform { energy: f64 },
    /// `H_lambda`.
    Maxwell { lambda: f64 },
    /// Two-column CSV on the solver grid.
    File { path: PathBuf },
}

impl FromStr for InitialCondition {
    type Err = Error;

    /// Accepts `gaussian:1.0`, `gaussian{E=1}`, `uniform:0.25`,
    /// `maxwell:2.0`, `maxwell{lambda=2}` and `file:path.csv`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Config(format!("unrecognised initial condition '{s}'"));
        let (name, arg) = if let Some((n, rest)) = s.split_once('{') {
            let inner = rest.strip_suffix('}').ok_or_else(bad)?;
            let val = inner.split_once('=').map(|(_, v)| v).unwrap_or(inner);
            (n.trim(), val.trim())
        } else if let Some((n, v)) = s.split_once(':') {
            (n.trim(), v.trim())
        } else {
            return Err(bad());
        };
        let num = || arg.parse::<f64>().map_err(|_| bad());
        match name.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(Self::Gaussian { energy: num()? }),
            "uniform" => Ok(Self::Uniform { energy: num()? }),
            "maxwell" => Ok(Self::Maxwell { lambda: num()? }),
            "file" => Ok(Self::File { path: PathBuf::from(arg) }),
            _ => Err(bad()),
        }
    }
}

impl InitialCondition {
    /// Sample on `grid`, normalised to unit mass and made exactly even.
    pub fn sample(&self, grid: Grid) -> Result<Profile> {
        let positive = |v: f64, what: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(Error::InvalidParameter(format!("{what} must be positive, got {v}")))
            }
        };
        let mut p = match self {
            Self::Gaussian { energy } => {
                let e = positive(*energy, "energy")?;
                Profile::from_fn(grid, |x| (-x * x / (2.0 * e)).exp())?
            }
            Self::Uniform { energy } => {
                let a = (3.0 * positive(*energy, "energy")?).sqrt();
                let dx = grid.dx();
                // cell-average of the indicator, so the support edge is resolved
                Profile::from_fn(grid, |x| {
                    let lo = (x - 0.5 * dx).max(-a);
                    let hi = (x + 0.5 * dx).min(a);
                    ((hi - lo) / dx).max(0.0)
                })?
            }
            Self::Maxwell { lambda } => maxwell_profile(grid, positive(*lambda, "lambda")?)?,
            Self::File { path } => {
                let p = Profile::read_csv(grid, path)?;
                if p.asymmetry() > 1e-9 * p.sup().max(1e-300) {
                    return Err(Error::InvalidProfile(format!(
                        "{}: initial data must be even",
                        path.display()
                    )));
                }
                p
            }
        };
        let m = p.mass();
        if !(m > 0.0) {
            return Err(Error::InvalidProfile("initial data has no mass on the grid".into()));
        }
        p.scale(1.0 / m);
        p.symmetrize();
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub grid: Grid,
    pub gamma: f64,
    pub c: f64,
    /// Fixed step; `None` picks the largest stable step.
    pub dt: Option<f64>,
    pub cfl: f64,
    pub max_time: f64,
    pub steady_tol: f64,
    /// Largest mass the positivity clip may remove in one step.
    pub clip_budget: f64,
    /// Time between history samples.
    pub record_every: f64,
    /// At each history sample with `gamma > 0`, dilate the iterate so that
    /// it satisfies the steady energy balance. This removes the slowly
    /// decaying dilation mode.
    pub rebalance: bool,
    pub init: InitialCondition,
}

impl SolverConfig {
    pub fn new(grid: Grid, gamma: f64, c: f64) -> Self {
        Self {
            grid,
            gamma,
            c,
            dt: None,
            cfl: 0.4,
            max_time: 2000.0,
            steady_tol: 1e-8,
            clip_budget: 1e-8,
            record_every: 1.0,
            rebalance: true,
            init: InitialCondition::Gaussian { energy: 1.0 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad(format!("gamma must lie in [0, 1], got {}", self.gamma));
        }
        if !(self.c.is_finite() && self.c >= 0.0) {
            return bad(format!("c must be non-negative, got {}", self.c));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad(format!("cfl must lie in (0, 1], got {}", self.cfl));
        }
        if !(self.max_time > 0.0 && self.steady_tol > 0.0 && self.record_every > 0.0) {
            return bad("max_time, steady_tol and record_every must be positive".into());
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return bad(format!("dt must be positive, got {dt}"));
            }
        }
        Ok(())
    }

    /// Transport limit `cfl * dx / (c L)`.
    pub fn transport_dt(&self) -> f64 {
        let l = self.grid.half_width();
        if self.c == 0.0 {
            f64::INFINITY
        } else {
            self.cfl * self.grid.dx() / (self.c * l)
        }
    }
}

fn van_leer(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

/// Finite-volume `-c d/dx(x g)` with zero flux at `+-L`.
///
/// Face values come from a van Leer limited reconstruction on the upwind
/// side, so the scheme is second order where `g` is smooth and keeps
/// positivity under the transport step limit. The result is then rescaled
/// so that `dx sum_i x_i^2 out_i = 2 c M_2(g) - excess`. With `excess` the
/// surplus energy of the collision step this makes the semi-discrete energy
/// balance exact; without it the walls and the limiter leak energy and at
/// `gamma = 0` no steady state conserves it.
fn drift_into(grid: &Grid, c: f64, g: &[f64], excess: f64, out: &mut [f64]) {
    let n = g.len();
    let dx = grid.dx();
    let slope = |i: usize| {
        if i == 0 || i + 1 == n {
            0.0
        } else {
            van_leer(g[i] - g[i - 1], g[i + 1] - g[i])
        }
    };
    let mut left = 0.0;
    for i in 0..n {
        let right = if i + 1 < n {
            let xf = grid.face(i);
            let gf = if xf > 0.0 {
                g[i] + 0.5 * slope(i)
            } else if xf < 0.0 {
                g[i + 1] - 0.5 * slope(i + 1)
            } else {
                0.0
            };
            c * xf * gf
        } else {
            0.0
        };
        out[i] = -(right - left) / dx;
        left = right;
    }
    let target = 2.0 * c * second_moment(grid, g) - excess;
    let injected = second_moment(grid, out);
    if injected > 0.0 && target > 0.0 {
        let f = target / injected;
        out.iter_mut().for_each(|v| *v *= f);
    }
}

/// The drift term used by the solver; see the module notes on its energy
/// normalisation. Mass of the output is zero up to rounding.
pub fn drift_apply(g: &Profile, c: f64) -> Result<Profile> {
    let mut out = vec![0.0; g.grid.len()];
    drift_into(&g.grid, c, &g.values, 0.0, &mut out);
    Profile::perturbation(g.grid, out)
}

/// Reusable SSP-RK2 integrator.
pub struct Stepper {
    cfg: SolverConfig,
    op: CollisionOperator,
    k: Vec<f64>,
    drift: Vec<f64>,
    stage: Vec<f64>,
    dt: f64,
}

impl Stepper {
    pub fn new(cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = cfg.grid;
        let n = grid.len();
        let op = CollisionOperator::new(grid, cfg.gamma)?;
        // the loss rate of a unit-mass profile is at most (2L)^gamma
        let loss_dt = 1.0 / (2.0 * grid.half_width()).powf(cfg.gamma);
        let auto = cfg.transport_dt().min(loss_dt);
        let dt = match cfg.dt {
            Some(dt) if dt > auto * (1.0 + 1e-12) => {
                return Err(Error::StepTooLarge { dt, limit: auto })
            }
            Some(dt) => dt,
            None => auto,
        };
        Ok(Self {
            cfg: cfg.clone(),
            op,
            k: vec![0.0; n],
            drift: vec![0.0; n],
            stage: vec![0.0; n],
            dt,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `out = Q(g,g) - c d/dx(x g)`; returns the largest loss rate.
    fn rhs(&mut self, g: &[f64], out: &mut [f64]) -> f64 {
        let info = self.op.rate(g, out);
        drift_into(&self.cfg.grid, self.cfg.c, g, info.energy_excess, &mut self.drift);
        out.iter_mut().zip(&self.drift).for_each(|(o, d)| *o += d);
        info.max_loss
    }

    /// One step in place. Negative values are clipped, mass is restored to
    /// its value before the step and the result is made exactly even.
    pub fn step(&mut self, g: &mut [f64]) -> Result<()> {
        let dt = self.dt;
        let grid = self.cfg.grid;
        let mass0: f64 = g.iter().sum();
        let mut k = std::mem::take(&mut self.k);
        let mut stage = std::mem::take(&mut self.stage);
        let loss = self.rhs(g, &mut k);
        if dt * loss > 1.0 {
            self.k = k;
            self.stage = stage;
            return Err(Error::StepTooLarge { dt, limit: 1.0 / loss });
        }
        for ((s, gi), ki) in stage.iter_mut().zip(g.iter()).zip(&k) {
            *s = gi + dt * ki;
        }
        self.rhs(&stage, &mut k);
        for ((gi, s), ki) in g.iter_mut().zip(&stage).zip(&k) {
            *gi = 0.5 * *gi + 0.5 * (s + dt * ki);
        }
        self.k = k;
        self.stage = stage;
        let clipped: f64 = grid.dx() * g.iter().filter(|v| **v < 0.0).map(|v| -v).sum::<f64>();
        if clipped > self.cfg.clip_budget {
            return Err(Error::MassLoss { clipped, budget: self.cfg.clip_budget });
        }
        if clipped > 0.0 {
            g.iter_mut().for_each(|v| *v = v.max(0.0));
        }
        let mass1: f64 = g.iter().sum();
        let r = mass0 / mass1;
        let n = g.len();
        for i in 0..n / 2 {
            let m = 0.5 * r * (g[i] + g[n - 1 - i]);
            g[i] = m;
            g[n - 1 - i] = m;
        }
        Ok(())
    }
}

/// One SSP-RK2 step of the rescaled equation.
pub fn step(g: &Profile, cfg: &SolverConfig) -> Result<Profile> {
    if g.grid != cfg.grid {
        return Err(Error::GridMismatch);
    }
    let mut st = Stepper::new(cfg)?;
    let mut v = g.values.clone();
    st.step(&mut v)?;
    Ok(Profile::density(g.grid, v)?.with_params(cfg.gamma, cfg.c))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub t: f64,
    pub residual: f64,
    #[serde(rename = "M2")]
    pub m2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyResult {
    pub profile: Profile,
    /// `||g_{n+1} - g_n||_1 / dt` at the last step.
    pub residual: f64,
    pub t: f64,
    /// Number of time steps taken.
    pub iterations: u64,
    pub dt: f64,
    #[serde(rename = "M2")]
    pub m2: f64,
    /// `M_2^{-1/2}`, the Maxwell scale with the same energy.
    pub lambda_hat: f64,
    /// `I_gamma(G, G)`; `I_0(G, G)` when `gamma = 0`.
    pub i_gamma_identity: f64,
    /// `max_i |x_i| G_i`.
    #[serde(rename = "max_xG")]
    pub max_xg: f64,
    #[serde(skip)]
    pub history: Vec<HistoryRow>,
}

impl SteadyResult {
    pub fn history_csv(&self) -> String {
        let mut out = String::from("t,residual,M2\n");
        for r in &self.history {
            let _ = writeln!(out, "{:.10e},{:.10e},{:.16e}", r.t, r.residual, r.m2);
        }
        out
    }
}

/// Least-squares slope of `log M_2` against `t`.
pub fn energy_growth_rate(history: &[HistoryRow]) -> f64 {
    let pts: Vec<(f64, f64)> =
        history.iter().filter(|r| r.m2 > 0.0).map(|r| (r.t, r.m2.ln())).collect();
    fit_slope(&pts)
}

pub(crate) fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    sxy / sxx
}

/// Integrate from `init` until the residual drops below `cfg.steady_tol`.
///
/// Fails with [`Error::NotConverged`] at `cfg.max_time`, carrying the
/// lowest-residual iterate and the fitted growth rate of `log M_2`.
pub fn relax_to_steady(init: &Profile, cfg: &SolverConfig) -> Result<SteadyResult> {
    if init.grid != cfg.grid {
        return Err(Error::GridMismatch);
    }
    let mut st = Stepper::new(cfg)?;
    let dt = st.dt();
    let grid = cfg.grid;
    let dx = grid.dx();
    let mut g = init.values.clone();
    let mut prev = g.clone();
    let mut best = (f64::INFINITY, g.clone(), 0.0, 0u64);
    let mut history = vec![HistoryRow { t: 0.0, residual: f64::NAN, m2: second_moment(&grid, &g) }];
    let mut next_record = cfg.record_every;
    let mut t = 0.0;
    let mut steps = 0u64;
    let mut residual = f64::INFINITY;
    while t < cfg.max_time {
        prev.copy_from_slice(&g);
        st.step(&mut g)?;
        t += dt;
        steps += 1;
        residual = dx * g.iter().zip(&prev).map(|(a, b)| (a - b).abs()).sum::<f64>() / dt;
        if residual < best.0 {
            best = (residual, g.clone(), t, steps);
        }
        let converged = residual < cfg.steady_tol;
        if t >= next_record || converged {
            history.push(HistoryRow { t, residual, m2: second_moment(&grid, &g) });
            next_record += cfg.record_every;
            if converged {
                break;
            }
            if cfg.rebalance && cfg.gamma > 0.0 {
                let p = Profile::density(grid, g.clone())?;
                let mu = energy_balance_dilation(&p, cfg.gamma, cfg.c);
                if (mu - 1.0).abs() > 1e-14 {
                    g.copy_from_slice(&dilate(&p, mu)?.values);
                }
            }
        }
    }
    let finish = |values: Vec<f64>, residual: f64, t: f64, steps: u64, history: Vec<HistoryRow>| {
        let m2 = second_moment(&grid, &values);
        let profile = Profile::density(grid, values)?.with_params(cfg.gamma, cfg.c);
        Ok::<_, Error>(SteadyResult {
            i_gamma_identity: i_gamma_functional(&profile, &profile, cfg.gamma)?,
            max_xg: profile.sup_x_weighted(),
            profile,
            residual,
            t,
            iterations: steps,
            dt,
            m2,
            lambda_hat: 1.0 / m2.sqrt(),
            history,
        })
    };
    if residual < cfg.steady_tol {
        return finish(g, residual, t, steps, history);
    }
    let rate = energy_growth_rate(&history);
    let (r, v, tb, sb) = best;
    Err(Error::NotConverged {
        t,
        residual,
        energy_growth_rate: rate,
        best: Box::new(finish(v, r, tb, sb, history)?),
    })
}

fn second_moment(grid: &Grid, g: &[f64]) -> f64 {
    grid.dx() * g.iter().enumerate().map(|(i, v)| grid.x(i).powi(2) * v).sum::<f64>()
}

/// `mu G(mu x)` on the same grid by linear interpolation, renormalised to
/// unit mass.
pub fn dilate(g: &Profile, mu: f64) -> Result<Profile> {
    let grid = g.grid;
    let dx = grid.dx();
    let n = grid.len();
    let at = |x: f64| {
        let s = x / dx + n as f64 / 2.0 - 0.5;
        if s <= 0.0 {
            return if s > -0.5 { g.values[0] } else { 0.0 };
        }
        let i = s.floor() as usize;
        if i + 1 >= n {
            return if s < n as f64 - 0.5 { g.values[n - 1] } else { 0.0 };
        }
        let w = s - i as f64;
        (1.0 - w) * g.values[i] + w * g.values[i + 1]
    };
    let mut p = Profile::from_fn(grid, |x| mu * at(mu * x))?;
    p.scale(1.0 / p.mass());
    p.symmetrize();
    Ok(p)
}

/// Dilation factor `mu` for which `mu G(mu x)` satisfies the steady
/// energy balance `(1/4) int int G G |x-y|^{2+gamma} = 2 c M_2`.
pub fn energy_balance_dilation(g: &Profile, gamma: f64, c: f64) -> f64 {
    if gamma == 0.0 {
        return 1.0;
    }
    let dx = g.dx();
    let k: Vec<f64> = (0..g.values.len()).map(|d| (d as f64 * dx).powf(2.0 + gamma)).collect();
    let a = dx * dx * toeplitz_pair_sum(&g.values, &g.values, &k);
    (a / (8.0 * c * g.energy())).powf(1.0 / gamma)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub gamma: f64,
    pub converged: bool,
    pub result: SteadyResult,
    /// `M_2^{-1/2}`; tends to `lambda0 = 2 sqrt(e)` as `gamma -> 0`.
    pub lambda_hat: f64,
    /// `||G_gamma - H_{lambda0}||` in `L^1(w_{2.5})`.
    pub distance_to_limit: f64,
    /// `|I_gamma(G_gamma, G_gamma)|`, zero for an exact steady state.
    pub i_gamma: f64,
}

/// Steady profiles for each `gamma`, processed in descending order. Each
/// run starts from the previous profile dilated to satisfy the steady
/// energy balance.
pub fn gamma_sweep(gammas: &[f64], cfg: &SolverConfig) -> Result<Vec<SweepEntry>> {
    let mut order: Vec<f64> = gammas.to_vec();
    order.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let limit = maxwell_profile(cfg.grid, lambda0())?;
    let mut start = cfg.init.sample(cfg.grid)?;
    let mut out = Vec::with_capacity(order.len());
    for gamma in order {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidParameter(format!("sweep gamma must lie in (0, 1], got {gamma}")));
        }
        let run = SolverConfig { gamma, ..cfg.clone() };
        let mu = energy_balance_dilation(&start, gamma, cfg.c);
        let init = dilate(&start, mu)?;
        let (converged, result) = match relax_to_steady(&init, &run) {
            Ok(r) => (true, r),
            Err(Error::NotConverged { best, .. }) => (false, *best),
            Err(e) => return Err(e),
        };
        let g = &result.profile;
        let distance_to_limit = weighted_norm(&g.sub(&limit)?, COMPARISON_WEIGHT, Lp::L1);
        let i_gamma = i_gamma_functional(g, g, gamma)?.abs();
        start = g.clone();
        out.push(SweepEntry {
            gamma,
            converged,
            lambda_hat: result.lambda_hat,
            distance_to_limit,
            i_gamma,
            result,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub gamma: f64,
    /// `||G^a - G^b||` in `L^1(w_{2.5})`.
    pub distance: f64,
    pub threshold: f64,
    pub same_profile: bool,
    pub converged: (bool, bool),
    pub m2: (f64, f64),
}

/// Relax two initial data with the same `gamma` and compare the limits.
/// They are declared equal when the distance is below `100 * steady_tol`.
pub fn uniqueness_test(
    gamma: f64,
    a: &InitialCondition,
    b: &InitialCondition,
    cfg: &SolverConfig,
) -> Result<UniquenessReport> {
    let run = SolverConfig { gamma, ..cfg.clone() };
    let relax = |ic: &InitialCondition| -> Result<(bool, SteadyResult)> {
        match relax_to_steady(&ic.sample(run.grid)?, &run) {
            Ok(r) => Ok((true, r)),
            Err(Error::NotConverged { best, .. }) => Ok((false, *best)),
            Err(e) => Err(e),
        }
    };
    let (ca, ra) = relax(a)?;
    let (cb, rb) = relax(b)?;
    let distance = weighted_norm(&ra.profile.sub(&rb.profile)?, COMPARISON_WEIGHT, Lp::L1);
    let threshold = 100.0 * cfg.steady_tol;
    Ok(UniquenessReport {
        gamma,
        distance,
        threshold,
        same_profile: distance <= threshold,
        converged: (ca, cb),
        m2: (ra.m2, rb.m2),
    })
}


/// Pointwise `H_lambda` value, exposed for tests and reports.
pub fn maxwell_value(x: f64, lambda: f64) -> f64 {
    lambda * maxwell_h(lambda * x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_initial_conditions() {
        assert_eq!(
            "gaussian{E=1}".parse::<InitialCondition>().unwrap(),
            InitialCondition::Gaussian { energy: 1.0 }
        );
        assert_eq!(
            "uniform:0.25".parse::<InitialCondition>().unwrap(),
            InitialCondition::Uniform { energy: 0.25 }
        );
        assert!("triangle:1".parse::<InitialCondition>().is_err());
    }

    #[test]
    fn samples_have_unit_mass_and_requested_energy() {
        let grid = Grid::new(12.0, 1024).unwrap();
        let g = InitialCondition::Gaussian { energy: 1.0 }.sample(grid).unwrap();
        assert!((g.mass() - 1.0).abs() < 1e-14);
        assert_eq!(g.momentum(), 0.0);
        assert!((g.energy() - 1.0).abs() < 1e-6);
        let u = InitialCondition::Uniform { energy: 0.25 }.sample(grid).unwrap();
        assert!((u.energy() - 0.25).abs() < 1e-4);
    }

    #[test]
    fn drift_conserves_mass_and_injects_exact_energy() {
        let grid = Grid::new(6.0, 200).unwrap();
        let g = InitialCondition::Gaussian { energy: 0.5 }.sample(grid).unwrap();
        let d = drift_apply(&g, 0.25).unwrap();
        assert!(d.mass().abs() < 1e-14);
        assert!((d.energy() - 0.5 * g.energy()).abs() < 1e-14);
    }

    #[test]
    fn drift_is_second_order_on_smooth_data() {
        // -c (x g)' for g = exp(-x^2/2) is c (x^2 - 1) g
        let err = |n: usize| {
            let grid = Grid::new(8.0, n).unwrap();
            let g = Profile::from_fn(grid, |x| (-0.5 * x * x).exp()).unwrap();
            let d = drift_apply(&g, 0.25).unwrap();
            let exact = Profile::perturbation(grid, grid.centers().iter().map(|&x| 0.25 * (x * x - 1.0) * (-0.5 * x * x).exp()).collect()).unwrap();
            weighted_norm(&d.sub(&exact).unwrap(), 0.0, Lp::L1)
        };
        let (e1, e2, e3) = (err(256), err(512), err(1024));
        assert!(e1 / e2 > 3.0 && e2 / e3 > 3.0, "{e1} {e2} {e3}");
    }

    #[test]
    fn dilation_rescales_energy() {
        let grid = Grid::new(10.0, 800).unwrap();
        let g = maxwell_profile(grid, 2.0).unwrap();
        let h = dilate(&g, 1.5).unwrap();
        let expected = maxwell_profile(grid, 3.0).unwrap();
        let d = weighted_norm(&h.sub(&expected).unwrap(), 0.0, Lp::L1);
        assert!(d < 5e-3, "{d}");
    }

    #[test]
    fn rejects_oversized_step() {
        let grid = Grid::new(10.0, 256).unwrap();
        let mut cfg = SolverConfig::new(grid, 0.0, 0.25);
        cfg.dt = Some(1.0);
        assert!(matches!(Stepper::new(&cfg), Err(Error::StepTooLarge { .. })));
    }
}
