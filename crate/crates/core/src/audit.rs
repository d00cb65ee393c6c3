//! Brute-force checks of the inequalities and identities the analysis rests
//! on: pointwise inequalities by sampling, operator bounds on random
//! profiles, and a posteriori bounds on computed steady profiles.

use std::collections::BTreeMap;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, Distribution};
use serde::{Deserialize, Serialize};

use crate::collision::{collision_frequency, q_apply, q_gain};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linearized::MomentProjector;
use crate::profile::{moment, weighted_norm, Lp, Profile};
use crate::selfsim::SteadyResult;

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub samples: u64,
    pub violations: u64,
    /// Smallest `(rhs - lhs) / scale` seen; negative means violated.
    pub worst_margin: f64,
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn new(name: &str, params: &[(&str, f64)]) -> Self {
        Self {
            name: name.into(),
            samples: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            note: None,
        }
    }

    /// Record `lhs <= rhs` up to `tol` absolute, with the margin scaled by `scale`.
    fn record(&mut self, lhs: f64, rhs: f64, tol: f64, scale: f64) {
        self.samples += 1;
        let margin = (rhs - lhs) / scale.max(f64::MIN_POSITIVE);
        self.worst_margin = self.worst_margin.min(margin);
        if !(lhs <= rhs + tol) {
            self.violations += 1;
        }
    }

    fn with_note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AuditReport {
    pub checks: Vec<Check>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.violations == 0)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn extend(&mut self, other: AuditReport) {
        self.checks.extend(other.checks);
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("name,samples,violations,worst_margin\n");
        for c in &self.checks {
            s.push_str(&format!("{},{},{},{:.6e}\n", c.name, c.samples, c.violations, c.worst_margin));
        }
        s
    }
}

/// Half Cauchy-scale, half compact draws, with a few exact ties.
fn sample_real(rng: &mut ChaCha8Rng) -> f64 {
    match rng.gen_range(0..20) {
        0 => 0.0,
        1..=9 => Cauchy::new(0.0, 1.0).unwrap().sample(rng),
        _ => rng.gen_range(-2.0..2.0),
    }
}

fn sample_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let x = sample_real(rng);
    let y = match rng.gen_range(0..20) {
        0 => x,
        1 => -x,
        _ => sample_real(rng),
    };
    (x, y)
}

/// Constants of the convexity inequality for `m = 2 + k`, `k` in `(k0, 1 - k0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaDelta {
    pub k0: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub delta: f64,
    /// Exponent attaining the smallest `delta_m`.
    pub m_star: f64,
    /// `f_{m*}(-delta)`, zero up to the bisection tolerance.
    pub boundary_margin: f64,
}

/// `f_m(u) = 1 + |u|^m - 2^{1-m}(1+u)^m - (1 - 2^{1-m} - alpha)(u-1)^2`.
pub fn alpha_delta_gap(m: f64, alpha: f64, u: f64) -> f64 {
    let c = 2f64.powf(1.0 - m);
    1.0 + u.abs().powf(m) - c * (1.0 + u).powf(m) - (1.0 - c - alpha) * (u - 1.0).powi(2)
}

/// Find an admissible `(alpha, delta)`: `alpha` is half the largest value
/// the derivative conditions allow, `delta` the smallest root of
/// `f_m(-delta) = 0` over a fine grid of exponents, found by bisection.
pub fn search_alpha_delta(k0: f64) -> Result<AlphaDelta> {
    if !(k0 > 0.0 && k0 < 0.5) {
        return Err(Error::InvalidParameter(format!("k0 must lie in (0, 1/2), got {k0}")));
    }
    let (m_lo, m_hi) = (2.0 + k0, 3.0 - k0);
    let ms: Vec<f64> = (0..=800).map(|i| m_lo + (m_hi - m_lo) * i as f64 / 800.0).collect();
    let lambda = ms
        .iter()
        .map(|&m| {
            let c = 2f64.powf(1.0 - m);
            (m * (m - 1.0) * c + 2.0 * (1.0 - c)).min(2.0 - c * (2.0 + m)).min(-m + 4.0 * (1.0 - c))
        })
        .fold(f64::INFINITY, f64::min);
    if lambda <= 0.0 {
        return Err(Error::SearchFailed(format!("derivative conditions fail: Lambda = {lambda:.3e}")));
    }
    let alpha = lambda / 8.0;
    let mut best = (f64::INFINITY, m_lo);
    for &m in &ms {
        let f = |d: f64| alpha_delta_gap(m, alpha, -d);
        if !(f(0.0) > 0.0 && f(1.0) < 0.0) {
            return Err(Error::SearchFailed(format!("no sign change of f_m on (-1, 0) at m = {m}")));
        }
        let (mut a, mut b) = (0.0, 1.0);
        for _ in 0..80 {
            let mid = 0.5 * (a + b);
            if f(mid) > 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        if a < best.0 {
            best = (a, m);
        }
    }
    // delta_m is smooth in m; a relative 1e-3 margin covers the gaps between grid points
    let delta = best.0 * (1.0 - 1e-3);
    Ok(AlphaDelta {
        k0,
        lambda,
        alpha,
        delta,
        m_star: best.1,
        boundary_margin: alpha_delta_gap(best.1, alpha, -delta),
    })
}

/// Sampled checks of the collision energy identity, the midpoint inequality
/// behind the moment lower bound, the cube-root expansion of `|(x+y)/2|^k`
/// and the convexity inequality with searched `(alpha, delta)`.
pub fn audit_pointwise_inequalities(sample_count: u64, seed: u64) -> Result<AuditReport> {
    if sample_count < 100_000 {
        return Err(Error::InvalidParameter(format!("need at least 1e5 samples, got {sample_count}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seed_f = seed as f64;

    let mut energy = Check::new("energy_identity", &[("seed", seed_f)]);
    for _ in 0..sample_count {
        let (x, y) = sample_pair(&mut rng);
        let a = rng.gen_range(0.5..=1.0);
        let b = 1.0 - a;
        let (xp, yp) = (a * x + b * y, b * x + a * y);
        let lhs = xp * xp + yp * yp - x * x - y * y;
        let rhs = -2.0 * a * b * (x - y).powi(2);
        let scale = x * x + y * y + f64::MIN_POSITIVE;
        // an identity: record both directions
        let err = (lhs - rhs).abs();
        energy.record(err, 0.0, 16.0 * f64::EPSILON * scale, scale);
    }

    let mut mid = Check::new("midpoint_first_moment", &[("seed", seed_f)]);
    for _ in 0..sample_count {
        let (x, y) = sample_pair(&mut rng);
        let g = rng.gen_range(0.0..=1.0);
        let lhs = -(2.0 * (0.5 * (x + y)).abs() - x.abs() - y.abs()) * (x - y).abs().powf(g);
        let rhs = 2f64.powf(g + 1.0) * x.abs().max(y.abs()).powf(g) * x.abs().min(y.abs());
        let scale = rhs.abs().max(lhs.abs());
        mid.record(lhs, rhs, 1e-12 * scale, scale);
    }

    let mut cube = Check::new("midpoint_power_expansion", &[("seed", seed_f)]);
    for _ in 0..sample_count {
        let (x, y) = sample_pair(&mut rng);
        let k = rng.gen_range(0.0..3.0);
        let (ax, ay) = (x.abs(), y.abs());
        let lhs = (0.5 * (x + y)).abs().powf(k);
        let rhs = 2f64.powf(-k)
            * (ax.powf(k)
                + 3.0 * ax.powf(2.0 * k / 3.0) * ay.powf(k / 3.0)
                + 3.0 * ax.powf(k / 3.0) * ay.powf(2.0 * k / 3.0)
                + ay.powf(k));
        let scale = rhs.max(lhs);
        cube.record(lhs, rhs, 1e-12 * scale, scale);
    }

    let k0 = 0.1;
    let ad = search_alpha_delta(k0)?;
    let mut conv = Check::new(
        "convexity_alpha_delta",
        &[("seed", seed_f), ("k0", k0), ("alpha", ad.alpha), ("delta", ad.delta), ("m_star", ad.m_star)],
    )
    .with_note(format!("boundary margin f(-delta) = {:.3e}", ad.boundary_margin));
    for _ in 0..sample_count {
        let m = rng.gen_range(2.0 + k0..3.0 - k0);
        let k = m - 2.0;
        let u = rng.gen_range(-ad.delta..1.0);
        let y = sample_real(&mut rng);
        let (x, y) = if rng.gen_bool(0.5) { (u * y, y) } else { (y, u * y) };
        let lhs = -(2.0 * (0.5 * (x + y)).abs().powf(m) - x.abs().powf(m) - y.abs().powf(m));
        let rhs = (1.0 - 2f64.powf(-1.0 - k) - ad.alpha) * x.abs().max(y.abs()).powf(k) * (x - y).powi(2);
        // lhs >= rhs; both vanish like (1-u)^2 at u = 1
        let scale = x.abs().max(y.abs()).powf(m);
        conv.record(rhs, lhs, 1e-12 * scale, scale);
    }

    Ok(AuditReport { checks: vec![energy, mid, cube, conv] })
}

/// Random non-negative test profile: a mixture of Gaussians, boxes and
/// `(1 + y^2)^-3` bumps.
#[derive(Debug, Clone)]
pub struct Mixture {
    parts: Vec<(u8, f64, f64, f64)>,
}

impl Mixture {
    pub fn random(rng: &mut ChaCha8Rng) -> Self {
        let n = rng.gen_range(1..=3);
        let parts = (0..n)
            .map(|_| (rng.gen_range(0..3u8), rng.gen_range(0.2..1.0), rng.gen_range(-3.0..3.0), rng.gen_range(0.25..1.5)))
            .collect();
        Self { parts }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.parts
            .iter()
            .map(|&(kind, amp, c, w)| {
                let y = (x - c) / w;
                amp * match kind {
                    0 => (-0.5 * y * y).exp(),
                    1 => f64::from(u8::from(y.abs() <= 1.0)),
                    _ => (1.0 + y * y).powi(-3),
                }
            })
            .sum()
    }

    pub fn sample(&self, grid: Grid) -> Result<Profile> {
        Profile::from_fn(grid, |x| self.eval(x))
    }
}

/// Both sides of a bound at one resolution.
type Sides = (f64, f64);

/// Check `lhs <= rhs` at the fine level with slack equal to the change of
/// both sides between the two resolutions.
fn record_refined(check: &mut Check, coarse: Sides, fine: Sides) {
    let slack = (fine.0 - coarse.0).abs() + (fine.1 - coarse.1).abs();
    check.record(fine.0, fine.1 + slack, 0.0, fine.1);
}

fn l1w(f: &Profile, k: f64) -> f64 {
    weighted_norm(f, k, Lp::L1)
}

fn l2w(f: &Profile, k: f64) -> f64 {
    weighted_norm(f, k, Lp::L2)
}

fn product(f: &Profile, g: &Profile) -> Result<Profile> {
    Profile::perturbation(f.grid, f.values.iter().zip(&g.values).map(|(a, b)| a * b).collect())
}

/// `sup_xi |mu^(xi)| / |xi|^k` for a moment-free signed profile, by direct
/// quadrature with the first three Taylor terms removed.
pub fn fourier_k_seminorm(mu: &Profile, k: f64) -> f64 {
    let xs = mu.grid.centers();
    let dx = mu.dx();
    let remainder = |z: f64| -> Complex64 {
        if z.abs() < 1.0 {
            let mut term = Complex64::new(0.0, -z).powi(3) / 6.0;
            let mut sum = term;
            for n in 4..30 {
                term *= Complex64::new(0.0, -z) / n as f64;
                sum += term;
            }
            sum
        } else {
            Complex64::new(z.cos() - 1.0 + 0.5 * z * z, z - z.sin())
        }
    };
    (0..=600)
        .map(|j| 10f64.powf(-3.0 + 5.0 * j as f64 / 600.0))
        .map(|xi| {
            let s: Complex64 = xs.iter().zip(&mu.values).map(|(&x, &v)| remainder(xi * x) * v).sum();
            (s * dx).norm() / xi.powf(k)
        })
        .fold(0.0, f64::max)
}

/// Operator bounds on random profile pairs, each evaluated on two nested
/// grids so that quadrature error becomes an explicit slack.
pub fn audit_operator_bounds(trial_count: usize, seed: u64) -> Result<AuditReport> {
    if trial_count < 50 {
        return Err(Error::InvalidParameter(format!("need at least 50 trials, got {trial_count}")));
    }
    let coarse = Grid::new(16.0, 512)?;
    let fine = coarse.refined();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seed_f = seed as f64;

    let (gk, gg) = (1.0, 0.5);
    let (a, s, p) = (2.5, 0.3, 2.0);
    let (ia, ia_star, ialpha) = (2.3, 2.8, 0.1);
    let kf = 2.5;
    let mut weak = Check::new("gain_weak_l2", &[("seed", seed_f)]);
    let mut l1 = Check::new("collision_weighted_l1", &[("seed", seed_f)]);
    let mut loss = Check::new("loss_weighted_l2", &[("seed", seed_f)]);
    let mut gain_proof = Check::new("gain_weighted_l2_proof_constant", &[("k", gk), ("gamma", gg)]);
    let mut diff = Check::new("kernel_comparison_l1", &[("a", a), ("s", s), ("p", p), ("seed", seed_f)]);
    let mut ratios = (Vec::new(), Vec::new(), Vec::new());

    for _ in 0..trial_count {
        let (mf, mg, mh) = (Mixture::random(&mut rng), Mixture::random(&mut rng), Mixture::random(&mut rng));
        let gamma = rng.gen_range(0.01..1.0);
        let k = rng.gen_range(0.0..2.5);
        let gamma_d = if rng.gen_bool(0.5) { 0.1 } else { rng.gen_range(0.01..0.9) };
        let mut sides = Vec::new();
        for grid in [coarse, fine] {
            let (f, g, h) = (mf.sample(grid)?, mg.sample(grid)?, mh.sample(grid)?);
            let dx = grid.dx();
            let qp = q_gain(&f, &g, 0.0)?;
            let weak_lhs = dx * qp.values.iter().zip(&h.values).map(|(a, b)| a * b).sum::<f64>();
            let weak_rhs = 2f64.sqrt() * l2w(&h, 0.0) * (l1w(&f, 0.0) * l2w(&g, 0.0)).min(l1w(&g, 0.0) * l2w(&f, 0.0));

            let q = q_apply(&f, &g, gamma)?.rate;
            let l1_lhs = l1w(&q, k);
            let l1_rhs = 2.0 * l1w(&f, k + gamma) * l1w(&g, k + gamma);

            let sigma = collision_frequency(&f, gg)?.sigma;
            let loss_lhs = l2w(&product(&f, &sigma)?, gk);
            let loss_rhs = l1w(&f, gg) * l2w(&f, gk + gg);

            let gain = q_gain(&f, &f, gg)?;
            let ratio = l2w(&gain, gk) / (l2w(&f, 0.0) * l1w(&f, gk + gg));

            let d0 = q_apply(&f, &g, 0.0)?.rate;
            let dg = q_apply(&f, &g, gamma_d)?.rate;
            let diff_lhs = l1w(&d0.sub(&dg)?, a);
            let b = s + gamma_d + a;
            let diff_rhs = 4.0 * gamma_d * l1w(&f, a) * l2w(&g, a)
                + 4.0 * p / (p - 1.0) * gamma_d * gamma_d.ln().abs() * l1w(&f, a) * l1w(&g, a)
                + 16.0 * gamma_d / s * l1w(&f, b) * l1w(&g, b);

            let interp = l1w(&f, ia) / (l2w(&f, 0.0).powf(ialpha) * l1w(&f, ia_star).powf(1.0 - ialpha));

            let proj = MomentProjector::new(grid, 1.0)?;
            let mu = Profile::perturbation(grid, proj.apply(&f.values))?;
            let fourier = fourier_k_seminorm(&mu, kf) / l1w(&mu, kf);

            sides.push([
                (weak_lhs, weak_rhs),
                (l1_lhs, l1_rhs),
                (loss_lhs, loss_rhs),
                (diff_lhs, diff_rhs),
                (ratio, interp),
                (fourier, 0.0),
            ]);
        }
        record_refined(&mut weak, sides[0][0], sides[1][0]);
        record_refined(&mut l1, sides[0][1], sides[1][1]);
        record_refined(&mut loss, sides[0][2], sides[1][2]);
        record_refined(&mut diff, sides[0][3], sides[1][3]);
        let proof_c = 2f64.powf(gk + gg + 0.5) + 2f64.powf(gg + 0.5);
        gain_proof.record(sides[1][4].0, proof_c, 0.0, proof_c);
        ratios.0.push((sides[0][4].0, sides[1][4].0));
        ratios.1.push((sides[0][4].1, sides[1][4].1));
        ratios.2.push((sides[0][5].0, sides[1][5].0));
    }

    let fitted = |name: &str, r: &[(f64, f64)], params: &[(&str, f64)]| {
        let c0 = r.iter().map(|v| v.0).fold(0.0, f64::max);
        let c1 = r.iter().map(|v| v.1).fold(0.0, f64::max);
        let mut c = Check::new(name, params);
        c.params.insert("fitted_c".into(), c1);
        // refinement stability: the fitted constant moves by at most 5%
        c.record((c1 / c0 - 1.0).abs(), 0.05, 0.0, 0.05);
        c.samples = r.len() as u64;
        c
    };
    let gain_fit = fitted("gain_weighted_l2_fit", &ratios.0, &[("k", gk), ("gamma", gg)]);
    let interp = fitted("interpolation_l1_l2", &ratios.1, &[("a", ia), ("a_star", ia_star), ("alpha", ialpha)]);
    let fourier = fitted("fourier_norm_bound", &ratios.2, &[("k", kf)]);

    Ok(AuditReport { checks: vec![weak, l1, loss, gain_fit, gain_proof, diff, interp, fourier] })
}

/// A posteriori bounds on a computed steady profile. Bounds that hold only
/// for `gamma > 0` are recorded with zero samples at `gamma = 0`. If a
/// solution on a finer grid is supplied, `sup |x| G` is compared with it.
pub fn audit_steady_profile(res: &SteadyResult, refined: Option<&SteadyResult>) -> Result<AuditReport> {
    let g = &res.profile;
    let gamma = g
        .gamma
        .ok_or_else(|| Error::InvalidProfile("steady profile carries no gamma".into()))?;
    let r = res.residual;
    let mut checks = Vec::new();

    let mut energy = Check::new("energy_upper_bound", &[("gamma", gamma), ("residual", r)]);
    let mut lower = Check::new("moment_lower_bound", &[("gamma", gamma)]);
    let mut ident = Check::new("steady_identity", &[("gamma", gamma), ("residual", r)]);
    if gamma > 0.0 {
        energy.record(g.energy(), 0.5 + 10.0 * r, 0.0, 0.5);
        let floor_g = 1.0 / (8.0 * 2f64.powf(gamma));
        for s in [gamma, 1.0, 2.0] {
            let floor = floor_g.powf(s / gamma);
            let ms = moment(g, s);
            lower.record(floor, ms, 0.0, ms);
            lower.params.insert(format!("M_{s}"), ms);
        }
        ident.record(res.i_gamma_identity.abs(), 10.0 * r, 0.0, 10.0 * r);
    } else {
        let note = "applies to gamma > 0 only".to_string();
        energy = energy.with_note(note.clone());
        lower = lower.with_note(note.clone());
        ident = ident.with_note(note);
    }
    checks.extend([energy, lower, ident]);

    let mut sup = Check::new("weighted_sup", &[("gamma", gamma), ("max_xG", res.max_xg)]);
    sup.samples = 1;
    sup.worst_margin = if res.max_xg.is_finite() { 1.0 } else { -1.0 };
    if !res.max_xg.is_finite() {
        sup.violations = 1;
    }
    if let Some(fine) = refined {
        let rel = (fine.max_xg / res.max_xg - 1.0).abs();
        sup.params.insert("refined_max_xG".into(), fine.max_xg);
        sup.record(rel, 0.1, 0.0, 0.1);
    }
    checks.push(sup);
    Ok(AuditReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn alpha_delta_search_is_tight() {
        let ad = search_alpha_delta(0.1).unwrap();
        assert!(ad.lambda > 0.0 && ad.alpha > 0.0);
        assert!(ad.delta > 0.0 && ad.delta < 1.0);
        assert!(ad.boundary_margin >= 0.0 && ad.boundary_margin < 1e-4, "{}", ad.boundary_margin);
        assert!(search_alpha_delta(0.6).is_err());
    }

    #[test]
    fn gain_pairing_of_uniform_densities() {
        // f = g = h = 1/2 on [-1, 1]: every midpoint stays inside, so the
        // pairing is (1/4)(1/2)(4) = 1/2, below sqrt(2) (1/sqrt 2)^2 = 1/sqrt 2
        let grid = Grid::new(2.0, 400).unwrap();
        let u = Profile::from_fn(grid, |x| if x.abs() < 1.0 { 0.5 } else { 0.0 }).unwrap();
        let gain = q_gain(&u, &u, 0.0).unwrap();
        let pairing: f64 = gain.values.iter().zip(&u.values).map(|(a, b)| a * b).sum::<f64>() * grid.dx();
        assert!((pairing - 0.5).abs() < 1e-2, "{pairing}");
        let bound = 2f64.sqrt() * l2w(&u, 0.0) * l1w(&u, 0.0) * l2w(&u, 0.0);
        assert!((bound - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn energy_identity_example() {
        // x = 1, y = -1, a = 1/2: both sides equal -2
        let (x, y, a) = (1.0f64, -1.0f64, 0.5);
        let (xp, yp) = (a * x + (1.0 - a) * y, (1.0 - a) * x + a * y);
        assert_eq!(xp * xp + yp * yp - x * x - y * y, -2.0);
        assert_eq!(-2.0 * a * (1.0 - a) * (x - y) * (x - y), -2.0);
    }

    #[test]
    fn fourier_seminorm_of_moment_free_bump() {
        // mu = h'''(x) for h = e^{-x^2/2}/sqrt(2 pi): mu^ = (i xi)^3 e^{-xi^2/2}
        let grid = Grid::new(12.0, 2048).unwrap();
        let v = grid
            .centers()
            .iter()
            .map(|&x| (3.0 * x - x * x * x) * (-0.5 * x * x).exp() / (2.0 * PI).sqrt())
            .collect();
        let mu = Profile::perturbation(grid, v).unwrap();
        // sup xi^{3-k} e^{-xi^2/2} at xi^2 = 3 - k
        let k: f64 = 2.5;
        let exact = (3.0 - k).powf((3.0 - k) / 2.0) * (-(3.0 - k) / 2.0).exp();
        assert!((fourier_k_seminorm(&mu, k) - exact).abs() < 1e-4 * exact);
    }
}
