//! Maxwell-kernel dynamics in Fourier variables,
//! `d phi/dt = (xi/4) d phi/d xi + phi(xi/2)^2 - phi`.
//!
//! Values are stored as deficits `u = 1 - phi` on a geometric grid
//! `xi_j = xi_min 2^{j/m}`, so the `O(xi^2)` behaviour near the origin
//! keeps full relative precision. Below `xi_min` the field is the Taylor
//! model `u = E xi^2 / 2` fixed by the conserved energy `E`.
//!
//! A step is Strang split: half reaction, exact transport, half reaction.
//! The transport over `dt = 4 ln 2 / m` is an exact shift by one index.

use std::f64::consts::LN_2;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::Profile;
use crate::selfsim::fit_slope;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierGrid {
    pub xi_min: f64,
    /// Points per octave.
    pub m: usize,
    /// Number of points.
    #[serde(rename = "M")]
    pub len: usize,
}

impl FourierGrid {
    /// Grid covering `[xi_min, xi_max]`.
    pub fn new(xi_min: f64, xi_max: f64, m: usize) -> Result<Self> {
        if !(xi_min > 0.0 && xi_max > xi_min && xi_max.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "need 0 < xi_min < xi_max, got {xi_min}, {xi_max}"
            )));
        }
        if m < 8 {
            return Err(Error::InvalidGrid(format!("need at least 8 points per octave, got {m}")));
        }
        let len = (m as f64 * (xi_max / xi_min).log2()).ceil() as usize + 1;
        Ok(Self { xi_min, m, len })
    }

    pub fn xi(&self, j: usize) -> f64 {
        self.xi_min * (j as f64 / self.m as f64).exp2()
    }

    pub fn xi_max(&self) -> f64 {
        self.xi(self.len - 1)
    }

    /// Time step of one exact transport shift.
    pub fn dt(&self) -> f64 {
        4.0 * LN_2 / self.m as f64
    }
}

/// Deficit `1 - (1 + s) e^{-s}` of `H_hat` at `s = |xi| / lambda`.
pub fn h_hat_deficit(s: f64) -> f64 {
    let s = s.abs();
    if s < 0.1 {
        // sum_{n>=2} (-1)^n (n-1) s^n / n!
        let mut term = s * s / 2.0;
        let mut sum = term;
        for n in 3..24 {
            term *= -s / n as f64;
            sum += (n - 1) as f64 * term;
        }
        sum
    } else {
        1.0 - (1.0 + s) * (-s).exp()
    }
}

/// `H_hat_lambda(xi) = (1 + |xi|/lambda) e^{-|xi|/lambda}`.
pub fn h_hat(xi: f64, lambda: f64) -> f64 {
    let s = xi.abs() / lambda;
    (1.0 + s) * (-s).exp()
}

/// A characteristic function on a [`FourierGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierField {
    pub grid: FourierGrid,
    /// `1 - phi(xi_j)`.
    pub deficit: Vec<Complex64>,
    /// Second moment `E`, so that `phi = 1 - E xi^2 / 2 + ...` near zero.
    pub energy: f64,
}

impl FourierField {
    pub fn from_deficit(grid: FourierGrid, energy: f64, f: impl Fn(f64) -> Complex64) -> Self {
        let deficit = (0..grid.len).map(|j| f(grid.xi(j))).collect();
        Self { grid, deficit, energy }
    }

    pub fn maxwell(grid: FourierGrid, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
        }
        Ok(Self::from_deficit(grid, 1.0 / (lambda * lambda), |xi| {
            Complex64::new(h_hat_deficit(xi / lambda), 0.0)
        }))
    }

    pub fn gaussian(grid: FourierGrid, energy: f64) -> Result<Self> {
        if !(energy > 0.0 && energy.is_finite()) {
            return Err(Error::InvalidParameter(format!("energy must be positive, got {energy}")));
        }
        Ok(Self::from_deficit(grid, energy, |xi| {
            Complex64::new(-(-0.5 * energy * xi * xi).exp_m1(), 0.0)
        }))
    }

    /// `phi(xi_j)`.
    pub fn values(&self) -> Vec<Complex64> {
        self.deficit.iter().map(|u| Complex64::new(1.0, 0.0) - u).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("xi,re,im\n");
        for (j, p) in self.values().iter().enumerate() {
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", self.grid.xi(j), p.re, p.im);
        }
        out
    }
}

/// `phi(xi) = dx sum f_i exp(-i x_i xi)` on `grid`, with `E = M_2(f)`.
pub fn profile_to_fourier(f: &Profile, grid: FourierGrid) -> FourierField {
    let dx = f.dx();
    let xs = f.grid.centers();
    let mass = f.mass();
    let energy = f.energy();
    FourierField::from_deficit(grid, energy, |xi| {
        let mut re = 1.0 - mass;
        let mut im = 0.0;
        for (x, v) in xs.iter().zip(&f.values) {
            let h = 0.5 * x * xi;
            let s = h.sin();
            re += dx * v * 2.0 * s * s;
            im += dx * v * (x * xi).sin();
        }
        Complex64::new(re, im)
    })
}

/// Integrator settings for [`fourier_step`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierStepper {
    /// RK4 substeps per half reaction.
    pub substeps: usize,
}

impl Default for FourierStepper {
    fn default() -> Self {
        Self { substeps: 4 }
    }
}

impl FourierStepper {
    /// Deficit form of the reaction, `du/ds = 2 u_h - u_h^2 - u` with
    /// `u_h(xi) = u(xi/2)`; `a` is the sub-grid coefficient of `xi^2`.
    fn reaction_rhs(grid: &FourierGrid, u: &[Complex64], a: f64, out: &mut [Complex64]) {
        let m = grid.m;
        for j in 0..u.len() {
            let uh = if j >= m {
                u[j - m]
            } else {
                let h = 0.5 * grid.xi(j);
                Complex64::new(a * h * h, 0.0)
            };
            out[j] = 2.0 * uh - uh * uh - u[j];
        }
    }

    /// Integrate the reaction over `[0, len]`; the sub-grid coefficient is
    /// `a0 e^{-s/2}`.
    fn react(&self, grid: &FourierGrid, u: &mut [Complex64], a0: f64, len: f64) {
        let n = u.len();
        let h = len / self.substeps as f64;
        let mut k1 = vec![Complex64::default(); n];
        let mut k2 = k1.clone();
        let mut k3 = k1.clone();
        let mut k4 = k1.clone();
        let mut tmp = k1.clone();
        for step in 0..self.substeps {
            let s = step as f64 * h;
            let a = |t: f64| a0 * (-0.5 * t).exp();
            Self::reaction_rhs(grid, u, a(s), &mut k1);
            for i in 0..n {
                tmp[i] = u[i] + 0.5 * h * k1[i];
            }
            Self::reaction_rhs(grid, &tmp, a(s + 0.5 * h), &mut k2);
            for i in 0..n {
                tmp[i] = u[i] + 0.5 * h * k2[i];
            }
            Self::reaction_rhs(grid, &tmp, a(s + 0.5 * h), &mut k3);
            for i in 0..n {
                tmp[i] = u[i] + h * k3[i];
            }
            Self::reaction_rhs(grid, &tmp, a(s + h), &mut k4);
            for i in 0..n {
                u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
    }

    /// One Strang step of length `grid.dt()`.
    pub fn step(&self, phi: &mut FourierField) -> Result<()> {
        let grid = phi.grid;
        let dt = grid.dt();
        let e = phi.energy;
        self.react(&grid, &mut phi.deficit, 0.5 * e, 0.5 * dt);
        phi.deficit.rotate_left(1);
        let last = phi.deficit.len() - 1;
        phi.deficit[last] = Complex64::new(1.0, 0.0);
        self.react(&grid, &mut phi.deficit, 0.5 * e * (0.25 * dt).exp(), 0.5 * dt);
        for (j, u) in phi.deficit.iter().enumerate() {
            let modulus = (Complex64::new(1.0, 0.0) - u).norm();
            if modulus > 1.0 + 1e-12 {
                return Err(Error::CharacteristicBound { xi: grid.xi(j), modulus });
            }
        }
        Ok(())
    }
}

/// Advance `phi` by `dt`, which must be a whole number of transport
/// steps `4 ln 2 / m`.
pub fn fourier_step(phi: &FourierField, dt: f64) -> Result<FourierField> {
    let base = phi.grid.dt();
    let steps = (dt / base).round();
    if steps < 1.0 || (steps * base - dt).abs() > 1e-9 * dt {
        return Err(Error::InvalidGrid(format!(
            "dt = {dt} is not a multiple of the transport step 4 ln2/m = {base}"
        )));
    }
    let stepper = FourierStepper::default();
    let mut out = phi.clone();
    for _ in 0..steps as usize {
        stepper.step(&mut out)?;
    }
    Ok(out)
}

/// `sup_j |phi(xi_j) - psi(xi_j)| / xi_j^k`; needs equal second moments.
pub fn k_norm(phi: &FourierField, psi: &FourierField, k: f64) -> Result<f64> {
    if phi.grid != psi.grid {
        return Err(Error::GridMismatch);
    }
    if (phi.energy - psi.energy).abs() > 1e-8 {
        return Err(Error::MomentMismatch(phi.energy, psi.energy));
    }
    Ok(phi
        .deficit
        .iter()
        .zip(&psi.deficit)
        .enumerate()
        .map(|(j, (a, b))| (a - b).norm() / phi.grid.xi(j).powf(k))
        .fold(0.0, f64::max))
}

/// Contraction rate `1 - k/4 - 2^{1-k}` of the k-norm.
pub fn sigma_rate(k: f64) -> f64 {
    1.0 - 0.25 * k - (1.0 - k).exp2()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub k: f64,
    pub sigma_k: f64,
    /// `-d log D / dt` fitted over `window`.
    pub fitted_rate: f64,
    pub window: (f64, f64),
    pub grid: FourierGrid,
    /// `(t, D(t))` samples.
    pub series: Vec<(f64, f64)>,
    /// Consecutive samples with `D(t+s) > D(t) e^{-sigma s} (1 + 1e-3)`.
    pub monotonicity_violations: usize,
    /// k-norm drift of the evolved `H_hat` from the exact one at the end.
    pub fixed_point_drift: f64,
}

impl ContractionReport {
    pub fn decay_csv(&self) -> String {
        let mut out = String::from("t,distance\n");
        for (t, d) in &self.series {
            let _ = writeln!(out, "{t:.10e},{d:.16e}");
        }
        out
    }
}

/// Evolve `phi0` and `H_hat_lambda` side by side for time `t_end` and
/// record their k-distance after every step. The rate is fitted on the
/// second half of the run.
pub fn contraction_measurement(
    phi0: &FourierField,
    lambda: f64,
    k: f64,
    t_end: f64,
) -> Result<ContractionReport> {
    if !(k > 2.0 && k < 3.0) {
        return Err(Error::InvalidParameter(format!("k must lie in (2, 3), got {k}")));
    }
    let grid = phi0.grid;
    let exact = FourierField::maxwell(grid, lambda)?;
    let mut psi = exact.clone();
    let mut phi = phi0.clone();
    let stepper = FourierStepper::default();
    let dt = grid.dt();
    let steps = (t_end / dt).ceil() as usize;
    let sigma = sigma_rate(k);
    let mut series = vec![(0.0, k_norm(&phi, &psi, k)?)];
    for n in 1..=steps {
        stepper.step(&mut phi)?;
        stepper.step(&mut psi)?;
        series.push((n as f64 * dt, k_norm(&phi, &psi, k)?));
    }
    let monotonicity_violations = series
        .windows(2)
        .filter(|w| w[1].1 > w[0].1 * (-sigma * (w[1].0 - w[0].0)).exp() * (1.0 + 1e-3))
        .count();
    let t_final = series.last().map(|s| s.0).unwrap_or(0.0);
    let window = (0.5 * t_final, t_final);
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, d)| *t >= window.0 && *d > 0.0)
        .map(|(t, d)| (*t, d.ln()))
        .collect();
    Ok(ContractionReport {
        k,
        sigma_k: sigma,
        fitted_rate: -fit_slope(&pts),
        window,
        grid,
        series,
        monotonicity_violations,
        fixed_point_drift: k_norm(&psi, &exact, k)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> FourierGrid {
        FourierGrid::new(1e-8, 60.0, 16).unwrap()
    }

    #[test]
    fn deficit_series_matches_closed_form() {
        for s in [0.05f64, 0.09, 0.099] {
            let direct = 1.0 - (1.0 + s) * (-s).exp();
            assert!((h_hat_deficit(s) - direct).abs() < 1e-15);
        }
        let s = 1e-6;
        assert!((h_hat_deficit(s) / (0.5 * s * s) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn sigma_values() {
        assert!((sigma_rate(2.5) - 0.021446609406726).abs() < 1e-12);
        assert!(sigma_rate(2.0).abs() < 1e-15);
        assert!(sigma_rate(3.0).abs() < 1e-15);
    }

    #[test]
    fn k_norm_of_cubic_bump() {
        // difference xi^3 exp(-xi^2); sup of xi^{1/2} exp(-xi^2) is at xi = 1/2
        let g = FourierGrid::new(0.5 * (-20.0f64).exp2(), 60.0, 64).unwrap();
        let zero = FourierField::from_deficit(g, 1.0, |_| Complex64::default());
        let bump = FourierField::from_deficit(g, 1.0, |xi| {
            Complex64::new(-xi.powi(3) * (-xi * xi).exp(), 0.0)
        });
        let d = k_norm(&bump, &zero, 2.5).unwrap();
        let exact = 0.5f64.sqrt() * (-0.25f64).exp();
        assert!((d - exact).abs() < 1e-12 * exact, "{d} {exact}");
        let other = FourierField::from_deficit(g, 1.5, |_| Complex64::default());
        assert!(matches!(k_norm(&bump, &other, 2.5), Err(Error::MomentMismatch(..))));
    }

    #[test]
    fn constant_one_is_a_fixed_point() {
        let g = grid();
        let one = FourierField::from_deficit(g, 0.0, |_| Complex64::default());
        let dt = g.dt();
        let out = fourier_step(&one, 8.0 * dt).unwrap();
        // entries enter with phi = 0 and relax as exp(-age) since phi(xi/2) = 1
        for k in 0..8 {
            let u = out.deficit[g.len - 1 - k];
            let age = 0.5 * dt + k as f64 * dt;
            assert!((u.re - (-age).exp()).abs() < 1e-9 && u.im == 0.0, "{k} {u}");
        }
        assert!(out.deficit.iter().rev().skip(8).all(|u| u.norm() == 0.0));
    }

    #[test]
    fn maxwell_drift_vanishes_under_refinement() {
        let drift = |m: usize| {
            let g = FourierGrid::new(1e-6, 40.0, m).unwrap();
            let exact = FourierField::maxwell(g, 1.0).unwrap();
            let steps = (4.0 / g.dt()).round() * g.dt();
            let out = fourier_step(&exact, steps).unwrap();
            // compare away from the inflow boundary
            (0..g.len)
                .filter(|&j| g.xi(j) < 10.0)
                .map(|j| (out.deficit[j] - exact.deficit[j]).norm())
                .fold(0.0, f64::max)
        };
        let (a, b) = (drift(16), drift(32));
        assert!(a < 1e-3, "{a}");
        let ratio = a / b;
        assert!(ratio > 3.5, "ratio {ratio}");
    }

    #[test]
    fn rejects_incommensurate_step() {
        let g = grid();
        let phi = FourierField::gaussian(g, 1.0).unwrap();
        assert!(fourier_step(&phi, 0.1).is_err());
    }
}
