//! Grid functions, moments and weighted norms.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Whether a profile must stay non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Density,
    Perturbation,
}

/// Cell values of a function on a [`Grid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub grid: Grid,
    pub values: Vec<f64>,
    /// Inelasticity exponent the profile belongs to, if any.
    pub gamma: Option<f64>,
    /// Drift coefficient the profile belongs to, if any.
    pub c: Option<f64>,
    pub kind: ProfileKind,
}

impl Profile {
    /// A non-negative density.
    pub fn density(grid: Grid, values: Vec<f64>) -> Result<Self> {
        check_len(&grid, &values)?;
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidProfile(format!(
                "density value {} at cell {i} is negative or not finite",
                values[i]
            )));
        }
        Ok(Self { grid, values, gamma: None, c: None, kind: ProfileKind::Density })
    }

    /// A signed function (rates, perturbations, differences).
    pub fn perturbation(grid: Grid, values: Vec<f64>) -> Result<Self> {
        check_len(&grid, &values)?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile(format!("value at cell {i} is not finite")));
        }
        Ok(Self { grid, values, gamma: None, c: None, kind: ProfileKind::Perturbation })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.x(i))).collect();
        Self::density(grid, values)
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
            gamma: None,
            c: None,
            kind: ProfileKind::Perturbation,
        }
    }

    pub fn with_params(mut self, gamma: f64, c: f64) -> Self {
        self.gamma = Some(gamma);
        self.c = Some(c);
        self
    }

    pub fn dx(&self) -> f64 {
        self.grid.dx()
    }

    pub fn mass(&self) -> f64 {
        self.dx() * self.values.iter().sum::<f64>()
    }

    /// First moment, summed in mirror pairs so that even profiles give
    /// exactly zero.
    pub fn momentum(&self) -> f64 {
        let n = self.values.len();
        let mut s = 0.0;
        for i in 0..n / 2 {
            let j = n - 1 - i;
            s += self.grid.x(i) * self.values[i] + self.grid.x(j) * self.values[j];
        }
        self.dx() * s
    }

    pub fn energy(&self) -> f64 {
        moment(self, 2.0)
    }

    /// Largest `|f_i - f_{N-1-i}|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.values.len();
        (0..n / 2).map(|i| (self.values[i] - self.values[n - 1 - i]).abs()).fold(0.0, f64::max)
    }

    /// Replace the values by their even part.
    pub fn symmetrize(&mut self) {
        let n = self.values.len();
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let m = 0.5 * (self.values[i] + self.values[j]);
            self.values[i] = m;
            self.values[j] = m;
        }
    }

    pub fn scale(&mut self, a: f64) {
        self.values.iter_mut().for_each(|v| *v *= a);
    }

    /// Pointwise difference as a perturbation.
    pub fn sub(&self, other: &Profile) -> Result<Profile> {
        same_grid(self, other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Profile::perturbation(self.grid, values)
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `sup |x| |f(x)|`.
    pub fn sup_x_weighted(&self) -> f64 {
        (0..self.values.len()).fold(0.0, |m, i| m.max(self.grid.x(i).abs() * self.values[i].abs()))
    }

    pub fn moments(&self, higher: &[f64]) -> MomentVector {
        MomentVector {
            mass: self.mass(),
            momentum: self.momentum(),
            energy: self.energy(),
            higher: higher.iter().map(|&s| (s, moment(self, s))).collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,value\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{:.16e},{:.16e}", self.grid.x(i), v);
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: Profile = serde_json::from_str(s)?;
        check_len(&p.grid, &p.values)?;
        Ok(p)
    }

    /// Read a two-column `x,value` CSV and check it matches `grid`.
    pub fn from_csv(grid: Grid, text: &str) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || (ln == 0 && line.starts_with('x')) {
                continue;
            }
            let mut cols = line.split(',');
            let (Some(x), Some(v)) = (cols.next(), cols.next()) else {
                return Err(Error::InvalidProfile(format!("line {}: expected x,value", ln + 1)));
            };
            let parse = |s: &str| {
                s.trim().parse::<f64>().map_err(|e| {
                    Error::InvalidProfile(format!("line {}: {e}", ln + 1))
                })
            };
            let (x, v) = (parse(x)?, parse(v)?);
            let i = values.len();
            if i >= grid.len() || (x - grid.x(i)).abs() > 1e-9 * grid.half_width().max(1.0) {
                return Err(Error::GridMismatch);
            }
            values.push(v);
        }
        Profile::density(grid, values)
    }

    pub fn read_csv(grid: Grid, path: &Path) -> Result<Self> {
        Self::from_csv(grid, &std::fs::read_to_string(path)?)
    }
}

fn check_len(grid: &Grid, values: &[f64]) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::InvalidProfile(format!(
            "{} values for a grid of {} cells",
            values.len(),
            grid.len()
        )));
    }
    Ok(())
}

pub(crate) fn same_grid(a: &Profile, b: &Profile) -> Result<()> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
    /// `(s, M_s)` pairs for any extra orders requested.
    pub higher: Vec<(f64, f64)>,
}

/// Weight `w_k(x) = (1 + |x|)^k`.
pub fn weight(x: f64, k: f64) -> f64 {
    (1.0 + x.abs()).powf(k)
}

/// `M_s(f) = dx * sum |x_i|^s f_i`; `s = 0` is the mass.
pub fn moment(f: &Profile, s: f64) -> f64 {
    let g = &f.grid;
    let sum: f64 = if s == 0.0 {
        f.values.iter().sum()
    } else if s == 2.0 {
        f.values.iter().enumerate().map(|(i, v)| g.x(i) * g.x(i) * v).sum()
    } else {
        f.values.iter().enumerate().map(|(i, v)| g.x(i).abs().powf(s) * v).sum()
    };
    g.dx() * sum
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Lp {
    L1,
    L2,
}

/// `||f w_k||_p` by the midpoint rule.
pub fn weighted_norm(f: &Profile, k: f64, p: Lp) -> f64 {
    let g = &f.grid;
    let w = |i: usize| if k == 0.0 { 1.0 } else { weight(g.x(i), k) };
    match p {
        Lp::L1 => g.dx() * f.values.iter().enumerate().map(|(i, v)| v.abs() * w(i)).sum::<f64>(),
        Lp::L2 => (g.dx()
            * f.values.iter().enumerate().map(|(i, v)| (v * w(i)).powi(2)).sum::<f64>())
        .sqrt(),
    }
}

/// Unit Maxwell profile `H(x) = 2 / (pi (1 + x^2)^2)`.
pub fn maxwell_h(x: f64) -> f64 {
    let d = 1.0 + x * x;
    2.0 / (PI * d * d)
}

/// `H_lambda` sampled at cell centres: mass 1, momentum 0, energy `1/lambda^2`.
pub fn maxwell_profile(grid: Grid, lambda: f64) -> Result<Profile> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    Profile::from_fn(grid, |x| lambda * maxwell_h(lambda * x))
}

/// `int_{-L}^{L} H_lambda`.
pub fn maxwell_truncated_mass(lambda: f64, half_width: f64) -> f64 {
    let u = lambda * half_width;
    2.0 / PI * (u / (1.0 + u * u) + u.atan())
}

/// `int_{-L}^{L} x^2 H_lambda`.
pub fn maxwell_truncated_energy(lambda: f64, half_width: f64) -> f64 {
    let u = lambda * half_width;
    2.0 / PI * (u.atan() - u / (1.0 + u * u)) / (lambda * lambda)
}

/// `lambda0 = exp(I0(H,H)/2) = 2 sqrt(e)`, the scale selected as gamma -> 0.
pub fn lambda0() -> f64 {
    2.0 * 0.5f64.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maxwell_mass_and_energy_match_truncated_closed_forms() {
        for &(lambda, l, n) in &[(1.0, 40.0, 4096), (2.5, 10.0, 2048), (0.7, 60.0, 4096)] {
            let grid = Grid::new(l, n).unwrap();
            let h = maxwell_profile(grid, lambda).unwrap();
            let dx = grid.dx();
            let m0 = maxwell_truncated_mass(lambda, l);
            let m2 = maxwell_truncated_energy(lambda, l);
            // midpoint rule error ~ dx^2 * lambda^2 / 24 * max|H''| scale
            let tol = 0.2 * (dx * lambda).powi(2);
            assert!((h.mass() - m0).abs() < tol, "mass {} vs {m0}", h.mass());
            assert!((h.energy() - m2).abs() < tol / (lambda * lambda), "energy {} vs {m2}", h.energy());
            assert_eq!(h.momentum(), 0.0);
        }
    }

    #[test]
    fn truncated_forms_reduce_to_full_moments() {
        assert!((maxwell_truncated_mass(3.0, 1e9) - 1.0).abs() < 1e-9);
        assert!((maxwell_truncated_energy(0.5, 1e12) - 4.0).abs() < 1e-10);
    }

    #[test]
    fn weighted_norms_on_indicator() {
        // f = 1/2 on [-1, 1] with cell faces at +-1.
        let grid = Grid::new(2.0, 64).unwrap();
        let f = Profile::from_fn(grid, |x| if x.abs() < 1.0 { 0.5 } else { 0.0 }).unwrap();
        assert!((weighted_norm(&f, 0.0, Lp::L1) - 1.0).abs() < 1e-14);
        assert!((weighted_norm(&f, 0.0, Lp::L2) - 0.5f64.sqrt()).abs() < 1e-14);
        // int (1+|x|) * 1/2 over [-1,1] = 3/2, exact for the midpoint rule
        assert!((weighted_norm(&f, 1.0, Lp::L1) - 1.5).abs() < 1e-13);
    }

    #[test]
    fn moment_orders() {
        let grid = Grid::new(2.0, 64).unwrap();
        let f = Profile::from_fn(grid, |x| if x.abs() < 1.0 { 0.5 } else { 0.0 }).unwrap();
        assert!((moment(&f, 0.0) - 1.0).abs() < 1e-14);
        // midpoint rule for x^2 on cells of width h: 1/3 - h^2/12
        let h = grid.dx();
        assert!((moment(&f, 2.0) - (1.0 / 3.0 - h * h / 12.0)).abs() < 1e-14);
    }

    #[test]
    fn density_rejects_negative() {
        let grid = Grid::new(1.0, 16).unwrap();
        let mut v = vec![1.0; 16];
        v[3] = -1e-3;
        assert!(Profile::density(grid, v.clone()).is_err());
        assert!(Profile::perturbation(grid, v).is_ok());
    }

    #[test]
    fn csv_round_trip() {
        let grid = Grid::new(5.0, 32).unwrap();
        let h = maxwell_profile(grid, 1.3).unwrap();
        let back = Profile::from_csv(grid, &h.to_csv()).unwrap();
        assert_eq!(back.values, h.values);
        let js = Profile::from_json(&h.to_json().unwrap()).unwrap();
        assert_eq!(js.values, h.values);
        assert!(Profile::from_csv(Grid::new(5.0, 64).unwrap(), &h.to_csv()).is_err());
    }

    #[test]
    fn lambda0_value() {
        assert!((lambda0() - 3.297442541400256).abs() < 1e-14);
    }
}
