//! Double-sum functionals `I_0` and `I_gamma`.

use crate::error::Result;
use crate::profile::{same_grid, Profile};

/// `dx^2 sum_{i,j} f_i g_j k(|i-j|)` for a table indexed by the cell distance.
pub(crate) fn toeplitz_pair_sum(f: &[f64], g: &[f64], k: &[f64]) -> f64 {
    let n = f.len();
    let mut total = 0.0;
    for d in 0..n {
        if k[d] == 0.0 {
            continue;
        }
        let mut s = 0.0;
        for i in 0..n - d {
            s += f[i] * g[i + d];
        }
        if d > 0 {
            for i in 0..n - d {
                s += g[i] * f[i + d];
            }
        }
        total += k[d] * s;
    }
    total
}

/// `I_0(f,g) = int int f(x) g(y) |x-y|^2 log|x-y|`.
pub fn i0_functional(f: &Profile, g: &Profile) -> Result<f64> {
    same_grid(f, g)?;
    let dx = f.dx();
    let k: Vec<f64> = (0..f.values.len())
        .map(|d| {
            let r = d as f64 * dx;
            if d == 0 { 0.0 } else { r * r * r.ln() }
        })
        .collect();
    Ok(dx * dx * toeplitz_pair_sum(&f.values, &g.values, &k))
}

/// `I_gamma(f,g) = gamma^{-1} int int f g |x-y|^2 (|x-y|^gamma - 1)`.
///
/// `(r^gamma - 1)/gamma` is evaluated as `expm1(gamma log r)/gamma`, so the
/// value tends smoothly to [`i0_functional`] as `gamma -> 0`.
pub fn i_gamma_functional(f: &Profile, g: &Profile, gamma: f64) -> Result<f64> {
    if gamma == 0.0 {
        return i0_functional(f, g);
    }
    same_grid(f, g)?;
    let dx = f.dx();
    let k: Vec<f64> = (0..f.values.len())
        .map(|d| {
            let r = d as f64 * dx;
            if d == 0 { 0.0 } else { r * r * (gamma * r.ln()).exp_m1() / gamma }
        })
        .collect();
    Ok(dx * dx * toeplitz_pair_sum(&f.values, &g.values, &k))
}

/// `I_0(H_1, H_1) = 2 log 2 + 1`.
pub fn i0_maxwell_exact() -> f64 {
    2.0 * std::f64::consts::LN_2 + 1.0
}

/// Leading truncation loss of `I_0(H_1,H_1)` when both factors are cut to
/// `[-L, L]`: `(8/pi) int_L^inf x^-4 (x^2 log x + log x + 3/2) dx`.
pub fn i0_maxwell_truncation(half_width: f64) -> f64 {
    let l = half_width;
    let ln = l.ln();
    let a = (ln + 1.0) / l;
    let b = (3.0 * ln + 1.0) / (9.0 * l.powi(3));
    let c = 0.5 / l.powi(3);
    8.0 / std::f64::consts::PI * (a + b + c)
}
