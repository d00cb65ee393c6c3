//! Linearisation of the Maxwell problem around `G_0 = H_{lambda0}`:
//! `L_0 h = 2 Q_0(h, G_0) - (1/4) d/dx(x h)`.
//!
//! The matrix acts on cell values. Collision columns reuse the deposition
//! of [`crate::collision`]; the drift uses the solver's second-order
//! upwind reconstruction with the limiter replaced by the centred slope so
//! that the operator is linear.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::collision::{bilinear_column, KernelTable};
use crate::error::{Error, Result};
use crate::functionals::i0_functional;
use crate::grid::Grid;
use crate::profile::{maxwell_profile, weight, weighted_norm, Lp, Profile};

/// Default weight order of `L^1(w_a)`.
pub const DEFAULT_WEIGHT: f64 = 2.5;

/// Drift coefficient of the Maxwell problem.
const C: f64 = 0.25;

#[derive(Debug, Clone)]
pub struct LinearOperatorMatrix {
    pub grid: Grid,
    pub lambda0: f64,
    /// Weight order `a` of the norms used by the estimators.
    pub weight_order: f64,
    pub matrix: DMatrix<f64>,
    /// Rows `dx x_i^k`, `k = 0, 1, 2`.
    pub moments: DMatrix<f64>,
    pub g0: Profile,
}

impl LinearOperatorMatrix {
    pub fn apply(&self, h: &[f64]) -> Vec<f64> {
        (&self.matrix * DVector::from_column_slice(h)).as_slice().to_vec()
    }

    /// `dx sum_i A_ij` for every column.
    pub fn column_masses(&self) -> Vec<f64> {
        (self.moments.row(0) * &self.matrix).iter().copied().collect()
    }

    /// `dx sum_i x_i A_ij` for every column. The drift generates momentum
    /// `c int x h`, so this is close to `c x_j dx` rather than zero.
    pub fn column_momenta(&self) -> Vec<f64> {
        (self.moments.row(1) * &self.matrix).iter().copied().collect()
    }
}

fn moment_rows(grid: &Grid) -> DMatrix<f64> {
    let dx = grid.dx();
    DMatrix::from_fn(3, grid.len(), |k, i| dx * grid.x(i).powi(k as i32))
}

/// Add `-c d/dx(x h)` as a matrix. Face values are `h_u +- (h_{u+1} -
/// h_{u-1})/4` from the upwind cell `u`, with no slope in the wall cells.
fn add_linear_drift(grid: &Grid, c: f64, a: &mut DMatrix<f64>) {
    let n = grid.len();
    let inv_dx = 1.0 / grid.dx();
    for f in 0..n - 1 {
        let xf = grid.face(f);
        if xf == 0.0 {
            continue;
        }
        let (u, sign) = if xf > 0.0 { (f, 1.0) } else { (f + 1, -1.0) };
        // flux F = c xf (sum_j w_j h_j), leaving cell f and entering f + 1
        let mut w = vec![(u, 1.0)];
        if u > 0 && u + 1 < n {
            w.push((u + 1, 0.25 * sign));
            w.push((u - 1, -0.25 * sign));
        }
        for (j, wj) in w {
            let v = c * xf * wj * inv_dx;
            a[(f, j)] -= v;
            a[(f + 1, j)] += v;
        }
    }
}

/// Assemble `L_0` around `H_{lambda0}` sampled on `grid`.
pub fn assemble_l0(grid: Grid, lambda0: f64) -> Result<LinearOperatorMatrix> {
    if !(lambda0.is_finite() && lambda0 > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda0 must be positive, got {lambda0}")));
    }
    let g0 = maxwell_profile(grid, lambda0)?;
    if g0.mass() < 0.99 {
        return Err(Error::InvalidGrid(format!(
            "G_0 keeps only mass {:.4} on [-L, L]; widen the grid",
            g0.mass()
        )));
    }
    if lambda0 * grid.dx() > 0.5 {
        return Err(Error::InvalidGrid(format!(
            "dx = {:.3e} does not resolve G_0 (width {:.3e})",
            grid.dx(),
            1.0 / lambda0
        )));
    }
    let n = grid.len();
    let kt = KernelTable::new(grid, 0.0)?;
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut col = vec![0.0; n];
    for j in 0..n {
        bilinear_column(&g0.values, j, &kt.k, grid.dx(), &mut col);
        for (i, v) in col.iter().enumerate() {
            a[(i, j)] = 2.0 * v;
        }
    }
    add_linear_drift(&grid, C, &mut a);
    Ok(LinearOperatorMatrix {
        grid,
        lambda0,
        weight_order: DEFAULT_WEIGHT,
        matrix: a,
        moments: moment_rows(&grid),
        g0,
    })
}

/// `g_0(x) = (2/pi)(1 - 3x^2)/(1 + x^2)^3`, the derivative of `H_lambda`
/// in `lambda` at `lambda = 1`.
pub fn g0_function(x: f64) -> f64 {
    let s = 1.0 + x * x;
    2.0 / std::f64::consts::PI * (1.0 - 3.0 * x * x) / (s * s * s)
}

/// Samples of `phi_0(x) = g_0(lambda0 x)`.
pub fn phi0_profile(grid: Grid, lambda0: f64) -> Result<Profile> {
    let v = grid.centers().iter().map(|&x| g0_function(lambda0 * x)).collect();
    Profile::perturbation(grid, v)
}

fn weighted_ratio(a: &LinearOperatorMatrix, h: &Profile) -> Result<f64> {
    let ah = Profile::perturbation(a.grid, a.apply(&h.values))?;
    let k = a.weight_order;
    Ok(weighted_norm(&ah, k, Lp::L1) / weighted_norm(h, k, Lp::L1))
}

/// `||A phi_0|| / ||phi_0||` in `L^1(w_a)`.
pub fn kernel_residual(a: &LinearOperatorMatrix, lambda0: f64) -> Result<f64> {
    weighted_ratio(a, &phi0_profile(a.grid, lambda0)?)
}

/// Same ratio for an arbitrary profile, e.g. the control `G_0`.
pub fn gain_ratio(a: &LinearOperatorMatrix, h: &Profile) -> Result<f64> {
    if h.grid != a.grid {
        return Err(Error::GridMismatch);
    }
    weighted_ratio(a, h)
}

/// Oblique projector onto `{h : int h = int x h = int x^2 h = 0}` along
/// `span{e, x e, x^2 e}` with `e` a Gaussian of the width of `G_0`.
#[derive(Debug, Clone)]
pub struct MomentProjector {
    basis: DMatrix<f64>,
    moments: DMatrix<f64>,
    solve: DMatrix<f64>,
}

impl MomentProjector {
    pub fn new(grid: Grid, lambda0: f64) -> Result<Self> {
        let moments = moment_rows(&grid);
        let basis = DMatrix::from_fn(grid.len(), 3, |i, k| {
            let y = lambda0 * grid.x(i);
            y.powi(k as i32) * (-0.5 * y * y).exp()
        });
        let gram = &moments * &basis;
        let solve = gram
            .try_inverse()
            .ok_or_else(|| Error::Singular("moment functionals are rank deficient".into()))?;
        Ok(Self { basis, moments, solve })
    }

    pub fn apply(&self, h: &[f64]) -> Vec<f64> {
        let h = DVector::from_column_slice(h);
        let c = &self.solve * (&self.moments * &h);
        (h - &self.basis * c).as_slice().to_vec()
    }

    /// Mass, momentum and second moment of `h`.
    pub fn moments_of(&self, h: &[f64]) -> [f64; 3] {
        let m = &self.moments * DVector::from_column_slice(h);
        [m[0], m[1], m[2]]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearKernelVector {
    /// Singular value of the weighted matrix.
    pub singular_value: f64,
    /// `I_0(v, G_0)` for `v` normalised in `L^1(w_a)`.
    pub i0_with_g0: f64,
    /// Second moment of the normalised `v`.
    pub m2: f64,
    /// `|<v, phi_0>| / (|v| |phi_0|)` in `l^2`.
    pub alignment_with_phi0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub a: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub kernel_residual: f64,
    /// Smallest singular value of `W A W^{-1}` on the moment-free subspace,
    /// `W = diag(w_a(x_i)) dx`. A weighted `l^2` proxy for the gap.
    pub gap_l2_proxy: f64,
    /// Smallest `||A h|| / ||h||` in `L^1(w_a)` over the random probes.
    pub gap_l1_probe: f64,
    /// The same ratio for `P phi_0`.
    pub projected_phi0_gain: f64,
    pub probes: usize,
    pub seed: u64,
    pub near_kernel: Vec<NearKernelVector>,
}

impl GapReport {
    /// Near-kernel vectors with `|I_0(v, G_0)| <= tol` but `|M_2(v)| > tol c`.
    pub fn mechanism_violations(&self, tol: f64, c: f64) -> usize {
        self.near_kernel
            .iter()
            .filter(|v| v.i0_with_g0.abs() <= tol && v.m2.abs() > tol * c)
            .count()
    }
}

/// Smooth random probe: a few Hermite-Gaussian bumps at the scale of `G_0`.
fn probe(grid: &Grid, lambda0: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let terms: Vec<(f64, f64, f64, i32)> = (0..3)
        .map(|_| {
            let amp: f64 = rng.gen_range(-1.0..1.0);
            let centre = rng.gen_range(-2.0..2.0) / lambda0;
            let scale = lambda0 * 3f64.powf(rng.gen_range(-1.0..1.0));
            (amp, centre, scale, rng.gen_range(0..5))
        })
        .collect();
    grid.centers()
        .iter()
        .map(|&x| {
            terms
                .iter()
                .map(|&(amp, c, s, order)| {
                    let y = s * (x - c);
                    amp * hermite(order, y) * (-0.5 * y * y).exp()
                })
                .sum()
        })
        .collect()
}

fn hermite(n: i32, y: f64) -> f64 {
    let (mut a, mut b) = (1.0, y);
    if n == 0 {
        return a;
    }
    for k in 1..n {
        let c = y * b - k as f64 * a;
        a = b;
        b = c;
    }
    b
}

/// Two estimates of the invertibility constant of `L_0` on the moment-free
/// subspace, plus the near-kernel of the full matrix.
pub fn spectral_gap_estimate(
    a: &LinearOperatorMatrix,
    weight_order: f64,
    probes: usize,
    seed: u64,
) -> Result<GapReport> {
    if !(weight_order > 2.0 && weight_order < 3.0) {
        return Err(Error::InvalidParameter(format!("weight order must lie in (2, 3), got {weight_order}")));
    }
    let grid = a.grid;
    let n = grid.len();
    let dx = grid.dx();
    let w: Vec<f64> = grid.centers().iter().map(|&x| weight(x, weight_order) * dx).collect();
    let b = DMatrix::from_fn(n, n, |i, j| w[i] * a.matrix[(i, j)] / w[j]);

    // orthogonal projector onto null(C W^{-1}) in the weighted coordinates
    let ct = DMatrix::from_fn(n, 3, |i, k| a.moments[(k, i)] / w[i]);
    let q = ct.qr().q();
    let restricted = &b - (&b * &q) * q.transpose();
    let mut sv: Vec<f64> = restricted.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    // three structural zeros come from the projected-out directions
    let gap_l2_proxy = sv[3];

    let op = LinearOperatorMatrix { weight_order, ..a.clone() };
    let proj = MomentProjector::new(grid, a.lambda0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gap_l1_probe = f64::INFINITY;
    for _ in 0..probes {
        let h = Profile::perturbation(grid, proj.apply(&probe(&grid, a.lambda0, &mut rng)))?;
        gap_l1_probe = gap_l1_probe.min(weighted_ratio(&op, &h)?);
    }
    let phi0 = phi0_profile(grid, a.lambda0)?;
    let p_phi0 = Profile::perturbation(grid, proj.apply(&phi0.values))?;
    let projected_phi0_gain = weighted_ratio(&op, &p_phi0)?;
    let kernel_res = weighted_ratio(&op, &phi0)?;

    let svd = b.svd(false, true);
    let vt = svd.v_t.ok_or_else(|| Error::Singular("SVD did not converge".into()))?;
    let mut near_kernel = Vec::new();
    let phi_norm = phi0.values.iter().map(|v| v * v).sum::<f64>().sqrt();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > 10.0 * kernel_res {
            continue;
        }
        let mut h: Vec<f64> = (0..n).map(|i| vt[(k, i)] / w[i]).collect();
        let norm = weighted_norm(&Profile::perturbation(grid, h.clone())?, weight_order, Lp::L1);
        h.iter_mut().for_each(|v| *v /= norm);
        let hp = Profile::perturbation(grid, h)?;
        let hn = hp.values.iter().map(|v| v * v).sum::<f64>().sqrt();
        let dot: f64 = hp.values.iter().zip(&phi0.values).map(|(x, y)| x * y).sum();
        near_kernel.push(NearKernelVector {
            singular_value: s,
            i0_with_g0: i0_functional(&hp, &a.g0)?,
            m2: hp.energy(),
            alignment_with_phi0: dot.abs() / (hn * phi_norm),
        });
    }
    Ok(GapReport {
        a: weight_order,
        n,
        l: grid.half_width(),
        kernel_residual: kernel_res,
        gap_l2_proxy,
        gap_l1_probe,
        projected_phi0_gain,
        probes,
        seed,
        near_kernel,
    })
}
