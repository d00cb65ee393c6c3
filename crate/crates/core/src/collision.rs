//! Discrete sticky-particle collision operator.
//!
//! Every ordered pair of cells `(i, j)` carries collision mass
//! `m_ij = dx^2 f_i g_j |x_i - x_j|^gamma`. The pair loses `m_ij/2` at each
//! of `x_i`, `x_j` and gains `m_ij` at the midpoint. Midpoints live on the
//! half grid (index `i + j`): even indices are cell centres, odd ones are
//! faces. A face deposit is split 1/2, 1/2 between the adjacent centres,
//! which keeps mass and momentum exact and adds `dx^2/4` of second moment
//! per unit mass. [`CollisionOperator::rate`] reports that excess so the
//! time stepper can account for it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fftconv::Convolver;
use crate::grid::Grid;
use crate::profile::{same_grid, weight, Profile};

/// `k[d] = (d dx)^gamma`, with `k[0] = 1` for `gamma = 0` and `0` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub gamma: f64,
    pub k: Vec<f64>,
}

impl KernelTable {
    pub fn new(grid: Grid, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        let dx = grid.dx();
        let k = (0..grid.len())
            .map(|d| match (d, gamma == 0.0) {
                (_, true) => 1.0,
                (0, false) => 0.0,
                _ => (d as f64 * dx).powf(gamma),
            })
            .collect();
        Ok(Self { gamma, k })
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && (0.0..=1.0).contains(&gamma)) {
        return Err(Error::InvalidParameter(format!("gamma must lie in [0, 1], got {gamma}")));
    }
    Ok(())
}

/// A test function for the weak form.
pub trait TestFunction {
    fn eval(&self, x: f64) -> f64;

    /// `2 phi((x+y)/2) - phi(x) - phi(y)`.
    fn delta(&self, x: f64, y: f64) -> f64 {
        2.0 * self.eval(0.5 * (x + y)) - self.eval(x) - self.eval(y)
    }
}

impl<F: Fn(f64) -> f64> TestFunction for F {
    fn eval(&self, x: f64) -> f64 {
        self(x)
    }
}

/// `x^n` with the increment evaluated algebraically for `n <= 2`.
#[derive(Debug, Clone, Copy)]
pub struct Monomial(pub i32);

impl TestFunction for Monomial {
    fn eval(&self, x: f64) -> f64 {
        x.powi(self.0)
    }

    fn delta(&self, x: f64, y: f64) -> f64 {
        match self.0 {
            0 | 1 => 0.0,
            2 => -0.5 * (x - y) * (x - y),
            _ => 2.0 * self.eval(0.5 * (x + y)) - self.eval(x) - self.eval(y),
        }
    }
}

/// `int Q_gamma(f,g) phi = 1/2 int int f(x) g(y) dphi(x,y) |x-y|^gamma`.
pub fn q_weak(f: &Profile, g: &Profile, phi: &impl TestFunction, gamma: f64) -> Result<f64> {
    same_grid(f, g)?;
    let grid = f.grid;
    let kt = KernelTable::new(grid, gamma)?;
    let xs = grid.centers();
    let n = grid.len();
    let mut s = 0.0;
    for i in 0..n {
        if f.values[i] == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for j in 0..n {
            row += g.values[j] * kt.k[i.abs_diff(j)] * phi.delta(xs[i], xs[j]);
        }
        s += f.values[i] * row;
    }
    let dx = grid.dx();
    Ok(0.5 * dx * dx * s)
}

/// Output of [`q_apply`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionRate {
    pub rate: Profile,
    /// `1/4 int int f g |x-y|^{2+gamma}`, the energy removed per unit time.
    pub dissipation: f64,
}

/// Half-grid accumulators: `even[c]` at centre `c`, `odd[c]` at the face
/// between centres `c` and `c + 1`.
pub(crate) struct HalfGrid {
    pub even: Vec<f64>,
    pub odd: Vec<f64>,
}

impl HalfGrid {
    pub fn new(n: usize) -> Self {
        Self { even: vec![0.0; n], odd: vec![0.0; n - 1] }
    }

    pub fn clear(&mut self) {
        self.even.iter_mut().for_each(|v| *v = 0.0);
        self.odd.iter_mut().for_each(|v| *v = 0.0);
    }

    /// Map deposits to cells, scaling by `scale`, and add into `out`.
    pub fn restrict_into(&self, scale: f64, out: &mut [f64]) {
        for (o, e) in out.iter_mut().zip(&self.even) {
            *o += scale * e;
        }
        for c in 0..self.odd.len() {
            let v = 0.5 * scale * self.odd[c];
            out[c] += v;
            out[c + 1] += v;
        }
    }
}

/// Gain deposits `sum_{i+j=s} f_i g_j k[|i-j|]` for general `f`, `g`.
pub(crate) fn gain_direct(f: &[f64], g: &[f64], k: &[f64], half: &mut HalfGrid) {
    let n = f.len() as isize;
    for d in -(n - 1)..n {
        let kd = k[d.unsigned_abs()];
        if kd == 0.0 {
            continue;
        }
        let lo = 0.max(-d);
        let hi = n.min(n - d);
        if d % 2 == 0 {
            let off = d / 2;
            for i in lo..hi {
                half.even[(i + off) as usize] += kd * f[i as usize] * g[(i + d) as usize];
            }
        } else {
            let off = (d - 1).div_euclid(2);
            for i in lo..hi {
                half.odd[(i + off) as usize] += kd * f[i as usize] * g[(i + d) as usize];
            }
        }
    }
}

/// Gain deposits for `f = g`, using the pair symmetry.
pub(crate) fn gain_self(f: &[f64], k: &[f64], half: &mut HalfGrid) {
    let n = f.len();
    if k[0] != 0.0 {
        for i in 0..n {
            half.even[i] += k[0] * f[i] * f[i];
        }
    }
    for d in 1..n {
        let kd = 2.0 * k[d];
        if kd == 0.0 {
            continue;
        }
        let (a, b) = (&f[..n - d], &f[d..]);
        if d % 2 == 0 {
            let dst = &mut half.even[d / 2..d / 2 + n - d];
            for ((o, x), y) in dst.iter_mut().zip(a).zip(b) {
                *o += kd * x * y;
            }
        } else {
            let off = (d - 1) / 2;
            let dst = &mut half.odd[off..off + n - d];
            for ((o, x), y) in dst.iter_mut().zip(a).zip(b) {
                *o += kd * x * y;
            }
        }
    }
}

/// `sum_j k[|i-j|] f_j` by direct summation.
pub(crate) fn toeplitz_direct(f: &[f64], k: &[f64]) -> Vec<f64> {
    let n = f.len();
    (0..n).map(|i| (0..n).map(|j| k[i.abs_diff(j)] * f[j]).sum()).collect()
}

fn dissipation(f: &[f64], g: &[f64], grid: Grid, gamma: f64) -> f64 {
    let dx = grid.dx();
    let k: Vec<f64> = (0..f.len())
        .map(|d| {
            let r = d as f64 * dx;
            if d == 0 { 0.0 } else { r.powf(2.0 + gamma) }
        })
        .collect();
    0.25 * dx * dx * crate::functionals::toeplitz_pair_sum(f, g, &k)
}

/// Gain part `Q^+(f,g)` on the grid.
pub fn q_gain(f: &Profile, g: &Profile, gamma: f64) -> Result<Profile> {
    same_grid(f, g)?;
    let kt = KernelTable::new(f.grid, gamma)?;
    let mut half = HalfGrid::new(f.grid.len());
    gain_direct(&f.values, &g.values, &kt.k, &mut half);
    let mut out = vec![0.0; f.grid.len()];
    half.restrict_into(f.dx(), &mut out);
    Profile::perturbation(f.grid, out)
}

/// Loss part `Q^-(f,g) = (f Sigma[g] + g Sigma[f]) / 2` on the grid.
pub fn q_loss(f: &Profile, g: &Profile, gamma: f64) -> Result<Profile> {
    same_grid(f, g)?;
    let kt = KernelTable::new(f.grid, gamma)?;
    let mut half = HalfGrid::new(f.grid.len());
    loss_direct(&f.values, &g.values, &kt.k, &mut half);
    let mut out = vec![0.0; f.grid.len()];
    half.restrict_into(f.dx(), &mut out);
    Profile::perturbation(f.grid, out)
}

fn loss_direct(f: &[f64], g: &[f64], k: &[f64], half: &mut HalfGrid) {
    let nf = toeplitz_direct(f, k);
    let ng = toeplitz_direct(g, k);
    for c in 0..f.len() {
        half.even[c] += 0.5 * (f[c] * ng[c] + g[c] * nf[c]);
    }
}

/// `Q_gamma(f,g)` as a grid function, with its dissipation.
///
/// Symmetric and bilinear in `(f, g)`; mass and momentum of the output vanish.
pub fn q_apply(f: &Profile, g: &Profile, gamma: f64) -> Result<CollisionRate> {
    same_grid(f, g)?;
    let grid = f.grid;
    let kt = KernelTable::new(grid, gamma)?;
    let mut gain = HalfGrid::new(grid.len());
    let mut loss = HalfGrid::new(grid.len());
    gain_direct(&f.values, &g.values, &kt.k, &mut gain);
    loss_direct(&f.values, &g.values, &kt.k, &mut loss);
    for (a, b) in gain.even.iter_mut().zip(&loss.even) {
        *a -= b;
    }
    let mut out = vec![0.0; grid.len()];
    gain.restrict_into(grid.dx(), &mut out);
    Ok(CollisionRate {
        rate: Profile::perturbation(grid, out)?,
        dissipation: dissipation(&f.values, &g.values, grid, gamma),
    })
}

/// Gain part of `q_apply(f, f, 0)` through one FFT autoconvolution.
pub fn q_gain_fast_maxwell(f: &Profile) -> Result<Profile> {
    let n = f.grid.len();
    let mut conv = Convolver::new(n);
    let mut auto = vec![0.0; 2 * n];
    conv.convolve(&f.values, &f.values, &mut auto);
    let mut half = HalfGrid::new(n);
    for c in 0..n {
        half.even[c] = auto[2 * c];
    }
    for c in 0..n - 1 {
        half.odd[c] = auto[2 * c + 1];
    }
    let mut out = vec![0.0; n];
    half.restrict_into(f.dx(), &mut out);
    Profile::perturbation(f.grid, out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionFrequency {
    /// `Sigma_gamma[f](x_i) = int f(y) |x_i - y|^gamma dy`.
    pub sigma: Profile,
    /// `min_i Sigma_gamma(x_i) / w_gamma(x_i)`.
    pub kappa_hat: f64,
}

pub fn collision_frequency(f: &Profile, gamma: f64) -> Result<CollisionFrequency> {
    let grid = f.grid;
    let kt = KernelTable::new(grid, gamma)?;
    let dx = grid.dx();
    let mut sigma = toeplitz_direct(&f.values, &kt.k);
    sigma.iter_mut().for_each(|v| *v *= dx);
    let kappa_hat = sigma
        .iter()
        .enumerate()
        .map(|(i, s)| s / weight(grid.x(i), gamma))
        .fold(f64::INFINITY, f64::min);
    Ok(CollisionFrequency { sigma: Profile::perturbation(grid, sigma)?, kappa_hat })
}

/// Column `j` of the linear map `h -> q_apply(h, g)`: the response to
/// `h = e_j` (value 1 in cell `j`). Costs `O(N)`.
pub(crate) fn bilinear_column(g: &[f64], j: usize, k: &[f64], dx: f64, out: &mut [f64]) {
    let n = g.len();
    let mut half = HalfGrid::new(n);
    let mut total = 0.0;
    for l in 0..n {
        let m = g[l] * k[j.abs_diff(l)];
        if m == 0.0 {
            continue;
        }
        total += m;
        let s = j + l;
        if s.is_multiple_of(2) {
            half.even[s / 2] += m;
        } else {
            half.odd[s / 2] += m;
        }
        half.even[l] -= 0.5 * m;
    }
    half.even[j] -= 0.5 * total;
    out.iter_mut().for_each(|v| *v = 0.0);
    half.restrict_into(dx, out);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateInfo {
    /// `max_i dx sum_j k_ij f_j`, the largest loss rate.
    pub max_loss: f64,
    /// `dx sum_i x_i^2 q_i` minus the exact dissipation `-(1/4) sum m_ij r^2`.
    pub energy_excess: f64,
}

/// Reusable evaluator of `q(f,f)` for time stepping.
pub struct CollisionOperator {
    grid: Grid,
    gamma: f64,
    kernel: KernelTable,
    conv: Convolver,
    spectrum: Vec<Complex64>,
    half: HalfGrid,
    scratch: Vec<f64>,
    nu: Vec<f64>,
}

impl CollisionOperator {
    pub fn new(grid: Grid, gamma: f64) -> Result<Self> {
        let kernel = KernelTable::new(grid, gamma)?;
        let n = grid.len();
        let mut conv = Convolver::new(n);
        let spectrum = conv.kernel_spectrum(&kernel.k);
        Ok(Self {
            grid,
            gamma,
            kernel,
            conv,
            spectrum,
            half: HalfGrid::new(n),
            scratch: vec![0.0; 2 * n],
            nu: vec![0.0; n],
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `nu_i = sum_j k[|i-j|] f_j` (collision frequency divided by `dx`).
    fn frequency(&mut self, f: &[f64]) {
        if self.gamma == 0.0 {
            let s: f64 = f.iter().sum();
            self.nu.iter_mut().for_each(|v| *v = s);
        } else {
            self.conv.toeplitz(&self.spectrum, f, &mut self.nu);
        }
    }

    /// `out = q(f, f)`.
    pub fn rate(&mut self, f: &[f64], out: &mut [f64]) -> RateInfo {
        let n = f.len();
        self.half.clear();
        if self.gamma == 0.0 {
            self.conv.convolve(f, f, &mut self.scratch);
            for c in 0..n {
                self.half.even[c] = self.scratch[2 * c];
            }
            for c in 0..n - 1 {
                self.half.odd[c] = self.scratch[2 * c + 1];
            }
        } else {
            gain_self(f, &self.kernel.k, &mut self.half);
        }
        self.frequency(f);
        let mut max_nu = 0.0f64;
        for c in 0..n {
            self.half.even[c] -= f[c] * self.nu[c];
            max_nu = max_nu.max(self.nu[c]);
        }
        out.iter_mut().for_each(|v| *v = 0.0);
        let dx = self.grid.dx();
        self.half.restrict_into(dx, out);
        let face_mass: f64 = dx * dx * self.half.odd.iter().sum::<f64>();
        RateInfo { max_loss: dx * max_nu, energy_excess: 0.25 * dx * dx * face_mass }
    }
}
