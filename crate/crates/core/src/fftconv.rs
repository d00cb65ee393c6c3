//! Linear convolutions through zero-padded FFTs.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub(crate) struct Convolver {
    n: usize,
    size: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Convolver {
    /// Convolver for inputs of length `n`.
    pub fn new(n: usize) -> Self {
        let size = 2 * n;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(size);
        let inv = planner.plan_fft_inverse(size);
        let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Self {
            n,
            size,
            fwd,
            inv,
            a: vec![Complex64::default(); size],
            b: vec![Complex64::default(); size],
            scratch: vec![Complex64::default(); scratch_len],
        }
    }

    fn load(buf: &mut [Complex64], f: &[f64]) {
        for (b, v) in buf.iter_mut().zip(f) {
            *b = Complex64::new(*v, 0.0);
        }
        for b in buf[f.len()..].iter_mut() {
            *b = Complex64::default();
        }
    }

    /// `out[s] = sum_{i+j=s} f_i g_j`, `s = 0..2n-1` (last entry is zero).
    pub fn convolve(&mut self, f: &[f64], g: &[f64], out: &mut [f64]) {
        debug_assert_eq!(f.len(), self.n);
        Self::load(&mut self.a, f);
        self.fwd.process_with_scratch(&mut self.a, &mut self.scratch);
        if std::ptr::eq(f, g) {
            self.a.iter_mut().for_each(|z| *z = *z * *z);
        } else {
            Self::load(&mut self.b, g);
            self.fwd.process_with_scratch(&mut self.b, &mut self.scratch);
            self.a.iter_mut().zip(&self.b).for_each(|(x, y)| *x *= *y);
        }
        self.inv.process_with_scratch(&mut self.a, &mut self.scratch);
        let scale = 1.0 / self.size as f64;
        for (o, z) in out.iter_mut().zip(&self.a) {
            *o = z.re * scale;
        }
    }

    /// Spectrum of the symmetric kernel `k[|d|]`, embedded circulantly.
    pub fn kernel_spectrum(&mut self, k: &[f64]) -> Vec<Complex64> {
        let mut c = vec![Complex64::default(); self.size];
        c[0] = Complex64::new(k[0], 0.0);
        for d in 1..self.n {
            c[d] = Complex64::new(k[d], 0.0);
            c[self.size - d] = Complex64::new(k[d], 0.0);
        }
        self.fwd.process_with_scratch(&mut c, &mut self.scratch);
        c
    }

    /// `out[i] = sum_j k[|i-j|] f_j` using a spectrum from [`Self::kernel_spectrum`].
    pub fn toeplitz(&mut self, spectrum: &[Complex64], f: &[f64], out: &mut [f64]) {
        Self::load(&mut self.a, f);
        self.fwd.process_with_scratch(&mut self.a, &mut self.scratch);
        self.a.iter_mut().zip(spectrum).for_each(|(x, y)| *x *= *y);
        self.inv.process_with_scratch(&mut self.a, &mut self.scratch);
        let scale = 1.0 / self.size as f64;
        for (o, z) in out.iter_mut().zip(&self.a[..self.n]) {
            *o = z.re * scale;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_sums() {
        let n = 37;
        let f: Vec<f64> = (0..n).map(|i| ((i * 7 % 11) as f64).sin()).collect();
        let g: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).cos()).collect();
        let k: Vec<f64> = (0..n).map(|d| (d as f64 + 0.5).sqrt()).collect();
        let mut c = Convolver::new(n);
        let mut out = vec![0.0; 2 * n];
        c.convolve(&f, &g, &mut out);
        for s in 0..2 * n - 1 {
            let direct: f64 = (0..n).filter(|&i| s >= i && s - i < n).map(|i| f[i] * g[s - i]).sum();
            assert!((out[s] - direct).abs() < 1e-12);
        }
        let spec = c.kernel_spectrum(&k);
        let mut t = vec![0.0; n];
        c.toeplitz(&spec, &f, &mut t);
        for i in 0..n {
            let direct: f64 = (0..n).map(|j| k[i.abs_diff(j)] * f[j]).sum();
            assert!((t[i] - direct).abs() < 1e-12);
        }
    }
}
