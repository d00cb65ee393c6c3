//! Uniform cell-centred grid on `[-L, L]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `N` cells of width `dx = 2L/N`; centres `x_i = (i + 1/2 - N/2) dx`.
///
/// `N` is even, so the grid is symmetric about the origin and no centre
/// sits at zero. `|x_i - x_j| = |i - j| dx` exactly, which the collision
/// kernels exploit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    #[serde(rename = "L")]
    half_width: f64,
    #[serde(rename = "N")]
    cells: usize,
}

impl Grid {
    pub fn new(half_width: f64, cells: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("L must be positive, got {half_width}")));
        }
        if cells < 16 || !cells.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("N must be even and >= 16, got {cells}")));
        }
        Ok(Self { half_width, cells })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells == 0
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.cells as f64
    }

    /// Cell centre `x_i`.
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 + 0.5 - (self.cells / 2) as f64) * self.dx()
    }

    /// Right face of cell `i`, `x_{i+1/2}`.
    pub fn face(&self, i: usize) -> f64 {
        (i as f64 + 1.0 - (self.cells / 2) as f64) * self.dx()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.cells).map(|i| self.x(i)).collect()
    }

    /// Index of the mirror cell `-x_i`.
    pub fn mirror(&self, i: usize) -> usize {
        self.cells - 1 - i
    }

    /// Same domain, twice the cells.
    pub fn refined(&self) -> Self {
        Self { half_width: self.half_width, cells: 2 * self.cells }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(1.0, 15).is_err());
        assert!(Grid::new(1.0, 8).is_err());
        assert!(Grid::new(0.0, 64).is_err());
        assert!(Grid::new(-2.0, 64).is_err());
        assert!(Grid::new(1.0, 64).is_ok());
    }

    #[test]
    fn centres_are_symmetric() {
        let g = Grid::new(3.7, 128).unwrap();
        for i in 0..g.len() {
            assert_eq!(g.x(i), -g.x(g.mirror(i)));
        }
        assert!((g.x(0) + 3.7 - 0.5 * g.dx()).abs() < 1e-14);
        assert!((g.face(g.len() - 1) - 3.7).abs() < 1e-14);
    }
}
