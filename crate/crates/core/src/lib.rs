//! Self-similar profiles of the one-dimensional inelastic Boltzmann
//! equation with sticky collisions and kernel `|x - y|^gamma`.

pub mod audit;
pub mod collision;
pub mod error;
mod fftconv;
pub mod functionals;
pub mod grid;
pub mod linearized;
pub mod maxwell_fourier;
pub mod profile;
pub mod selfsim;

pub use error::{Error, Result};
pub use grid::Grid;
pub use profile::{Lp, MomentVector, Profile};
