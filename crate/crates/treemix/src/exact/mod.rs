//! Exact transition matrices, spectra, functionals and mixing times.

pub mod compare;
pub mod conductance;
pub mod functionals;
pub mod kernels;
pub mod matrix;
pub mod mixing;
pub mod orbits;
pub mod spectral;
pub mod swfast;
pub mod ullrich;

pub use matrix::{Kernel, SparseKernel, TransitionMatrix};
pub use spectral::{spectrum, spectrum_of, Spectrum};
