//! Independent numerical checks: quadrature and a finite-difference
//! Schrödinger eigensolver.

pub mod fd;
pub mod quad;

pub use fd::{compare_spectra, fd_bound_states, fd_eigenvalues, rel_err, FdGrid, OracleSpectrum, SpectraComparison, DEFAULT_GRID_TOL};
pub use quad::{exp_sinh, gauss_kronrod, quad_adaptive, tanh_sinh, QuadResult, QuadValue};
