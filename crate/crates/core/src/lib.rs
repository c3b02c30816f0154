//! Nikiforov–Uvarov reduction of generalized hypergeometric equations,
//! classical orthogonal polynomials, hypergeometric functions, and three
//! exactly solvable Schrödinger potentials with a finite-difference oracle.

pub mod classical;
pub mod error;
pub mod hyper;
pub mod oracle;
pub mod poly;
pub mod potentials;
pub mod reduction;
pub mod surd;

pub use classical::{classify_canonical, CanonicalHde, Family, OrthoPoly};
pub use error::{ClassicalError, Error, HyperError, OracleError, PolyError, PotentialError, ReductionError};
pub use poly::{Interval, Poly, Scalar, Q};
pub use potentials::{bound_spectrum, build_ghe, scattering_states, wavefunction_residual, BoundState, PotentialKind, PotentialSpec, ScatteringState};
pub use surd::Surd;
