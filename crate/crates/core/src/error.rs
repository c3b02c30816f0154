//! Error types, one enum per module plus an umbrella [`Error`].

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("polynomial degree {degree} exceeds 2")]
    DegreeTooHigh { degree: usize },
    #[error("constant polynomial has no roots")]
    NotPolynomialRoot,
    #[error("root is not representable in the surd field")]
    NotRepresentable,
    #[error("interval ({lo}, {hi}) is empty")]
    EmptyInterval { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReductionError {
    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("GHE degree bound violated: {0}")]
    DegreeBound(String),
    #[error("phi vanishes inside the interval at x = {0}")]
    PhiRootInside(f64),
    #[error("no k makes P2 a perfect square over the surd field")]
    NoPerfectSquare,
    #[error("no admissible branch (psi' < 0 with psi root inside the interval)")]
    NoAdmissibleBranch,
    #[error("ambiguous branch selection: candidates {0:?}")]
    AmbiguousBranch(Vec<String>),
    #[error("key identity lambda*phi = pi^2 + pi(psi~ - phi') + pi' phi + phi~ failed for branch {0}")]
    IdentityFailed(String),
    #[error("degenerate GHE: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassicalError {
    #[error("phi has a double root; the Bessel case is not supported")]
    DoubleRootUnsupported,
    #[error("parameter {name} = {value} is out of range (must exceed -1)")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error("psi must have nonzero slope")]
    DegeneratePsi,
    #[error("phi must have real roots for the Jacobi family")]
    ComplexRoots,
    #[error("degree {n} exceeds the configured maximum {max}")]
    DegreeTooLarge { n: usize, max: usize },
    #[error("coefficient not representable: {0}")]
    NotRepresentable(&'static str),
    #[error("interval {got} does not map onto the canonical interval {expected}")]
    IntervalMismatch { expected: String, got: String },
    #[error("weight is not positive definite: {0}")]
    NotPositiveDefinite(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HyperError {
    #[error("series did not converge within {terms} terms")]
    MaxTermsExceeded { terms: usize },
    #[error("pole of the gamma function at z = {0}")]
    PoleAtNonPositiveInteger(f64),
    #[error("argument {0} is outside the supported domain")]
    Domain(String),
    #[error("connection formula lost {digits_lost:.1} digits (value {value_re} + {value_im}i)")]
    CancellationWarning {
        value_re: f64,
        value_im: f64,
        digits_lost: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PotentialError {
    #[error("unknown parameter '{0}'")]
    UnknownParameter(String),
    #[error("missing parameter '{0}'")]
    MissingParameter(String),
    #[error("parameter '{name}' must be positive, got {value}")]
    NonPositiveParameter { name: String, value: f64 },
    #[error("malformed parameter string: {0}")]
    BadParameter(String),
    #[error("unknown potential '{0}'")]
    UnknownPotential(String),
    #[error("no bound states for these parameters")]
    EmptySpectrum,
    #[error("potential has no scattering region")]
    NoScatteringRegion,
    #[error("energy {eps} is not above the scattering threshold {threshold}")]
    EnergyBelowRegion { eps: f64, threshold: f64 },
    #[error("declared GHE does not match the table form: {0}")]
    TableMismatch(String),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error(transparent)]
    Hyper(#[from] HyperError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("grid needs at least 100 points and hi > lo")]
    BadGrid,
    #[error("grid too coarse: refinement changed eigenvalue {index} by {change:e} (tolerance {tol:e})")]
    GridTooCoarse { index: usize, change: f64, tol: f64 },
    #[error("quadrature did not converge (error estimate {estimate:e})")]
    NoConvergence { estimate: f64 },
    #[error("count mismatch: analytic {analytic}, oracle {oracle}")]
    CountMismatch { analytic: usize, oracle: usize },
}

/// Umbrella error for callers that drive the whole pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error(transparent)]
    Hyper(#[from] HyperError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}
