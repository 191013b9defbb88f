//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A structural invariant of the problem data is violated.
    #[error("invalid problem data: {0}")]
    Invalid(String),

    /// A point required to be admissible/feasible is not.
    #[error("point not admissible: {0}")]
    NotAdmissible(String),

    /// A lambda was handed to a sector-specific routine it does not belong to.
    #[error("sector mismatch: {0}")]
    SectorMismatch(String),

    /// The first-order coefficient of the determinant model is not defined
    /// because an endpoint-continuity flag is missing.
    #[error("omega1 undefined: {0}")]
    Omega1Undefined(String),

    /// An ODE integration exceeded its step budget or failed.
    #[error("integration failure: {0}")]
    Integration(String),

    /// Contour quadrature failed to converge or a zero sits on the contour.
    #[error("contour failure: {0}")]
    Contour(String),

    /// A linear solve hit a (numerically) singular matrix.
    #[error("singular matrix: {0}")]
    Singular(String),

    /// lambda is too close to the spectrum for a resolvent evaluation.
    #[error("near spectrum: {0}")]
    NearSpectrum(String),

    /// Requested pattern (Riesz shape, reference spectrum) does not match.
    #[error("pattern mismatch: {0}")]
    PatternMismatch(String),

    /// Numerical rank came out below the structurally expected dimension.
    #[error("rank deficiency: {0}")]
    RankDeficiency(String),

    /// Malformed input document.
    #[error("parse error: {0}")]
    Parse(String),
}
