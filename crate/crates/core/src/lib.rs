//! Numerical spectral analysis of two-point boundary value problems for
//! first-order systems
//!
//! ```text
//!     -i B^{-1} y' + Q(x) y = lambda y,   x in [0, 1],
//!     C y(0) + D y(1) = 0,
//! ```
//!
//! where `B = diag(b_1, ..., b_n)` is a nonsingular diagonal weight, `Q` is a
//! potential matrix and `(C, D)` is a maximal boundary pair.  The crate
//! computes the characteristic determinant `Delta(lambda) = det(C + D
//! Phi(1, lambda))`, localizes its zeros (the eigenvalues) by the argument
//! principle, evaluates Green's functions and resolvents, builds root-function
//! chains, and classifies boundary conditions: regularity, completeness
//! certificates, normality, dissipativity, Riesz-basis structure and spectral
//! synthesis verdicts.  A reduction of the damped Timoshenko beam to a 4x4
//! Dirac-type system is included.
//!
//! Entry points:
//! - [`system::DiracBVP`] — the problem object (weight, potential, boundary pair);
//! - [`propagator::char_determinant`] — the characteristic determinant;
//! - [`spectrum::locate_eigenvalues`] — eigenvalues with multiplicities in a rectangle;
//! - [`classify::classify`] — the combined structural report;
//! - [`timoshenko::reduce_to_dirac`] — the beam reduction.

pub mod asymptotics;
pub mod classify;
pub mod error;
pub mod json;
pub mod linalg;
pub mod propagator;
pub mod resolvent;
pub mod rootfns;
pub mod sectors;
pub mod spectrum;
pub mod system;
pub mod timoshenko;

pub use error::Error;
pub use linalg::{CMat, C64};
pub use system::DiracBVP;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
