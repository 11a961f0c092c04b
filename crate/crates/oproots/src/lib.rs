//! Iterative methods for operator roots on dense complex matrices: Newton,
//! binomial, Visser and Halley root iterations, the operator sign function,
//! and the geometric mean of accretive operators, together with the
//! numerical-range machinery (sectors, type-M constants, convergence
//! regions) needed to state and check their hypotheses.
//!
//! Everything is desk scale: dense `Complex64` matrices up to n = 200,
//! pure functions, deterministic given a seed.

pub mod error;
pub mod harness;
pub mod iterations;
pub mod matrix;
pub mod mean;
pub mod powers;
pub mod schur;
pub mod sign;
pub mod spectral;
pub mod tol;
pub mod trace;

pub use error::{Error, Result};
pub use matrix::{inverse, multiply, CMatrix};
pub use schur::{eig, eig_with_vectors, norms, EigenDecomposition, NormReport};
pub use spectral::{
    classify, in_region, numerical_range, range_in_region, state_norm_check, NumericalRange,
    RegionSpec, SectorReport, TypeMBound,
};
pub use trace::{IterationTrace, StopReason, TraceStep};
