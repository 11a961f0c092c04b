//! Numerical thresholds used across the crate, in one place.
//!
//! Values follow the convention that structural decisions (singularity,
//! branch-cut proximity, deflation) use scale-relative thresholds, while
//! convergence targets are caller-tunable with the defaults below.

/// LU pivot threshold, relative to the Frobenius norm of the input.
/// Callers treat a `Singular` error as "0 is in the spectrum" for
/// predicate purposes.
pub const SINGULAR_PIVOT_REL: f64 = 1e-12;

/// Relative tolerance for the power iteration behind the operator 2-norm.
pub const POWER_ITER_TOL: f64 = 1e-12;

/// Step cap for the operator-norm power iteration.
pub const POWER_ITER_CAP: usize = 10_000;

/// QR sweep cap is this factor times the dimension.
pub const QR_SWEEP_FACTOR: usize = 100;

/// Eigenvector extraction refuses when the eigenvector matrix condition
/// number exceeds this (defective case).
pub const EIGVEC_COND_CAP: f64 = 1e8;

/// Eigenvalues closer than this to the branch cut (-inf, 0] are rejected
/// rather than perturbed.
pub const BRANCH_CUT_DIST: f64 = 1e-10;

/// Eigenvalues closer than this to the imaginary axis block the sign
/// function.
pub const IMAG_AXIS_DIST: f64 = 1e-9;

/// Margin that separates "accretive" from "strictly accretive".
pub const STRICT_MARGIN: f64 = 1e-9;

/// Default number of support-sweep angles for the numerical range.
pub const DEFAULT_ANGLES: usize = 256;

/// Minimum angle count when a hull feeds a region-membership check.
pub const REGION_ANGLES: usize = 64;

/// Diagonal entries of a Schur factor closer than this are treated as a
/// cluster and routed through the 2x2 Sylvester block solve.
pub const CLUSTER_GAP: f64 = 1e-8;

/// Default residual tolerance for matrix iterations.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default step cap for matrix iterations.
pub const DEFAULT_MAX_ITER: usize = 200;

/// Step cap for scalar dynamics (rasterizer, cardioid oracles).
pub const SCALAR_MAX_ITER: usize = 1000;

/// Crouzeix's constant as used in bound checks; known to be below 12.
pub const CROUZEIX_K: f64 = 12.0;

/// Exploratory alternative for Crouzeix's constant (conjectured value).
pub const CROUZEIX_K_CONJECTURED: f64 = 2.0;

/// Truncation of the log-substituted quadrature domain: |s| <= this.
pub const QUAD_TRUNC: f64 = 40.0;

/// Relative convergence target between successive quadrature refinements.
pub const QUAD_TOL: f64 = 1e-9;

/// Refinement-level cap for adaptive quadrature.
pub const QUAD_MAX_LEVELS: usize = 24;

/// First rung of the epsilon-regularization ladder for the geometric mean.
pub const EPS_SCHEDULE_START: f64 = 1e-2;

/// Ladder stops when successive epsilon-iterates differ by less than this.
pub const EPS_STOP: f64 = 1e-7;

/// Rung cap for the epsilon ladder.
pub const EPS_MAX_RUNGS: usize = 48;

/// Retry cap for the random generators.
pub const GENERATOR_RETRIES: usize = 100;
