//! Error type shared by every module in the crate.

use num_complex::Complex64;

use crate::trace::IterationTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("ragged matrix data: row {row} has length {got}, expected {expected}")]
    Ragged {
        row: usize,
        got: usize,
        expected: usize,
    },

    #[error("singular matrix: pivot {pivot:.3e} below threshold {threshold:.3e}")]
    Singular { pivot: f64, threshold: f64 },

    #[error("eigenvalue iteration exceeded {0} QR sweeps")]
    NoConvergence(usize),

    #[error("spectrum touches the branch cut (-inf, 0]: eigenvalue {0}")]
    NegativeSpectrum(Complex64),

    #[error("spectrum touches the imaginary axis: eigenvalue {0}")]
    ImaginarySpectrum(Complex64),

    #[error("spectra are not separated by the imaginary axis")]
    SpectraNotSeparated,

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("quadrature stalled after {0} refinement levels")]
    QuadratureStall(usize),

    #[error("epsilon regularization ladder stalled")]
    EpsilonStall,

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("series tail bound {0:.3e} exceeds tolerance")]
    SeriesTruncation(f64),

    #[error("rank decision ambiguous: smallest kept/largest dropped singular value ratio {0:.2}")]
    RankAmbiguous(f64),

    #[error("generator exhausted {0} draws without meeting its advertised class")]
    GenerationExhausted(usize),

    #[error("root preprocessing exceeded {0} doubling/halving rounds")]
    PreprocessingOverflow(usize),

    #[error("iteration hit the step cap {max_iter} without converging")]
    MaxIter {
        max_iter: usize,
        trace: Box<IterationTrace>,
    },

    #[error("iterate singular at step {step}")]
    SingularIterate {
        step: usize,
        trace: Box<IterationTrace>,
    },

    #[error("iteration diverged at step {step}")]
    Diverged {
        step: usize,
        trace: Box<IterationTrace>,
    },

    #[error("bad input: {0}")]
    BadInput(String),
}

impl Error {
    /// The trace attached to an iteration failure, when there is one.
    pub fn trace(&self) -> Option<&IterationTrace> {
        match self {
            Error::MaxIter { trace, .. }
            | Error::SingularIterate { trace, .. }
            | Error::Diverged { trace, .. } => Some(trace),
            _ => None,
        }
    }
}
