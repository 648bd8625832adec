use thiserror::Error;

/// Failures reported by the library. Each variant names the precondition or
/// numerical property that did not hold.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TorusError {
    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(i64),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported basis conversion from {from} to {to}")]
    UnsupportedBasis { from: String, to: String },

    #[error("lattice vectors {m:?} and {mp:?} are collinear mod {dim}")]
    CollinearVectors { m: (i64, i64), mp: (i64, i64), dim: usize },

    #[error("(S_m)^D is not a scalar multiple of the identity (off-scalar residual {0:e})")]
    NonScalarPower(f64),

    #[error("eigen-spectrum of S_{m:?} is degenerate at D={dim}")]
    DegenerateSpectrum { m: (i64, i64), dim: usize },

    #[error("deformation parameter is ±1 (sin(γ0·{cross}) = 0 at D={dim})")]
    DegenerateDeformation { cross: i64, dim: usize },

    #[error("no integer number-operator spectrum on the requested q branch")]
    BranchInconsistent,

    #[error("J3 branch is ambiguous: {0}")]
    BranchAmbiguity(String),

    #[error("phase relation failed: {0}")]
    PhaseMismatch(String),

    #[error("tensor dimension D^2 = {0} exceeds the supported limit")]
    DimensionTooLarge(usize),

    #[error("matrix {0:?} is not symplectic mod {1}")]
    NonSymplectic([[i64; 2]; 2], usize),

    #[error("eigensystem of S_{0:?} is degenerate; metaplectic operator needs prime D")]
    DegenerateEigensystem((i64, i64)),

    #[error("phase-space point {0:?} is off the integer grid")]
    OffGrid((f64, f64)),

    #[error("prime list is empty")]
    EmptyPrimeList,

    #[error("case condition unmet: {0}")]
    CaseConditionUnmet(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, TorusError>;
