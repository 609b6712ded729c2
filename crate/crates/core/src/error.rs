use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("particle index out of range: ({i}, {j}) for {particles} particles")]
    IndexOutOfRange { i: usize, j: usize, particles: usize },

    #[error("spin label {label} out of range 1..={n}")]
    LabelOutOfRange { label: usize, n: usize },

    /// The scalar denominator of a Y-operator vanishes; for imaginary
    /// spectral parameters this is a bound-state pole.
    #[error("Y-operator pole at spectral parameter {k}")]
    PoleAtParameter { k: Complex64 },

    #[error("resolvent not invertible at spectral parameter {k}")]
    SingularResolvent { k: Complex64 },

    #[error("reduced words disagree for arrangement {arrangement:?}: residual {residual:e}")]
    DivergentPath { arrangement: Vec<usize>, residual: f64 },

    #[error("coordinates coincide: x[{i}] == x[{j}]")]
    CoincidentCoordinates { i: usize, j: usize },

    #[error("momenta coincide: k[{i}] == k[{j}]")]
    CoincidentMomenta { i: usize, j: usize },

    #[error("momenta must be real and strictly ascending")]
    NonAscendingMomenta,

    #[error("[h, P] != 0 (norm {norm:e})")]
    CommutationViolated { norm: f64 },

    #[error("no spin vector is invariant under all pair constraints for eigenvalue {eigenvalue}")]
    NoInvariantSpinVector { eigenvalue: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}
