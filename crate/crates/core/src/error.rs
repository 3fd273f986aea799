use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("input is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NonHermitianInput { deviation: f64 },

    #[error("negative eigenvalue {value:e} in a matrix required to be positive semidefinite")]
    NegativeEigenvalue { value: f64 },

    #[error("basis is not unitary (max |U^dagger U - I| = {deviation:e})")]
    NonUnitaryBasis { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid model parameter: {0}")]
    InvalidModel(String),

    #[error("degenerate energy gap {gap:e} between levels {upper} and {lower}")]
    DegenerateGap { upper: usize, lower: usize, gap: f64 },

    #[error("Bose rate is singular for levels {upper} and {lower}")]
    SingularBoseRate { upper: usize, lower: usize },

    #[error("steady state is not unique ({kernel_dim} zero modes)")]
    NonUniqueSteadyState { kernel_dim: usize },

    #[error("Gibbs weights span too many decades for the population eigenbasis")]
    PopulationRange,

    #[error("dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("state has weight {weight:e} outside the support of the reference")]
    SupportViolation { weight: f64 },

    #[error("Bloch vector has norm {norm} > 1")]
    InvalidBloch { norm: f64 },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("slowest decaying mode is population-sector (real eigenvalue)")]
    RealSlowestMode,

    #[error("eigenvalues {alpha_1} and {alpha_n} do not have opposite signs")]
    SameSignEigenvalues { alpha_1: f64, alpha_n: f64 },

    #[error("slowest left eigenmatrix is not Hermitian")]
    NonHermitianL2,

    #[error("probe state is not pure")]
    NonPureProbe,

    #[error("spectrum biorthonormality residual {residual:e} exceeds tolerance")]
    NonConvergedSpectrum { residual: f64 },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
