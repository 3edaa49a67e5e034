use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate geometry: atom distance {distance:.4} below the minimum {min:.4}")]
    DegenerateGeometry { distance: f64, min: f64 },

    #[error("no root of the blockade condition in [{lo:.4}, {hi:.4}]")]
    NoRoot { lo: f64, hi: f64 },

    #[error("generalized blockade fails: couplings {subset:?} sum to {sum:.3e}")]
    BlockadeDegeneracy { subset: Vec<usize>, sum: f64 },

    #[error("effective Rabi frequency has a pole (C6 = detuning * |eta|^6)")]
    RabiPole,

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("link configuration violates the Gauss law at sites {sites:?}")]
    NonPhysical { sites: Vec<usize> },

    #[error("link configuration is incompatible with the fixed boundary: {0}")]
    BoundaryIncompatible(String),

    #[error("dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("time step at t = {t:.4} exceeds the error budget (estimate {estimate:.3e})")]
    StepError { t: f64, estimate: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
