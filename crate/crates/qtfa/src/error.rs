//! Error type shared by all modules.

/// Everything that can go wrong when building or combining the finite-model
/// objects. Numerical tolerances quoted in messages are the construction
/// thresholds, not test tolerances.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("grid size {0} is odd; the finite model needs an even size")]
    OddSize(usize),
    #[error("grid size {0} is too small; need N >= 4")]
    TooSmall(usize),
    #[error("{0} does not divide the grid size {1}")]
    NotDivisor(i64, usize),
    #[error("operands live on different grids (N = {0} vs N = {1})")]
    GridMismatch(usize, usize),
    #[error("operator modulation needs even coordinates, got ({0}, {1})")]
    OddModulation(i64, i64),
    #[error("point ({0}, {1}) is not a lattice point")]
    EtaNotInLattice(i64, i64),
    #[error("expected a square matrix of even dimension, got {0} x {1}")]
    BadShape(usize, usize),
    #[error("matrix is not symplectic: |M^T J M - J|_max = {0:.3e}")]
    NotSymplectic(f64),
    #[error("parameter matrix must be symmetric")]
    NotSymmetric,
    #[error("parameter matrix must be invertible")]
    Singular,
    #[error("matrix is not free: |det(top-right block)| = {0:.3e}")]
    NotFree(f64),
    #[error("unknown matrix name {0:?}")]
    UnknownName(String),
    #[error("chirp parameter must be symmetric with half-integer entries")]
    ChirpNotRepresentable,
    #[error("dilation must be an integer matrix invertible mod N")]
    DilationNotUnit,
    #[error("mapped point {0:?} is not an integer vector")]
    NonIntegerImage(Vec<f64>),
    #[error("window transform vanishes on the fundamental domain at ({0}, {1}): magnitude {2:.3e}")]
    WindowVanishes(i64, i64, f64),
    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("matrix does not have the covariance (upper block-triangular) form")]
    NotCovarianceForm,
    #[error("metaplectic action is not grid compatible: residual {0:.3e}")]
    GridIncompatible(f64),
    #[error("lattice image under the symplectic map is not integral")]
    LatticeImageNotIntegral,
    #[error("window symbol vanishes at the origin: magnitude {0:.3e}")]
    SymbolVanishesAtZero(f64),
    #[error("window symbol support meets the adjoint lattice away from 0, e.g. at ({0}, {1})")]
    SupportViolation(i64, i64),
    #[error("gaussian width must be positive, got {0}")]
    NotPositive(f64),
    #[error("undersampled: {samples} samples cannot determine {unknowns} unknowns")]
    UnderSampled { samples: usize, unknowns: usize },
    #[error("gram matrix is numerically rank deficient: smin/smax = {0:.3e}")]
    IllConditioned(f64),
    #[error("recovered operator is not rank one: s2/s1 = {0:.3e}")]
    RankDeficient(f64),
    #[error("no decomposition candidate produced an invertible corner block")]
    NotDecomposable,
}

pub type Result<T> = std::result::Result<T, Error>;
