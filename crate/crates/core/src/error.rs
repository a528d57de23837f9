use thiserror::Error;

use crate::geom::Vec3;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("invalid medium: {0}")]
    InvalidMedium(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("reciprocal vector {0:?} is not on the lattice")]
    OffLattice(Vec3),
    #[error("basis too small: {0}")]
    BasisTooSmall(String),
    #[error("assembled operator is not Hermitian (relative residual {0:.3e})")]
    NonHermitian(f64),
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
    #[error("negative eigenvalue {value:.3e} at band {band}")]
    NegativeEigenvalue { band: usize, value: f64 },
    #[error("requested {requested} bands but the basis holds {available}")]
    TooManyBands { requested: usize, available: usize },
    #[error("degenerate cluster at band {band} reaches the edge of the {n_bands}-band window; request more bands")]
    ClusterTruncated { band: usize, n_bands: usize },
    #[error("branch crossing inside the finite-difference stencil along {direction:?} (overlap {overlap:.3})")]
    BranchCrossing { direction: Vec3, overlap: f64 },
    #[error("group frequency is zero; use the quasi-static homogenisation instead")]
    ZeroFrequency,
    #[error("first-order right side is incompatible (projection ratio {ratio:.3e})")]
    Compatibility { ratio: f64 },
    #[error("linear solve failed: {0}")]
    Solve(String),
    #[error("expected a {expected} group, found {found}")]
    Classification { expected: &'static str, found: &'static str },
    #[error("missing first-order field for direction {direction}, mode {mode}")]
    MissingFirstOrder { direction: usize, mode: usize },
    #[error("no degeneracy found: best gap {gap:.3e} at parameter {value}")]
    NoDegeneracy { value: f64, gap: f64 },
    #[error("frequency {omega} is on the propagating side of {omega0} for this tensor component")]
    PropagatingSide { omega0: f64, omega: f64 },
    #[error("effective tensor is not positive definite (eigenvalue {0:.3e})")]
    NotPositiveDefinite(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
