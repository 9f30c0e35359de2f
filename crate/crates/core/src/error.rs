use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("state not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("tail mass {mass:e} exceeds tolerance {tol:e} at N = {dim}; increase the truncation")]
    TailMass { mass: f64, tol: f64, dim: usize },
    #[error("truncation N = {dim} too small for order m = {m} (need N > 2m)")]
    TruncationTooSmall { dim: usize, m: usize },
    #[error("invalid subspace index j = {j} for m = {m}")]
    InvalidSubspace { m: usize, j: usize },
    #[error("m must be at least 1")]
    InvalidOrder,
    #[error("mean photon number vanishes; Q is undefined")]
    ZeroMeanPhotonNumber,
    #[error("tilde amplitudes are singular at z = 0")]
    SingularAtOrigin,
    #[error("decomposition degenerates at z = 0 for j > 0")]
    DegenerateOrigin,
    #[error("all amplitudes are zero")]
    ZeroAmplitudes,
    #[error("quadrature unstable for N = {0} (limit 128)")]
    QuadratureLimit(usize),
    #[error("grid normalization residual {residual:e} exceeds {limit:e}; enlarge the grid")]
    GridTooSmall { residual: f64, limit: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("not cyclic at tau: fidelity {0}")]
    NotCyclic(f64),
    #[error("{what} disagree by {diff:e}")]
    Inconsistent { what: &'static str, diff: f64 },
    #[error("no Poissonian crossing in range")]
    NoRoot,
}

pub type Result<T> = std::result::Result<T, Error>;
