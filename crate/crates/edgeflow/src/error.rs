use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Hermitian eigensolver did not converge on a {dim}x{dim} matrix")]
    Eigensolver { dim: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("kernel block at n = {n} lies outside the supercell range {ell}")]
    RangeExceeded { ell: usize, n: i64 },

    #[error("energy {energy} is within {margin} of the band [{lo}, {hi}]")]
    EInBand { energy: f64, lo: f64, hi: f64, margin: f64 },

    #[error("energy {energy} coincides with an eigenvalue at t = {t}")]
    EOnEigenvalue { energy: f64, t: f64 },

    #[error("no saturation point with level >= {level} found in [{window}, -1]")]
    SaturationNotFound { level: f64, window: f64 },

    #[error("box half-width {half_width} is below the required {required}")]
    BoxTooSmall { half_width: usize, required: usize },

    #[error("ring needs at least 5 cells, got {ell}")]
    TooFewCells { ell: usize },

    #[error("no clear partition width on [{t_lo}, {t_hi}]")]
    PlanInfeasible { t_lo: f64, t_hi: f64 },

    #[error("cut indices ({n}, {m}) are not coprime")]
    NotCoprime { n: i64, m: i64 },

    #[error("cut indices ({n}, {m}) must both be nonzero")]
    ZeroIndex { n: i64, m: i64 },

    #[error("model file: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
