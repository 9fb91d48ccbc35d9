use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("jets expanded at different base points")]
    BaseMismatch,

    #[error("insufficient jet degree: {what} needs degree {needed}, have {have}")]
    Degree {
        what: &'static str,
        needed: usize,
        have: usize,
    },

    #[error("jet not invertible at base point: {0}")]
    NotInvertible(String),

    #[error("jet not divisible: residual {residual:.3e} exceeds tolerance {tol:.1e}")]
    NotDivisible { residual: f64, tol: f64 },

    #[error("degenerate defining function: gradient vanishes at base point")]
    DegenerateDefiningFunction,

    #[error("polynomial is not Hermitian: {0}")]
    NotHermitian(String),

    #[error("singular map: {0}")]
    SingularMap(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// Strict pseudoconvexity or star-shapedness failed.
    #[error("geometry: {0}")]
    Geometry(String),

    /// A tolerance, convergence or conditioning check failed.
    #[error("numeric: {0}")]
    Numeric(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 parse, 3 geometry, 4 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::NotHermitian(_) | Error::SingularMap(_) | Error::Io(_) | Error::Invalid(_) => 2,
            Error::Geometry(_) | Error::DegenerateDefiningFunction => 3,
            Error::BaseMismatch
            | Error::Degree { .. }
            | Error::NotInvertible(_)
            | Error::NotDivisible { .. }
            | Error::Numeric(_) => 4,
        }
    }
}
