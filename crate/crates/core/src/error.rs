use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed covariance matrix: {0}")]
    MalformedMatrix(String),

    #[error("unphysical state: {0}")]
    Unphysical(String),

    #[error("inconsistent symplectic invariants: no real (c1, c2) solution")]
    InconsistentInvariants,

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    #[error("singular state: {0}")]
    SingularState(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unphysical point in the (mu_s, C_ab) plane: mu_s={mu_s}, C_ab={c_ab}")]
    UnphysicalPoint { mu_s: f64, c_ab: f64 },

    #[error("underdetermined reconstruction: {0}")]
    Underdetermined(String),
}

pub type Result<T> = std::result::Result<T, Error>;
