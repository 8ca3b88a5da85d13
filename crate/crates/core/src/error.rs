use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid transform size {0}: must be at least 2")]
    InvalidSize(usize),

    #[error("parameter `{token}` is not one of 0, ±1/2, ±1, ±2")]
    InvalidParameter { token: String },

    #[error("expected 8 comma-separated parameters, found {0}")]
    ParameterCount(usize),

    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: String, found: String },

    #[error("parameter vector {0} does not give an orthogonal, nonsingular transform")]
    Infeasible(String),

    #[error("correlation coefficient {0} outside (0, 1)")]
    InvalidModel(f64),

    #[error("transform matrix is singular")]
    Singular,

    #[error("retention fraction {0} outside (0, 1]")]
    Policy(f64),

    #[error("APE baseline is zero")]
    ZeroBaseline,

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn shape_err(expected: impl Into<String>, found: impl Into<String>) -> Error {
    Error::Shape {
        expected: expected.into(),
        found: found.into(),
    }
}
