use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("field has no samples")]
    EmptyField,
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("ODE integration failed at x = {x}: {reason}")]
    Integration { x: f64, reason: String },
    #[error("matching point too close to the origin: x0*xi = {0} < 10")]
    MatchingPoint(f64),
    #[error("degenerate Wronskian at xi = {0}")]
    DegenerateWronskian(f64),
    #[error("requested time {t} exceeds the truncation horizon {horizon}")]
    Truncation { t: f64, horizon: f64 },
    #[error("non-finite values at t = {0}")]
    BlowUp(f64),
    #[error("accuracy check failed: {0}")]
    Accuracy(String),
    #[error("insufficient data: {0}")]
    Insufficient(String),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io(_) => 2,
            _ => 3,
        }
    }
}
