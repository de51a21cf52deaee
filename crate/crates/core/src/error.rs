use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown superpotential family `{0}`")]
    UnknownFamily(String),

    #[error("family `{family}` takes {expected} parameter(s), got {got}")]
    ArityMismatch {
        family: String,
        expected: usize,
        got: usize,
    },

    #[error("parameter values must be finite, got {0:?}")]
    NonFiniteParameter(Vec<f64>),

    #[error("parameter orbit of `{family}` leaves the admissible set at step {step} (g = {value:?})")]
    ParameterDomainExit {
        family: String,
        step: usize,
        value: Vec<f64>,
    },

    #[error("ground state of `{family}` at g = {value:?} is not normalizable on the grid (wall/peak ratio {ratio:.3e})")]
    NonNormalizable {
        family: String,
        value: Vec<f64>,
        ratio: f64,
    },

    #[error("level {level} out of range: {available} bound state(s) available")]
    LevelOutOfRange { level: usize, available: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("bisection cannot reach tolerance {tol:e} (non-finite matrix entries or tolerance below rounding)")]
    ToleranceUnreachable { tol: f64 },

    #[error("inverse iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
}
