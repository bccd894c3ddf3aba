use thiserror::Error;

/// Errors produced by the analysis library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An elementary operation was applied outside its domain
    /// (log of a non-positive number, division by zero, ...).
    #[error("domain error in `{op}` at value {value}")]
    Domain { op: &'static str, value: f64 },

    /// A deformation gradient with non-positive determinant.
    #[error("deformation gradient is not orientation preserving (det = {det})")]
    Orientation { det: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),

    /// Evaluation failure of a user expression, located in the source text.
    #[error("{source} (in expression at offset {offset})")]
    Expression {
        offset: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parameter `{name}` = {value} out of range: {reason}")]
    ParameterRange {
        name: String,
        value: f64,
        reason: &'static str,
    },

    #[error("model `{model}` has no {what}")]
    Unsupported { model: String, what: &'static str },

    /// The invariants are not those of any symmetric positive definite
    /// tensor.
    #[error("invariants ({i1}, {i2}, {i3}) admit no positive real spectrum")]
    Spectrum { i1: f64, i2: f64, i3: f64 },

    #[error("element {element}: {source}")]
    Element {
        element: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("model `{0}` is not APS-convex; the strict solver requires convexity")]
    NotApsConvex(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
