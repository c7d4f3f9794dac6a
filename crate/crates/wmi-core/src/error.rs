use thiserror::Error;

/// Errors surfaced by the engine, integrator and front end.
#[derive(Debug, Error)]
pub enum WmiError {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),

    #[error("non-linear expression inside an arithmetic atom: {0}")]
    NonLinearAtom(String),

    #[error("weight is not polynomial: {0}")]
    NonPolynomialWeight(String),

    #[error("division by zero in weight term")]
    DivisionByZero,

    #[error("integration region is unbounded (recession ray {0})")]
    UnboundedRegion(String),

    #[error("dimension {0} exceeds the configured cap of {1}")]
    DimensionCap(usize, usize),

    #[error("{0} Boolean variables exceed the brute-force cap of {1}")]
    BooleanCap(usize, usize),

    #[error("literal mentions a non-arithmetic atom: {0}")]
    NonArithmeticLiteral(String),

    #[error("zero denominator in rational literal `{0}`")]
    ZeroDenominator(String),

    #[error("degenerate model: zero normalization constant")]
    DegenerateModel,

    #[error("timeout")]
    Timeout,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("invalid model file: {0}")]
    InvalidModel(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, WmiError>;
