use thiserror::Error;

/// Rejection of DSL source text. Positions are byte offsets into the source.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        pos: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("unknown identifier `{name}` at {pos}")]
    UnknownIdentifier { pos: usize, name: String },
    #[error("variable `{name}` at {pos} is outside the domain of arity {arity}")]
    VariableOutOfRange {
        pos: usize,
        name: String,
        arity: usize,
    },
    #[error("exponent at {pos} must be a finite constant")]
    NonConstantExponent { pos: usize },
    #[error("invalid number `{text}` at {pos}")]
    InvalidNumber { pos: usize, text: String },
    #[error("expression nested too deeply at {pos}")]
    TooDeep { pos: usize },
    #[error("expected {expected} components, found {found}")]
    ComponentCount { expected: usize, found: usize },
    #[error("arities must be positive")]
    ZeroArity,
}

/// Evaluation left the domain of an operator, or overflowed.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("domain error in component {component}: {op}: {reason}")]
pub struct DomainError {
    pub component: usize,
    pub op: &'static str,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("{structure}: anchors differ in `{field}` by {deviation:e}")]
    AnchorMismatch {
        structure: &'static str,
        field: &'static str,
        deviation: f64,
    },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("unknown law `{0}`")]
    UnknownLaw(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn shape(msg: impl Into<String>) -> Error {
    Error::Shape(msg.into())
}
