use thiserror::Error;

/// Error type shared by every module of the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeomError {
    #[error("division by zero in jet arithmetic")]
    DivisionByZero,

    #[error("domain violation: {func} requires {requirement}, got {value}")]
    DomainError {
        func: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("metric is singular at the evaluation point (|det| = {det:.3e})")]
    SingularMetric { det: f64 },

    #[error("frame matrix is singular at the evaluation point")]
    SingularFrame,

    #[error("section span(e_{a}, e_{b}) is degenerate (|pi1| = {pi1:.3e})")]
    DegenerateSection { a: usize, b: usize, pi1: f64 },

    #[error("no frame section is totally real and nondegenerate")]
    NoAdmissibleSection,

    #[error("generators do not close under the bracket (residual {residual:.3e})")]
    NotClosed { residual: f64 },

    #[error("structure J_{alpha} violates metric compatibility (residual {magnitude:.3e})")]
    IncompatibleStructure { alpha: usize, magnitude: f64 },

    #[error("theorem consistency check '{theorem}' failed on example '{example}': {detail}")]
    TheoremViolation {
        example: String,
        theorem: &'static str,
        detail: String,
    },

    #[error("unknown example id '{0}'")]
    UnknownExample(String),

    #[error("validation failed: {0}")]
    ValidationError(String),

    #[error("expression parse error: {0}")]
    ParseError(String),

    #[error("point {point:?} violates the domain guard: {guard}")]
    GuardViolation { point: [f64; 4], guard: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
