use thiserror::Error;

use crate::float::GrossFloat;

/// Errors raised by configuration, conversion and arithmetic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArithError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("exponent overflow: {exponent} exceeds {max}")]
    Overflow { exponent: i64, max: i64 },
    #[error("exponent underflow: {exponent} below {min}")]
    Underflow { exponent: i64, min: i64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("section index {index} out of range 0..={max}")]
    SectionOutOfRange { index: usize, max: usize },
    #[error("malformed number `{text}`: {reason}")]
    Format { text: String, reason: String },
    #[error("operand does not fit the configured format: {0}")]
    Operand(String),
}

impl ArithError {
    pub(crate) fn format(text: &str, reason: impl Into<String>) -> Self {
        ArithError::Format {
            text: text.to_string(),
            reason: reason.into(),
        }
    }
}

/// Failure of an adaptive computation to reach its accuracy target.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PrecisionError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("accuracy target {target:e} not reached at maximum precision (estimate {estimate:e})")]
    AccuracyExhausted {
        target: f64,
        estimate: f64,
        best: GrossFloat,
    },
    #[error("empty sum")]
    EmptySum,
    #[error("relative error undefined for a zero iterate")]
    ZeroIterate,
    #[error("safety factor {0} outside (0, 1]")]
    Safety(f64),
}

/// Hard failures of the root finder. Non-convergence is reported in the trace.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("derivative vanished at step {step}")]
    SingularStep { step: usize },
    #[error("invalid solver input: {0}")]
    Input(String),
}
