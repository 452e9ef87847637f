use thiserror::Error;

use crate::expr::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot parse coefficient {label}: {source}")]
    Parse {
        label: String,
        #[source]
        source: ParseError,
    },

    #[error("evaluation failed at {point:?}: {source}")]
    Eval {
        point: Vec<f64>,
        #[source]
        source: EvalError,
    },

    #[error("point {point:?} outside domain: x{axis} = {value} violates {side} bound {bound}", side = if *.upper { "upper" } else { "lower" })]
    OutsideDomain {
        point: Vec<f64>,
        /// 1-based axis.
        axis: usize,
        value: f64,
        bound: f64,
        upper: bool,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unknown connection family '{0}'")]
    UnknownFamily(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integrator exceeded {max_steps} steps at t = {t}")]
    MaxStepsExceeded { max_steps: usize, t: f64 },

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("non-finite state encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("direction is not a unit vector (norm {norm})")]
    NotUnitDirection { norm: f64 },

    #[error("frame is near-singular (condition estimate {condition:e})")]
    NearSingular { condition: f64 },

    #[error("connection carries no metric")]
    MissingMetric,

    #[error("at z = {point:?}: {source}")]
    AtPoint {
        point: Vec<f64>,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for errors caused by inconsistent input rather than by the numerics.
    pub fn is_config_error(&self) -> bool {
        match self {
            Error::Parse { .. }
            | Error::OutsideDomain { .. }
            | Error::Shape(_)
            | Error::UnknownFamily(_)
            | Error::InvalidParameter(_)
            | Error::NotUnitDirection { .. }
            | Error::MissingMetric => true,
            Error::AtPoint { source, .. } => source.is_config_error(),
            _ => false,
        }
    }
}
