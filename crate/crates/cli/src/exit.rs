use repbench_core::circuit::GenError;
use repbench_core::eval::EvalError;
use repbench_core::geometry::GeometryError;
use repbench_core::interchange::InterchangeError;
use repbench_core::metrics::MetricsError;
use repbench_core::repr::ReprError;

pub const VERIFY: u8 = 1;
pub const CONFIG: u8 = 2;
pub const IO: u8 = 3;
pub const REMOTE: u8 = 4;

/// Failure with an explicit exit code.
#[derive(Debug)]
pub struct Coded(pub u8, pub String);

impl std::fmt::Display for Coded {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.1)
    }
}

impl std::error::Error for Coded {}

pub fn fail(code: u8, msg: impl Into<String>) -> anyhow::Error {
    Coded(code, msg.into()).into()
}

pub fn code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(c) = cause.downcast_ref::<Coded>() {
            return c.0;
        }
        if let Some(e) = cause.downcast_ref::<EvalError>() {
            return match e {
                EvalError::EndpointUnreachable { .. } => REMOTE,
                EvalError::EmptyInput | EvalError::EmptySuite => IO,
                _ => CONFIG,
            };
        }
        if let Some(e) = cause.downcast_ref::<InterchangeError>() {
            return match e {
                InterchangeError::AnswerMismatch { .. } => VERIFY,
                _ => IO,
            };
        }
        if cause.is::<GenError>() || cause.is::<ReprError>() || cause.is::<MetricsError>() || cause.is::<GeometryError>() {
            return CONFIG;
        }
        if cause.is::<std::io::Error>() {
            return IO;
        }
    }
    CONFIG
}
