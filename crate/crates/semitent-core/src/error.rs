use alloc::string::String;
use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Operands live in different algebras or grids.
    ContextMismatch,
    InvalidParameter(String),
    /// Self-adjointness was required; carries the measured asymmetry.
    NotSelfAdjoint { asymmetry: f64 },
    /// Adaptive quadrature stopped short of its tolerance.
    QuadratureNonconvergence { achieved: f64 },
    IncompatibleOperators,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ContextMismatch => write!(f, "operands belong to different contexts"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::NotSelfAdjoint { asymmetry } => {
                write!(f, "element is not self-adjoint (asymmetry {asymmetry:e})")
            }
            Error::QuadratureNonconvergence { achieved } => {
                write!(f, "quadrature did not converge (achieved error {achieved:e})")
            }
            Error::IncompatibleOperators => write!(f, "operator representations are incompatible"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: &str) -> Error {
    Error::InvalidParameter(String::from(msg))
}
