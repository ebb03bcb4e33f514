use core::fmt;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument or configuration value violates a documented precondition.
    Parameter(&'static str),
    /// Matrix or vector shapes do not agree.
    Dimension {
        op: &'static str,
        expected: (usize, usize),
        found: (usize, usize),
    },
    /// A matrix or diagonal entry was singular to working precision.
    Singular(&'static str),
    /// ZF Gram matrix stayed singular after the allowed number of redraws.
    RedrawLimit { redraws: u32 },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Dimension {
                op,
                expected,
                found,
            } => write!(
                f,
                "{op}: dimension mismatch, expected {}x{}, found {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            Error::Singular(what) => write!(f, "singular {what}"),
            Error::RedrawLimit { redraws } => {
                write!(f, "ZF Gram matrix singular after {redraws} redraws")
            }
        }
    }
}

impl core::error::Error for Error {}
