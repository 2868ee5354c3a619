use alloc::string::String;
use core::fmt;

/// Errors surfaced by frame computations.
#[derive(Debug, Clone, PartialEq)]
pub enum FrameError {
    /// Input violates a documented precondition.
    InvalidInput(String),
    /// An eigensolve or other numerical routine failed to converge.
    NumericalFailure(String),
    /// Exhaustive enumeration would exceed the configured budget.
    BudgetExceeded { required: u128, budget: u128 },
    /// A packed region holds fewer points than the requested cell size.
    InsufficientDensity { required: usize, found: usize },
    /// The thinning precondition M+ < alpha fails; nothing can be removed.
    NoProgress { m_plus: f64, alpha: f64 },
    /// An independently recomputed certificate does not match.
    CertificateFailure(String),
}

impl fmt::Display for FrameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameError::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            FrameError::NumericalFailure(msg) => write!(f, "numerical failure: {msg}"),
            FrameError::BudgetExceeded { required, budget } => {
                write!(f, "budget exceeded: {required} candidates > budget {budget}")
            }
            FrameError::InsufficientDensity { required, found } => {
                write!(f, "insufficient density: region holds {found} points, needs {required}")
            }
            FrameError::NoProgress { m_plus, alpha } => {
                write!(f, "no progress: M+ estimate {m_plus} is not below alpha {alpha}")
            }
            FrameError::CertificateFailure(msg) => write!(f, "certificate failure: {msg}"),
        }
    }
}

impl core::error::Error for FrameError {}

pub type Result<T> = core::result::Result<T, FrameError>;
