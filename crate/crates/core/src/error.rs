use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KpgmError {
    #[error("{op}: {reason}")]
    Domain { op: &'static str, reason: String },

    #[error("{op}: result exceeds the representable range ({reason})")]
    Overflow { op: &'static str, reason: String },

    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e}, error {error:e})")]
    Quadrature { estimate: f64, error: f64, tol: f64 },

    #[error("eigenvalue {index} not converged under grid doubling (change {change:e} > {tol:e})")]
    Convergence { index: usize, change: f64, tol: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

impl KpgmError {
    pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Self {
        KpgmError::Domain {
            op,
            reason: reason.into(),
        }
    }

    pub(crate) fn overflow(op: &'static str, reason: impl Into<String>) -> Self {
        KpgmError::Overflow {
            op,
            reason: reason.into(),
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        KpgmError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, KpgmError>;
