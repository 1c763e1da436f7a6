use thiserror::Error;

pub type Result<T> = std::result::Result<T, ReadingError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReadingError {
    /// An input lies outside the domain of the operation.
    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("covariance matrix is unphysical: symplectic eigenvalue {nu} < 1")]
    Unphysical { nu: f64 },

    #[error("symplectic eigenvalues are numerically degenerate (discriminant {discriminant})")]
    NumericalDegeneracy { discriminant: f64 },

    #[error("pure-state covariance required, got symplectic eigenvalues ({nu_minus}, {nu_plus})")]
    NotPure { nu_minus: f64, nu_plus: f64 },

    #[error("design infeasible: gap coefficient K = {k} must be below the photon budget {nbar_max}")]
    DesignInfeasible { k: f64, nbar_max: f64 },

    #[error("target {target} bits is unreachable: quantum information never exceeds {supremum}")]
    UnreachableTarget { target: f64, supremum: f64 },

    #[error("target {target} bits is met at every budget (asymptote {asymptote}); no finite budget limit")]
    UnboundedBudget { target: f64, asymptote: f64 },

    #[error("cutoff {cutoff} leaves truncation tail {tail:e} above tolerance {tolerance:e}")]
    InsufficientCutoff {
        cutoff: usize,
        tail: f64,
        tolerance: f64,
    },

    #[error("invalid oracle configuration: {0}")]
    Configuration(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },

    #[error("moments violate the block standard form (residual {residual:e} > {tolerance:e})")]
    Structure { residual: f64, tolerance: f64 },
}

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(ReadingError::Domain {
            name,
            value,
            expected: "[0, 1]",
        })
    }
}

pub(crate) fn check_non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ReadingError::Domain {
            name,
            value,
            expected: ">= 0",
        })
    }
}
