use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coefficient `{name}` evaluated at t = {t} outside its domain [{lo}, {hi}]")]
    Domain {
        name: String,
        t: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid coefficient `{name}`: {reason}")]
    InvalidCoefficient { name: String, reason: String },

    #[error("quasi-Hermitian metric is singular: Omega(t) = 0 at t = {t}")]
    SingularMetric { t: f64 },

    #[error("unsupported sign: {0}")]
    UnsupportedSign(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("integration exhausted {steps} steps at t = {t}")]
    StepLimit { t: f64, steps: usize },

    #[error("integration step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("Riccati solution escaped to |u1| > 1e6 at t = {t}")]
    RiccatiBlowUp { t: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("normalization underflow: Tr(U rho U^dag) = {trace:e}")]
    Underflow { trace: f64 },

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid JSON input: {0}")]
    Json(String),
}

impl Error {
    /// Attaches a coefficient name to domain and validation errors.
    pub fn named(self, coefficient: &str) -> Self {
        match self {
            Error::Domain { t, lo, hi, .. } => Error::Domain {
                name: coefficient.to_string(),
                t,
                lo,
                hi,
            },
            Error::InvalidCoefficient { reason, .. } => Error::InvalidCoefficient {
                name: coefficient.to_string(),
                reason,
            },
            other => other,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
