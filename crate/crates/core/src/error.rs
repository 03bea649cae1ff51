use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("grid needs at least 3 interior points per direction, got m1 = {m1}, m2 = {m2}")]
    GridTooSmall { m1: usize, m2: usize },

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: asymmetry {asymmetry:e} exceeds {allowed:e}")]
    NotHermitian { asymmetry: f64, allowed: f64 },

    #[error("scaling diagonal must be positive, entry {index} is {value}")]
    NonPositiveScaling { index: usize, value: f64 },

    #[error("symbol parameter must lie on the unit circle, |zeta| = {modulus}")]
    NotUnitModulus { modulus: f64 },

    #[error("certificate branch mismatch: y = {y} does not satisfy {branch}")]
    WrongBranch { y: f64, branch: &'static str },

    #[error("matrix exponential overflowed at t = {t} (scaled norm {norm:e})")]
    ExpOverflow { t: f64, norm: f64 },

    #[error("singular Pade denominator while evaluating exp(tA) at t = {t}")]
    SingularPade { t: f64 },

    #[error("two assemblies of {what} disagree by {mismatch:e} (allowed {allowed:e})")]
    AssemblyMismatch {
        what: &'static str,
        mismatch: f64,
        allowed: f64,
    },

    #[error("unknown {kind} `{name}`; available: {available}")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("sweep records have no partner for: {missing}")]
    UnmatchedRecords { missing: String },

    #[error("invalid sampling: {0}")]
    InvalidSampling(String),
}

impl Error {
    /// True for breakdowns of a computation, as opposed to invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian { .. }
                | Error::ExpOverflow { .. }
                | Error::SingularPade { .. }
                | Error::AssemblyMismatch { .. }
        )
    }
}
