//! Numerical verification of the stability bounds for the semi-discrete
//! Heston operators and of every link in the diffusion contractivity
//! certificate.
//!
//! Each inequality is reported as a [`BoundCheck`]; failures are data, not
//! errors. Errors are reserved for invalid input and numerical breakdown.

mod advection;
mod certificate;
mod conditions;
mod diffusion;
mod registry;
mod symbol;

pub use advection::{check_advection_bounds, check_exp_bound, AdvectionChecks};
pub use certificate::{
    certificate_for, certificate_large_y, certificate_small_y, family_matrix,
    shifted_modulus_bound, Certificate, CertificateRow,
};
pub use conditions::{check_sufficient_conditions, ConditionChecks};
pub use diffusion::{check_diffusion_contractivity, DiffusionChecks};
pub use registry::{CheckContext, CheckRegistry, StabilityCheck};
pub use symbol::{
    build_similarity_blocks, check_block_toeplitz, symbol_hat, symbol_matrix, unit_roots,
    SimilarityBlocks, SymbolCheck,
};

use crate::linalg::Settings;

/// One inequality `lhs <= rhs`, accepted when `rhs - lhs >= -tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tol: f64,
    pub holds: bool,
}

impl BoundCheck {
    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let margin = rhs - lhs;
        Self {
            name: name.into(),
            lhs,
            rhs,
            margin,
            tol,
            holds: margin >= -tol,
        }
    }

    /// `value >= 0`, stored as `0 <= value`.
    pub fn nonnegative(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self::le(name, 0.0, value, tol)
    }
}

pub fn all_hold<'a>(checks: impl IntoIterator<Item = &'a BoundCheck>) -> bool {
    checks.into_iter().all(|c| c.holds)
}

/// Sampling choices and tolerances for the stability checks.
#[derive(Debug, Clone)]
pub struct CheckSettings {
    pub linalg: Settings,
    /// Times at which exponential bounds are evaluated.
    pub t_samples: Vec<f64>,
    /// Number of roots of unity used to sample `|zeta| = 1`.
    pub zeta_samples: usize,
    /// Real parameters for the scalar-`y` condition and the certificates.
    pub y_samples: Vec<f64>,
    /// Slack for "<= 0" style checks, relative to the matrix max entry.
    pub sign_tol: f64,
    /// Slack for exponential bounds, relative to `max(1, rhs)`.
    pub exp_tol: f64,
}

impl Default for CheckSettings {
    fn default() -> Self {
        Self {
            linalg: Settings::default(),
            t_samples: vec![0.0, 0.5, 1.0, 2.0, 5.0, 10.0],
            zeta_samples: 64,
            y_samples: vec![
                0.0, 0.1, -0.1, 0.25, -0.25, 0.49, -0.49, 0.5, -0.5, 0.6, -0.6, 1.0, -1.0, 5.0,
                -5.0,
            ],
            sign_tol: 1e-8,
            exp_tol: 1e-8,
        }
    }
}
