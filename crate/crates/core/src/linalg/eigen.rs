//! Largest eigenvalue of Hermitian matrices, behind interchangeable
//! strategies selected by name.

use nalgebra::{DMatrix, DVector};

use super::{max_abs, Method, NormReport, Scalar, Settings};
use crate::error::{Error, Result};

/// Strategy computing `lambda_max` of a Hermitian matrix. Inputs are
/// validated by [`lambda_max_hermitian`] before a strategy sees them.
pub trait HermitianEigensolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn lambda_max_real(&self, h: &DMatrix<f64>, settings: &Settings) -> NormReport;
    fn lambda_max_complex(&self, h: &DMatrix<super::C64>, settings: &Settings) -> NormReport;
}

/// Shifted power iteration: iterate on `H + cI` where `c` is the magnitude of
/// the Gershgorin lower bound, so the target eigenvalue dominates.
#[derive(Debug, Clone, Copy, Default)]
pub struct PowerIteration;

/// Full dense Hermitian eigendecomposition, maximum taken afterwards.
#[derive(Debug, Clone, Copy, Default)]
pub struct DirectEigensolver;

/// Direct up to [`AutoEigensolver::DIRECT_LIMIT`], power iteration beyond.
#[derive(Debug, Clone, Copy, Default)]
pub struct AutoEigensolver;

impl AutoEigensolver {
    pub const DIRECT_LIMIT: usize = 2048;
}

static REGISTRY: [&dyn HermitianEigensolver; 3] =
    [&AutoEigensolver, &PowerIteration, &DirectEigensolver];

/// Looks up a registered eigensolver by name.
pub fn eigensolver(name: &str) -> Result<&'static dyn HermitianEigensolver> {
    REGISTRY
        .iter()
        .copied()
        .find(|s| s.name() == name)
        .ok_or_else(|| Error::UnknownStrategy {
            kind: "eigensolver",
            name: name.to_string(),
            available: eigensolver_names().join(", "),
        })
}

pub fn eigensolver_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|s| s.name()).collect()
}

impl HermitianEigensolver for PowerIteration {
    fn name(&self) -> &'static str {
        "power"
    }
    fn lambda_max_real(&self, h: &DMatrix<f64>, settings: &Settings) -> NormReport {
        shifted_power(h, settings)
    }
    fn lambda_max_complex(&self, h: &DMatrix<super::C64>, settings: &Settings) -> NormReport {
        shifted_power(h, settings)
    }
}

impl HermitianEigensolver for DirectEigensolver {
    fn name(&self) -> &'static str {
        "direct"
    }
    fn lambda_max_real(&self, h: &DMatrix<f64>, _: &Settings) -> NormReport {
        direct(h)
    }
    fn lambda_max_complex(&self, h: &DMatrix<super::C64>, _: &Settings) -> NormReport {
        direct(h)
    }
}

impl HermitianEigensolver for AutoEigensolver {
    fn name(&self) -> &'static str {
        "auto"
    }
    fn lambda_max_real(&self, h: &DMatrix<f64>, settings: &Settings) -> NormReport {
        if h.nrows() <= Self::DIRECT_LIMIT {
            direct(h)
        } else {
            shifted_power(h, settings)
        }
    }
    fn lambda_max_complex(&self, h: &DMatrix<super::C64>, settings: &Settings) -> NormReport {
        if h.nrows() <= Self::DIRECT_LIMIT {
            direct(h)
        } else {
            shifted_power(h, settings)
        }
    }
}

/// Largest eigenvalue of a Hermitian matrix using `settings.eigensolver`.
pub fn lambda_max_hermitian<T: Scalar>(h: &DMatrix<T>, settings: &Settings) -> Result<NormReport> {
    let n = super::ensure_square(h)?;
    if n == 0 {
        return Err(Error::DimensionMismatch {
            context: "lambda_max_hermitian",
            expected: 1,
            actual: 0,
        });
    }
    let asymmetry = max_abs(&(h - h.adjoint()));
    let allowed = settings.hermitian_tol * max_abs(h);
    if asymmetry > allowed {
        return Err(Error::NotHermitian { asymmetry, allowed });
    }
    Ok(T::dispatch_lambda_max(settings.eigensolver, h, settings))
}

fn direct<T: Scalar>(h: &DMatrix<T>) -> NormReport {
    let sym = super::hermitian_part(h);
    let value = sym
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    NormReport::exact(value, Method::DirectSmall)
}

/// Deterministic start vector with no special structure.
pub(crate) fn start_vector<T: Scalar>(n: usize) -> DVector<T> {
    let v = DVector::from_fn(n, |i, _| {
        T::from_real(1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_749_895).fract())
    });
    let norm = v.norm();
    v.unscale(norm)
}

/// Tracks successive Rayleigh quotients and estimates the remaining error
/// from the geometric decay of their increments.
#[derive(Debug, Default)]
pub(crate) struct RayleighTracker {
    prev: Option<f64>,
    prev_delta: Option<f64>,
}

impl RayleighTracker {
    /// Returns an estimate of `|limit - rho|`.
    pub(crate) fn update(&mut self, rho: f64) -> f64 {
        let estimate = match self.prev {
            None => f64::INFINITY,
            Some(prev) => {
                let delta = rho - prev;
                let est = match self.prev_delta {
                    Some(pd) if delta > 0.0 && pd > 0.0 => {
                        let ratio = delta / pd;
                        if ratio < 1.0 {
                            delta.max(delta * ratio / (1.0 - ratio))
                        } else {
                            f64::INFINITY
                        }
                    }
                    Some(_) if delta == 0.0 => 0.0,
                    Some(_) => delta.abs(),
                    None => f64::INFINITY,
                };
                self.prev_delta = Some(delta);
                est
            }
        };
        self.prev = Some(rho);
        estimate
    }
}

fn shifted_power<T: Scalar>(h: &DMatrix<T>, settings: &Settings) -> NormReport {
    let n = h.nrows();
    let shift = (0..n)
        .map(|i| {
            let off: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| h[(i, j)].modulus())
                .sum();
            h[(i, i)].real() - off
        })
        .fold(f64::INFINITY, f64::min)
        .min(0.0)
        .abs();
    let scale = max_abs(h).max(1.0);
    let tol = settings.tol * scale;
    let cap = settings.iteration_cap(n);

    let mut x = start_vector::<T>(n);
    let mut tracker = RayleighTracker::default();
    let mut rho = 0.0;
    let mut estimate = f64::INFINITY;
    for it in 1..=cap {
        let mut y = h * &x;
        y.axpy(T::from_real(shift), &x, T::one());
        rho = x.dotc(&y).real();
        estimate = tracker.update(rho);
        let norm = y.norm();
        if norm == 0.0 {
            return NormReport {
                value: -shift,
                method: Method::PowerIteration,
                iterations: it,
                residual: 0.0,
                converged: true,
            };
        }
        x = y.unscale(norm);
        if it >= 3 && estimate <= tol {
            return NormReport {
                value: rho - shift,
                method: Method::PowerIteration,
                iterations: it,
                residual: estimate / scale,
                converged: true,
            };
        }
    }
    NormReport {
        value: rho - shift,
        method: Method::PowerIteration,
        iterations: cap,
        residual: estimate / scale,
        converged: false,
    }
}
