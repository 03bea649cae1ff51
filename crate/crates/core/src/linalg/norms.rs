use nalgebra::{DMatrix, DVector};

use super::eigen::{lambda_max_hermitian, start_vector, DirectEigensolver, RayleighTracker};
use super::{expm, hermitian_part, scale_rows_cols, Method, NormReport, RMat, Scalar, Settings};
use crate::error::{Error, Result};

/// Largest singular value `sqrt(lambda_max(A* A))` by power iteration on
/// `A* A`, never forming the product.
pub fn spectral_norm<T: Scalar>(a: &DMatrix<T>, settings: &Settings) -> NormReport {
    spectral_norm_from(a, None, settings).0
}

/// As [`spectral_norm`], warm-started from `start` (when it is nonzero and of
/// matching length). Also returns the final right singular vector estimate.
pub fn spectral_norm_from<T: Scalar>(
    a: &DMatrix<T>,
    start: Option<&DVector<T>>,
    settings: &Settings,
) -> (NormReport, DVector<T>) {
    let cols = a.ncols();
    let mut x = match start {
        Some(s) if s.len() == cols && s.norm() > 0.0 => s.unscale(s.norm()),
        _ => start_vector::<T>(cols),
    };
    if cols == 0 || a.nrows() == 0 {
        return (NormReport::exact(0.0, Method::PowerIteration), x);
    }
    let cap = settings.iteration_cap(cols);
    let mut tracker = RayleighTracker::default();
    let mut rho = 0.0;
    let mut estimate = f64::INFINITY;
    for it in 1..=cap {
        let y = a * &x;
        rho = y.norm_squared();
        estimate = tracker.update(rho);
        let z = a.ad_mul(&y);
        let zn = z.norm();
        if zn == 0.0 {
            // x lies in the null space; with a generic start this means A = 0
            let converged = rho == 0.0;
            return (
                NormReport {
                    value: rho.sqrt(),
                    method: Method::PowerIteration,
                    iterations: it,
                    residual: 0.0,
                    converged,
                },
                x,
            );
        }
        x = z.unscale(zn);
        if it >= 3 && estimate <= 2.0 * settings.tol * rho {
            let sigma = rho.sqrt();
            return (
                NormReport {
                    value: sigma,
                    method: Method::PowerIteration,
                    iterations: it,
                    residual: estimate / (2.0 * rho),
                    converged: true,
                },
                x,
            );
        }
    }
    let sigma = rho.sqrt();
    (
        NormReport {
            value: sigma,
            method: Method::PowerIteration,
            iterations: cap,
            residual: if rho > 0.0 {
                estimate / (2.0 * rho)
            } else {
                estimate
            },
            converged: false,
        },
        x,
    )
}

/// Power iteration first; when it hits the iteration cap the value is
/// recomputed from a dense eigendecomposition of `A* A`.
pub fn spectral_norm_or_direct<T: Scalar>(
    a: &DMatrix<T>,
    start: Option<&DVector<T>>,
    settings: &Settings,
) -> (NormReport, DVector<T>) {
    let (report, v) = spectral_norm_from(a, start, settings);
    if report.converged {
        return (report, v);
    }
    let gram = a.ad_mul(a);
    let lambda = T::dispatch_lambda_max(&DirectEigensolver, &gram, settings).value;
    (
        NormReport {
            value: lambda.max(0.0).sqrt(),
            method: Method::DirectSmall,
            iterations: report.iterations,
            residual: 0.0,
            converged: true,
        },
        v,
    )
}

/// `mu_2[A]`: largest eigenvalue of the Hermitian part.
pub fn log_norm_2<T: Scalar>(a: &DMatrix<T>, settings: &Settings) -> Result<NormReport> {
    super::ensure_square(a)?;
    lambda_max_hermitian(&hermitian_part(a), settings)
}

fn check_scaling(d: &DVector<f64>, dim: usize, context: &'static str) -> Result<()> {
    if d.len() != dim {
        return Err(Error::DimensionMismatch {
            context,
            expected: dim,
            actual: d.len(),
        });
    }
    if let Some((index, &value)) = d.iter().enumerate().find(|(_, x)| !(**x > 0.0)) {
        return Err(Error::NonPositiveScaling { index, value });
    }
    Ok(())
}

/// `D^{-1/2} A D^{1/2}` for a positive diagonal `D`.
pub(crate) fn d_similarity(a: &RMat, d: &DVector<f64>) -> RMat {
    let half = d.map(f64::sqrt);
    let inv_half = half.map(|x| 1.0 / x);
    scale_rows_cols(a, &inv_half, &half)
}

/// `mu_D[A] = mu_2[D^{-1/2} A D^{1/2}]`.
pub fn log_norm_d(a: &RMat, d: &DVector<f64>, settings: &Settings) -> Result<NormReport> {
    let n = super::ensure_square(a)?;
    check_scaling(d, n, "log_norm_d")?;
    log_norm_2(&d_similarity(a, d), settings)
}

/// `||A||_D = ||D^{-1/2} A D^{1/2}||_2`.
pub fn norm_d(a: &RMat, d: &DVector<f64>, settings: &Settings) -> Result<NormReport> {
    let n = super::ensure_square(a)?;
    check_scaling(d, n, "norm_d")?;
    Ok(spectral_norm(&d_similarity(a, d), settings))
}

/// Logarithmic maximum norm, `max_i (Re a_ii + sum_{j != i} |a_ij|)`.
pub fn log_norm_inf<T: Scalar>(a: &DMatrix<T>) -> Result<f64> {
    let n = super::ensure_square(a)?;
    Ok((0..n)
        .map(|i| {
            let off: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| a[(i, j)].modulus())
                .sum();
            a[(i, i)].real() + off
        })
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `||exp(tA)||_2`, or `||exp(tA)||_D` when `d` is given. The similarity is
/// applied to the exponential, not to its argument.
pub fn norm_expm(
    a: &RMat,
    t: f64,
    d: Option<&DVector<f64>>,
    settings: &Settings,
) -> Result<NormReport> {
    let e = expm(a, t)?;
    match d {
        Some(d) => norm_d(&e, d, settings),
        None => Ok(spectral_norm(&e, settings)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CMat, C64};

    fn s() -> Settings {
        Settings::default()
    }

    #[test]
    fn spectral_norm_small_cases() {
        let d = RMat::from_diagonal(&DVector::from_vec(vec![3.0, -4.0]));
        let r = spectral_norm(&d, &s());
        assert!(r.converged);
        assert!((r.value - 4.0).abs() < 1e-9);
        let n = RMat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!((spectral_norm(&n, &s()).value - 1.0).abs() < 1e-12);
        let z = RMat::zeros(3, 3);
        let r = spectral_norm(&z, &s());
        assert_eq!(r.value, 0.0);
        assert!(r.converged);
        let rect = RMat::from_row_slice(1, 2, &[3.0, 4.0]);
        assert!((spectral_norm(&rect, &s()).value - 5.0).abs() < 1e-12);
    }

    #[test]
    fn log_norms_small_cases() {
        let a = RMat::from_row_slice(2, 2, &[0.0, 2.0, 0.0, 0.0]);
        assert!((log_norm_2(&a, &s()).unwrap().value - 1.0).abs() < 1e-12);
        let skew = RMat::from_row_slice(3, 3, &[0.0, 1.0, -2.0, -1.0, 0.0, 3.0, 2.0, -3.0, 0.0]);
        assert!(log_norm_2(&skew, &s()).unwrap().value.abs() < 1e-12);

        assert_eq!(
            log_norm_inf(&RMat::from_diagonal(&DVector::from_vec(vec![-1.0, -2.0]))).unwrap(),
            -1.0
        );
        let c = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(-2.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(-3.0, 0.0),
            ],
        );
        assert_eq!(log_norm_inf(&c).unwrap(), -1.0);
        let c = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(0.0, 3.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        assert_eq!(log_norm_inf(&c).unwrap(), 3.0);
    }

    #[test]
    fn scaled_log_norm() {
        let a = RMat::from_row_slice(3, 3, &[-1.0, 4.0, 0.0, 0.5, -3.0, 2.0, 0.0, 1.0, -2.0]);
        let ident = DVector::from_element(3, 1.0);
        let plain = log_norm_2(&a, &s()).unwrap().value;
        assert!((log_norm_d(&a, &ident, &s()).unwrap().value - plain).abs() < 1e-14);

        let diag = RMat::from_diagonal(&DVector::from_vec(vec![-1.0, 0.25, -7.0]));
        let d = DVector::from_vec(vec![3.0, 0.01, 50.0]);
        assert!((log_norm_d(&diag, &d, &s()).unwrap().value - 0.25).abs() < 1e-14);

        let bad = DVector::from_vec(vec![1.0, 0.0, 1.0]);
        assert!(matches!(
            log_norm_d(&a, &bad, &s()),
            Err(Error::NonPositiveScaling { index: 1, .. })
        ));
        let short = DVector::from_vec(vec![1.0, 1.0]);
        assert!(matches!(
            log_norm_d(&a, &short, &s()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn exponential_norms() {
        let skew = RMat::from_row_slice(2, 2, &[0.0, 1.5, -1.5, 0.0]);
        for t in [0.3, 1.0, 7.0] {
            assert!((norm_expm(&skew, t, None, &s()).unwrap().value - 1.0).abs() < 1e-12);
        }
        let neg = -RMat::identity(3, 3);
        let v = norm_expm(&neg, 2.0, None, &s()).unwrap().value;
        assert!((v - (-2.0f64).exp()).abs() < 1e-14);
        let d = DVector::from_vec(vec![1.0, 9.0, 4.0]);
        let v = norm_expm(&neg, 2.0, Some(&d), &s()).unwrap().value;
        assert!((v - (-2.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn direct_fallback_after_cap() {
        let settings = Settings {
            max_iter_factor: 0,
            tol: 1e-16,
            ..Settings::default()
        };
        let a = crate::linalg::tridiag(150, 1.0, 0.0, 1.0);
        let (r, _) = spectral_norm_or_direct(&a, None, &settings);
        assert_eq!(r.method, Method::DirectSmall);
        let exact = 2.0 * (std::f64::consts::PI / 151.0).cos();
        assert!((r.value - exact).abs() < 1e-12);
    }

    #[test]
    fn warm_start_is_used() {
        let a = RMat::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let start = DVector::from_vec(vec![1.0, 0.0]);
        let (r, v) = spectral_norm_from(&a, Some(&start), &s());
        assert!((r.value - 2.0).abs() < 1e-14);
        assert!(r.iterations <= 3);
        assert!((v[0].abs() - 1.0).abs() < 1e-14);
    }
}
