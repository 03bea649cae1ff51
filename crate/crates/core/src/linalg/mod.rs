//! Dense numerical kernels: spectral norm, extreme Hermitian eigenvalue,
//! logarithmic norms and the matrix exponential.
//!
//! Real and complex matrices are both first class; complex arithmetic is
//! needed for the block-Toeplitz symbols and the certificate family.

mod eigen;
mod expm;
pub(crate) mod norms;

use nalgebra::{ComplexField, DMatrix, DVector};

pub use eigen::{
    eigensolver, eigensolver_names, lambda_max_hermitian, AutoEigensolver, DirectEigensolver,
    HermitianEigensolver, PowerIteration,
};
pub use expm::expm;
pub use norms::{
    log_norm_2, log_norm_d, log_norm_inf, norm_d, norm_expm, spectral_norm, spectral_norm_from,
    spectral_norm_or_direct,
};

pub type C64 = nalgebra::Complex<f64>;
pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<C64>;

/// Scalar types the kernels accept: `f64` and `Complex<f64>`.
pub trait Scalar: ComplexField<RealField = f64> + Copy {
    #[doc(hidden)]
    fn dispatch_lambda_max(
        solver: &dyn HermitianEigensolver,
        h: &DMatrix<Self>,
        settings: &Settings,
    ) -> NormReport;
}

impl Scalar for f64 {
    fn dispatch_lambda_max(
        solver: &dyn HermitianEigensolver,
        h: &RMat,
        settings: &Settings,
    ) -> NormReport {
        solver.lambda_max_real(h, settings)
    }
}

impl Scalar for C64 {
    fn dispatch_lambda_max(
        solver: &dyn HermitianEigensolver,
        h: &CMat,
        settings: &Settings,
    ) -> NormReport {
        solver.lambda_max_complex(h, settings)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    PowerIteration,
    DirectSmall,
    PadeExpm,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::PowerIteration => "power-iteration",
            Method::DirectSmall => "direct-small",
            Method::PadeExpm => "pade-expm",
        }
    }
}

/// A computed norm or extreme eigenvalue with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    pub value: f64,
    pub method: Method,
    pub iterations: usize,
    /// Estimated error of `value`, measured on the same scale as
    /// [`Settings::tol`], so `converged` implies `residual <= tol`.
    pub residual: f64,
    pub converged: bool,
}

impl NormReport {
    pub(crate) fn exact(value: f64, method: Method) -> Self {
        Self {
            value,
            method,
            iterations: 0,
            residual: 0.0,
            converged: true,
        }
    }
}

/// Tolerances and strategy selection shared by the kernels.
#[derive(Clone, Copy)]
pub struct Settings {
    /// Relative tolerance for eigenvalue and singular value estimates.
    pub tol: f64,
    /// Power iteration cap is `max_iter_factor * dimension`.
    pub max_iter_factor: usize,
    /// Allowed `|H - H*|_max / |H|_max` for Hermitian input.
    pub hermitian_tol: f64,
    pub eigensolver: &'static dyn HermitianEigensolver,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter_factor: 50,
            hermitian_tol: 1e-12,
            eigensolver: &AutoEigensolver,
        }
    }
}

impl std::fmt::Debug for Settings {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Settings")
            .field("tol", &self.tol)
            .field("max_iter_factor", &self.max_iter_factor)
            .field("hermitian_tol", &self.hermitian_tol)
            .field("eigensolver", &self.eigensolver.name())
            .finish()
    }
}

impl Settings {
    pub(crate) fn iteration_cap(&self, dim: usize) -> usize {
        (self.max_iter_factor * dim).max(100)
    }
}

/// Kronecker product `x ⊗ y`; the right factor varies fastest.
pub fn kron<T: Scalar>(x: &DMatrix<T>, y: &DMatrix<T>) -> DMatrix<T> {
    let (xr, xc) = x.shape();
    let (yr, yc) = y.shape();
    let mut out = DMatrix::zeros(xr * yr, xc * yc);
    for xj in 0..xc {
        for xi in 0..xr {
            let a = x[(xi, xj)];
            if a == T::zero() {
                continue;
            }
            for yj in 0..yc {
                for yi in 0..yr {
                    out[(xi * yr + yi, xj * yc + yj)] = a * y[(yi, yj)];
                }
            }
        }
    }
    out
}

/// Diagonal of `diag(x) ⊗ diag(y)`.
pub fn kron_diagonal(x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(
        x.len() * y.len(),
        x.iter().flat_map(|a| y.iter().map(move |b| a * b)),
    )
}

/// `tridiag(sub, diag, sup)` of dimension `n`.
pub fn tridiag<T: Scalar>(n: usize, sub: T, diag: T, sup: T) -> DMatrix<T> {
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            diag
        } else if i == j + 1 {
            sub
        } else if j == i + 1 {
            sup
        } else {
            T::zero()
        }
    })
}

pub fn max_abs<T: Scalar>(a: &DMatrix<T>) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.modulus()))
}

/// Hermitian part `(A + A*) / 2`.
pub fn hermitian_part<T: Scalar>(a: &DMatrix<T>) -> DMatrix<T> {
    (a + a.adjoint()).scale(0.5)
}

/// `diag(left) * A * diag(right)` without forming the diagonal matrices.
pub fn scale_rows_cols<T: Scalar>(
    a: &DMatrix<T>,
    left: &DVector<f64>,
    right: &DVector<f64>,
) -> DMatrix<T> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| {
        a[(i, j)].scale(left[i] * right[j])
    })
}

pub fn to_complex(a: &RMat) -> CMat {
    a.map(|x| C64::new(x, 0.0))
}

pub fn nnz<T: Scalar>(a: &DMatrix<T>) -> usize {
    a.iter().filter(|x| **x != T::zero()).count()
}

pub(crate) fn ensure_square<T: Scalar>(a: &DMatrix<T>) -> crate::Result<usize> {
    if a.is_square() {
        Ok(a.nrows())
    } else {
        Err(crate::Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_of_diagonals_matches_order() {
        let s = DVector::from_vec(vec![1.0, 2.0]);
        let v = DVector::from_vec(vec![3.0, 4.0]);
        assert_eq!(kron_diagonal(&v, &s).as_slice(), &[3.0, 6.0, 4.0, 8.0]);
        let k = kron(&RMat::from_diagonal(&v), &RMat::from_diagonal(&s));
        assert_eq!(k.diagonal(), kron_diagonal(&v, &s));
    }

    #[test]
    fn kron_block_layout() {
        let x = RMat::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let y = RMat::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let k = kron(&x, &y);
        #[rustfmt::skip]
        let expected = RMat::from_row_slice(4, 4, &[
            0.0, 1.0, 0.0, 2.0,
            1.0, 0.0, 2.0, 0.0,
            0.0, 3.0, 0.0, 4.0,
            3.0, 0.0, 4.0, 0.0,
        ]);
        assert_eq!(k, expected);
    }

    #[test]
    fn tridiag_layout() {
        let t = tridiag(3, -1.0, 0.0, 1.0);
        assert_eq!(t[(1, 0)], -1.0);
        assert_eq!(t[(1, 2)], 1.0);
        assert_eq!(t[(0, 2)], 0.0);
        assert_eq!(nnz(&t), 4);
    }
}
