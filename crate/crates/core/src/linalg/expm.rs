//! `exp(tA)` by scaling and squaring with the diagonal [13/13] Padé
//! approximant.

use nalgebra::DMatrix;

use super::Scalar;
use crate::error::{Error, Result};

/// Numerator coefficients of the [13/13] Padé approximant of `exp`.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

fn norm_1<T: Scalar>(a: &DMatrix<T>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|x| x.modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Returns `exp(tA)`. The number of squarings is chosen so the scaled
/// argument has 1-norm at most 1.
pub fn expm<T: Scalar>(a: &DMatrix<T>, t: f64) -> Result<DMatrix<T>> {
    let n = super::ensure_square(a)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidSampling(format!(
            "expm needs finite t >= 0, got {t}"
        )));
    }
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    if t == 0.0 {
        return Ok(DMatrix::identity(n, n));
    }
    let ta = a.scale(t);
    let norm = norm_1(&ta);
    if !norm.is_finite() {
        return Err(Error::ExpOverflow { t, norm });
    }
    let squarings = if norm > 1.0 {
        norm.log2().ceil() as i32
    } else {
        0
    };
    let scaled = ta.scale(2f64.powi(-squarings));

    let mut result = pade13(&scaled).ok_or(Error::SingularPade { t })?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    if result.iter().any(|x| !x.modulus().is_finite()) {
        return Err(Error::ExpOverflow { t, norm });
    }
    Ok(result)
}

fn pade13<T: Scalar>(a: &DMatrix<T>) -> Option<DMatrix<T>> {
    let n = a.nrows();
    let b = |k: usize| T::from_real(PADE13[k]);
    let ident = DMatrix::<T>::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let inner_u = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u = a * (&a6 * inner_u + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &ident * b(1));
    let inner_v = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = &a6 * inner_v + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &ident * b(0);

    let numerator = &v + &u;
    let denominator = v - u;
    denominator.lu().solve(&numerator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, RMat, C64};

    #[test]
    fn zero_time_is_identity() {
        let a = RMat::from_row_slice(2, 2, &[1.0, 7.0, -3.0, 2.0]);
        assert_eq!(expm(&a, 0.0).unwrap(), RMat::identity(2, 2));
    }

    #[test]
    fn diagonal_and_nilpotent() {
        let a = RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0]));
        let e = expm(&a, 1.0).unwrap();
        assert!((e[(0, 0)] - std::f64::consts::E).abs() < 1e-14);
        assert!((e[(1, 1)] - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(e[(0, 1)], 0.0);

        let n = RMat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let e = expm(&n, 1.0).unwrap();
        let expected = RMat::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(max_abs(&(e - expected)) < 1e-15);
    }

    #[test]
    fn rotation_generator() {
        // exp(t [[0, i], [i, 0]]) = [[cos t, i sin t], [i sin t, cos t]]
        let i = C64::new(0.0, 1.0);
        let z = C64::new(0.0, 0.0);
        let a = DMatrix::from_row_slice(2, 2, &[z, i, i, z]);
        let t = 2.5;
        let e = expm(&a, t).unwrap();
        assert!((e[(0, 0)] - C64::new(t.cos(), 0.0)).norm() < 1e-13);
        assert!((e[(0, 1)] - C64::new(0.0, t.sin())).norm() < 1e-13);
    }

    #[test]
    fn large_scaled_argument() {
        let a = RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![-3.0, 2.0]));
        let e = expm(&a, 10.0).unwrap();
        assert!((e[(0, 0)] / (-30.0f64).exp() - 1.0).abs() < 1e-12);
        assert!((e[(1, 1)] / 20.0f64.exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let a = RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0]));
        assert!(matches!(expm(&a, 1000.0), Err(Error::ExpOverflow { .. })));
        assert!(matches!(expm(&a, -1.0), Err(Error::InvalidSampling(_))));
        assert!(matches!(
            expm(&RMat::zeros(2, 3), 1.0),
            Err(Error::NotSquare { .. })
        ));
    }
}
