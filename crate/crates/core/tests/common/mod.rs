//! Independent reference implementations used only by the test suites.
//!
//! They share nothing with the library kernels: eigenvalues come from cyclic
//! Jacobi rotations and the exponential from a compensated Taylor sum.

#![allow(dead_code)]

use heston_stability::{CMat, RMat};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// All eigenvalues of a real symmetric matrix, ascending, by cyclic Jacobi.
pub fn jacobi_eigenvalues(a: &RMat) -> Vec<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut a = a.clone();
    let scale = a.norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `[[Re, -Im], [Im, Re]]`: same singular values as `a`, each twice; for a
/// Hermitian `a` the result is symmetric with the same eigenvalues, each twice.
pub fn real_embedding(a: &CMat) -> RMat {
    let (m, n) = a.shape();
    let mut out = RMat::zeros(2 * m, 2 * n);
    for i in 0..m {
        for j in 0..n {
            let z = a[(i, j)];
            out[(i, j)] = z.re;
            out[(i + m, j + n)] = z.re;
            out[(i, j + n)] = -z.im;
            out[(i + m, j)] = z.im;
        }
    }
    out
}

pub fn lambda_max_symmetric(a: &RMat) -> f64 {
    *jacobi_eigenvalues(a).last().expect("non-empty matrix")
}

pub fn lambda_max_hermitian(h: &CMat) -> f64 {
    lambda_max_symmetric(&real_embedding(h))
}

/// Largest singular value from the eigenvalues of `[[0, A], [A^T, 0]]`.
pub fn sigma_max_real(a: &RMat) -> f64 {
    let (m, n) = a.shape();
    let mut aug = RMat::zeros(m + n, m + n);
    aug.view_mut((0, m), (m, n)).copy_from(a);
    aug.view_mut((m, 0), (n, m)).copy_from(&a.transpose());
    lambda_max_symmetric(&aug)
}

pub fn sigma_max_complex(a: &CMat) -> f64 {
    sigma_max_real(&real_embedding(a))
}

/// `exp(tA)` from the first 60 Taylor terms, summed entrywise with Kahan
/// compensation. Only accurate for moderate `||tA||`.
pub fn taylor_expm(a: &RMat, t: f64) -> RMat {
    let n = a.nrows();
    let at = a * t;
    let mut term = RMat::identity(n, n);
    let mut sum = term.clone();
    let mut comp = RMat::zeros(n, n);
    for k in 1..60 {
        term = (&term * &at) / k as f64;
        for idx in 0..n * n {
            let y = term[idx] - comp[idx];
            let s = sum[idx] + y;
            comp[idx] = (s - sum[idx]) - y;
            sum[idx] = s;
        }
    }
    sum
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in `[-scale, scale]`.
pub fn random_real(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> RMat {
    RMat::from_fn(rows, cols, |_, _| rng.gen_range(-scale..=scale))
}

pub fn random_complex(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        heston_stability::C64::new(rng.gen_range(-scale..=scale), rng.gen_range(-scale..=scale))
    })
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> CMat {
    let a = random_complex(rng, n, n, scale);
    (&a + a.adjoint()).scale(0.5)
}

pub fn max_abs_diff(a: &RMat, b: &RMat) -> f64 {
    (a - b).iter().fold(0.0, |m, x| m.max(x.abs()))
}
