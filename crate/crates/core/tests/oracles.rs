mod common;

use common::*;
use heston_stability::linalg::{
    eigensolver, expm, lambda_max_hermitian, log_norm_2, spectral_norm, spectral_norm_or_direct,
    Settings,
};
use heston_stability::{CMat, RMat, C64};

// The oracles are checked against closed forms before being trusted.

#[test]
fn jacobi_on_known_spectra() {
    let a = RMat::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
    let ev = jacobi_eigenvalues(&a);
    assert!((ev[0] - 1.0).abs() < 1e-15 && (ev[1] - 3.0).abs() < 1e-15);

    // tridiag(1, -2, 1): eigenvalues -2 + 2 cos(k pi / (n + 1))
    let n = 12;
    let t = RMat::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => -2.0,
        1 => 1.0,
        _ => 0.0,
    });
    let ev = jacobi_eigenvalues(&t);
    let mut exact: Vec<f64> = (1..=n)
        .map(|k| -2.0 + 2.0 * (k as f64 * std::f64::consts::PI / (n + 1) as f64).cos())
        .collect();
    exact.sort_by(f64::total_cmp);
    for (x, y) in ev.iter().zip(&exact) {
        assert!((x - y).abs() < 1e-13);
    }
}

#[test]
fn embedding_preserves_hermitian_spectrum() {
    // [[1, i], [-i, 1]] has eigenvalues 0 and 2
    let h = CMat::from_row_slice(
        2,
        2,
        &[
            C64::new(1.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, -1.0),
            C64::new(1.0, 0.0),
        ],
    );
    assert!((common::lambda_max_hermitian(&h) - 2.0).abs() < 1e-14);
    let rect = RMat::from_row_slice(1, 2, &[3.0, 4.0]);
    assert!((sigma_max_real(&rect) - 5.0).abs() < 1e-14);
}

#[test]
fn taylor_on_closed_forms() {
    let d = RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 0.5, 2.0]));
    let e = taylor_expm(&d, 1.5);
    for (k, x) in [-1.0f64, 0.5, 2.0].iter().enumerate() {
        assert!((e[(k, k)] - (1.5 * x).exp()).abs() < 1e-13 * (1.5 * x).exp());
    }
    // rotation generator
    let r = RMat::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    let e = taylor_expm(&r, 2.0);
    assert!((e[(0, 0)] - 2f64.cos()).abs() < 1e-15);
    assert!((e[(1, 0)] - 2f64.sin()).abs() < 1e-15);
}

#[test]
fn expm_matches_taylor_oracle() {
    let mut g = rng(11);
    for case in 0..40 {
        let n = 1 + case % 8;
        let a = random_real(&mut g, n, n, 1.0);
        for t in [0.1, 0.5, 1.0] {
            let e = expm(&a, t).unwrap();
            let o = taylor_expm(&a, t);
            let scale = o.iter().fold(1.0f64, |m, x| m.max(x.abs()));
            assert!(max_abs_diff(&e, &o) <= 1e-12 * scale, "case {case} t={t}");
        }
    }
}

#[test]
fn spectral_norm_matches_jacobi() {
    let mut g = rng(12);
    let s = Settings::default();
    for n in [1, 2, 3, 5, 8, 13, 21, 32] {
        let a = random_real(&mut g, n, n, 1.0);
        let oracle = sigma_max_real(&a);
        let (r, _) = spectral_norm_or_direct(&a, None, &s);
        assert!((r.value - oracle).abs() <= 1e-8 * oracle.max(1.0), "n={n}");
        let c = random_complex(&mut g, n, n + 2, 1.0);
        let oracle = sigma_max_complex(&c);
        assert!(
            (spectral_norm(&c, &s).value - oracle).abs() <= 1e-8 * oracle.max(1.0),
            "complex n={n}"
        );
    }
}

#[test]
fn lambda_max_matches_jacobi_for_every_solver() {
    let mut g = rng(13);
    for name in ["auto", "direct", "power"] {
        let s = Settings {
            eigensolver: eigensolver(name).unwrap(),
            ..Settings::default()
        };
        for n in [1, 2, 4, 9, 16, 32] {
            let h = random_hermitian(&mut g, n, 1.0);
            let oracle = common::lambda_max_hermitian(&h);
            let r = lambda_max_hermitian(&h, &s).unwrap();
            assert!(
                (r.value - oracle).abs() <= 1e-8 * oracle.abs().max(1.0),
                "{name} n={n}"
            );
            let a = random_real(&mut g, n, n, 1.0);
            let sym = (&a + a.transpose()) * 0.5;
            let oracle = lambda_max_symmetric(&sym);
            assert!(
                (log_norm_2(&a, &s).unwrap().value - oracle).abs() <= 1e-8 * oracle.abs().max(1.0)
            );
        }
    }
}
