//! Row-by-row certificates that `lambda_max[Css + (1/2 + 2iy) Cs] <= 2 y^2`.
//!
//! The family matrix is `tridiag(beta_i, alpha_i, gamma_i)` with, in terms of
//! `nu_i = s_i / ds`,
//!
//! ```text
//! alpha_i = -nu_i^2
//! beta_i  = 1/2 nu_i (nu_i - 1/2 - 2iy)
//! gamma_i = 1/2 nu_i (nu_i + 1/2 + 2iy)
//! ```
//!
//! For `|y| >= 1/2` the plain logarithmic max-norm suffices. For `|y| < 1/2`
//! a diagonal similarity is applied whose consecutive weight ratios are
//! `eps_j = (nu_j - 1/2)(nu_j + 1/2) / nu_j^2`; the weights themselves are
//! never formed.

use nalgebra::DVector;

use super::{BoundCheck, CheckSettings};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::linalg::{lambda_max_hermitian, log_norm_inf, max_abs, scale_rows_cols, CMat, C64};
use crate::operators::transformed_operators;

/// Per-row quantities of a certificate. Fields that only exist in one branch
/// are `None` in the other.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateRow {
    pub i: usize,
    pub nu: f64,
    /// Weight ratio `eps_i`, defined for `i >= 2` in the small-`y` branch.
    pub eps: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub alpha: f64,
    pub beta_mag: f64,
    pub gamma_mag: f64,
    /// `4 y^2`, large-`y` branch only.
    pub theta: Option<f64>,
    pub y: f64,
    /// The row's contribution to the (weighted) logarithmic max-norm.
    pub row_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub y: f64,
    pub rows: Vec<CertificateRow>,
    /// Per-row inequalities, in row order.
    pub checks: Vec<BoundCheck>,
    /// Whole-matrix checks: the (weighted) max-norm bound on the assembled
    /// matrix and `lambda_max <= mu_inf`.
    pub overall: Vec<BoundCheck>,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.checks.iter().chain(&self.overall).all(|c| c.holds)
    }

    pub fn all_checks(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().chain(&self.overall)
    }
}

/// `|x +- 2iy| <= x + 2y^2 / x` for `x > 0`; returns the right-hand side.
pub fn shifted_modulus_bound(x: f64, y: f64) -> f64 {
    x + 2.0 * y * y / x
}

/// Assembled `Css + (1/2 + 2iy) Cs`.
pub fn family_matrix(grid: &GridSpec, y: f64) -> CMat {
    let tr = transformed_operators(grid);
    let css = crate::linalg::to_complex(&tr.css);
    let cs = crate::linalg::to_complex(&tr.cs);
    css + cs * C64::new(0.5, 2.0 * y)
}

/// `lambda_max` of a matrix similar to a Hermitian one through
/// `diag(s)^{-1/2} X diag(s)^{1/2}`. Fails if the transform is not Hermitian.
pub(crate) fn lambda_max_similar(
    x: &CMat,
    s: &DVector<f64>,
    settings: &CheckSettings,
) -> Result<f64> {
    let half = s.map(f64::sqrt);
    let inv_half = half.map(|v| 1.0 / v);
    let h = scale_rows_cols(x, &inv_half, &half);
    Ok(lambda_max_hermitian(&h, &settings.linalg)?.value)
}

fn row_tol(nu: f64) -> f64 {
    64.0 * f64::EPSILON * nu.max(1.0).powi(2)
}

fn beta(nu: f64, y: f64) -> C64 {
    C64::new(nu - 0.5, -2.0 * y) * (0.5 * nu)
}

fn gamma(nu: f64, y: f64) -> C64 {
    C64::new(nu + 0.5, 2.0 * y) * (0.5 * nu)
}

fn eps(nu: f64) -> f64 {
    (nu - 0.5) * (nu + 0.5) / (nu * nu)
}

/// `4 theta (theta - 1) nu^4 + theta^2 (4 theta - 1) nu^2 + theta^4`.
pub(crate) fn large_y_quartic(nu: f64, theta: f64) -> f64 {
    let nu2 = nu * nu;
    4.0 * theta * (theta - 1.0) * nu2 * nu2
        + theta * theta * (4.0 * theta - 1.0) * nu2
        + theta.powi(4)
}

/// `nu^3 - 3/4 nu^2 - 3/2 nu - 9/16`.
pub(crate) fn small_y_cubic(nu: f64) -> f64 {
    nu.powi(3) - 0.75 * nu * nu - 1.5 * nu - 9.0 / 16.0
}

/// `a_i` from its defining bracket, given the neighbouring weight ratios.
pub(crate) fn a_bracket(nu: f64, eps_i: f64, eps_next: f64) -> f64 {
    0.5 * nu * (-2.0 * nu + eps_i * (nu - 0.5) + (nu + 0.5) / eps_next)
}

pub(crate) fn a_closed(nu: f64) -> f64 {
    -0.125 * (nu - 0.75) / (nu * (nu + 1.5))
}

pub(crate) fn b_bracket(nu: f64, eps_i: f64, eps_next: f64) -> f64 {
    0.5 * nu * (eps_i / (nu - 0.5) + 1.0 / (eps_next * (nu + 0.5)))
}

pub(crate) fn b_closed(nu: f64) -> f64 {
    let h = nu + 0.5;
    0.5 * nu * (h / (nu * nu) + (nu + 1.0).powi(2) / (h * h * (nu + 1.5)))
}

/// Certificate for `|y| >= 1/2` using the unweighted max-norm.
pub fn certificate_large_y(
    grid: &GridSpec,
    y: f64,
    settings: &CheckSettings,
) -> Result<Certificate> {
    if !(y.abs() >= 0.5) {
        return Err(Error::WrongBranch {
            y,
            branch: "|y| >= 1/2",
        });
    }
    let m1 = grid.m1();
    let nu = grid.nu();
    let theta = 4.0 * y * y;
    let bound = 2.0 * y * y;
    let mut rows = Vec::with_capacity(m1);
    let mut checks = Vec::with_capacity(2 * m1);
    for (k, &n) in nu.iter().enumerate() {
        let i = k + 1;
        let beta_mag = if i == 1 { 0.0 } else { beta(n, y).norm() };
        let gamma_mag = if i == m1 { 0.0 } else { gamma(n, y).norm() };
        let alpha = -n * n;
        let row_value = alpha + beta_mag + gamma_mag;
        checks.push(BoundCheck::le(
            format!("row {i}: alpha+|beta|+|gamma| <= 2y^2"),
            row_value,
            bound,
            row_tol(n),
        ));
        checks.push(BoundCheck::nonnegative(
            format!("row {i}: quartic in nu >= 0"),
            large_y_quartic(n, theta),
            64.0 * f64::EPSILON * (theta * n * n).max(1.0).powi(2),
        ));
        rows.push(CertificateRow {
            i,
            nu: n,
            eps: None,
            a: None,
            b: None,
            alpha,
            beta_mag,
            gamma_mag,
            theta: Some(theta),
            y,
            row_value,
        });
    }

    let x = family_matrix(grid, y);
    let mu_inf = log_norm_inf(&x)?;
    let overall = whole_matrix_checks(grid, &x, mu_inf, y, settings)?;
    Ok(Certificate {
        y,
        rows,
        checks,
        overall,
    })
}

/// Certificate for `|y| < 1/2` using the weighted max-norm.
pub fn certificate_small_y(
    grid: &GridSpec,
    y: f64,
    settings: &CheckSettings,
) -> Result<Certificate> {
    if !(y.abs() < 0.5) {
        return Err(Error::WrongBranch {
            y,
            branch: "|y| < 1/2",
        });
    }
    let m1 = grid.m1();
    let nu = grid.nu();
    let bound = 2.0 * y * y;
    // weight ratio for 1-based row j (j >= 2)
    let eps_at = |j: usize| eps(nu[j - 1]);
    let mut rows = Vec::with_capacity(m1);
    let mut checks = Vec::new();

    for (k, &n) in nu.iter().enumerate() {
        let i = k + 1;
        let alpha = -n * n;
        let beta_mag = if i == 1 { 0.0 } else { beta(n, y).norm() };
        let gamma_mag = if i == m1 { 0.0 } else { gamma(n, y).norm() };
        let tol = row_tol(n);
        let mut row = CertificateRow {
            i,
            nu: n,
            eps: (i >= 2).then(|| eps_at(i)),
            a: None,
            b: None,
            alpha,
            beta_mag,
            gamma_mag,
            theta: None,
            y,
            row_value: 0.0,
        };

        if i == 1 {
            row.row_value = alpha + gamma_mag / eps_at(2);
            checks.push(BoundCheck::le(
                "row 1: alpha+|gamma|/eps_2 <= 2y^2",
                row.row_value,
                bound,
                tol,
            ));
        } else if i == m1 {
            row.row_value = alpha + eps_at(i) * beta_mag;
            checks.push(BoundCheck::le(
                format!("row {i}: alpha+eps|beta| <= 2y^2"),
                row.row_value,
                bound,
                tol,
            ));
        } else {
            let (e_i, e_next) = (eps_at(i), eps_at(i + 1));
            row.row_value = alpha + e_i * beta_mag + gamma_mag / e_next;
            let a = a_bracket(n, e_i, e_next);
            let b = b_bracket(n, e_i, e_next);
            row.a = Some(a);
            row.b = Some(b);
            let estimate = a + b * bound;
            checks.push(BoundCheck::le(
                format!("row {i}: weighted row <= a+2y^2 b"),
                row.row_value,
                estimate,
                tol,
            ));
            checks.push(BoundCheck::le(
                format!("row {i}: a+2y^2 b <= 2y^2"),
                estimate,
                bound,
                tol,
            ));
            checks.push(BoundCheck::le(format!("row {i}: a <= 0"), a, 0.0, 0.0));
            checks.push(BoundCheck::le(
                format!("row {i}: 2a+b <= 1"),
                2.0 * a + b,
                1.0,
                64.0 * f64::EPSILON,
            ));
            checks.push(BoundCheck::nonnegative(
                format!("row {i}: cubic in nu >= 0"),
                small_y_cubic(n),
                64.0 * f64::EPSILON * n.powi(3),
            ));
            checks.push(BoundCheck::le(
                format!("row {i}: |a closed - a bracket|"),
                (a - a_closed(n)).abs(),
                1e-12,
                0.0,
            ));
            checks.push(BoundCheck::le(
                format!("row {i}: |b closed - b bracket|"),
                (b - b_closed(n)).abs(),
                1e-12,
                0.0,
            ));
        }
        rows.push(row);
    }

    // weighted matrix from the assembled entries: (i, i-1) scaled by eps_i,
    // (i, i+1) scaled by 1 / eps_{i+1}
    let x = family_matrix(grid, y);
    let mut weighted = x.clone();
    for k in 0..m1 {
        if k > 0 {
            weighted[(k, k - 1)] *= eps_at(k + 1);
        }
        if k + 1 < m1 {
            weighted[(k, k + 1)] /= eps_at(k + 2);
        }
    }
    let mu_inf = log_norm_inf(&weighted)?;
    let overall = whole_matrix_checks(grid, &x, mu_inf, y, settings)?;
    Ok(Certificate {
        y,
        rows,
        checks,
        overall,
    })
}

/// Dispatches on the branch of `y`.
pub fn certificate_for(grid: &GridSpec, y: f64, settings: &CheckSettings) -> Result<Certificate> {
    if y.abs() >= 0.5 {
        certificate_large_y(grid, y, settings)
    } else {
        certificate_small_y(grid, y, settings)
    }
}

fn whole_matrix_checks(
    grid: &GridSpec,
    x: &CMat,
    mu_inf: f64,
    y: f64,
    settings: &CheckSettings,
) -> Result<Vec<BoundCheck>> {
    let tol = settings.sign_tol * max_abs(x);
    let s = DVector::from_column_slice(grid.s_points());
    let lambda = lambda_max_similar(x, &s, settings)?;
    Ok(vec![
        BoundCheck::le(format!("mu_inf <= 2y^2 at y={y}"), mu_inf, 2.0 * y * y, tol),
        BoundCheck::le(
            format!("lambda_max <= mu_inf at y={y}"),
            lambda,
            mu_inf,
            tol,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, HestonParams};

    fn grid(l: f64, m1: usize) -> GridSpec {
        let p = HestonParams::new(0.05, 2.0, 0.04, 0.2, 0.0, l, 800.0, 5.0).unwrap();
        make_grid(&p, m1, 5).unwrap()
    }

    #[test]
    fn closed_form_substitutions() {
        assert_eq!(eps(2.0), 0.9375);
        assert!((a_closed(2.0) - (-0.125 * 1.25 / 7.0)).abs() < 1e-16);
        assert!((a_closed(2.0) + 0.022_321_428_571_428_57).abs() < 1e-15);
        assert_eq!(small_y_cubic(2.0), 1.4375);
        assert_eq!(large_y_quartic(2.0, 4.0), 1984.0);
        for nu in [1.0, 2.0, 7.5] {
            assert_eq!(large_y_quartic(nu, 1.0), 3.0 * nu * nu + 1.0);
        }
    }

    #[test]
    fn bracket_forms_match_closed_forms() {
        for k in 0..200 {
            let nu = 2.0 + k as f64 * 0.37;
            let (e_i, e_next) = (eps(nu), eps(nu + 1.0));
            assert!((a_bracket(nu, e_i, e_next) - a_closed(nu)).abs() < 1e-12);
            assert!((b_bracket(nu, e_i, e_next) - b_closed(nu)).abs() < 1e-12);
        }
    }

    proptest::proptest! {
        // 2a + b <= 1 exactly when the cubic is nonnegative
        #[test]
        fn cubic_matches_weighted_inequality(nu in 0.6..500.0f64) {
            let slack = 1.0 - 2.0 * a_closed(nu) - b_closed(nu);
            let cubic = small_y_cubic(nu);
            if cubic.abs() > 1e-9 * nu.powi(3) {
                proptest::prop_assert_eq!(slack >= 0.0, cubic >= 0.0);
            }
        }

        #[test]
        fn brackets_match_closed_forms(nu in 2.0..60.0f64) {
            let (e_i, e_next) = (eps(nu), eps(nu + 1.0));
            proptest::prop_assert!((a_bracket(nu, e_i, e_next) - a_closed(nu)).abs() < 1e-12);
            proptest::prop_assert!((b_bracket(nu, e_i, e_next) - b_closed(nu)).abs() < 1e-12);
        }

        // the bracket cancels terms of size nu^2, so far from any grid only
        // roundoff-scaled agreement is meaningful
        #[test]
        fn brackets_agree_to_roundoff(nu in 60.0..1e5f64) {
            let (e_i, e_next) = (eps(nu), eps(nu + 1.0));
            let tol = 64.0 * f64::EPSILON * nu * nu;
            proptest::prop_assert!((a_bracket(nu, e_i, e_next) - a_closed(nu)).abs() < tol);
            proptest::prop_assert!((b_bracket(nu, e_i, e_next) - b_closed(nu)).abs() < tol);
        }
    }

    #[test]
    fn family_entries_match_formulas() {
        let g = grid(10.0, 6);
        let y = 0.3;
        let x = family_matrix(&g, y);
        let nu = g.nu();
        for k in 0..6 {
            assert!((x[(k, k)] - C64::new(-nu[k] * nu[k], 0.0)).norm() < 1e-12);
            if k > 0 {
                assert!((x[(k, k - 1)] - beta(nu[k], y)).norm() < 1e-12);
            }
            if k < 5 {
                assert!((x[(k, k + 1)] - gamma(nu[k], y)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn certificates_hold() {
        let s = CheckSettings::default();
        for (l, m1) in [(0.0, 3), (0.0, 10), (10.0, 30), (3.0, 50)] {
            let g = grid(l, m1);
            for &y in &s.y_samples {
                let c = certificate_for(&g, y, &s).unwrap();
                assert!(
                    c.holds(),
                    "L={l} m1={m1} y={y}: {:?}",
                    c.all_checks().find(|c| !c.holds)
                );
                assert_eq!(c.rows.len(), m1);
            }
        }
    }

    #[test]
    fn large_y_rows_at_point_six() {
        let s = CheckSettings::default();
        let c = certificate_large_y(&grid(0.0, 20), 0.6, &s).unwrap();
        assert!(c.checks.iter().all(|c| c.holds));
        assert_eq!(c.rows[0].beta_mag, 0.0);
        assert_eq!(c.rows[19].gamma_mag, 0.0);
        assert_eq!(c.rows[0].theta, Some(4.0 * 0.36));
    }

    #[test]
    fn branch_errors() {
        let s = CheckSettings::default();
        let g = grid(0.0, 5);
        assert!(matches!(
            certificate_large_y(&g, 0.4, &s),
            Err(Error::WrongBranch { .. })
        ));
        assert!(matches!(
            certificate_small_y(&g, 0.5, &s),
            Err(Error::WrongBranch { .. })
        ));
        assert!(matches!(
            certificate_small_y(&g, f64::NAN, &s),
            Err(Error::WrongBranch { .. })
        ));
    }

    #[test]
    fn small_y_rows() {
        let s = CheckSettings::default();
        let c = certificate_small_y(&grid(0.0, 8), 0.25, &s).unwrap();
        assert_eq!(c.rows[0].eps, None);
        assert_eq!(c.rows[1].eps, Some(0.9375));
        assert!(c.rows[1..7].iter().all(|r| r.a.unwrap() < 0.0));
        assert!(c.rows[0].a.is_none() && c.rows[7].a.is_none());
    }
}
