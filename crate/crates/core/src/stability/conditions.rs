//! The chain of sufficient conditions for `mu_2[B] <= 0`: a Hermitian form
//! over the unit circle, its similarity transform in terms of `Cs`, `Css`,
//! and the parameter-free condition in a real variable `y`.

use nalgebra::DVector;

use super::certificate::{family_matrix, lambda_max_similar};
use super::symbol::unit_roots;
use super::{BoundCheck, CheckSettings};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, HestonParams};
use crate::linalg::{lambda_max_hermitian, max_abs, to_complex, CMat, C64};
use crate::operators::transformed_operators;

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionChecks {
    /// `lambda_max[1/2 (tM1 + tM1^T) + 2i Im(zeta) rho st tL1] <= 2 st^2 (1 - Re zeta)`.
    pub hermitian: Vec<BoundCheck>,
    /// `lambda_max[Css + 1/2 Cs + i Im(zeta) rho st Cs] <= st^2 (1 - Re zeta)`.
    pub transformed: Vec<BoundCheck>,
    /// The two forms above differ by a similarity and a factor 2, so their
    /// margins must satisfy `margin_hermitian = 2 margin_transformed`.
    pub agreement: Vec<BoundCheck>,
    /// `lambda_max[Css + (1/2 + 2iy) Cs] <= 2 y^2`.
    pub scalar_y: Vec<BoundCheck>,
}

impl ConditionChecks {
    pub fn to_vec(&self) -> Vec<BoundCheck> {
        self.hermitian
            .iter()
            .chain(&self.transformed)
            .chain(&self.agreement)
            .chain(&self.scalar_y)
            .cloned()
            .collect()
    }
}

pub fn check_sufficient_conditions(
    params: &HestonParams,
    grid: &GridSpec,
    zeta_samples: usize,
    y_samples: &[f64],
    settings: &CheckSettings,
) -> Result<ConditionChecks> {
    if zeta_samples < 8 {
        return Err(Error::InvalidSampling(format!(
            "need at least 8 zeta samples, got {zeta_samples}"
        )));
    }
    if let Some(y) = y_samples.iter().find(|y| !y.is_finite()) {
        return Err(Error::InvalidSampling(format!(
            "y sample {y} is not finite"
        )));
    }
    let tr = transformed_operators(grid);
    let s = DVector::from_column_slice(grid.s_points());
    let st = params.sigma() / grid.dv();
    let rho = params.rho();
    let i = C64::new(0.0, 1.0);

    let sym_tm1 = to_complex(&(&tr.tm1 + tr.tm1.transpose()).scale(0.5));
    let tl1 = to_complex(&tr.tl1);
    let base = to_complex(&(&tr.css + tr.cs.scale(0.5)));
    let cs = to_complex(&tr.cs);

    let mut out = ConditionChecks {
        hermitian: Vec::new(),
        transformed: Vec::new(),
        agreement: Vec::new(),
        scalar_y: Vec::new(),
    };
    for (k, zeta) in unit_roots(zeta_samples).into_iter().enumerate() {
        let h: CMat = &sym_tm1 + &tl1 * (i * (2.0 * zeta.im * rho * st));
        let lhs_h = lambda_max_hermitian(&h, &settings.linalg)?.value;
        let rhs_h = 2.0 * st * st * (1.0 - zeta.re);
        let tol_h = settings.sign_tol * max_abs(&h);
        out.hermitian.push(BoundCheck::le(
            format!("hermitian symbol condition at zeta_{k}"),
            lhs_h,
            rhs_h,
            tol_h,
        ));

        let x: CMat = &base + &cs * (i * (zeta.im * rho * st));
        let lhs_x = lambda_max_similar(&x, &s, settings)?;
        let rhs_x = st * st * (1.0 - zeta.re);
        let tol_x = settings.sign_tol * max_abs(&x);
        out.transformed.push(BoundCheck::le(
            format!("transformed symbol condition at zeta_{k}"),
            lhs_x,
            rhs_x,
            tol_x,
        ));

        let gap = ((rhs_h - lhs_h) - 2.0 * (rhs_x - lhs_x)).abs();
        out.agreement.push(BoundCheck::le(
            format!("symbol conditions agree at zeta_{k}"),
            gap,
            0.0,
            tol_h + 2.0 * tol_x,
        ));
    }
    for &y in y_samples {
        let x = family_matrix(grid, y);
        let lhs = lambda_max_similar(&x, &s, settings)?;
        out.scalar_y.push(BoundCheck::le(
            format!("scalar condition at y={y}"),
            lhs,
            2.0 * y * y,
            settings.sign_tol * max_abs(&x),
        ));
    }
    Ok(out)
}
