use std::f64::consts::PI;

use super::{BoundCheck, CheckSettings};
use crate::error::Result;
use crate::grid::{GridSpec, HestonParams};
use crate::linalg::{expm, log_norm_2, spectral_norm_or_direct, RMat};
use crate::operators::OperatorSet;

/// Advection bounds together with their sharp closed forms.
#[derive(Debug, Clone, PartialEq)]
pub struct AdvectionChecks {
    /// `mu_2[A1] <= r / 2`.
    pub s_bound: BoundCheck,
    /// `mu_2[A2] <= kappa / 2`.
    pub v_bound: BoundCheck,
    /// `|mu_2[A1] - r/2 cos(pi / (m1 + 1))| <= 1e-8`.
    pub s_sharp: BoundCheck,
    /// `|mu_2[A2] - kappa/2 cos(pi / (m2 + 1))| <= 1e-8`.
    pub v_sharp: BoundCheck,
}

impl AdvectionChecks {
    pub fn to_vec(&self) -> Vec<BoundCheck> {
        vec![
            self.s_bound.clone(),
            self.v_bound.clone(),
            self.s_sharp.clone(),
            self.v_sharp.clone(),
        ]
    }
}

const SHARP_TOL: f64 = 1e-8;

pub fn check_advection_bounds(
    ops: &OperatorSet,
    params: &HestonParams,
    grid: &GridSpec,
    settings: &CheckSettings,
) -> Result<AdvectionChecks> {
    let mu1 = log_norm_2(&ops.a1, &settings.linalg)?.value;
    let mu2 = log_norm_2(&ops.a2, &settings.linalg)?.value;
    let omega1 = params.r() / 2.0;
    let omega2 = params.kappa() / 2.0;
    let sharp1 = omega1 * (PI / (grid.m1() as f64 + 1.0)).cos();
    let sharp2 = omega2 * (PI / (grid.m2() as f64 + 1.0)).cos();
    let tol = |w: f64| settings.linalg.tol * w.max(1.0);
    Ok(AdvectionChecks {
        s_bound: BoundCheck::le("mu2[A1] <= r/2", mu1, omega1, tol(omega1)),
        v_bound: BoundCheck::le("mu2[A2] <= kappa/2", mu2, omega2, tol(omega2)),
        s_sharp: BoundCheck::le(
            "|mu2[A1] - r/2 cos(pi/(m1+1))|",
            (mu1 - sharp1).abs(),
            SHARP_TOL,
            0.0,
        ),
        v_sharp: BoundCheck::le(
            "|mu2[A2] - kappa/2 cos(pi/(m2+1))|",
            (mu2 - sharp2).abs(),
            SHARP_TOL,
            0.0,
        ),
    })
}

/// `||exp(tA)||_2 <= K exp(t omega)` at each sampled `t`.
pub fn check_exp_bound(
    a: &RMat,
    omega: f64,
    k: f64,
    t_samples: &[f64],
    settings: &CheckSettings,
) -> Result<Vec<BoundCheck>> {
    t_samples
        .iter()
        .map(|&t| {
            let e = expm(a, t)?;
            let lhs = spectral_norm_or_direct(&e, None, &settings.linalg).0.value;
            let rhs = k * (t * omega).exp();
            Ok(BoundCheck::le(
                format!("||exp(tA)||_2 <= K exp(t omega) at t={t}"),
                lhs,
                rhs,
                settings.exp_tol * rhs.max(1.0),
            ))
        })
        .collect()
}
