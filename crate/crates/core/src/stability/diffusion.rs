use super::{BoundCheck, CheckSettings};
use crate::error::Result;
use crate::grid::{scaling_matrices, GridSpec};
use crate::linalg::{expm, log_norm_d, max_abs, spectral_norm_or_direct};
use crate::operators::OperatorSet;

/// Contractivity of `A3 + A4 + A5` in the scaled norm and the implied
/// spectral norm bound.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionChecks {
    /// `mu_D[A3 + A4 + A5] <= 0`.
    pub log_norm: BoundCheck,
    /// `||exp(t (A3 + A4 + A5))||_D <= 1` per sampled `t`.
    pub scaled: Vec<BoundCheck>,
    /// `||exp(t (A3 + A4 + A5))||_2 <= sqrt(s_m1 v_m2 / (s_1 v_1))` per `t`.
    pub spectral: Vec<BoundCheck>,
}

impl DiffusionChecks {
    pub fn to_vec(&self) -> Vec<BoundCheck> {
        std::iter::once(self.log_norm.clone())
            .chain(self.scaled.iter().cloned())
            .chain(self.spectral.iter().cloned())
            .collect()
    }
}

pub fn check_diffusion_contractivity(
    ops: &OperatorSet,
    grid: &GridSpec,
    t_samples: &[f64],
    settings: &CheckSettings,
) -> Result<DiffusionChecks> {
    let d = scaling_matrices(grid).d;
    let mu = log_norm_d(&ops.diffusion, &d, &settings.linalg)?.value;
    let log_norm = BoundCheck::le(
        "muD[A3+A4+A5] <= 0",
        mu,
        0.0,
        settings.sign_tol * max_abs(&ops.diffusion),
    );

    let factor = grid.norm_equivalence_factor();
    let half = d.map(f64::sqrt);
    let inv_half = half.map(|x| 1.0 / x);
    let mut scaled = Vec::with_capacity(t_samples.len());
    let mut spectral = Vec::with_capacity(t_samples.len());
    for &t in t_samples {
        let e = expm(&ops.diffusion, t)?;
        let similar = crate::linalg::scale_rows_cols(&e, &inv_half, &half);
        let nd = spectral_norm_or_direct(&similar, None, &settings.linalg)
            .0
            .value;
        let n2 = spectral_norm_or_direct(&e, None, &settings.linalg).0.value;
        scaled.push(BoundCheck::le(
            format!("||exp(t(A3+A4+A5))||_D <= 1 at t={t}"),
            nd,
            1.0,
            settings.exp_tol,
        ));
        spectral.push(BoundCheck::le(
            format!("||exp(t(A3+A4+A5))||_2 <= sqrt(s_m1 v_m2/(s_1 v_1)) at t={t}"),
            n2,
            factor,
            settings.exp_tol * factor,
        ));
    }
    Ok(DiffusionChecks {
        log_norm,
        scaled,
        spectral,
    })
}
