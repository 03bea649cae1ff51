//! Block-Toeplitz symbols and the block decomposition of the scaled
//! diffusion operator.

use std::f64::consts::PI;

use nalgebra::DVector;

use super::{BoundCheck, CheckSettings};
use crate::error::{Error, Result};
use crate::grid::{scaling_matrices, GridSpec, HestonParams};
use crate::linalg::{
    kron, kron_diagonal, log_norm_2, max_abs, scale_rows_cols, spectral_norm_or_direct, to_complex,
    CMat, RMat, C64,
};
use crate::operators::{build_operators, build_stencils, transformed_operators};

const UNIT_TOL: f64 = 1e-12;

fn check_blocks(b0: &RMat, b1: &RMat) -> Result<()> {
    if !b0.is_square() {
        return Err(Error::NotSquare {
            rows: b0.nrows(),
            cols: b0.ncols(),
        });
    }
    if b1.shape() != b0.shape() {
        return Err(Error::DimensionMismatch {
            context: "block symbol",
            expected: b0.nrows(),
            actual: b1.nrows(),
        });
    }
    Ok(())
}

fn check_unit(zeta: C64) -> Result<()> {
    let modulus = zeta.norm();
    if (modulus - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnitModulus { modulus });
    }
    Ok(())
}

/// `B(zeta) = B0 + zeta B1 + zeta^{-1} B1^T` for `|zeta| = 1`.
pub fn symbol_matrix(b0: &RMat, b1: &RMat, zeta: C64) -> Result<CMat> {
    check_blocks(b0, b1)?;
    check_unit(zeta)?;
    Ok(to_complex(b0) + to_complex(b1) * zeta + to_complex(&b1.transpose()) * zeta.inv())
}

/// `B0 + 2 zeta B1`, whose Hermitian part equals that of [`symbol_matrix`].
pub fn symbol_hat(b0: &RMat, b1: &RMat, zeta: C64) -> Result<CMat> {
    check_blocks(b0, b1)?;
    check_unit(zeta)?;
    Ok(to_complex(b0) + to_complex(b1) * (zeta * 2.0))
}

/// The `n` roots of unity `exp(2 pi i k / n)`.
pub fn unit_roots(n: usize) -> Vec<C64> {
    (0..n)
        .map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolCheck {
    /// `mu_2[B] <= max_k mu_2[B0 + 2 zeta_k B1]`, with the sampling slack in
    /// `tol`.
    pub check: BoundCheck,
    pub sampled_max: f64,
    pub argmax_zeta: C64,
    /// Lipschitz bound on how far the sampled maximum can sit below the
    /// maximum over the whole circle.
    pub sampling_slack: f64,
}

/// Compares `mu_2` of the block-Toeplitz matrix
/// `I ⊗ B0 + E ⊗ B1 + E^T ⊗ B1^T` (with `n_blocks` diagonal blocks) against
/// the maximum of `mu_2[B0 + 2 zeta B1]` over sampled roots of unity.
pub fn check_block_toeplitz(
    b0: &RMat,
    b1: &RMat,
    n_blocks: usize,
    zeta_samples: usize,
    settings: &CheckSettings,
) -> Result<SymbolCheck> {
    check_blocks(b0, b1)?;
    if n_blocks < 2 || zeta_samples < 8 {
        return Err(Error::InvalidSampling(format!(
            "need n_blocks >= 2 and zeta_samples >= 8, got {n_blocks} and {zeta_samples}"
        )));
    }
    let shift = crate::linalg::tridiag(n_blocks, 0.0, 0.0, 1.0);
    let b = kron(&RMat::identity(n_blocks, n_blocks), b0)
        + kron(&shift, b1)
        + kron(&shift.transpose(), &b1.transpose());
    let mu_b = log_norm_2(&b, &settings.linalg)?.value;

    let mut sampled_max = f64::NEG_INFINITY;
    let mut argmax_zeta = C64::new(1.0, 0.0);
    for zeta in unit_roots(zeta_samples) {
        let mu = log_norm_2(&symbol_hat(b0, b1, zeta)?, &settings.linalg)?.value;
        if mu > sampled_max {
            sampled_max = mu;
            argmax_zeta = zeta;
        }
    }
    let b1_norm = spectral_norm_or_direct(b1, None, &settings.linalg).0.value;
    let chord = 2.0 * (PI / (2.0 * zeta_samples as f64)).sin();
    let sampling_slack = 2.0 * chord * b1_norm;
    let tol = sampling_slack + settings.linalg.tol * max_abs(&b).max(1.0);
    Ok(SymbolCheck {
        check: BoundCheck::le(
            "mu2[B] <= max_zeta mu2[B0 + 2 zeta B1]",
            mu_b,
            sampled_max,
            tol,
        ),
        sampled_max,
        argmax_zeta,
        sampling_slack,
    })
}

/// The scaled diffusion operator in both of its forms.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityBlocks {
    /// `(D2^{-1} ⊗ D1^{-1/2}) (A3 + A4 + A5) (I ⊗ D1^{1/2})`.
    pub b: RMat,
    /// `1/2 (tM1 - 2 st^2 I)` with `st = sigma / dv`.
    pub b0: RMat,
    /// `1/2 (rho st tL1 + st^2 I)`.
    pub b1: RMat,
    /// Relative max-entry difference between `b` and the block assembly.
    pub mismatch: f64,
}

const ASSEMBLY_TOL: f64 = 1e-10;

pub fn build_similarity_blocks(params: &HestonParams, grid: &GridSpec) -> Result<SimilarityBlocks> {
    let ops = build_operators(params, grid);
    let sc = scaling_matrices(grid);
    let left = kron_diagonal(&sc.d2.map(|v| 1.0 / v), &sc.d1.map(|s| 1.0 / s.sqrt()));
    let right = kron_diagonal(
        &DVector::from_element(grid.m2(), 1.0),
        &sc.d1.map(f64::sqrt),
    );
    let b = scale_rows_cols(&ops.diffusion, &left, &right);

    let tr = transformed_operators(grid);
    let st = params.sigma() / grid.dv();
    let id = RMat::identity(grid.m1(), grid.m1());
    let b0 = (&tr.tm1 - id.scale(2.0 * st * st)).scale(0.5);
    let b1 = (tr.tl1.scale(params.rho() * st) + id.scale(st * st)).scale(0.5);
    let b1t = (tr.tl1.scale(-params.rho() * st) + id.scale(st * st)).scale(0.5);

    let shift = build_stencils(grid).shift_v;
    let id_v = RMat::identity(grid.m2(), grid.m2());
    let blocks = kron(&id_v, &b0) + kron(&shift, &b1) + kron(&shift.transpose(), &b1t);
    let mismatch = max_abs(&(&b - blocks)) / max_abs(&b).max(1.0);
    if mismatch > ASSEMBLY_TOL {
        return Err(Error::AssemblyMismatch {
            what: "scaled diffusion blocks",
            mismatch,
            allowed: ASSEMBLY_TOL,
        });
    }
    Ok(SimilarityBlocks {
        b,
        b0,
        b1,
        mismatch,
    })
}
