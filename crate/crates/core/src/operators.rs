//! One-dimensional stencil matrices and the Kronecker-assembled Heston
//! operators `A1..A5`.
//!
//! Every two-dimensional operator is produced by [`kron`] from its 1-D
//! factors; the `v` factor is on the left and the `s` factor on the right.

use std::io::{self, Write};

use nalgebra::DVector;

use crate::grid::{scaling_matrices, GridSpec, HestonParams};
use crate::linalg::{kron, max_abs, tridiag, RMat};

/// Central difference matrices on the interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilSet {
    /// `L1 = tridiag(-1, 0, 1) / (2 ds)`, first derivative in `s`.
    pub first_s: RMat,
    /// `M1 = tridiag(1, -2, 1) / ds^2`, second derivative in `s`.
    pub second_s: RMat,
    /// `L2`, first derivative in `v`.
    pub first_v: RMat,
    /// `M2`, second derivative in `v`.
    pub second_v: RMat,
    /// Forward shift `E = tridiag(0, 0, 1)` of size `m2`.
    pub shift_v: RMat,
}

/// `F = tridiag(1/2, 0, 1/2)` of dimension `n`.
pub fn averaging_matrix(n: usize) -> RMat {
    tridiag(n, 0.5, 0.0, 0.5)
}

fn first_difference(n: usize, h: f64) -> RMat {
    let c = 1.0 / (2.0 * h);
    tridiag(n, -c, 0.0, c)
}

fn second_difference(n: usize, h: f64) -> RMat {
    let c = 1.0 / (h * h);
    tridiag(n, c, -2.0 * c, c)
}

pub fn build_stencils(grid: &GridSpec) -> StencilSet {
    StencilSet {
        first_s: first_difference(grid.m1(), grid.ds()),
        second_s: second_difference(grid.m1(), grid.ds()),
        first_v: first_difference(grid.m2(), grid.dv()),
        second_v: second_difference(grid.m2(), grid.dv()),
        shift_v: tridiag(grid.m2(), 0.0, 0.0, 1.0),
    }
}

/// The five semi-discrete Heston operators.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSet {
    /// `r I ⊗ (D1 L1)`: advection in `s`.
    pub a1: RMat,
    /// `kappa [(eta I - D2) L2] ⊗ I`: advection in `v`.
    pub a2: RMat,
    /// `1/2 D2 ⊗ (D1^2 M1)`: diffusion in `s`.
    pub a3: RMat,
    /// `rho sigma (D2 L2) ⊗ (D1 L1)`: mixed derivative.
    pub a4: RMat,
    /// `1/2 sigma^2 (D2 M2) ⊗ I`: diffusion in `v`.
    pub a5: RMat,
    /// `A1 + A2 + A3 + A4 + A5 - r I`.
    pub a: RMat,
    /// `A3 + A4 + A5`.
    pub diffusion: RMat,
}

pub fn build_operators(params: &HestonParams, grid: &GridSpec) -> OperatorSet {
    let st = build_stencils(grid);
    let sc = scaling_matrices(grid);
    let d1 = RMat::from_diagonal(&sc.d1);
    let d2 = RMat::from_diagonal(&sc.d2);
    let id_s = RMat::identity(grid.m1(), grid.m1());
    let id_v = RMat::identity(grid.m2(), grid.m2());

    let d1l1 = &d1 * &st.first_s;
    let d1sq_m1 = &d1 * &d1 * &st.second_s;
    let d2l2 = &d2 * &st.first_v;
    let drift_v = (id_v.scale(params.eta()) - &d2) * &st.first_v;

    let a1 = kron(&id_v, &d1l1).scale(params.r());
    let a2 = kron(&drift_v, &id_s).scale(params.kappa());
    let a3 = kron(&d2, &d1sq_m1).scale(0.5);
    let a4 = kron(&d2l2, &d1l1).scale(params.rho() * params.sigma());
    let a5 = kron(&(&d2 * &st.second_v), &id_s).scale(0.5 * params.sigma() * params.sigma());

    let diffusion = &a3 + &a4 + &a5;
    let m = grid.m();
    let a = &a1 + &a2 + &diffusion - RMat::identity(m, m).scale(params.r());
    OperatorSet {
        a1,
        a2,
        a3,
        a4,
        a5,
        a,
        diffusion,
    }
}

/// `|1/2 (M1 D1 - D1 M1) - L1|_max`, which vanishes in exact arithmetic.
pub fn commutator_check(grid: &GridSpec) -> f64 {
    let st = build_stencils(grid);
    let d1 = RMat::from_diagonal(&DVector::from_column_slice(grid.s_points()));
    let comm = (&st.second_s * &d1 - &d1 * &st.second_s).scale(0.5);
    max_abs(&(comm - &st.first_s))
}

/// Matrices of the diffusion contractivity argument, all `m1 x m1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedOperators {
    /// `D1^{1/2} L1 D1^{1/2}`, antisymmetric.
    pub tl1: RMat,
    /// `D1^{3/2} M1 D1^{1/2}`.
    pub tm1: RMat,
    /// `D1 L1`, discretization of `s u_s`.
    pub cs: RMat,
    /// `1/2 D1^2 M1`, discretization of `1/2 s^2 u_ss`.
    pub css: RMat,
    /// `|tL1 + tL1^T|_max`.
    pub antisymmetry_residual: f64,
    /// `|1/2 (tM1 + tM1^T) - D1^{-1/2} (2 Css + Cs) D1^{1/2}|_max`.
    pub symmetric_part_residual: f64,
}

pub fn transformed_operators(grid: &GridSpec) -> TransformedOperators {
    let st = build_stencils(grid);
    let s = DVector::from_column_slice(grid.s_points());
    let d1 = RMat::from_diagonal(&s);
    let half = RMat::from_diagonal(&s.map(f64::sqrt));
    let inv_half = RMat::from_diagonal(&s.map(|x| 1.0 / x.sqrt()));
    let three_half = RMat::from_diagonal(&s.map(|x| x * x.sqrt()));

    let tl1 = &half * &st.first_s * &half;
    let tm1 = &three_half * &st.second_s * &half;
    let cs = &d1 * &st.first_s;
    let css = (&d1 * &d1 * &st.second_s).scale(0.5);

    let antisymmetry_residual = max_abs(&(&tl1 + tl1.transpose()));
    let sym = (&tm1 + tm1.transpose()).scale(0.5);
    let rhs = &inv_half * (css.scale(2.0) + &cs) * &half;
    let symmetric_part_residual = max_abs(&(sym - rhs));
    TransformedOperators {
        tl1,
        tm1,
        cs,
        css,
        antisymmetry_residual,
        symmetric_part_residual,
    }
}

/// Writes a dense matrix as whitespace-separated text, one row per line,
/// 17 significant digits per entry.
pub fn write_matrix_text<W: Write>(a: &RMat, mut out: W) -> io::Result<()> {
    for row in a.row_iter() {
        let line: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}
