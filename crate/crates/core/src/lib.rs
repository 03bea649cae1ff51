//! Stability analysis of the central second-order finite-difference
//! semi-discretization of the Heston PDE.
//!
//! The crate assembles the Kronecker-structured operators `A1..A5`, evaluates
//! spectral and logarithmic norms together with matrix exponentials, and
//! checks the contractivity certificates of the diffusion part numerically.
//!
//! Grid ordering is lexicographic with the `s` index running fastest, so a
//! grid value `u(s_i, v_j)` lives at flat index `(j - 1) * m1 + (i - 1)`.

// `!(x >= a)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod grid;
pub mod linalg;
pub mod operators;
pub mod stability;

pub use error::{Error, Result};
pub use grid::{make_grid, scaling_matrices, GridSpec, HestonParams, ScalingMatrices};
pub use linalg::{CMat, RMat, C64};
pub use operators::{build_operators, build_stencils, OperatorSet, StencilSet};
