//! Truncated spatial grid and diagonal coordinate scalings.

use nalgebra::DVector;

use crate::error::{Error, Result};

/// Heston model coefficients together with the truncated domain
/// `[L, S] x [0, V]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HestonParams {
    r: f64,
    kappa: f64,
    eta: f64,
    sigma: f64,
    rho: f64,
    barrier: f64,
    s_max: f64,
    v_max: f64,
}

impl HestonParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        r: f64,
        kappa: f64,
        eta: f64,
        sigma: f64,
        rho: f64,
        barrier: f64,
        s_max: f64,
        v_max: f64,
    ) -> Result<Self> {
        positive("r", r)?;
        positive("kappa", kappa)?;
        positive("eta", eta)?;
        positive("sigma", sigma)?;
        if !(-1.0..=1.0).contains(&rho) {
            return Err(Error::InvalidParameter {
                name: "rho",
                value: rho,
                reason: "correlation must lie in [-1, 1]",
            });
        }
        if !(barrier >= 0.0 && barrier.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "L",
                value: barrier,
                reason: "lower barrier must be finite and >= 0",
            });
        }
        if !(s_max > barrier && s_max.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "S",
                value: s_max,
                reason: "truncation price must be finite and exceed L",
            });
        }
        positive("V", v_max)?;
        Ok(Self {
            r,
            kappa,
            eta,
            sigma,
            rho,
            barrier,
            s_max,
            v_max,
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    /// Lower barrier `L`.
    pub fn barrier(&self) -> f64 {
        self.barrier
    }
    /// Truncation price `S`.
    pub fn s_max(&self) -> f64 {
        self.s_max
    }
    /// Truncation variance `V`.
    pub fn v_max(&self) -> f64 {
        self.v_max
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

/// Uniform interior grid. Boundary nodes `i = 0, m1 + 1` and `j = 0, m2 + 1`
/// are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    m1: usize,
    m2: usize,
    ds: f64,
    dv: f64,
    s_points: Vec<f64>,
    v_points: Vec<f64>,
}

pub fn make_grid(params: &HestonParams, m1: usize, m2: usize) -> Result<GridSpec> {
    if m1 < 3 || m2 < 3 {
        return Err(Error::GridTooSmall { m1, m2 });
    }
    let l = params.barrier();
    let ds = (params.s_max() - l) / (m1 + 1) as f64;
    let dv = params.v_max() / (m2 + 1) as f64;
    let s_points = (1..=m1).map(|i| l + i as f64 * ds).collect();
    let v_points = (1..=m2).map(|j| j as f64 * dv).collect();
    Ok(GridSpec {
        m1,
        m2,
        ds,
        dv,
        s_points,
        v_points,
    })
}

impl GridSpec {
    pub fn m1(&self) -> usize {
        self.m1
    }
    pub fn m2(&self) -> usize {
        self.m2
    }
    /// Total number of unknowns `m1 * m2`.
    pub fn m(&self) -> usize {
        self.m1 * self.m2
    }
    pub fn ds(&self) -> f64 {
        self.ds
    }
    pub fn dv(&self) -> f64 {
        self.dv
    }
    pub fn s_points(&self) -> &[f64] {
        &self.s_points
    }
    pub fn v_points(&self) -> &[f64] {
        &self.v_points
    }

    /// Flat index of interior node `(i, j)` (both 1-based).
    pub fn flat_index(&self, i: usize, j: usize) -> usize {
        debug_assert!((1..=self.m1).contains(&i) && (1..=self.m2).contains(&j));
        (j - 1) * self.m1 + (i - 1)
    }

    /// Grid coordinates in units of the mesh width, `nu_i = s_i / ds`.
    pub fn nu(&self) -> Vec<f64> {
        self.s_points.iter().map(|s| s / self.ds).collect()
    }

    /// `sqrt(s_m1 v_m2 / (s_1 v_1))`, the factor converting the scaled norm
    /// into the spectral norm.
    pub fn norm_equivalence_factor(&self) -> f64 {
        let s = &self.s_points;
        let v = &self.v_points;
        ((s[self.m1 - 1] * v[self.m2 - 1]) / (s[0] * v[0])).sqrt()
    }
}

/// Diagonals of `D1 = diag(s)`, `D2 = diag(v)` and `D = D2 ⊗ D1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingMatrices {
    pub d1: DVector<f64>,
    pub d2: DVector<f64>,
    pub d: DVector<f64>,
}

pub fn scaling_matrices(grid: &GridSpec) -> ScalingMatrices {
    let d1 = DVector::from_column_slice(grid.s_points());
    let d2 = DVector::from_column_slice(grid.v_points());
    let mut d = DVector::zeros(grid.m());
    for (j, v) in d2.iter().enumerate() {
        for (i, s) in d1.iter().enumerate() {
            d[j * grid.m1() + i] = v * s;
        }
    }
    ScalingMatrices { d1, d2, d }
}
