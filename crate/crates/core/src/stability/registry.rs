use std::collections::BTreeMap;
use std::sync::Arc;

use super::{
    build_similarity_blocks, certificate_for, check_advection_bounds, check_block_toeplitz,
    check_diffusion_contractivity, check_exp_bound, check_sufficient_conditions, BoundCheck,
    CheckSettings,
};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, HestonParams};
use crate::operators::OperatorSet;

/// Everything a check needs; operators are assembled once and shared.
pub struct CheckContext<'a> {
    pub params: &'a HestonParams,
    pub grid: &'a GridSpec,
    pub ops: &'a OperatorSet,
    pub settings: &'a CheckSettings,
}

/// A named stability check that can be selected at run time.
pub trait StabilityCheck: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn run(&self, ctx: &CheckContext<'_>) -> Result<Vec<BoundCheck>>;
}

struct Advection;
struct ExpBound;
struct Diffusion;
struct Similarity;
struct Symbol;
struct Conditions;
struct Certificates;

impl StabilityCheck for Advection {
    fn name(&self) -> &'static str {
        "advection"
    }
    fn description(&self) -> &'static str {
        "mu2 of the s- and v-advection operators against r/2 and kappa/2"
    }
    fn run(&self, ctx: &CheckContext<'_>) -> Result<Vec<BoundCheck>> {
        Ok(check_advection_bounds(ctx.ops, ctx.params, ctx.grid, ctx.settings)?.to_vec())
    }
}

impl StabilityCheck for ExpBound {
    fn name(&self) -> &'static str {
        "exp-bound"
    }
    fn description(&self) -> &'static str {
        "||exp(tA1)||_2 <= exp(t r/2) and ||exp(tA2)||_2 <= exp(t kappa/2)"
    }
    fn run(&self, ctx: &CheckContext<'_>) -> Result<Vec<BoundCheck>> {
        let t = &ctx.settings.t_samples;
        let mut out = check_exp_bound(&ctx.ops.a1, ctx.params.r() / 2.0, 1.0, t, ctx.settings)?;
        out.extend(check_exp_bound(
            &ctx.ops.a2,
            ctx.params.kappa() / 2.0,
            1.0,
            t,
            ctx.settings,
        )?);
        Ok(out)
    }
}

impl StabilityCheck for Diffusion {
    fn name(&self) -> &'static str {
        "diffusion"
    }
    fn description(&self) -> &'static str {
        "contractivity of the diffusion part in the weighted norm"
    }
    fn run(&self, ctx: &CheckContext<'_>) -> Result<Vec<BoundCheck>> {
        let c = check_diffusion_contractivity(
            ctx.ops,
            ctx.grid,
            &ctx.settings.t_samples,
            ctx.settings,
        )?;
        Ok(c.to_vec())
    }
}

impl StabilityCheck for Similarity {
    fn name(&self) -> &'static str {
        "similarity"
    }
    fn description(&self) -> &'static str {
        "scaled diffusion operator equals its block-tridiagonal assembly"
    }
    fn run(&self, ctx: &CheckContext<'_>) -> Result<Vec<BoundCheck>> {
        let blocks = build_similarity_blocks(ctx.params, ctx.grid)?;
        Ok(vec![BoundCheck::le(
            "block assembly mismatch",
            blocks.mismatch,
            1e-10,
            0.0,
        )])
    }
}

impl StabilityCheck for Symbol {
    fn name(&self) -> &'static str {
        "symbol"
    }
    fn description(&self) -> &'static str {
        "mu2 of the block-Toeplitz matrix against its sampled symbol"
    }
    fn run(&self, ctx: &CheckContext<'_>) -> Result<Vec<BoundCheck>> {
        let blocks = build_similarity_blocks(ctx.params, ctx.grid)?;
        let c = check_block_toeplitz(
            &blocks.b0,
            &blocks.b1,
            ctx.grid.m2(),
            ctx.settings.zeta_samples,
            ctx.settings,
        )?;
        Ok(vec![c.check])
    }
}

impl StabilityCheck for Conditions {
    fn name(&self) -> &'static str {
        "conditions"
    }
    fn description(&self) -> &'static str {
        "chain of sufficient conditions over zeta and y samples"
    }
    fn run(&self, ctx: &CheckContext<'_>) -> Result<Vec<BoundCheck>> {
        let c = check_sufficient_conditions(
            ctx.params,
            ctx.grid,
            ctx.settings.zeta_samples,
            &ctx.settings.y_samples,
            ctx.settings,
        )?;
        Ok(c.to_vec())
    }
}

impl StabilityCheck for Certificates {
    fn name(&self) -> &'static str {
        "certificate"
    }
    fn description(&self) -> &'static str {
        "row-by-row certificates for every sampled y"
    }
    fn run(&self, ctx: &CheckContext<'_>) -> Result<Vec<BoundCheck>> {
        let mut out = Vec::new();
        for &y in &ctx.settings.y_samples {
            out.extend(
                certificate_for(ctx.grid, y, ctx.settings)?
                    .all_checks()
                    .cloned(),
            );
        }
        Ok(out)
    }
}

/// Name-indexed collection of checks, iterated in registration order.
#[derive(Clone, Default)]
pub struct CheckRegistry {
    order: Vec<&'static str>,
    checks: BTreeMap<&'static str, Arc<dyn StabilityCheck>>,
}

impl CheckRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_defaults() -> Self {
        let mut r = Self::new();
        r.register(Arc::new(Advection));
        r.register(Arc::new(ExpBound));
        r.register(Arc::new(Diffusion));
        r.register(Arc::new(Similarity));
        r.register(Arc::new(Symbol));
        r.register(Arc::new(Conditions));
        r.register(Arc::new(Certificates));
        r
    }

    /// Adds a check, replacing any existing one with the same name.
    pub fn register(&mut self, check: Arc<dyn StabilityCheck>) {
        let name = check.name();
        if self.checks.insert(name, check).is_none() {
            self.order.push(name);
        }
    }

    pub fn get(&self, name: &str) -> Result<&Arc<dyn StabilityCheck>> {
        self.checks.get(name).ok_or_else(|| Error::UnknownStrategy {
            kind: "stability check",
            name: name.to_string(),
            available: self.order.join(", "),
        })
    }

    pub fn names(&self) -> &[&'static str] {
        &self.order
    }

    /// Runs the named checks (all of them when `names` is empty), returning
    /// each check's name with its results. Unknown names fail before anything
    /// runs.
    pub fn run_selected(
        &self,
        names: &[String],
        ctx: &CheckContext<'_>,
    ) -> Result<Vec<(&'static str, Vec<BoundCheck>)>> {
        let selected: Vec<&Arc<dyn StabilityCheck>> = if names.is_empty() {
            self.order.iter().map(|n| &self.checks[n]).collect()
        } else {
            names.iter().map(|n| self.get(n)).collect::<Result<_>>()?
        };
        selected
            .into_iter()
            .map(|c| Ok((c.name(), c.run(ctx)?)))
            .collect()
    }
}
