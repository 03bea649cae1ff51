//! Parameter sweep estimating `max_t ||exp(t(A3 + A4 + A5))||` and comparing
//! it with the spectral-norm stability bound.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{make_grid, scaling_matrices, HestonParams};
use crate::linalg::{expm, norms::d_similarity, spectral_norm_or_direct, RMat, Settings};
use crate::operators::build_operators;
use crate::stability::BoundCheck;

/// Slack for `max_norm2 <= bound`.
pub const BOUND_TOL: f64 = 1e-6;
/// Slack for `max_normD <= 1`.
pub const CONTRACTIVITY_TOL: f64 = 1e-8;
/// Slack for comparing maxima between barrier values.
pub const ORDERING_TOL: f64 = 1e-8;

/// How `t` is sampled when searching for the maximum norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSampling {
    pub t_max: f64,
    pub coarse_step: f64,
    /// Each level re-samples `[t* - h, t* + h]` at `h / 10` around the
    /// current argmax `t*`, where `h` is the previous step.
    pub refine_levels: usize,
}

impl Default for TimeSampling {
    fn default() -> Self {
        Self {
            t_max: 100.0,
            coarse_step: 1.0,
            refine_levels: 2,
        }
    }
}

/// Result of [`max_norm_over_t`].
#[derive(Debug, Clone, PartialEq)]
pub struct MaxNorm {
    pub value: f64,
    pub t_argmax: f64,
    /// Best value after the coarse pass and after each refinement level.
    pub history: Vec<f64>,
    /// False if any norm evaluation failed to converge.
    pub converged: bool,
}

/// Estimates `max_{0 <= t <= t_max} ||exp(tA)||`, in the 2-norm or, when `d`
/// is given, in `||X||_D = ||D^{-1/2} X D^{1/2}||_2`.
///
/// Uniform samples are generated as powers of `exp(h A)`; `expm` is only
/// called for the step itself and for the start of each refinement window.
pub fn max_norm_over_t(
    a: &RMat,
    d: Option<&DVector<f64>>,
    sampling: &TimeSampling,
    settings: &Settings,
) -> Result<MaxNorm> {
    Ok(max_norms_over_t(a, &[d], sampling, settings)?.remove(0))
}

/// [`max_norm_over_t`] for several norms at once; the coarse pass shares its
/// exponentials, refinement runs separately around each norm's argmax.
pub fn max_norms_over_t(
    a: &RMat,
    weights: &[Option<&DVector<f64>>],
    sampling: &TimeSampling,
    settings: &Settings,
) -> Result<Vec<MaxNorm>> {
    let TimeSampling {
        t_max,
        coarse_step,
        refine_levels,
    } = *sampling;
    if !(t_max > 0.0 && t_max.is_finite()) || !(coarse_step > 0.0 && coarse_step.is_finite()) {
        return Err(Error::InvalidSampling(format!(
            "need finite t_max > 0 and coarse_step > 0, got {t_max} and {coarse_step}"
        )));
    }
    for d in weights.iter().flatten() {
        if d.len() != a.nrows() {
            return Err(Error::DimensionMismatch {
                context: "max_norm_over_t scaling",
                expected: a.nrows(),
                actual: d.len(),
            });
        }
        if let Some((index, &value)) = d.iter().enumerate().find(|(_, x)| !(**x > 0.0)) {
            return Err(Error::NonPositiveScaling { index, value });
        }
    }

    let mut states: Vec<NormState> = weights
        .iter()
        .map(|&d| NormState {
            d,
            warm: None,
            converged: true,
        })
        .collect();
    let n = (t_max / coarse_step * (1.0 + 1e-12)).floor() as usize;
    let mut samples = uniform(a, 0.0, coarse_step, n, &mut states, settings)?;
    if t_max - n as f64 * coarse_step > 1e-12 * t_max {
        let e = checked_expm(a, t_max)?;
        for (state, s) in states.iter_mut().zip(&mut samples) {
            s.push((t_max, state.norm(&e, t_max, settings)?));
        }
    }

    let mut out = Vec::with_capacity(states.len());
    for (state, coarse) in states.iter_mut().zip(&samples) {
        let (mut t_best, mut best) = argmax(coarse);
        let mut history = vec![best];
        let mut step = coarse_step;
        for _ in 0..refine_levels {
            let fine = step / 10.0;
            let lo = (t_best - step).max(0.0);
            let hi = (t_best + step).min(t_max);
            let count = ((hi - lo) / fine).round() as usize;
            let level = uniform(a, lo, fine, count, std::slice::from_mut(state), settings)?;
            let (t, v) = argmax(&level[0]);
            // the previous argmax is re-sampled, so keep the earlier value on ties
            if v > best {
                best = v;
                t_best = t;
            }
            history.push(best);
            step = fine;
        }
        out.push(MaxNorm {
            value: best,
            t_argmax: t_best,
            history,
            converged: state.converged,
        });
    }
    Ok(out)
}

fn argmax(samples: &[(f64, f64)]) -> (f64, f64) {
    samples.iter().copied().fold(
        (0.0, f64::NEG_INFINITY),
        |acc, s| if s.1 > acc.1 { s } else { acc },
    )
}

struct NormState<'a> {
    d: Option<&'a DVector<f64>>,
    warm: Option<DVector<f64>>,
    converged: bool,
}

impl NormState<'_> {
    fn norm(&mut self, e: &RMat, t: f64, settings: &Settings) -> Result<f64> {
        let owned;
        let m = match self.d {
            Some(d) => {
                owned = d_similarity(e, d);
                &owned
            }
            None => e,
        };
        let (report, v) = spectral_norm_or_direct(m, self.warm.as_ref(), settings);
        self.warm = Some(v);
        self.converged &= report.converged;
        if !report.value.is_finite() {
            return Err(Error::ExpOverflow {
                t,
                norm: report.value,
            });
        }
        Ok(report.value)
    }
}

fn checked_expm(a: &RMat, t: f64) -> Result<RMat> {
    let e = expm(a, t)?;
    if e.iter().any(|x| !x.is_finite()) {
        return Err(Error::ExpOverflow {
            t,
            norm: f64::INFINITY,
        });
    }
    Ok(e)
}

/// Norms at `start + k h` for `k = 0..=count`, one series per state.
fn uniform(
    a: &RMat,
    start: f64,
    h: f64,
    count: usize,
    states: &mut [NormState<'_>],
    settings: &Settings,
) -> Result<Vec<Vec<(f64, f64)>>> {
    let step = checked_expm(a, h)?;
    let mut e = checked_expm(a, start)?;
    let mut out = vec![Vec::with_capacity(count + 1); states.len()];
    for k in 0..=count {
        let t = start + k as f64 * h;
        if k > 0 {
            e = &e * &step;
            if e.iter().any(|x| !x.is_finite()) {
                return Err(Error::ExpOverflow {
                    t,
                    norm: f64::INFINITY,
                });
            }
        }
        for (state, series) in states.iter_mut().zip(&mut out) {
            series.push((t, state.norm(&e, t, settings)?));
        }
    }
    Ok(out)
}

/// `sqrt((L + m1 S) / (m1 L + S) * m2)`; equals `sqrt(m1 m2)` when `L = 0`.
pub fn sweep_bound(barrier: f64, m1: usize, m2: usize, s_max: f64) -> f64 {
    let m1 = m1 as f64;
    ((barrier + m1 * s_max) / (m1 * barrier + s_max) * m2 as f64).sqrt()
}

/// Sweep over `sigma x rho x L x m2` with `m1 = 2 m2`.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub sigmas: Vec<f64>,
    pub rhos: Vec<f64>,
    pub barriers: Vec<f64>,
    pub m2s: Vec<usize>,
    pub s_max: f64,
    pub v_max: f64,
    /// Parameters the diffusion part does not depend on; only needed to
    /// build a valid [`HestonParams`].
    pub r: f64,
    pub kappa: f64,
    pub eta: f64,
    pub sampling: TimeSampling,
    pub settings: Settings,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            sigmas: vec![0.1, 0.2],
            rhos: vec![-1.0, 0.0, 1.0],
            barriers: vec![0.0, 10.0],
            m2s: (5..=15).step_by(2).collect(),
            s_max: 800.0,
            v_max: 5.0,
            r: 0.05,
            kappa: 2.0,
            eta: 0.04,
            sampling: TimeSampling::default(),
            settings: Settings::default(),
        }
    }
}

impl SweepConfig {
    /// The default sweep extended to `m2 = 25`.
    pub fn full() -> Self {
        Self {
            m2s: (5..=25).step_by(2).collect(),
            ..Self::default()
        }
    }
}

/// One sweep data point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub m2: usize,
    pub m1: usize,
    pub barrier: f64,
    pub sigma: f64,
    pub rho: f64,
    pub s_max: f64,
    pub v_max: f64,
    pub max_norm2: f64,
    pub t_argmax: f64,
    pub max_norm_d: f64,
    pub bound: f64,
    pub within_bound: bool,
    /// Best 2-norm value after each refinement level.
    pub history: Vec<f64>,
    pub converged: bool,
    /// Set when the case could not be evaluated; numeric fields are NaN.
    pub failure: Option<String>,
}

fn sorted_unique(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Runs every case in parallel; records come back sorted by `(L, sigma, rho, m2)`.
/// Only an unusable configuration is an error, individual failures are
/// recorded in their records.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    if config.sigmas.is_empty()
        || config.rhos.is_empty()
        || config.barriers.is_empty()
        || config.m2s.is_empty()
    {
        return Err(Error::InvalidSampling(
            "every sweep list needs at least one value".into(),
        ));
    }
    let mut m2s = config.m2s.clone();
    m2s.sort_unstable();
    m2s.dedup();
    let mut cases = Vec::new();
    for &l in &sorted_unique(&config.barriers) {
        for &sigma in &sorted_unique(&config.sigmas) {
            for &rho in &sorted_unique(&config.rhos) {
                let params = HestonParams::new(
                    config.r,
                    config.kappa,
                    config.eta,
                    sigma,
                    rho,
                    l,
                    config.s_max,
                    config.v_max,
                )?;
                for &m2 in &m2s {
                    make_grid(&params, 2 * m2, m2)?;
                    cases.push((params, m2));
                }
            }
        }
    }
    Ok(cases
        .par_iter()
        .map(|(params, m2)| run_case(params, *m2, config))
        .collect())
}

fn run_case(params: &HestonParams, m2: usize, config: &SweepConfig) -> SweepRecord {
    let m1 = 2 * m2;
    let bound = sweep_bound(params.barrier(), m1, m2, params.s_max());
    let mut rec = SweepRecord {
        m2,
        m1,
        barrier: params.barrier(),
        sigma: params.sigma(),
        rho: params.rho(),
        s_max: params.s_max(),
        v_max: params.v_max(),
        max_norm2: f64::NAN,
        t_argmax: f64::NAN,
        max_norm_d: f64::NAN,
        bound,
        within_bound: false,
        history: Vec::new(),
        converged: false,
        failure: None,
    };
    let evaluated = (|| -> Result<(MaxNorm, MaxNorm)> {
        let grid = make_grid(params, m1, m2)?;
        let ops = build_operators(params, &grid);
        let d = scaling_matrices(&grid).d;
        let mut both = max_norms_over_t(
            &ops.diffusion,
            &[None, Some(&d)],
            &config.sampling,
            &config.settings,
        )?;
        let nd = both.pop().expect("two norms requested");
        let n2 = both.pop().expect("two norms requested");
        Ok((n2, nd))
    })();
    match evaluated {
        Ok((n2, nd)) => {
            rec.max_norm2 = n2.value;
            rec.t_argmax = n2.t_argmax;
            rec.max_norm_d = nd.value;
            rec.within_bound = n2.value <= bound + BOUND_TOL;
            rec.history = n2.history;
            rec.converged = n2.converged && nd.converged;
        }
        Err(e) => rec.failure = Some(e.to_string()),
    }
    rec
}

/// `f64` under `total_cmp`, for use as an ordered map key.
#[derive(Debug, Clone, Copy)]
struct Key(f64);

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

type PairKey = (Key, Key, usize);

fn pair_key(r: &SweepRecord) -> PairKey {
    (Key(r.sigma), Key(r.rho), r.m2)
}

/// For every `(sigma, rho, m2)` and every nonzero barrier `L`, checks
/// `max_norm2(L) <= max_norm2(0)`. Every combination must be present for
/// every barrier value, including `L = 0`.
pub fn compare_barrier_effect(records: &[SweepRecord]) -> Result<Vec<BoundCheck>> {
    let barriers: BTreeSet<Key> = records.iter().map(|r| Key(r.barrier)).collect();
    let keys: BTreeSet<PairKey> = records.iter().map(pair_key).collect();
    let by: BTreeMap<(PairKey, Key), &SweepRecord> = records
        .iter()
        .map(|r| ((pair_key(r), Key(r.barrier)), r))
        .collect();

    let zero = Key(0.0);
    let mut required = barriers.clone();
    required.insert(zero);
    let mut missing = Vec::new();
    for &key in &keys {
        for &l in &required {
            if !by.contains_key(&(key, l)) {
                missing.push(format!(
                    "(sigma={}, rho={}, m2={}, L={})",
                    key.0 .0, key.1 .0, key.2, l.0
                ));
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::UnmatchedRecords {
            missing: missing.join(", "),
        });
    }

    let mut checks = Vec::new();
    for &key in &keys {
        let base = by[&(key, zero)];
        for &l in barriers.iter().filter(|&&l| l != zero) {
            let r = by[&(key, l)];
            checks.push(BoundCheck::le(
                format!(
                    "max_norm2(L={}) <= max_norm2(L=0) at sigma={} rho={} m2={}",
                    r.barrier, r.sigma, r.rho, r.m2
                ),
                r.max_norm2,
                base.max_norm2,
                ORDERING_TOL,
            ));
        }
    }
    Ok(checks)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Largest accepted log-log growth slope of `max_norm2` in `m2`: linear
/// growth for `L = 0`, square-root growth otherwise, each with slack 0.25.
pub fn growth_slope_limit(barrier: f64) -> f64 {
    if barrier == 0.0 {
        1.25
    } else {
        0.75
    }
}

/// One slope check per `(sigma, rho, L)` series with at least two points.
pub fn check_growth_trend(records: &[SweepRecord]) -> Vec<BoundCheck> {
    let mut series: BTreeMap<(Key, Key, Key), Vec<&SweepRecord>> = BTreeMap::new();
    for r in records {
        series
            .entry((Key(r.barrier), Key(r.sigma), Key(r.rho)))
            .or_default()
            .push(r);
    }
    series
        .values()
        .filter(|s| s.len() >= 2)
        .map(|s| {
            let xs: Vec<f64> = s.iter().map(|r| r.m2 as f64).collect();
            let ys: Vec<f64> = s.iter().map(|r| r.max_norm2).collect();
            let slope = loglog_slope(&xs, &ys).unwrap_or(f64::NAN);
            let r = s[0];
            BoundCheck::le(
                format!(
                    "log-log slope of max_norm2 in m2 at L={} sigma={} rho={}",
                    r.barrier, r.sigma, r.rho
                ),
                slope,
                growth_slope_limit(r.barrier),
                0.0,
            )
        })
        .collect()
}

/// Per-record checks: the spectral bound, `max_normD <= 1`, `max_norm2 >= 1`,
/// monotone refinement and `t_argmax` inside `[0, t_window]`.
pub fn check_records(records: &[SweepRecord], t_window: f64) -> Vec<BoundCheck> {
    let mut out = Vec::new();
    for r in records {
        let tag = format!(
            "L={} sigma={} rho={} m2={}",
            r.barrier, r.sigma, r.rho, r.m2
        );
        out.push(BoundCheck::le(
            format!("max_norm2 <= bound at {tag}"),
            r.max_norm2,
            r.bound,
            BOUND_TOL,
        ));
        out.push(BoundCheck::le(
            format!("max_normD <= 1 at {tag}"),
            r.max_norm_d,
            1.0,
            CONTRACTIVITY_TOL,
        ));
        out.push(BoundCheck::le(
            format!("max_norm2 >= 1 at {tag}"),
            1.0,
            r.max_norm2,
            1e-12,
        ));
        let monotone = r.failure.is_none() && r.history.windows(2).all(|w| w[1] >= w[0]);
        out.push(BoundCheck::le(
            format!("refinement is monotone at {tag}"),
            if monotone { 0.0 } else { 1.0 },
            0.0,
            0.0,
        ));
        out.push(BoundCheck::le(
            format!("t_argmax <= {t_window} at {tag}"),
            r.t_argmax,
            t_window,
            0.0,
        ));
        out.push(BoundCheck::nonnegative(
            format!("t_argmax >= 0 at {tag}"),
            r.t_argmax,
            0.0,
        ));
    }
    out
}
