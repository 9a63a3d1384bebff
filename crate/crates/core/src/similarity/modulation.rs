//! Selection of the blowup time by removing the unstable gauge direction.
//!
//! For a trial blowup time `T` the deviation from the profile grows like
//! `c1(T) e^τ` along the gauge mode; `c1` changes sign at the true blowup time
//! `T*`. Its sign is read off the value of `Φ1` at the origin once the growing
//! part dominates, and `T*` is found by bisection.

use std::ops::ControlFlow;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::field::RadialField;
use crate::radial::grid::RadialGrid;
use crate::radial::hankel::HankelPlan;
use crate::radial::random::{family_member, GaussianSumRanges};
use crate::radial::sobolev::{pair_norm, NormSpec};
use crate::similarity::{final_decay_fit, initial_perturbation, DecayFit, NormSeries, SimSystem, TaperedNorm};

/// Settings of the blowup-time selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationConfig {
    pub bracket: (f64, f64),
    /// Bisection stops when the bracket is shorter than this.
    pub tol: f64,
    pub max_iter: usize,
    /// Similarity time at which the sign of the growing part is read.
    pub tau_probe: f64,
    /// A probe stops early once `|Φ1(τ, 0)|` exceeds this.
    pub escape: f64,
    /// Below this size `Φ1(τ_probe, 0)` is considered inconclusive.
    pub noise_floor: f64,
    /// Time step as a fraction of the CFL limit.
    pub cfl: f64,
    /// Length of the final run at the selected time.
    pub tau_final: f64,
    /// Sampling interval of the norm series.
    pub sample_every: f64,
    /// Start of the decay-fit window.
    pub fit_start: f64,
}

impl Default for ModulationConfig {
    fn default() -> Self {
        Self {
            bracket: (0.8, 1.2),
            tol: 1e-12,
            max_iter: 60,
            tau_probe: 12.0,
            escape: 0.5,
            noise_floor: 1e-10,
            cfl: 0.5,
            tau_final: 8.0,
            sample_every: 0.1,
            fit_start: 4.0,
        }
    }
}

/// Outcome of one growth probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthProbe {
    pub t_blowup: f64,
    /// `Φ1(τ_end, 0)`; its sign is the sign of the unstable coefficient.
    pub value: f64,
    pub tau_end: f64,
}

/// Physical-frame perturbation `(v0, v1)` of the profile data at `t = 0`.
#[derive(Debug, Clone)]
pub struct Perturbation {
    pub v0: RadialField,
    pub v1: RadialField,
}

impl Perturbation {
    pub fn zero(grid: Arc<RadialGrid>) -> Self {
        Self { v0: RadialField::zeros(grid.clone()), v1: RadialField::zeros(grid) }
    }

    /// Seeded random perturbation whose pair norm (`spec`, taken on `plan`'s
    /// grid) equals `size`.
    pub fn seeded(plan: &HankelPlan, spec: NormSpec, seed: u64, index: u64, size: f64) -> Result<Self> {
        let ranges = perturbation_ranges();
        let a = family_member(seed, 2 * index, &ranges);
        let b = family_member(seed, 2 * index + 1, &ranges);
        let grid = plan.grid().clone();
        let v0 = RadialField::from_fn(grid.clone(), |r| a.eval(r));
        let v1 = RadialField::from_fn(grid, |r| b.eval(r));
        let k = size / pair_norm(plan, &v0, &v1, spec)?;
        Ok(Self { v0: v0.scaled(k), v1: v1.scaled(k) })
    }
}

/// Bumps used for seeded perturbations: at most three, concentrated inside
/// the backward light cone of the origin.
pub fn perturbation_ranges() -> GaussianSumRanges {
    GaussianSumRanges { terms: (1, 3), rate: (1.0, 8.0), center_max: 1.5 }
}

/// Sign probe of the unstable coefficient for trial time `t_blowup`.
pub fn growth_probe(sys: &SimSystem, v: &Perturbation, t_blowup: f64, cfg: &ModulationConfig) -> Result<GrowthProbe> {
    let mut state = initial_perturbation(sys.grid().clone(), sys.params(), &v.v0, &v.v1, t_blowup)?;
    let dt = sys.max_step(cfg.cfl);
    let escape = cfg.escape;
    sys.evolve(&mut state, cfg.tau_probe, dt, cfg.cfl, |s| {
        if s.u1.origin_value().abs() > escape {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(GrowthProbe { t_blowup, value: state.u1.origin_value(), tau_end: state.tau })
}

/// Result of the blowup-time selection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Modulation {
    pub t_star: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub probes: Vec<GrowthProbe>,
    pub series: NormSeries,
    /// `None` when the deviation vanishes along the whole final run.
    pub fit: Option<DecayFit>,
    /// Largest taper-zone indicator seen along the final run.
    pub truncation: f64,
}

fn sign_of(p: &GrowthProbe, cfg: &ModulationConfig) -> Result<f64> {
    if p.value == 0.0 {
        return Ok(0.0);
    }
    if p.value.abs() < cfg.noise_floor && p.tau_end >= cfg.tau_probe {
        return Err(Error::ProbeIndeterminate(p.t_blowup));
    }
    Ok(p.value.signum())
}

/// Finds `T*` by bisection on the sign of the unstable coefficient, then
/// evolves `U(v, T*)` and fits the decay of its norm.
pub fn modulate(sys: &SimSystem, v: &Perturbation, norm: &TaperedNorm, cfg: &ModulationConfig) -> Result<Modulation> {
    let (mut lo, mut hi) = cfg.bracket;
    let mut probes = Vec::new();
    let plo = growth_probe(sys, v, lo, cfg)?;
    let phi = growth_probe(sys, v, hi, cfg)?;
    probes.push(plo);
    probes.push(phi);
    let slo = sign_of(&plo, cfg)?;
    let shi = sign_of(&phi, cfg)?;
    if !(slo < 0.0 && shi > 0.0) {
        return Err(Error::NoSignChange { lo, hi });
    }
    let mut iterations = 0;
    let mut exact = None;
    while hi - lo > cfg.tol && iterations < cfg.max_iter {
        let mid = 0.5 * (lo + hi);
        let p = growth_probe(sys, v, mid, cfg)?;
        probes.push(p);
        iterations += 1;
        let s = sign_of(&p, cfg)?;
        if s == 0.0 {
            exact = Some(mid);
            break;
        } else if s < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_star = exact.unwrap_or(0.5 * (lo + hi));
    let (series, truncation) = norm_series(sys, v, norm, t_star, cfg)?;
    let fit = if series.norm.iter().all(|&x| x == 0.0) { None } else { Some(final_decay_fit(&series, cfg.fit_start)?) };
    Ok(Modulation { t_star, bracket: (lo, hi), iterations, probes, series, fit, truncation })
}

/// Norm of `Φ(τ)` sampled every `cfg.sample_every` for data `U(v, T)`.
pub fn norm_series(
    sys: &SimSystem,
    v: &Perturbation,
    norm: &TaperedNorm,
    t_blowup: f64,
    cfg: &ModulationConfig,
) -> Result<(NormSeries, f64)> {
    let mut state = initial_perturbation(sys.grid().clone(), sys.params(), &v.v0, &v.v1, t_blowup)?;
    let dt = sys.max_step(cfg.cfl);
    let mut series = NormSeries::default();
    let mut truncation = 0.0f64;
    let mut next = 0.0;
    let mut failure = None;
    sys.evolve(&mut state, cfg.tau_final, dt, cfg.cfl, |s| {
        if s.tau + 1e-9 >= next {
            match norm.norm(s) {
                Ok(x) => {
                    series.tau.push(s.tau);
                    series.norm.push(x);
                    truncation = truncation.max(norm.truncation_indicator(s));
                }
                Err(e) => {
                    failure = Some(e);
                    return ControlFlow::Break(());
                }
            }
            next += cfg.sample_every;
        }
        ControlFlow::Continue(())
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((series, truncation))
}
