//! Growth bound of the free flow in similarity variables.
//!
//! Without the nonlinearity the similarity flow is the free wave flow seen
//! through the rescaling `ψ1(τ, ρ) = e^{-2τ} u(t, e^{-τ} ρ)`, so the pair
//! energies at level `s` scale like `e^{2(n/2 - 2 - s)τ}` and
//! `‖S0(τ) u‖ ≤ e^{(n/2 - 2 - s1)τ} ‖u‖` with constant one.
//!
//! Solutions spread over `ρ ~ e^τ`, so the evolution runs on a sinh-mapped
//! grid and norms are taken after pulling the state back to a fixed physical
//! window `x = e^{-τ} ρ`, where the Hankel plan is reused at every sample.

use std::ops::ControlFlow;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::radial::field::RadialField;
use crate::radial::grid::RadialGrid;
use crate::radial::hankel::{HankelConfig, HankelPlan};
use crate::radial::sobolev::{dilation_factor, sobolev_norms_sq, NormSpec};
use crate::similarity::{Dynamics, NormSeries, SimState, SimSystem};

/// Grids and tolerances of the free-flow check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeFlowConfig {
    pub rho_max: f64,
    /// Scale `L` of the sinh map `ρ = L sinh(x / L)`.
    pub map_scale: f64,
    /// Step of the computational coordinate.
    pub hx: f64,
    /// Radius of the physical window on which norms are taken.
    pub window: f64,
    pub window_nodes: usize,
    pub cfl: f64,
    pub tau_end: f64,
    pub sample_every: f64,
    /// Relative slack allowed on the bound.
    pub tol: f64,
    pub hankel: HankelConfig,
}

impl Default for FreeFlowConfig {
    fn default() -> Self {
        Self {
            rho_max: 1000.0,
            map_scale: 3.0,
            hx: 0.02,
            window: 15.0,
            window_nodes: 750,
            cfl: 0.5,
            tau_end: 4.0,
            sample_every: 0.1,
            tol: 1e-3,
            hankel: HankelConfig { k_min: 1e-2, k_max: 60.0, k_count: 512, tail_tol: 1e-6 },
        }
    }
}

/// Outcome of a growth-bound check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthBoundReport {
    pub exponent: f64,
    pub passed: bool,
    /// Largest value of `‖S0(τ)u‖ / (e^{aτ}‖u‖) - 1` over the samples (0 for zero data).
    pub worst_margin: f64,
    pub worst_tau: f64,
    /// First sample at which the bound fails, if any.
    pub violation: Option<f64>,
    pub series: NormSeries,
}

/// Checks `norm(τ) ≤ e^{aτ} norm(0) (1 + tol)` on a sampled series.
pub fn check_growth_bound(series: &NormSeries, exponent: f64, tol: f64) -> Result<GrowthBoundReport> {
    if series.tau.is_empty() || series.tau.len() != series.norm.len() {
        return Err(Error::DegenerateFit("empty or ragged norm series".into()));
    }
    let n0 = series.norm[0];
    let tau0 = series.tau[0];
    let mut worst_margin = if n0 == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    let mut worst_tau = tau0;
    let mut violation = None;
    for (&t, &x) in series.tau.iter().zip(&series.norm) {
        let bound = (exponent * (t - tau0)).exp() * n0;
        let margin = if bound == 0.0 {
            if x == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            x / bound - 1.0
        };
        if margin > worst_margin {
            worst_margin = margin;
            worst_tau = t;
        }
        if margin > tol && violation.is_none() {
            violation = Some(t);
        }
    }
    Ok(GrowthBoundReport {
        exponent,
        passed: violation.is_none(),
        worst_margin,
        worst_tau,
        violation,
        series: series.clone(),
    })
}

/// Pair norm of similarity states measured on a fixed physical window.
#[derive(Debug, Clone)]
pub struct WindowNorm {
    plan: HankelPlan,
    spec: NormSpec,
}

impl WindowNorm {
    pub fn new(n: u32, spec: NormSpec, window: f64, nodes: usize, hankel: HankelConfig) -> Result<Self> {
        let grid = Arc::new(RadialGrid::uniform(window, nodes, n)?);
        Ok(Self { plan: HankelPlan::new(grid, hankel)?, spec })
    }

    /// Squared pair energies `[E_{s1}, E_{s2}]` of the state, using
    /// `‖f(e^{-τ}·)‖_{Ḣ^s} = e^{τ(n/2 - s)} ‖f‖_{Ḣ^s}`.
    pub fn energies(&self, state: &SimState) -> Result<[f64; 2]> {
        let grid = self.plan.grid().clone();
        let n = grid.dim();
        let scale = state.tau.exp();
        let pull = |f: &RadialField| -> Result<RadialField> {
            let v = grid.nodes().iter().map(|&x| f.interpolate(scale * x)).collect::<Result<Vec<_>>>()?;
            RadialField::new(grid.clone(), v)
        };
        let w1 = pull(&state.u1)?;
        let w2 = pull(&state.u2)?;
        let (s1, s2) = (self.spec.s1, self.spec.s2);
        let a = sobolev_norms_sq(&self.plan, &w1, &[s1, s2])?;
        let b = sobolev_norms_sq(&self.plan, &w2, &[s1 - 1.0, s2 - 1.0])?;
        let f = |s: f64| dilation_factor(1.0 / scale, s, n).powi(2);
        Ok([a[0] * f(s1) + b[0] * f(s1 - 1.0), a[1] * f(s2) + b[1] * f(s2 - 1.0)])
    }

    pub fn norm(&self, state: &SimState) -> Result<f64> {
        let e = self.energies(state)?;
        Ok((e[0] + e[1]).sqrt())
    }
}

/// Result of [`free_growth_check`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FreeGrowthReport {
    pub bound: GrowthBoundReport,
    /// `[E_{s1}, E_{s2}]` at each sample.
    pub energies: Vec<[f64; 2]>,
    /// Largest relative deviation of `E_s(τ)` from its exact law `E_s(0) e^{(n - 4 - 2s)τ}`.
    pub law_error: f64,
}

/// Free evolution of `(u1, u2)` and a check of the sharp growth bound
/// `‖S0(τ)u‖ ≤ e^{(n/2 - 2 - s1)τ} ‖u‖`.
pub fn free_growth_check(
    params: &ModelParams,
    u1: impl Fn(f64) -> f64,
    u2: impl Fn(f64) -> f64,
    spec: NormSpec,
    cfg: &FreeFlowConfig,
) -> Result<FreeGrowthReport> {
    let nf = params.nf();
    if !(spec.s1 > 1.0 && spec.s1 < 0.5 * nf) {
        return Err(Error::NormSpec(format!("need 1 < s1 < n/2 = {}, got {}", 0.5 * nf, spec.s1)));
    }
    let count = (cfg.map_scale * (cfg.rho_max / cfg.map_scale).asinh() / cfg.hx).round() as usize;
    let grid = Arc::new(RadialGrid::sinh(cfg.rho_max, count, cfg.map_scale, params.n)?);
    let sys = SimSystem::new(*params, Dynamics::Free, grid.clone())?;
    let norm = WindowNorm::new(params.n, spec, cfg.window, cfg.window_nodes, cfg.hankel)?;
    let mut state = SimState::new(0.0, RadialField::from_fn(grid.clone(), u1), RadialField::from_fn(grid, u2))?;
    let mut series = NormSeries::default();
    let mut energies = Vec::new();
    let mut next = 0.0;
    let mut failure = None;
    sys.evolve(&mut state, cfg.tau_end, sys.max_step(cfg.cfl), cfg.cfl, |s| {
        if s.tau + 1e-9 >= next {
            match norm.energies(s) {
                Ok(e) => {
                    series.tau.push(s.tau);
                    series.norm.push((e[0] + e[1]).sqrt());
                    energies.push(e);
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
    let mut law_error = 0.0f64;
    for (t, e) in series.tau.iter().zip(&energies) {
        for (k, s) in [spec.s1, spec.s2].into_iter().enumerate() {
            let exact = energies[0][k] * ((nf - 4.0 - 2.0 * s) * t).exp();
            if exact > 0.0 {
                law_error = law_error.max((e[k] / exact - 1.0).abs());
            }
        }
    }
    let bound = check_growth_bound(&series, 0.5 * nf - 2.0 - spec.s1, cfg.tol)?;
    Ok(FreeGrowthReport { bound, energies, law_error })
}
