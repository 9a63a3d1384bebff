//! Evolution in similarity variables `τ = -ln(T - t)`, `ρ = r / (T - t)`.
//!
//! The state is the pair `ψ = ((T-t)² u, (T-t)³ u_t)` written in `(τ, ρ)`, or its
//! deviation `Φ = ψ - (φ, φ1)` from the static profile. Spatial derivatives are
//! fourth-order finite differences, time stepping is classical RK4. For
//! `ρ > 1` all characteristic speeds `ρ ± 1` point outwards, so the outer
//! boundary needs no condition and is closed by one-sided stencils.

pub mod free;
pub mod modulation;

use std::ops::ControlFlow;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::radial::diff::{at_even, d1_into, d2_into, laplacian_from};
use crate::radial::field::RadialField;
use crate::radial::grid::RadialGrid;
use crate::radial::hankel::{HankelConfig, HankelPlan};
use crate::radial::sobolev::{pair_norm, NormSpec};

/// Which equation is evolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dynamics {
    /// Full equation for `ψ`.
    Full,
    /// Free wave equation in similarity variables (nonlinearity dropped).
    Free,
    /// Deviation `Φ` from the profile with potential and nonlinear remainder.
    Perturbation,
    /// Deviation `Φ` under the linearized operator only.
    Linearized,
}

/// State `(ψ1, ψ2)` or `(Φ1, Φ2)` at time `τ`.
#[derive(Debug, Clone)]
pub struct SimState {
    pub tau: f64,
    pub u1: RadialField,
    pub u2: RadialField,
}

impl SimState {
    pub fn new(tau: f64, u1: RadialField, u2: RadialField) -> Result<Self> {
        u1.check_same_grid(&u2)?;
        Ok(Self { tau, u1, u2 })
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        self.u1.grid()
    }

    /// The static profile `(φ, φ1)` as a `ψ` state.
    pub fn profile(grid: Arc<RadialGrid>, params: &ModelParams) -> Self {
        let u1 = RadialField::from_fn(grid.clone(), |r| params.phi(r));
        let u2 = RadialField::from_fn(grid, |r| params.phi1(r));
        Self { tau: 0.0, u1, u2 }
    }
}

/// Right-hand side of the similarity-variable system on a fixed grid.
#[derive(Debug, Clone)]
pub struct SimSystem {
    params: ModelParams,
    dynamics: Dynamics,
    grid: Arc<RadialGrid>,
    potential: Vec<f64>,
    profile: Vec<f64>,
    /// Kreiss-Oliger dissipation strength (0 disables).
    pub dissipation: f64,
}

struct Scratch {
    d1: Vec<f64>,
    d2: Vec<f64>,
    lap: Vec<f64>,
    e1: Vec<f64>,
}

impl Scratch {
    fn new(m: usize) -> Self {
        Self { d1: vec![0.0; m], d2: vec![0.0; m], lap: vec![0.0; m], e1: vec![0.0; m] }
    }
}

impl SimSystem {
    pub fn new(params: ModelParams, dynamics: Dynamics, grid: Arc<RadialGrid>) -> Result<Self> {
        if grid.dim() != params.n {
            return Err(Error::Grid(format!("grid dimension {} but n = {}", grid.dim(), params.n)));
        }
        let potential = grid.nodes().iter().map(|&r| params.potential(r)).collect();
        let profile = grid.nodes().iter().map(|&r| params.phi(r)).collect();
        Ok(Self { params, dynamics, grid, potential, profile, dissipation: 0.0 })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn dynamics(&self) -> Dynamics {
        self.dynamics
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    /// Largest stable RK4 step for a given Courant factor: the fastest
    /// characteristic speed is `ρ + 1` in physical units.
    pub fn max_step(&self, cfl: f64) -> f64 {
        let g = &self.grid;
        let hx = g.hx();
        g.nodes().iter().zip(g.jac()).map(|(&r, &j)| cfl * hx * j / (r + 1.0)).fold(f64::INFINITY, f64::min)
    }

    fn rhs(&self, u1: &[f64], u2: &[f64], out1: &mut [f64], out2: &mut [f64], s: &mut Scratch) {
        let g = &*self.grid;
        let r = g.nodes();
        d1_into(g, u1, &mut s.d1);
        d2_into(g, u1, &s.d1, &mut s.d2);
        laplacian_from(g, &s.d1, &s.d2, &mut s.lap);
        for i in 0..u1.len() {
            out1[i] = -r[i] * s.d1[i] - 2.0 * u1[i] + u2[i];
        }
        d1_into(g, u2, &mut s.e1);
        let k = self.params.nf() - 4.0;
        for i in 0..u1.len() {
            let rr = r[i] * r[i];
            let w = u1[i];
            let source = match self.dynamics {
                Dynamics::Full => k * w * w * (3.0 - rr * w),
                Dynamics::Free => 0.0,
                Dynamics::Perturbation => {
                    self.potential[i] * w + k * w * w * (3.0 - 3.0 * rr * self.profile[i] - rr * w)
                }
                Dynamics::Linearized => self.potential[i] * w,
            };
            out2[i] = s.lap[i] - r[i] * s.e1[i] - 3.0 * u2[i] + source;
        }
        if self.dissipation > 0.0 {
            self.add_dissipation(u1, out1);
            self.add_dissipation(u2, out2);
        }
    }

    /// Sixth-difference Kreiss-Oliger term in the computational coordinate,
    /// applied away from the outer boundary.
    fn add_dissipation(&self, u: &[f64], out: &mut [f64]) {
        let m = u.len() - 1;
        let c = self.dissipation / (64.0 * self.grid.hx());
        let at = |i: i64| at_even(u, i);
        for i in 0..m.saturating_sub(3) {
            let k = i as i64;
            let d6 = at(k - 3) - 6.0 * at(k - 2) + 15.0 * at(k - 1) - 20.0 * u[i] + 15.0 * u[i + 1] - 6.0 * u[i + 2]
                + u[i + 3];
            out[i] += c * d6;
        }
    }

    /// Right-hand side as fields.
    pub fn rhs_fields(&self, state: &SimState) -> Result<(RadialField, RadialField)> {
        if !state.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch);
        }
        let m = self.grid.len();
        let mut o1 = vec![0.0; m];
        let mut o2 = vec![0.0; m];
        let mut s = Scratch::new(m);
        self.rhs(state.u1.values(), state.u2.values(), &mut o1, &mut o2, &mut s);
        Ok((RadialField::new(self.grid.clone(), o1)?, RadialField::new(self.grid.clone(), o2)?))
    }

    /// Advances `state` to `tau_end` with RK4 steps no longer than `dt`,
    /// calling `observe` after the initial state and after every step.
    /// `observe` may stop the evolution early.
    pub fn evolve(
        &self,
        state: &mut SimState,
        tau_end: f64,
        dt: f64,
        cfl: f64,
        mut observe: impl FnMut(&SimState) -> ControlFlow<()>,
    ) -> Result<()> {
        let limit = self.max_step(cfl);
        if dt > limit * (1.0 + 1e-12) {
            return Err(Error::Cfl { dt, limit });
        }
        if !state.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch);
        }
        let m = self.grid.len();
        let mut s = Scratch::new(m);
        let mut k1 = (vec![0.0; m], vec![0.0; m]);
        let mut k2 = (vec![0.0; m], vec![0.0; m]);
        let mut k3 = (vec![0.0; m], vec![0.0; m]);
        let mut k4 = (vec![0.0; m], vec![0.0; m]);
        let mut tmp = (vec![0.0; m], vec![0.0; m]);
        if observe(state).is_break() {
            return Ok(());
        }
        let steps = ((tau_end - state.tau) / dt).ceil().max(0.0) as usize;
        if steps == 0 {
            return Ok(());
        }
        let h = (tau_end - state.tau) / steps as f64;
        let tau0 = state.tau;
        for step in 0..steps {
            {
                let u1 = state.u1.values();
                let u2 = state.u2.values();
                self.rhs(u1, u2, &mut k1.0, &mut k1.1, &mut s);
                for i in 0..m {
                    tmp.0[i] = u1[i] + 0.5 * h * k1.0[i];
                    tmp.1[i] = u2[i] + 0.5 * h * k1.1[i];
                }
                self.rhs(&tmp.0, &tmp.1, &mut k2.0, &mut k2.1, &mut s);
                for i in 0..m {
                    tmp.0[i] = u1[i] + 0.5 * h * k2.0[i];
                    tmp.1[i] = u2[i] + 0.5 * h * k2.1[i];
                }
                self.rhs(&tmp.0, &tmp.1, &mut k3.0, &mut k3.1, &mut s);
                for i in 0..m {
                    tmp.0[i] = u1[i] + h * k3.0[i];
                    tmp.1[i] = u2[i] + h * k3.1[i];
                }
                self.rhs(&tmp.0, &tmp.1, &mut k4.0, &mut k4.1, &mut s);
            }
            let c = h / 6.0;
            let u1 = state.u1.values_mut();
            for i in 0..m {
                u1[i] += c * (k1.0[i] + 2.0 * k2.0[i] + 2.0 * k3.0[i] + k4.0[i]);
            }
            let u2 = state.u2.values_mut();
            for i in 0..m {
                u2[i] += c * (k1.1[i] + 2.0 * k2.1[i] + 2.0 * k3.1[i] + k4.1[i]);
            }
            state.tau = tau0 + (step + 1) as f64 * h;
            if !state.u1.values()[0].is_finite() {
                return Err(Error::Integrator(format!("non-finite state at tau={}", state.tau)));
            }
            if observe(state).is_break() {
                break;
            }
        }
        Ok(())
    }
}

/// `similarity_rhs` for the full equation at a `ψ` state.
pub fn similarity_rhs(state: &SimState, params: &ModelParams) -> Result<(RadialField, RadialField)> {
    SimSystem::new(*params, Dynamics::Full, state.grid().clone())?.rhs_fields(state)
}

/// Perturbation `Φ(0)` in similarity variables for physical data
/// `(φ + v0, φ1 + v1)` at `t = 0` and trial blowup time `T`:
/// `Φ(0) = (T² (φ + v0)(Tρ) - φ(ρ), T³ (φ1 + v1)(Tρ) - φ1(ρ))`.
pub fn initial_perturbation(
    grid: Arc<RadialGrid>,
    params: &ModelParams,
    v0: &RadialField,
    v1: &RadialField,
    t_blowup: f64,
) -> Result<SimState> {
    if !(t_blowup > 0.0) {
        return Err(Error::Config(format!("blowup time must be positive, got {t_blowup}")));
    }
    let t = t_blowup;
    let mut a = Vec::with_capacity(grid.len());
    let mut b = Vec::with_capacity(grid.len());
    for &r in grid.nodes() {
        let x = t * r;
        a.push(t * t * (params.phi(x) + v0.interpolate(x)?) - params.phi(r));
        b.push(t * t * t * (params.phi1(x) + v1.interpolate(x)?) - params.phi1(r));
    }
    SimState::new(0.0, RadialField::new(grid.clone(), a)?, RadialField::new(grid, b)?)
}

/// Smooth cutoff equal to 1 on `[0, r_max - width]` and 0 at `r_max`.
pub fn taper(grid: &RadialGrid, width: f64) -> Vec<f64> {
    let r_max = grid.r_max();
    grid.nodes()
        .iter()
        .map(|&r| {
            let s = (r_max - r) / width;
            if s >= 1.0 {
                1.0
            } else if s <= 0.0 {
                0.0
            } else {
                let a = (-1.0 / s).exp();
                let b = (-1.0 / (1.0 - s)).exp();
                a / (a + b)
            }
        })
        .collect()
}

/// `H`-norm of similarity states restricted to the computational domain by a
/// smooth taper near the outer radius.
#[derive(Debug, Clone)]
pub struct TaperedNorm {
    plan: HankelPlan,
    taper: Vec<f64>,
    spec: NormSpec,
}

/// Frequency window used for similarity-frame norms.
pub fn similarity_hankel() -> HankelConfig {
    HankelConfig { k_min: 1e-2, k_max: 300.0, k_count: 600, tail_tol: 1e-6 }
}

impl TaperedNorm {
    /// Taper of width 1 and the [`similarity_hankel`] frequency window.
    pub fn standard(grid: Arc<RadialGrid>, spec: NormSpec) -> Result<Self> {
        Self::new(grid, spec, 1.0, similarity_hankel())
    }

    pub fn new(grid: Arc<RadialGrid>, spec: NormSpec, taper_width: f64, hankel: HankelConfig) -> Result<Self> {
        let taper = taper(&grid, taper_width);
        let plan = HankelPlan::new(grid, hankel)?;
        Ok(Self { plan, taper, spec })
    }

    pub fn spec(&self) -> NormSpec {
        self.spec
    }

    pub fn norm(&self, state: &SimState) -> Result<f64> {
        let a = self.cut(&state.u1);
        let b = self.cut(&state.u2);
        pair_norm(&self.plan, &a, &b, self.spec)
    }

    fn cut(&self, f: &RadialField) -> RadialField {
        let v = f.values().iter().zip(&self.taper).map(|(a, b)| a * b).collect();
        RadialField::new(f.grid().clone(), v).expect("same grid")
    }

    /// Share of the amplitude that sits inside the taper zone.
    pub fn truncation_indicator(&self, state: &SimState) -> f64 {
        let mut inside = 0.0f64;
        let mut zone = 0.0f64;
        for f in [&state.u1, &state.u2] {
            for (v, w) in f.values().iter().zip(&self.taper) {
                if *w < 1.0 {
                    zone = zone.max(v.abs());
                } else {
                    inside = inside.max(v.abs());
                }
            }
        }
        if inside == 0.0 {
            0.0
        } else {
            zone / inside
        }
    }
}

/// Sampled norm series `(τ, ‖Φ(τ)‖)`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct NormSeries {
    pub tau: Vec<f64>,
    pub norm: Vec<f64>,
}

/// Exponential fit `‖Φ(τ)‖ ≈ C e^{-ω τ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub omega_fit: f64,
    pub amplitude: f64,
    /// RMS relative deviation of the data from the fit on the window.
    pub residual: f64,
    pub tau_start: f64,
    pub tau_end: f64,
}

/// Least-squares fit of `ln ‖Φ‖` on `[tau_start, τ_min]`, where `τ_min` is the
/// location of the minimum of the series (the window stops before any late
/// regrowth).
pub fn final_decay_fit(series: &NormSeries, tau_start: f64) -> Result<DecayFit> {
    let n = series.tau.len();
    if n != series.norm.len() || n < 3 {
        return Err(Error::DegenerateFit(format!("need at least 3 samples, got {n}")));
    }
    let mut imin = 0;
    for i in 0..n {
        if series.norm[i] < series.norm[imin] {
            imin = i;
        }
    }
    let idx: Vec<usize> = (0..=imin).filter(|&i| series.tau[i] >= tau_start && series.norm[i] > 0.0).collect();
    if idx.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "fewer than 3 samples between tau={tau_start} and the minimum at tau={}",
            series.tau[imin]
        )));
    }
    let xs: Vec<f64> = idx.iter().map(|&i| series.tau[i]).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| series.norm[i].ln()).collect();
    let (slope, icpt) = linear_fit(&xs, &ys)?;
    let mut sq = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let model = (icpt + slope * x).exp();
        let rel = (y.exp() - model) / model;
        sq += rel * rel;
    }
    Ok(DecayFit {
        omega_fit: -slope,
        amplitude: icpt.exp(),
        residual: (sq / xs.len() as f64).sqrt(),
        tau_start: xs[0],
        tau_end: *xs.last().unwrap(),
    })
}

/// Measured growth of the gauge direction under the linearized flow.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthRate {
    pub rate: f64,
    /// Largest relative deviation of `Φ1(τ, 0)` from the fitted exponential.
    pub residual: f64,
    pub series: NormSeries,
}

/// Evolves the gauge mode `(g, ρg' + 3g)` with the linearized dynamics and fits
/// `ln |Φ1(τ, 0)|` on `[1, tau_end]`; the exact rate is 1.
pub fn gauge_growth_rate(params: &ModelParams, grid: Arc<RadialGrid>, tau_end: f64, cfl: f64) -> Result<GrowthRate> {
    let sys = SimSystem::new(*params, Dynamics::Linearized, grid.clone())?;
    let mut state = SimState::new(
        0.0,
        RadialField::from_fn(grid.clone(), |r| params.gauge_mode(r).0),
        RadialField::from_fn(grid, |r| params.gauge_mode(r).1),
    )?;
    let mut series = NormSeries::default();
    let mut next = 0.0;
    sys.evolve(&mut state, tau_end, sys.max_step(cfl), cfl, |s| {
        if s.tau + 1e-9 >= next {
            series.tau.push(s.tau);
            series.norm.push(s.u1.origin_value().abs());
            next += 0.1;
        }
        ControlFlow::Continue(())
    })?;
    let idx: Vec<usize> = (0..series.tau.len()).filter(|&i| series.tau[i] >= 1.0).collect();
    let xs: Vec<f64> = idx.iter().map(|&i| series.tau[i]).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| series.norm[i].ln()).collect();
    if xs.len() < 3 {
        return Err(Error::DegenerateFit(format!("tau_end={tau_end} leaves fewer than 3 samples after tau=1")));
    }
    let (rate, icpt) = linear_fit(&xs, &ys)?;
    let residual = xs.iter().zip(&ys).map(|(x, y)| ((y - icpt - rate * x).exp() - 1.0).abs()).fold(0.0, f64::max);
    Ok(GrowthRate { rate, residual, series })
}

/// Ordinary least squares `y ≈ a x + b`, returns `(a, b)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateFit("abscissae do not vary".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let a = sxy / sxx;
    Ok((a, my - a * mx))
}
