//! Radial semilinear wave equation `u_tt = Δ_n u + (n-4) u² (3 - r² u)` in
//! physical coordinates, blowup detection and blowup-time fitting.
//!
//! The outer boundary carries the outgoing radiation condition and is kept out
//! of the region of interest by finite speed of propagation: a run is flagged
//! once the cone from `r_max` reaches the radius `r_phys`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::radial::diff::{d1_into, d2_into, laplacian_from};
use crate::radial::field::{interpolate_even, RadialField};
use crate::radial::grid::RadialGrid;
use crate::similarity::linear_fit;

/// `(u, u_t)` at time `t`.
#[derive(Debug, Clone)]
pub struct PhysState {
    pub t: f64,
    pub u: RadialField,
    pub ut: RadialField,
}

impl PhysState {
    pub fn new(t: f64, u: RadialField, ut: RadialField) -> Result<Self> {
        u.check_same_grid(&ut)?;
        Ok(Self { t, u, ut })
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        Self { t: 0.0, u: RadialField::zeros(grid.clone()), ut: RadialField::zeros(grid) }
    }

    /// Slice of the exact blowup solution with blowup time `blowup` at time `t`,
    /// multiplied by `scale`.
    pub fn exact(grid: Arc<RadialGrid>, params: &ModelParams, blowup: f64, t: f64, scale: f64) -> Result<Self> {
        let mut u = Vec::with_capacity(grid.len());
        let mut ut = Vec::with_capacity(grid.len());
        for &r in grid.nodes() {
            let (a, b) = params.blowup_solution(blowup, t, r)?;
            u.push(scale * a);
            ut.push(scale * b);
        }
        Self::new(t, RadialField::new(grid.clone(), u)?, RadialField::new(grid, ut)?)
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        self.u.grid()
    }
}

/// Right-hand side of the physical-frame system on a fixed grid.
#[derive(Debug, Clone)]
pub struct PhysSystem {
    params: ModelParams,
    grid: Arc<RadialGrid>,
    nonlinear: bool,
}

struct Scratch {
    d1: Vec<f64>,
    d2: Vec<f64>,
    lap: Vec<f64>,
}

impl PhysSystem {
    pub fn new(params: ModelParams, grid: Arc<RadialGrid>) -> Result<Self> {
        if grid.dim() != params.n {
            return Err(Error::Grid(format!("grid dimension {} but n = {}", grid.dim(), params.n)));
        }
        Ok(Self { params, grid, nonlinear: true })
    }

    /// Free wave equation on the same grid.
    pub fn linear(params: ModelParams, grid: Arc<RadialGrid>) -> Result<Self> {
        Ok(Self { nonlinear: false, ..Self::new(params, grid)? })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    fn rhs(&self, u: &[f64], ut: &[f64], o1: &mut [f64], o2: &mut [f64], s: &mut Scratch) {
        let g = &*self.grid;
        d1_into(g, u, &mut s.d1);
        d2_into(g, u, &s.d1, &mut s.d2);
        laplacian_from(g, &s.d1, &s.d2, &mut s.lap);
        let k = self.params.nf() - 4.0;
        let r = g.nodes();
        o1.copy_from_slice(ut);
        for i in 0..u.len() {
            let w = u[i];
            let source = if self.nonlinear { k * w * w * (3.0 - r[i] * r[i] * w) } else { 0.0 };
            o2[i] = s.lap[i] + source;
        }
        // outgoing condition (∂_t + ∂_r + (n-1)/(2r)) u = 0 at the last node
        let last = u.len() - 1;
        let c = 0.5 * (self.params.nf() - 1.0) / r[last];
        let w = &g.edge_d1[1];
        let scale = 1.0 / (g.hx() * g.jac()[last]);
        let du: f64 = (0..6).map(|j| w[j] * u[last - 5 + j]).sum::<f64>() * scale;
        let dut: f64 = (0..6).map(|j| w[j] * ut[last - 5 + j]).sum::<f64>() * scale;
        o1[last] = -du - c * u[last];
        o2[last] = -dut - c * ut[last];
    }

    /// `(u_t, Δu + (n-4) u² (3 - r² u))` as fields.
    pub fn rhs_fields(&self, state: &PhysState) -> Result<(RadialField, RadialField)> {
        if !state.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch);
        }
        let m = self.grid.len();
        let mut o1 = vec![0.0; m];
        let mut o2 = vec![0.0; m];
        let mut s = Scratch { d1: vec![0.0; m], d2: vec![0.0; m], lap: vec![0.0; m] };
        self.rhs(state.u.values(), state.ut.values(), &mut o1, &mut o2, &mut s);
        Ok((RadialField::new(self.grid.clone(), o1)?, RadialField::new(self.grid.clone(), o2)?))
    }

    /// Largest step allowed by the Courant factor `cfl` (`dt ≤ cfl · dr`).
    pub fn cfl_limit(&self, cfl: f64) -> f64 {
        cfl * self.grid.min_spacing()
    }

    /// Step limited by the Courant factor and by the time scale
    /// `(6 (n-4) max|u|)^{-1/2}` of the focusing nonlinearity.
    pub fn adaptive_step(&self, state: &PhysState, cfl: f64, reaction: f64) -> f64 {
        let peak = state.u.sup_norm();
        let rate = (6.0 * (self.params.nf() - 4.0) * peak).sqrt();
        let limit = self.cfl_limit(cfl);
        if self.nonlinear && rate > 0.0 {
            limit.min(reaction / rate)
        } else {
            limit
        }
    }

    /// One classical RK4 step of length `dt`.
    pub fn step(&self, state: &mut PhysState, dt: f64) -> Result<()> {
        let m = self.grid.len();
        let mut s = Scratch { d1: vec![0.0; m], d2: vec![0.0; m], lap: vec![0.0; m] };
        let mut work = Work::new(m);
        self.step_with(state, dt, &mut s, &mut work)
    }

    fn step_with(&self, state: &mut PhysState, dt: f64, s: &mut Scratch, w: &mut Work) -> Result<()> {
        let m = self.grid.len();
        let u = state.u.values();
        let ut = state.ut.values();
        let (k1, k2) = &mut w.k[0];
        self.rhs(u, ut, k1, k2, s);
        for stage in 1..4 {
            let c = if stage == 3 { dt } else { 0.5 * dt };
            for i in 0..m {
                w.tmp.0[i] = u[i] + c * w.k[stage - 1].0[i];
                w.tmp.1[i] = ut[i] + c * w.k[stage - 1].1[i];
            }
            let (k1, k2) = &mut w.k[stage];
            self.rhs(&w.tmp.0, &w.tmp.1, k1, k2, s);
        }
        let c = dt / 6.0;
        let k = &w.k;
        let u = state.u.values_mut();
        for i in 0..m {
            u[i] += c * (k[0].0[i] + 2.0 * k[1].0[i] + 2.0 * k[2].0[i] + k[3].0[i]);
        }
        let ut = state.ut.values_mut();
        for i in 0..m {
            ut[i] += c * (k[0].1[i] + 2.0 * k[1].1[i] + 2.0 * k[2].1[i] + k[3].1[i]);
        }
        state.t += dt;
        if !state.u.values().iter().all(|v| v.is_finite()) {
            return Err(Error::Integrator(format!("non-finite state at t={}", state.t)));
        }
        Ok(())
    }
}

struct Work {
    k: Vec<(Vec<f64>, Vec<f64>)>,
    tmp: (Vec<f64>, Vec<f64>),
}

impl Work {
    fn new(m: usize) -> Self {
        Self { k: (0..4).map(|_| (vec![0.0; m], vec![0.0; m])).collect(), tmp: (vec![0.0; m], vec![0.0; m]) }
    }
}

/// Run parameters of [`evolve_physical`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysConfig {
    /// Courant factor, at most 0.5.
    pub cfl: f64,
    /// Fraction of the nonlinear time scale allowed per step.
    pub reaction: f64,
    pub t_end: f64,
    /// Stop once `max|u|` exceeds this.
    pub blowup_threshold: f64,
    /// Stop once the core `sqrt|u(0)/u''(0)|` spans fewer grid spacings than this.
    pub core_points: f64,
    /// Radius that must stay outside the influence cone of the outer boundary.
    pub r_phys: f64,
    /// A snapshot is stored each time `u(t,0)` grows by this factor.
    pub snapshot_growth: f64,
    /// The blowup fit uses samples with `u(t,0)` within this factor of the last one.
    pub fit_decade: f64,
}

impl Default for PhysConfig {
    fn default() -> Self {
        Self {
            cfl: 0.5,
            reaction: 0.2,
            t_end: 2.0,
            blowup_threshold: 1e6,
            core_points: 20.0,
            r_phys: 4.0,
            snapshot_growth: 1.25,
            fit_decade: 10.0,
        }
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// `max|u|` passed the blowup threshold.
    Blowup,
    /// The focusing core became too narrow for the grid.
    ResolutionLimit,
    /// `t_end` was reached without blowup.
    NoBlowup,
}

/// Stored field `u(t, ·)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub u: Vec<f64>,
}

/// Samples of a physical run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    /// Time and `u(t, 0)` after every step.
    pub t: Vec<f64>,
    pub origin: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    pub outcome: Outcome,
    pub steps: usize,
    /// The influence cone of the outer boundary reached `r_phys`.
    pub boundary_contaminated: bool,
}

/// Straight-line fit of `u(t,0)^{-1/2} ≈ (T - t) / sqrt(φ(0))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupFit {
    pub t_est: f64,
    /// Limit of `(T - t)² u(t, 0)`.
    pub profile_value: f64,
    /// RMS deviation of `u^{-1/2}` from the line.
    pub fit_residual: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

/// Trajectory and, if the run focused, the blowup fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhysRun {
    pub trajectory: Trajectory,
    pub fit: Option<BlowupFit>,
}

/// Core width `sqrt|u(0) / u''(0)|` estimated from the innermost nodes.
fn core_width(grid: &RadialGrid, u: &[f64]) -> f64 {
    let mut d1 = vec![0.0; u.len()];
    let mut d2 = vec![0.0; u.len()];
    d1_into(grid, u, &mut d1);
    d2_into(grid, u, &d1, &mut d2);
    let u0 = interpolate_even(grid, u, 0.0).unwrap_or(u[0]);
    if d2[0] == 0.0 {
        return f64::INFINITY;
    }
    (u0 / d2[0]).abs().sqrt()
}

/// The resolution stop only applies once `u(t,0)` exceeds the initial
/// `max|u|` by this factor, so data that never focuses is not cut short.
const FOCUS_GAIN: f64 = 10.0;

/// Evolves `init` with RK4 until blowup, loss of resolution or `t_end`, and
/// fits the blowup time when the run focused.
pub fn evolve_physical(sys: &PhysSystem, init: &PhysState, cfg: &PhysConfig) -> Result<PhysRun> {
    if !(cfg.cfl > 0.0 && cfg.cfl <= 0.5) {
        return Err(Error::Cfl { dt: cfg.cfl * sys.grid.min_spacing(), limit: 0.5 * sys.grid.min_spacing() });
    }
    if !init.grid().same_as(&sys.grid) {
        return Err(Error::GridMismatch);
    }
    let grid = sys.grid.clone();
    let m = grid.len();
    let mut s = Scratch { d1: vec![0.0; m], d2: vec![0.0; m], lap: vec![0.0; m] };
    let mut work = Work::new(m);
    let mut state = init.clone();
    let t0 = state.t;
    let h = grid.min_spacing();
    let mut traj = Trajectory {
        t: vec![state.t],
        origin: vec![state.u.origin_value()],
        snapshots: vec![Snapshot { t: state.t, u: state.u.values().to_vec() }],
        outcome: Outcome::NoBlowup,
        steps: 0,
        boundary_contaminated: false,
    };
    let mut next_snapshot = state.u.origin_value().abs() * cfg.snapshot_growth;
    let focus_floor = FOCUS_GAIN * init.u.sup_norm();
    loop {
        if state.t >= cfg.t_end - 1e-14 {
            break;
        }
        let dt = sys.adaptive_step(&state, cfg.cfl, cfg.reaction).min(cfg.t_end - state.t);
        sys.step_with(&mut state, dt, &mut s, &mut work)?;
        traj.steps += 1;
        let u0 = state.u.origin_value();
        traj.t.push(state.t);
        traj.origin.push(u0);
        if grid.r_max() - (state.t - t0) < cfg.r_phys {
            traj.boundary_contaminated = true;
        }
        if u0.abs() >= next_snapshot && next_snapshot > 0.0 {
            traj.snapshots.push(Snapshot { t: state.t, u: state.u.values().to_vec() });
            while next_snapshot <= u0.abs() {
                next_snapshot *= cfg.snapshot_growth;
            }
        }
        if state.u.sup_norm() > cfg.blowup_threshold {
            traj.outcome = Outcome::Blowup;
            break;
        }
        if u0 > focus_floor && core_width(&grid, state.u.values()) < cfg.core_points * h {
            traj.outcome = Outcome::ResolutionLimit;
            break;
        }
    }
    let last = traj.snapshots.last().map(|s| s.t);
    if last != Some(state.t) {
        traj.snapshots.push(Snapshot { t: state.t, u: state.u.values().to_vec() });
    }
    let fit = match traj.outcome {
        Outcome::NoBlowup => None,
        _ => Some(fit_blowup(&traj, cfg.fit_decade)?),
    };
    Ok(PhysRun { trajectory: traj, fit })
}

/// Fits `u(t,0)^{-1/2}` linearly in `t` over the samples whose origin value is
/// within a factor `decade` of the last one.
pub fn fit_blowup(traj: &Trajectory, decade: f64) -> Result<BlowupFit> {
    let last = *traj.origin.last().ok_or_else(|| Error::DegenerateFit("empty trajectory".into()))?;
    if !(last > 0.0) {
        return Err(Error::DegenerateFit(format!("origin value {last} is not positive")));
    }
    let floor = last / decade;
    let mut start = traj.origin.len() - 1;
    while start > 0 && traj.origin[start - 1] >= floor {
        start -= 1;
    }
    let xs: Vec<f64> = traj.t[start..].to_vec();
    let ys: Vec<f64> = traj.origin[start..].iter().map(|u| u.powf(-0.5)).collect();
    if xs.len() < 3 {
        return Err(Error::DegenerateFit(format!("{} samples in the fit window", xs.len())));
    }
    let (a, b) = linear_fit(&xs, &ys)?;
    if !(a < 0.0) {
        return Err(Error::DegenerateFit(format!("u(t,0)^(-1/2) is not decreasing (slope {a})")));
    }
    let t_est = -b / a;
    let t_last = *xs.last().unwrap();
    if !(t_est > t_last) {
        return Err(Error::DegenerateFit(format!("fitted blowup time {t_est} precedes the last sample {t_last}")));
    }
    let sq: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - (a * x + b)).powi(2)).sum();
    Ok(BlowupFit {
        t_est,
        profile_value: 1.0 / (a * a),
        fit_residual: (sq / xs.len() as f64).sqrt(),
        window: (xs[0], t_last),
        samples: xs.len(),
    })
}

/// Blowup time from `u(t,0)^{-1/2} ≈ A (T - t) + B (T - t)^{1+ω}`, which keeps
/// the leading decaying correction with a given exponent `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectedFit {
    pub t_est: f64,
    pub profile_value: f64,
    pub correction: f64,
    pub exponent: f64,
    pub fit_residual: f64,
    pub window: (f64, f64),
}

/// Least squares in `(A, B)` for fixed `T`; returns `(rss, A, B)`.
fn corrected_rss(xs: &[f64], ys: &[f64], t: f64, omega: f64) -> (f64, f64, f64) {
    let (mut saa, mut sab, mut sbb, mut say, mut sby) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let a = t - x;
        let b = a.powf(1.0 + omega);
        saa += a * a;
        sab += a * b;
        sbb += b * b;
        say += a * y;
        sby += b * y;
    }
    let det = saa * sbb - sab * sab;
    let aa = (say * sbb - sby * sab) / det;
    let bb = (saa * sby - sab * say) / det;
    let rss = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let a = t - x;
            (y - aa * a - bb * a.powf(1.0 + omega)).powi(2)
        })
        .sum();
    (rss, aa, bb)
}

/// Corrected blowup-time fit on the samples with `t >= t_start`, searching
/// `T` in `(t_last, t_last + search]` by golden section.
pub fn fit_blowup_corrected(traj: &Trajectory, t_start: f64, omega: f64, search: f64) -> Result<CorrectedFit> {
    let idx: Vec<usize> = (0..traj.t.len()).filter(|&i| traj.t[i] >= t_start && traj.origin[i] > 0.0).collect();
    if idx.len() < 4 {
        return Err(Error::DegenerateFit(format!("{} samples after t={t_start}", idx.len())));
    }
    if !(omega > 0.0) {
        return Err(Error::DegenerateFit(format!("correction exponent must be positive, got {omega}")));
    }
    let xs: Vec<f64> = idx.iter().map(|&i| traj.t[i]).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| traj.origin[i].powf(-0.5)).collect();
    let t_last = *xs.last().unwrap();
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (t_last + 1e-12, t_last + search);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let mut fc = corrected_rss(&xs, &ys, c, omega).0;
    let mut fd = corrected_rss(&xs, &ys, d, omega).0;
    while hi - lo > 1e-13 * hi.abs().max(1.0) {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = corrected_rss(&xs, &ys, c, omega).0;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = corrected_rss(&xs, &ys, d, omega).0;
        }
    }
    let t_est = 0.5 * (lo + hi);
    let (rss, a, b) = corrected_rss(&xs, &ys, t_est, omega);
    if !(a > 0.0) {
        return Err(Error::DegenerateFit(format!("non-positive leading coefficient {a}")));
    }
    Ok(CorrectedFit {
        t_est,
        profile_value: 1.0 / (a * a),
        correction: b,
        exponent: omega,
        fit_residual: (rss / xs.len() as f64).sqrt(),
        window: (xs[0], t_last),
    })
}

/// `sup_{ξ ≤ window_xi} |(T - t)² u(t, (T - t) ξ) - φ(ξ)|` for every snapshot,
/// with the supremum taken over `points` equispaced values of `ξ`.
pub fn rescaled_profile_error(
    traj: &Trajectory,
    grid: &RadialGrid,
    params: &ModelParams,
    t_est: f64,
    window_xi: f64,
    points: usize,
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(traj.snapshots.len());
    for snap in &traj.snapshots {
        let s = t_est - snap.t;
        if !(s > 0.0) {
            return Err(Error::PastBlowup { t: snap.t, blowup: t_est });
        }
        let mut worst = 0.0f64;
        for j in 0..points.max(1) {
            let xi = if points > 1 { window_xi * j as f64 / (points - 1) as f64 } else { 0.0 };
            let v = interpolate_even(grid, &snap.u, s * xi)?;
            worst = worst.max((s * s * v - params.phi(xi)).abs());
        }
        out.push((snap.t, worst));
    }
    Ok(out)
}

/// Discrete free energy `∫ (u_t² + u_r²) r^{n-1} dr`.
pub fn free_energy(state: &PhysState) -> f64 {
    let grid = state.grid();
    let mut d1 = vec![0.0; grid.len()];
    d1_into(grid, state.u.values(), &mut d1);
    let dens: Vec<f64> = state.ut.values().iter().zip(&d1).map(|(a, b)| a * a + b * b).collect();
    grid.integrate_radial(&dens)
}
