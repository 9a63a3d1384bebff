//! Radial Fourier transform in `R^n` as a Hankel transform of order `n/2 - 1`.
//!
//! With the unitary convention the transform of a radial function is
//! `û(k) = k^{-ν} ∫_0^∞ u(r) J_ν(kr) r^{n/2} dr`, `ν = n/2 - 1`, and the
//! transform is its own inverse. Forward integrals use the midpoint rule of
//! the cell-centred radial grid (spectrally accurate for even integrands);
//! frequencies live on a log-spaced grid and inverse integrals use the
//! trapezoid rule in `ln k`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::bessel::bessel_j;
use crate::radial::field::RadialField;
use crate::radial::grid::RadialGrid;

/// Frequency grid and tolerance of a [`HankelPlan`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HankelConfig {
    pub k_min: f64,
    pub k_max: f64,
    pub k_count: usize,
    /// Relative size of the truncated tails above which results are rejected.
    pub tail_tol: f64,
}

impl Default for HankelConfig {
    fn default() -> Self {
        Self { k_min: 1e-2, k_max: 1e2, k_count: 512, tail_tol: 1e-6 }
    }
}

/// Samples of a radial function of the frequency `k = |ξ|`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    k: Arc<Vec<f64>>,
    log_step: f64,
    dim: u32,
    values: Vec<f64>,
}

impl Spectrum {
    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Spacing of the grid in `ln k`.
    pub fn log_step(&self) -> f64 {
        self.log_step
    }

    /// Trapezoid weights for `∫ f(k) d(ln k)`.
    pub fn log_weights(&self) -> impl Iterator<Item = f64> + '_ {
        let last = self.k.len() - 1;
        (0..self.k.len()).map(move |i| if i == 0 || i == last { 0.5 * self.log_step } else { self.log_step })
    }
}

/// Precomputed forward kernel for a fixed radial grid and frequency grid.
#[derive(Debug, Clone)]
pub struct HankelPlan {
    grid: Arc<RadialGrid>,
    config: HankelConfig,
    order: f64,
    k: Arc<Vec<f64>>,
    log_step: f64,
    // row-major k × r, includes quadrature weights
    kernel: Vec<f64>,
    r_weight: Vec<f64>,
}

/// Serializable summary of a plan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanDescriptor {
    pub dim: u32,
    pub order: f64,
    pub r_max: f64,
    pub r_nodes: usize,
    pub config: HankelConfig,
}

impl HankelPlan {
    pub fn new(grid: Arc<RadialGrid>, config: HankelConfig) -> Result<Self> {
        if !(config.k_min > 0.0 && config.k_max > config.k_min && config.k_count >= 16) {
            return Err(Error::Grid(format!("invalid frequency grid {config:?}")));
        }
        let n = grid.dim() as f64;
        let order = 0.5 * n - 1.0;
        if order < 0.0 {
            return Err(Error::Grid("Hankel plan needs dimension >= 2".into()));
        }
        let log_step = (config.k_max / config.k_min).ln() / (config.k_count - 1) as f64;
        let k: Vec<f64> = (0..config.k_count).map(|i| config.k_min * (i as f64 * log_step).exp()).collect();
        let w = grid.quadrature_weights();
        let r = grid.nodes();
        let mut kernel = Vec::with_capacity(k.len() * r.len());
        for &kk in &k {
            let pre = kk.powf(-order);
            for (j, &rr) in r.iter().enumerate() {
                let v = if rr == 0.0 { 0.0 } else { pre * bessel_j(order, kk * rr) * rr.powf(0.5 * n) * w[j] };
                kernel.push(v);
            }
        }
        let r_weight = r.iter().map(|rr| rr.powf(0.5 * (n - 1.0))).collect();
        Ok(Self { grid, config, order, k: Arc::new(k), log_step, kernel, r_weight })
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn config(&self) -> &HankelConfig {
        &self.config
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn descriptor(&self) -> PlanDescriptor {
        PlanDescriptor {
            dim: self.grid.dim(),
            order: self.order,
            r_max: self.grid.r_max(),
            r_nodes: self.grid.len(),
            config: self.config,
        }
    }

    /// Relative weight of the field at the outer edge of the radial grid.
    pub fn radial_tail(&self, values: &[f64]) -> f64 {
        let mut peak = 0.0f64;
        for (v, w) in values.iter().zip(&self.r_weight) {
            peak = peak.max((v * w).abs());
        }
        if peak == 0.0 {
            return 0.0;
        }
        let last = values.len() - 1;
        (values[last] * self.r_weight[last]).abs() / peak
    }

    /// Forward transform of raw grid values without tail checks.
    pub fn forward_values(&self, values: &[f64]) -> Spectrum {
        let m = values.len();
        let out = self.kernel.chunks_exact(m).map(|row| row.iter().zip(values).map(|(a, b)| a * b).sum()).collect();
        Spectrum { k: self.k.clone(), log_step: self.log_step, dim: self.grid.dim(), values: out }
    }

    /// Forward transform; rejects fields that are not negligible at the outer radius.
    pub fn forward(&self, field: &RadialField) -> Result<Spectrum> {
        if !field.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch);
        }
        let tail = self.radial_tail(field.values());
        if tail > self.config.tail_tol {
            return Err(Error::QuadratureTail { tail, tol: self.config.tail_tol });
        }
        Ok(self.forward_values(field.values()))
    }

    /// Inverse transform back onto the plan's radial grid.
    pub fn inverse(&self, spec: &Spectrum) -> Result<RadialField> {
        if spec.k.len() != self.k.len() || spec.dim != self.grid.dim() {
            return Err(Error::GridMismatch);
        }
        let peak = spec
            .values
            .iter()
            .zip(spec.k.iter())
            .fold(0.0f64, |m, (v, k)| m.max((v * k.powf(0.5 * (spec.dim as f64 + 1.0))).abs()));
        let last = spec.k.len() - 1;
        let edge = [0, last]
            .iter()
            .map(|&i| (spec.values[i] * spec.k[i].powf(0.5 * (spec.dim as f64 + 1.0))).abs())
            .fold(0.0f64, f64::max);
        if peak > 0.0 && edge / peak > self.config.tail_tol {
            return Err(Error::QuadratureTail { tail: edge / peak, tol: self.config.tail_tol });
        }
        let n = self.grid.dim() as f64;
        let nu = self.order;
        let w: Vec<f64> = spec.log_weights().collect();
        let small = 1.0 / (2f64.powf(nu) * libm::tgamma(nu + 1.0));
        let values = self
            .grid
            .nodes()
            .iter()
            .map(|&r| {
                spec.k
                    .iter()
                    .zip(&spec.values)
                    .zip(&w)
                    .map(|((&k, &u), &wi)| {
                        // û(k) J_ν(kr) k^{n/2} r^{-ν} dk, with dk = k d(ln k)
                        let radial = if r == 0.0 { small * k.powf(nu) } else { bessel_j(nu, k * r) * r.powf(-nu) };
                        u * radial * k.powf(0.5 * n + 1.0) * wi
                    })
                    .sum()
            })
            .collect();
        RadialField::new(self.grid.clone(), values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_is_a_fixed_point() {
        for n in [3u32, 5, 7, 8] {
            let grid = Arc::new(RadialGrid::uniform(12.0, 600, n).unwrap());
            let plan = HankelPlan::new(grid.clone(), HankelConfig::default()).unwrap();
            let f = RadialField::from_fn(grid, |r| (-0.5 * r * r).exp());
            let s = plan.forward(&f).unwrap();
            for (k, v) in s.k().iter().zip(s.values()) {
                assert!((v - (-0.5 * k * k).exp()).abs() < 1e-11, "n={n} k={k} v={v}");
            }
        }
    }

    #[test]
    fn rejects_fields_cut_at_the_edge() {
        let grid = Arc::new(RadialGrid::uniform(3.0, 300, 5).unwrap());
        let plan = HankelPlan::new(grid.clone(), HankelConfig::default()).unwrap();
        let f = RadialField::from_fn(grid, |r| (-0.5 * r * r).exp());
        assert!(matches!(plan.forward(&f), Err(Error::QuadratureTail { .. })));
    }
}
