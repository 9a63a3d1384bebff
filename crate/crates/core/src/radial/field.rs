use std::sync::Arc;

use crate::error::{Error, Result};
use crate::radial::grid::{sphere_area, RadialGrid};

/// Samples of an even radial function on a [`RadialGrid`].
#[derive(Debug, Clone)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Grid(format!("{} values for a grid of {} nodes", values.len(), grid.len())));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let values = vec![0.0; grid.len()];
        Self { grid, values }
    }

    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn check_same_grid(&self, other: &RadialField) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `self + a * other`
    pub fn axpy(&self, a: f64, other: &RadialField) -> Result<RadialField> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| x + a * y).collect();
        Ok(Self { grid: self.grid.clone(), values })
    }

    pub fn scaled(&self, a: f64) -> RadialField {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|x| a * x).collect() }
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> RadialField {
        let values = self.grid.nodes().iter().zip(&self.values).map(|(&r, &u)| f(r, u)).collect();
        Self { grid: self.grid.clone(), values }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `L²(R^n)` norm of the radial function.
    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v * v).collect();
        (sphere_area(self.grid.dim()) * self.grid.integrate_radial(&sq)).sqrt()
    }

    /// Value at the origin, extrapolated from the nodes around it.
    pub fn origin_value(&self) -> f64 {
        interpolate_even(&self.grid, &self.values, 0.0).expect("origin is inside the grid")
    }

    /// Value at an arbitrary radius (including the origin) by degree-5
    /// Lagrange interpolation in the computational coordinate.
    pub fn interpolate(&self, rho: f64) -> Result<f64> {
        interpolate_even(&self.grid, &self.values, rho)
    }
}

/// Degree-5 Lagrange interpolation of even grid data at radius `rho`.
pub fn interpolate_even(grid: &RadialGrid, values: &[f64], rho: f64) -> Result<f64> {
    let r_max = grid.r_max();
    let rho = rho.abs();
    if !(rho <= r_max * (1.0 + 1e-12)) {
        return Err(Error::OutOfRange { x: rho, max: r_max });
    }
    let m = grid.len() as i64 - 1;
    let x = grid.index_of(rho).min(m as f64);
    let i = (x.floor() as i64).min(m - 1);
    let start = (i - 2).min(m - 5);
    let t = x - start as f64;
    let mut acc = 0.0;
    for a in 0..6i64 {
        let mut w = 1.0;
        for b in 0..6i64 {
            if b != a {
                w *= (t - b as f64) / (a - b) as f64;
            }
        }
        acc += w * crate::radial::diff::at_even(values, start + a);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_is_accurate_on_both_maps() {
        for grid in [RadialGrid::uniform(5.0, 200, 3).unwrap(), RadialGrid::sinh(50.0, 400, 2.0, 3).unwrap()] {
            let g = Arc::new(grid);
            let f = RadialField::from_fn(g.clone(), |r| (-r * r).exp());
            for k in 0..97 {
                let r = 0.031 * k as f64;
                let e = (f.interpolate(r).unwrap() - (-r * r).exp()).abs();
                assert!(e < 1e-7, "r={r} e={e}");
            }
            assert!(f.interpolate(g.r_max() * 1.01).is_err());
        }
    }

    #[test]
    fn l2_norm_of_gaussian() {
        let g = Arc::new(RadialGrid::uniform(10.0, 400, 3).unwrap());
        let f = RadialField::from_fn(g, |r| (-r * r / 2.0).exp());
        // ∫ e^{-r²} d³x = π^{3/2}
        let exact = std::f64::consts::PI.powf(0.75);
        assert!((f.l2_norm() - exact).abs() < 1e-12);
    }
}
