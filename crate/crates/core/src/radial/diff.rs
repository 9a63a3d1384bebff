//! Fourth-order finite differences for even radial functions.
//!
//! Interior nodes use centered five-point stencils in the computational
//! coordinate, nodes next to the origin use ghost values from even
//! reflection across it, and the two outermost nodes use one-sided six-point
//! stencils.
//! On mapped grids the chain rule converts `x`-derivatives to `ρ`-derivatives.

use crate::error::{Error, Result};
use crate::radial::field::RadialField;
use crate::radial::grid::{GridMap, RadialGrid};

/// Value at node `i`, continued evenly across the origin (`u_{-1-i} = u_i`).
#[inline]
pub(crate) fn at_even(u: &[f64], i: i64) -> f64 {
    if i >= 0 {
        u[i as usize]
    } else {
        u[(-1 - i) as usize]
    }
}

/// First derivative in the computational coordinate.
fn dx1(grid: &RadialGrid, u: &[f64], out: &mut [f64]) {
    let m = grid.len() - 1;
    let c = 1.0 / (12.0 * grid.hx());
    for i in 0..2 {
        let k = i as i64;
        out[i] = c * (at_even(u, k - 2) - 8.0 * at_even(u, k - 1) + 8.0 * u[i + 1] - u[i + 2]);
    }
    for i in 2..m - 1 {
        out[i] = c * (u[i - 2] - 8.0 * u[i - 1] + 8.0 * u[i + 1] - u[i + 2]);
    }
    let inv = 1.0 / grid.hx();
    for (row, i) in [m - 1, m].into_iter().enumerate() {
        let w = &grid.edge_d1[row];
        out[i] = inv * (0..6).map(|k| w[k] * u[m - 5 + k]).sum::<f64>();
    }
}

/// Second derivative in the computational coordinate.
fn dx2(grid: &RadialGrid, u: &[f64], out: &mut [f64]) {
    let m = grid.len() - 1;
    let h2 = grid.hx() * grid.hx();
    let c = 1.0 / (12.0 * h2);
    for i in 0..2 {
        let k = i as i64;
        out[i] = c * (-at_even(u, k - 2) + 16.0 * at_even(u, k - 1) - 30.0 * u[i] + 16.0 * u[i + 1] - u[i + 2]);
    }
    for i in 2..m - 1 {
        out[i] = c * (-u[i - 2] + 16.0 * u[i - 1] - 30.0 * u[i] + 16.0 * u[i + 1] - u[i + 2]);
    }
    for (row, i) in [m - 1, m].into_iter().enumerate() {
        let w = &grid.edge_d2[row];
        out[i] = (0..6).map(|k| w[k] * u[m - 5 + k]).sum::<f64>() / h2;
    }
}

/// `u_ρ` written into `out`.
pub fn d1_into(grid: &RadialGrid, u: &[f64], out: &mut [f64]) {
    dx1(grid, u, out);
    if let GridMap::Sinh { .. } = grid.map() {
        for (o, j) in out.iter_mut().zip(grid.jac()) {
            *o /= j;
        }
    }
}

/// `u_ρρ` written into `out`; `d1` must hold `u_ρ`.
pub fn d2_into(grid: &RadialGrid, u: &[f64], d1: &[f64], out: &mut [f64]) {
    dx2(grid, u, out);
    if let GridMap::Sinh { .. } = grid.map() {
        for i in 0..out.len() {
            let j = grid.jac()[i];
            out[i] = (out[i] - grid.jac2()[i] * d1[i]) / (j * j);
        }
    }
}

/// Radial Laplacian `u'' + (n-1)/ρ u'` given first and second derivatives.
pub fn laplacian_from(grid: &RadialGrid, d1: &[f64], d2: &[f64], out: &mut [f64]) {
    let n1 = grid.dim() as f64 - 1.0;
    let r = grid.nodes();
    for i in 0..out.len() {
        out[i] = d2[i] + n1 / r[i] * d1[i];
    }
}

/// Derivative of order 1 or 2 of an even field.
pub fn derivative(field: &RadialField, order: u32) -> Result<RadialField> {
    let grid = field.grid();
    let u = field.values();
    let mut d1 = vec![0.0; u.len()];
    d1_into(grid, u, &mut d1);
    match order {
        1 => RadialField::new(grid.clone(), d1),
        2 => {
            let mut d2 = vec![0.0; u.len()];
            d2_into(grid, u, &d1, &mut d2);
            RadialField::new(grid.clone(), d2)
        }
        k => Err(Error::DerivativeOrder(k)),
    }
}

/// Radial Laplacian in `R^n`, `n` taken from the grid.
pub fn laplacian(field: &RadialField) -> RadialField {
    let grid = field.grid();
    let u = field.values();
    let mut d1 = vec![0.0; u.len()];
    let mut d2 = vec![0.0; u.len()];
    let mut out = vec![0.0; u.len()];
    d1_into(grid, u, &mut d1);
    d2_into(grid, u, &d1, &mut d2);
    laplacian_from(grid, &d1, &d2, &mut out);
    RadialField::new(grid.clone(), out).expect("same grid")
}

/// Scaling derivative `ρ u'`.
pub fn scaling_derivative(field: &RadialField) -> RadialField {
    let grid = field.grid();
    let mut d1 = vec![0.0; field.values().len()];
    d1_into(grid, field.values(), &mut d1);
    for (o, r) in d1.iter_mut().zip(grid.nodes()) {
        *o *= r;
    }
    RadialField::new(grid.clone(), d1).expect("same grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn exact_on_even_quartics() {
        let g = Arc::new(RadialGrid::uniform(2.0, 32, 5).unwrap());
        let f = RadialField::from_fn(g, |r| 1.0 - 2.0 * r * r + 0.5 * r.powi(4));
        let d1 = derivative(&f, 1).unwrap();
        let d2 = derivative(&f, 2).unwrap();
        let lap = laplacian(&f);
        for (i, &r) in f.grid().nodes().iter().enumerate() {
            assert!((d1.values()[i] - (-4.0 * r + 2.0 * r.powi(3))).abs() < 1e-10);
            assert!((d2.values()[i] - (-4.0 + 6.0 * r * r)).abs() < 1e-9);
            // Δ r^k = k(k+n-2) r^{k-2}
            let exact = -2.0 * 2.0 * 5.0 + 0.5 * 4.0 * 7.0 * r * r;
            assert!((lap.values()[i] - exact).abs() < 1e-9, "i={i}");
        }
    }

    #[test]
    fn rejects_third_order() {
        let g = Arc::new(RadialGrid::uniform(2.0, 32, 5).unwrap());
        let f = RadialField::zeros(g);
        assert_eq!(derivative(&f, 3).unwrap_err(), Error::DerivativeOrder(3));
    }
}
