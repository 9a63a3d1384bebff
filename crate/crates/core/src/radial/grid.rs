use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mapping from the uniform computational coordinate `x` to the radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridMap {
    /// `ρ = x`
    Uniform,
    /// `ρ = L sinh(x / L)`: uniform near the origin, geometric far out.
    Sinh { scale: f64 },
}

impl GridMap {
    fn rho(&self, x: f64) -> f64 {
        match *self {
            GridMap::Uniform => x,
            GridMap::Sinh { scale } => scale * (x / scale).sinh(),
        }
    }

    fn x(&self, rho: f64) -> f64 {
        match *self {
            GridMap::Uniform => rho,
            GridMap::Sinh { scale } => scale * (rho / scale).asinh(),
        }
    }

    fn jac(&self, x: f64) -> (f64, f64) {
        match *self {
            GridMap::Uniform => (1.0, 0.0),
            GridMap::Sinh { scale } => ((x / scale).cosh(), (x / scale).sinh() / scale),
        }
    }
}

/// Minimum number of nodes a grid may have.
pub const MIN_NODES: usize = 16;

/// Cell-centred radial grid `0 < ρ_0 < ρ_1 < ... < ρ_{M-1} = ρ_max`: the image of
/// `x_i = (i + 1/2) h` under a smooth odd map. The origin is not a node; even
/// functions are continued across it by `u_{-1-i} = u_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    dim: u32,
    map: GridMap,
    hx: f64,
    nodes: Vec<f64>,
    jac: Vec<f64>,
    jac2: Vec<f64>,
    pub(crate) edge_d1: [[f64; 6]; 2],
    pub(crate) edge_d2: [[f64; 6]; 2],
}

impl RadialGrid {
    /// Uniform grid with `nodes` points reaching `r_max`, for radial functions on `R^dim`.
    pub fn uniform(r_max: f64, nodes: usize, dim: u32) -> Result<Self> {
        Self::build(r_max, nodes, dim, GridMap::Uniform)
    }

    /// Sinh-mapped grid: spacing close to `r_max`-independent near the origin,
    /// growing proportionally to `ρ` far out.
    pub fn sinh(r_max: f64, nodes: usize, scale: f64, dim: u32) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::Grid(format!("sinh scale must be positive, got {scale}")));
        }
        Self::build(r_max, nodes, dim, GridMap::Sinh { scale })
    }

    pub fn with_map(r_max: f64, nodes: usize, dim: u32, map: GridMap) -> Result<Self> {
        match map {
            GridMap::Uniform => Self::uniform(r_max, nodes, dim),
            GridMap::Sinh { scale } => Self::sinh(r_max, nodes, scale, dim),
        }
    }

    fn build(r_max: f64, count: usize, dim: u32, map: GridMap) -> Result<Self> {
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::Grid(format!("r_max must be positive, got {r_max}")));
        }
        if count < MIN_NODES {
            return Err(Error::Grid(format!("need at least {MIN_NODES} nodes, got {count}")));
        }
        if dim == 0 {
            return Err(Error::Grid("dimension must be positive".into()));
        }
        let x_max = map.x(r_max);
        let hx = x_max / (count as f64 - 0.5);
        let mut nodes = Vec::with_capacity(count);
        let mut jac = Vec::with_capacity(count);
        let mut jac2 = Vec::with_capacity(count);
        for i in 0..count {
            let x = (i as f64 + 0.5) * hx;
            nodes.push(if i + 1 == count { r_max } else { map.rho(x) });
            let (j1, j2) = map.jac(x);
            jac.push(j1);
            jac2.push(j2);
        }
        let offsets: Vec<f64> = (0..6).map(|k| k as f64 - 5.0).collect();
        let mut edge_d1 = [[0.0; 6]; 2];
        let mut edge_d2 = [[0.0; 6]; 2];
        // row 0: second-to-last node (z = -1), row 1: last node (z = 0), six-node stencil
        for (row, z) in [-1.0, 0.0].iter().enumerate() {
            let w = fornberg(*z, &offsets, 2);
            for k in 0..6 {
                edge_d1[row][k] = w[1][k];
                edge_d2[row][k] = w[2][k];
            }
        }
        Ok(Self { dim, map, hx, nodes, jac, jac2, edge_d1, edge_d2 })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn map(&self) -> GridMap {
        self.map
    }

    /// Number of nodes `M`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Step of the computational coordinate.
    pub fn hx(&self) -> f64 {
        self.hx
    }

    /// Smallest physical spacing (at the origin).
    pub fn min_spacing(&self) -> f64 {
        self.nodes[1] - self.nodes[0]
    }

    /// Fractional node index of radius `rho` (`x / h - 1/2`).
    pub fn index_of(&self, rho: f64) -> f64 {
        self.map.x(rho) / self.hx - 0.5
    }

    /// `dρ/dx` at each node.
    pub fn jac(&self) -> &[f64] {
        &self.jac
    }

    /// `d²ρ/dx²` at each node.
    pub fn jac2(&self) -> &[f64] {
        &self.jac2
    }

    /// Computational coordinate of radius `rho`.
    pub fn x_of(&self, rho: f64) -> f64 {
        self.map.x(rho)
    }

    /// Midpoint weights for `∫_0^{ρ_max} f dρ` in the computational coordinate
    /// (half weight on the last node, which sits on the boundary).
    pub fn quadrature_weights(&self) -> Vec<f64> {
        let last = self.nodes.len() - 1;
        (0..=last)
            .map(|i| {
                let w = self.hx * self.jac[i];
                if i == last {
                    0.5 * w
                } else {
                    w
                }
            })
            .collect()
    }

    /// `∫_0^{ρ_max} f(ρ) ρ^{n-1} dρ`.
    pub fn integrate_radial(&self, values: &[f64]) -> f64 {
        let n1 = self.dim as i32 - 1;
        self.quadrature_weights().iter().zip(&self.nodes).zip(values).map(|((w, r), f)| w * r.powi(n1) * f).sum()
    }

    /// `true` if the two grids have the same nodes and dimension.
    pub fn same_as(&self, other: &RadialGrid) -> bool {
        std::ptr::eq(self, other) || (self.dim == other.dim && self.map == other.map && self.nodes == other.nodes)
    }
}

/// Finite-difference weights at `z` for nodes `x`, derivative orders `0..=m`.
pub fn fornberg(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let npts = x.len();
    let mut c = vec![vec![0.0; npts]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..npts {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// `|S^{n-1}|`, the area of the unit sphere in `R^n`.
pub fn sphere_area(n: u32) -> f64 {
    let h = n as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(h) / libm::tgamma(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_reproduces_centered_stencil() {
        let x = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let w = fornberg(0.0, &x, 2);
        let d1 = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
        let d2 = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
        for k in 0..5 {
            assert!((w[1][k] - d1[k]).abs() < 1e-14);
            assert!((w[2][k] - d2[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_small_grids() {
        assert!(RadialGrid::uniform(1.0, 8, 3).is_err());
        assert!(RadialGrid::uniform(1.0, 0, 3).is_err());
        assert!(RadialGrid::uniform(-1.0, 64, 3).is_err());
        assert!(RadialGrid::sinh(10.0, 64, 0.0, 3).is_err());
    }

    #[test]
    fn sinh_grid_endpoints() {
        let g = RadialGrid::sinh(500.0, 400, 3.0, 7).unwrap();
        assert!(g.nodes()[0] > 0.0);
        assert_eq!(g.r_max(), 500.0);
        assert!((g.index_of(g.nodes()[17]) - 17.0).abs() < 1e-9);
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * std::f64::consts::PI).abs() < 1e-13);
    }
}
