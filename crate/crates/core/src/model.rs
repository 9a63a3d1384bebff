//! Model constants, the explicit self-similar profile and the nonlinear terms
//! of the equivariant Yang-Mills equation in similarity variables.
//!
//! Conventions: `d` is the spatial dimension of the gauge field, the radial
//! wave operator acts as a Laplacian in `n = d + 2` dimensions, and the profile
//! is `φ(ρ) = α / (ρ² + β)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which bracket is used in the linearized potential.
///
/// `Linearized` is the derivative of the cubic nonlinearity at the profile.
/// `Printed` squares `φ` inside the bracket; it is kept only as a negative
/// control and is not a linearization of anything.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PotentialForm {
    Linearized,
    Printed,
}

impl Default for PotentialForm {
    fn default() -> Self {
        if cfg!(feature = "printed-potential") {
            PotentialForm::Printed
        } else {
            PotentialForm::Linearized
        }
    }
}

/// Dimension-dependent constants of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub d: u32,
    pub n: u32,
    pub alpha: f64,
    pub beta: f64,
}

impl ModelParams {
    pub fn new(d: u32) -> Result<Self> {
        if d < 5 {
            return Err(Error::Dimension(d));
        }
        let df = d as f64;
        let alpha = 2.0 * (1.0 + ((df - 4.0) / (3.0 * (df - 2.0))).sqrt());
        let beta = (2.0 * df - 8.0 + (3.0 * (df - 2.0) * (df - 4.0)).sqrt()) / 3.0;
        Ok(Self { d, n: d + 2, alpha, beta })
    }

    /// `n` as a float.
    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// Coefficient `n - 4` in front of the nonlinearity.
    fn k(&self) -> f64 {
        self.n as f64 - 4.0
    }

    pub fn phi(&self, rho: f64) -> f64 {
        self.alpha / (rho * rho + self.beta)
    }

    pub fn phi_d1(&self, rho: f64) -> f64 {
        let q = rho * rho + self.beta;
        -2.0 * self.alpha * rho / (q * q)
    }

    pub fn phi_d2(&self, rho: f64) -> f64 {
        let q = rho * rho + self.beta;
        -2.0 * self.alpha / (q * q) + 8.0 * self.alpha * rho * rho / (q * q * q)
    }

    /// Second component of the static solution, `φ1 = ρφ' + 2φ`.
    pub fn phi1(&self, rho: f64) -> f64 {
        rho * self.phi_d1(rho) + 2.0 * self.phi(rho)
    }

    /// Profile pair `(φ, φ1)` at `ρ`.
    pub fn profile(&self, rho: f64) -> (f64, f64) {
        (self.phi(rho), self.phi1(rho))
    }

    /// Residual of the self-similar profile ODE evaluated on the closed form.
    pub fn profile_ode_residual(&self, rho: f64) -> f64 {
        let p = self.phi(rho);
        let p1 = self.phi_d1(rho);
        let p2 = self.phi_d2(rho);
        (1.0 - rho * rho) * p2 + ((self.nf() - 1.0) / rho - 6.0 * rho) * p1 - 6.0 * p
            + self.k() * p * p * (3.0 - rho * rho * p)
    }

    /// Linearized potential `V(ρ)` in the default form.
    pub fn potential(&self, rho: f64) -> f64 {
        self.potential_with(rho, PotentialForm::default())
    }

    pub fn potential_with(&self, rho: f64, form: PotentialForm) -> f64 {
        let p = self.phi(rho);
        match form {
            PotentialForm::Linearized => 3.0 * self.k() * p * (2.0 - rho * rho * p),
            PotentialForm::Printed => 3.0 * self.k() * p * (2.0 - rho * rho * p * p),
        }
    }

    /// Full cubic nonlinearity `N0(u) = (n-4) u² (3 - ρ² u)`.
    pub fn n0(&self, rho: f64, u: f64) -> f64 {
        self.k() * u * u * (3.0 - rho * rho * u)
    }

    /// Nonlinear remainder around the profile, `N0(φ+u) - N0(φ) - V u`.
    pub fn remainder(&self, rho: f64, u: f64) -> f64 {
        let p = self.phi(rho);
        self.k() * u * u * (3.0 - 3.0 * rho * rho * p - rho * rho * u)
    }

    /// Gauge eigenfunction `g = (ρ²+β)^-2` of the linearized operator at `λ = 1`,
    /// returned as the pair `(g, ρg' + 3g)`.
    pub fn gauge_mode(&self, rho: f64) -> (f64, f64) {
        let (g, g1, _) = self.gauge_g(rho);
        (g, rho * g1 + 3.0 * g)
    }

    /// `g` and its first two derivatives.
    pub fn gauge_g(&self, rho: f64) -> (f64, f64, f64) {
        let q = rho * rho + self.beta;
        let g = 1.0 / (q * q);
        let g1 = -4.0 * rho / (q * q * q);
        let g2 = -4.0 / (q * q * q) + 24.0 * rho * rho / (q * q * q * q);
        (g, g1, g2)
    }

    /// Residual of the radial eigenvalue ODE for `u` with derivatives `u1`, `u2`
    /// at spectral parameter `lambda`, using potential form `form`.
    pub fn eigen_ode_residual(&self, rho: f64, lambda: f64, (u, u1, u2): (f64, f64, f64), form: PotentialForm) -> f64 {
        (1.0 - rho * rho) * u2 + ((self.nf() - 1.0) / rho - 2.0 * (lambda + 3.0) * rho) * u1
            - (lambda + 2.0) * (lambda + 3.0) * u
            + self.potential_with(rho, form) * u
    }

    /// Residual of the eigenvalue equation for `g` at `λ = 1` with the default potential.
    pub fn gauge_mode_residual(&self, rho: f64) -> f64 {
        self.eigen_ode_residual(rho, 1.0, self.gauge_g(rho), PotentialForm::default())
    }

    /// Exact blowup solution `u_T(t, r) = (T-t)^-2 φ(r/(T-t))` and its time derivative.
    pub fn blowup_solution(&self, blowup: f64, t: f64, r: f64) -> Result<(f64, f64)> {
        if !(t < blowup) {
            return Err(Error::PastBlowup { t, blowup });
        }
        let s = blowup - t;
        let rho = r / s;
        Ok((self.phi(rho) / (s * s), self.phi1(rho) / (s * s * s)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_dimensions() {
        for d in 0..5 {
            assert_eq!(ModelParams::new(d), Err(Error::Dimension(d)));
        }
    }

    #[test]
    fn known_constants() {
        let p = ModelParams::new(5).unwrap();
        assert!((p.alpha - 8.0 / 3.0).abs() < 1e-15);
        assert!((p.beta - 5.0 / 3.0).abs() < 1e-15);
        let p = ModelParams::new(7).unwrap();
        assert!((p.alpha - (2.0 + 2.0 / 5f64.sqrt())).abs() < 1e-14);
        assert!((p.beta - (2.0 + 5f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn blowup_solution_rejects_late_times() {
        let p = ModelParams::new(5).unwrap();
        assert!(p.blowup_solution(1.0, 1.0, 0.3).is_err());
        assert!(p.blowup_solution(1.0, 1.5, 0.3).is_err());
    }
}
