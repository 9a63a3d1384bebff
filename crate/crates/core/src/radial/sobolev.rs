//! Homogeneous Sobolev norms of radial functions via the Hankel transform.
//!
//! `‖u‖²_{Ḣ^s(R^n)} = |S^{n-1}| ∫ k^{2s+n-1} |û(k)|² dk`. Pairs `(u1, u2)` are
//! measured in `Ḣ^s × Ḣ^{s-1}` with the energy-type norm
//! `(‖u1‖²_{Ḣ^s} + ‖u2‖²_{Ḣ^{s-1}})^{1/2}`, and the intersection space of two
//! such levels uses the root of the sum of both squares.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::field::RadialField;
use crate::radial::grid::sphere_area;
use crate::radial::hankel::{HankelPlan, Spectrum};

/// Exponents `(s1, s2)` of the intersection space `Ḣ^{s1} ∩ Ḣ^{s2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub s1: f64,
    pub s2: f64,
}

impl NormSpec {
    pub fn new(s1: f64, s2: f64) -> Result<Self> {
        if !(s1 >= 0.0 && s2 >= s1) {
            return Err(Error::NormSpec(format!("need 0 <= s1 <= s2, got ({s1}, {s2})")));
        }
        Ok(Self { s1, s2 })
    }

    /// Exponents used for evolution pairs in `R^n`: `((n-3)/2, n/2-1)`.
    pub fn evolution(n: u32) -> Self {
        let nf = n as f64;
        Self { s1: 0.5 * (nf - 3.0), s2: 0.5 * nf - 1.0 }
    }

    fn check_pair(&self) -> Result<()> {
        if self.s1 < 1.0 {
            return Err(Error::NormSpec(format!("pair norms need s1 >= 1, got {}", self.s1)));
        }
        Ok(())
    }
}

/// Squared `Ḣ^s` norm of a spectrum together with the relative weight of the
/// integrand at the ends of the frequency grid.
pub fn spectrum_norm_sq(spec: &Spectrum, s: f64) -> (f64, f64) {
    let n = spec.dim() as f64;
    let mut total = 0.0;
    let mut peak = 0.0f64;
    let mut edge = 0.0f64;
    let last = spec.k().len() - 1;
    for (i, ((k, u), w)) in spec.k().iter().zip(spec.values()).zip(spec.log_weights()).enumerate() {
        let integrand = k.powf(2.0 * s + n) * u * u;
        total += integrand * w;
        peak = peak.max(integrand);
        if i == 0 || i == last {
            edge = edge.max(integrand);
        }
    }
    let tail = if peak > 0.0 { edge / peak } else { 0.0 };
    (sphere_area(spec.dim()) * total, tail)
}

/// Squared `Ḣ^s` norms of one field at several exponents, sharing one transform.
pub fn sobolev_norms_sq(plan: &HankelPlan, field: &RadialField, s: &[f64]) -> Result<Vec<f64>> {
    let spec = plan.forward(field)?;
    s.iter()
        .map(|&si| {
            if si < 0.0 {
                return Err(Error::NormSpec(format!("negative exponent {si}")));
            }
            let (v, tail) = spectrum_norm_sq(&spec, si);
            if tail > plan.config().tail_tol {
                return Err(Error::QuadratureTail { tail, tol: plan.config().tail_tol });
            }
            Ok(v)
        })
        .collect()
}

/// `‖u‖_{Ḣ^s}`.
pub fn sobolev_norm(plan: &HankelPlan, field: &RadialField, s: f64) -> Result<f64> {
    Ok(sobolev_norms_sq(plan, field, &[s])?[0].sqrt())
}

/// `(‖u‖²_{Ḣ^{s1}} + ‖u‖²_{Ḣ^{s2}})^{1/2}`.
pub fn intersection_norm(plan: &HankelPlan, field: &RadialField, spec: NormSpec) -> Result<f64> {
    let v = sobolev_norms_sq(plan, field, &[spec.s1, spec.s2])?;
    Ok((v[0] + v[1]).sqrt())
}

/// Squared pair norms at both levels of `spec`, `[E_{s1}, E_{s2}]`.
pub fn pair_energies(plan: &HankelPlan, u1: &RadialField, u2: &RadialField, spec: NormSpec) -> Result<[f64; 2]> {
    spec.check_pair()?;
    u1.check_same_grid(u2)?;
    let a = sobolev_norms_sq(plan, u1, &[spec.s1, spec.s2])?;
    let b = sobolev_norms_sq(plan, u2, &[spec.s1 - 1.0, spec.s2 - 1.0])?;
    Ok([a[0] + b[0], a[1] + b[1]])
}

/// Norm of the pair `(u1, u2)` in `(Ḣ^{s1} × Ḣ^{s1-1}) ∩ (Ḣ^{s2} × Ḣ^{s2-1})`.
pub fn pair_norm(plan: &HankelPlan, u1: &RadialField, u2: &RadialField, spec: NormSpec) -> Result<f64> {
    let e = pair_energies(plan, u1, u2, spec)?;
    Ok((e[0] + e[1]).sqrt())
}

/// `sup_ρ w(ρ) |u(ρ)|` over the grid nodes.
pub fn weighted_sup(field: &RadialField, weight: impl Fn(f64) -> f64) -> f64 {
    field.grid().nodes().iter().zip(field.values()).fold(0.0, |m, (&r, &u)| m.max((weight(r) * u).abs()))
}

/// `‖u(λ·)‖_{Ḣ^s} = λ^{s - n/2} ‖u‖_{Ḣ^s}`: the factor applied to a norm under dilation.
pub fn dilation_factor(lambda: f64, s: f64, n: u32) -> f64 {
    lambda.powf(s - 0.5 * n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::grid::RadialGrid;
    use crate::radial::hankel::HankelConfig;
    use std::sync::Arc;

    #[test]
    fn rejects_bad_specs() {
        assert!(NormSpec::new(2.0, 1.0).is_err());
        assert!(NormSpec::new(-0.5, 1.0).is_err());
        assert!(NormSpec::new(2.0, 2.5).is_ok());
    }

    #[test]
    fn dilation_law_holds_numerically() {
        let grid = Arc::new(RadialGrid::uniform(14.0, 700, 7).unwrap());
        let plan = HankelPlan::new(grid.clone(), HankelConfig::default()).unwrap();
        let f = |r: f64| (-(r - 1.0).powi(2)).exp() + (-(r + 1.0).powi(2)).exp();
        let u = RadialField::from_fn(grid.clone(), f);
        for lambda in [0.5, 2.0] {
            let ul = RadialField::from_fn(grid.clone(), |r| f(lambda * r));
            for s in [0.0, 1.0, 2.0, 2.5] {
                let a = sobolev_norm(&plan, &ul, s).unwrap();
                let b = dilation_factor(lambda, s, 7) * sobolev_norm(&plan, &u, s).unwrap();
                assert!((a / b - 1.0).abs() < 1e-8, "lambda={lambda} s={s} {a} {b}");
            }
        }
    }
}
