//! Power-series (Frobenius) solutions of the radial eigenvalue ODE at its
//! regular singular points `ρ = 0` and `ρ = 1`.
//!
//! The ODE `(1-ρ²)u'' + ((n-1)/ρ - 2(λ+3)ρ)u' + (V - (λ+2)(λ+3))u = 0` is
//! multiplied by `ρ` and written as `A(x)u'' + B(x)u' + E(x)u = 0` in the local
//! coordinate `x = ρ` or `x = 1 - ρ`, with `A(0) = 0`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{ModelParams, PotentialForm};

/// Taylor coefficients of `1 / (c0 + c1 x + c2 x²)`.
fn reciprocal_quadratic(c0: f64, c1: f64, c2: f64, len: usize) -> Vec<f64> {
    let mut q = vec![0.0; len];
    q[0] = 1.0 / c0;
    for k in 1..len {
        let mut s = c1 * q[k - 1];
        if k >= 2 {
            s += c2 * q[k - 2];
        }
        q[k] = -s / c0;
    }
    q
}

fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let len = a.len().min(b.len());
    (0..len).map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum()).collect()
}

/// Taylor coefficients of the potential `V` at `ρ = 0` (in `ρ`) and at `ρ = 1` (in `1 - ρ`).
#[derive(Debug, Clone)]
pub struct PotentialSeries {
    pub at_origin: Vec<f64>,
    pub at_one: Vec<f64>,
}

impl PotentialSeries {
    pub fn new(params: &ModelParams, form: PotentialForm, len: usize) -> Self {
        let build = |phi_den: (f64, f64, f64), rho2: &[f64]| -> Vec<f64> {
            let mut phi = reciprocal_quadratic(phi_den.0, phi_den.1, phi_den.2, len);
            phi.iter_mut().for_each(|c| *c *= params.alpha);
            let mut rho2 = rho2.to_vec();
            rho2.resize(len, 0.0);
            let sq = mul(&phi, &phi);
            let inner = match form {
                PotentialForm::Linearized => mul(&rho2, &sq),
                PotentialForm::Printed => mul(&rho2, &mul(&sq, &phi)),
            };
            let k = 3.0 * (params.nf() - 4.0);
            (0..len).map(|j| k * (2.0 * phi[j] - inner[j])).collect()
        };
        let b = params.beta;
        Self {
            at_origin: build((b, 0.0, 1.0), &[0.0, 0.0, 1.0]),
            at_one: build((1.0 + b, -2.0, 1.0), &[1.0, -2.0, 1.0]),
        }
    }
}

/// Coefficients of the analytic (index-zero) Frobenius solution with `c_0 = 1`.
fn analytic_solution(a: &[C64], b: &[C64], e: &[C64], len: usize) -> Result<Vec<C64>> {
    let mut c = vec![C64::new(0.0, 0.0); len];
    c[0] = C64::new(1.0, 0.0);
    let get = |v: &[C64], j: usize| if j < v.len() { v[j] } else { C64::new(0.0, 0.0) };
    for k in 1..len {
        let kf = k as f64;
        let den = (a[1] * (kf - 1.0) + b[0]) * kf;
        let mut s = C64::new(0.0, 0.0);
        for j in 2..a.len().min(k + 2) {
            let m = k + 1 - j;
            s += get(a, j) * (m as f64) * (m as f64 - 1.0) * c[m];
        }
        for j in 1..b.len().min(k + 1) {
            let m = k - j;
            s += get(b, j) * (m as f64) * c[m];
        }
        for j in 0..e.len().min(k) {
            s += get(e, j) * c[k - 1 - j];
        }
        if den.norm() == 0.0 {
            return Err(Error::ResonantIndex { lambda: "exact resonance".into(), dist: 0.0 });
        }
        c[k] = -s / den;
    }
    Ok(c)
}

/// Value and derivative of a power series at `x`, with a convergence check.
fn eval_series(c: &[C64], x: f64) -> Result<(C64, C64)> {
    let mut v = C64::new(0.0, 0.0);
    let mut d = C64::new(0.0, 0.0);
    let mut p = 1.0;
    let mut peak = 0.0f64;
    let mut last = 0.0;
    for (k, ck) in c.iter().enumerate() {
        if k >= 1 {
            d += ck * (k as f64) * (p / x);
        }
        let t = ck * p;
        v += t;
        peak = peak.max(t.norm());
        last = t.norm();
        p *= x;
    }
    if last > 1e-15 * peak.max(1e-300) && last > 1e-300 {
        return Err(Error::Integrator(format!("series not converged at x={x}: last term {last:.2e}")));
    }
    Ok((v, d))
}

/// Solution analytic at the origin, `(u, u')` at `rho`.
pub fn origin_solution(
    series: &PotentialSeries,
    params: &ModelParams,
    lambda: C64,
    rho: f64,
    len: usize,
) -> Result<(C64, C64)> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let a = [zero, one, zero, -one];
    let b = [one * (params.nf() - 1.0), zero, -2.0 * (lambda + 3.0)];
    let mut e: Vec<C64> = Vec::with_capacity(len);
    e.push(zero);
    for (j, v) in series.at_origin.iter().enumerate().take(len - 1) {
        let mut x = C64::new(*v, 0.0);
        if j == 0 {
            x -= (lambda + 2.0) * (lambda + 3.0);
        }
        e.push(x);
    }
    let c = analytic_solution(&a, &b, &e, len)?;
    eval_series(&c, rho)
}

/// Solution analytic at `ρ = 1`, `(u, u')` at `rho`.
pub fn light_cone_solution(
    series: &PotentialSeries,
    params: &ModelParams,
    lambda: C64,
    rho: f64,
    len: usize,
) -> Result<(C64, C64)> {
    let one = C64::new(1.0, 0.0);
    let l3 = lambda + 3.0;
    let a = [C64::new(0.0, 0.0), 2.0 * one, -3.0 * one, one];
    let b = [2.0 * l3 - (params.nf() - 1.0), -4.0 * l3, 2.0 * l3];
    let shifted: Vec<C64> = series
        .at_one
        .iter()
        .enumerate()
        .map(|(j, v)| if j == 0 { C64::new(*v, 0.0) - (lambda + 2.0) * l3 } else { C64::new(*v, 0.0) })
        .collect();
    let e: Vec<C64> = (0..len.min(shifted.len()))
        .map(|j| shifted[j] - if j >= 1 { shifted[j - 1] } else { C64::new(0.0, 0.0) })
        .collect();
    let c = analytic_solution(&a, &b, &e, len)?;
    let (v, d) = eval_series(&c, 1.0 - rho)?;
    Ok((v, -d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_series_matches_closed_form() {
        let p = ModelParams::new(5).unwrap();
        let s = PotentialSeries::new(&p, PotentialForm::Linearized, 80);
        for x in [0.1f64, 0.3, 0.5] {
            let v0: f64 = s.at_origin.iter().enumerate().map(|(k, c)| c * x.powi(k as i32)).sum();
            assert!((v0 - p.potential_with(x, PotentialForm::Linearized)).abs() < 1e-12);
            let v1: f64 = s.at_one.iter().enumerate().map(|(k, c)| c * x.powi(k as i32)).sum();
            assert!((v1 - p.potential_with(1.0 - x, PotentialForm::Linearized)).abs() < 1e-12);
        }
    }

    #[test]
    fn gauge_mode_is_reproduced_at_both_ends() {
        for d in [5, 6, 7] {
            let p = ModelParams::new(d).unwrap();
            let s = PotentialSeries::new(&p, PotentialForm::Linearized, 120);
            let lam = C64::new(1.0, 0.0);
            let (g0, _, _) = p.gauge_g(0.0);
            let (u, du) = origin_solution(&s, &p, lam, 0.4, 120).unwrap();
            let (g, g1, _) = p.gauge_g(0.4);
            assert!((u * g0 - g).norm() < 1e-12 && (du * g0 - g1).norm() < 1e-12, "d={d}");
            if d != 7 {
                let (g1v, _, _) = p.gauge_g(1.0);
                let (u, du) = light_cone_solution(&s, &p, lam, 0.6, 120).unwrap();
                let (g, g1, _) = p.gauge_g(0.6);
                assert!((u * g1v - g).norm() < 1e-12 && (du * g1v - g1).norm() < 1e-12, "d={d}");
            }
        }
    }
}
