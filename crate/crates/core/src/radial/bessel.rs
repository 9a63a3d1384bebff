//! Bessel functions of the first kind `J_ν(x)` for real order `ν >= 0`, `x >= 0`.
//!
//! Power series for small arguments, Miller's backward recurrence with the
//! Neumann-series normalization in the middle range, and Hankel's asymptotic
//! expansion for large arguments.

use crate::error::{Error, Result};

/// Largest argument for which accuracy is validated.
pub const X_VALIDATED: f64 = 1.0e4;

/// `J_ν(x)`; see [`bessel_j_checked`] for range checking.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    debug_assert!(nu >= 0.0 && x >= 0.0);
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if x <= 8.0 || x * x < 4.0 * (nu + 1.0) {
        series(nu, x)
    } else if x >= 30.0 + 0.6 * nu * nu {
        asymptotic(nu, x)
    } else {
        miller(nu, x)
    }
}

/// `J_ν(x)` with an error outside the validated range.
pub fn bessel_j_checked(nu: f64, x: f64) -> Result<f64> {
    if !(nu >= 0.0) || !(x >= 0.0) || x > X_VALIDATED {
        return Err(Error::OutOfRange { x, max: X_VALIDATED });
    }
    Ok(bessel_j(nu, x))
}

fn series(nu: f64, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = (0.5 * x).powf(nu) / libm::tgamma(nu + 1.0);
    let mut sum = term;
    for k in 1..300 {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let chi = x - (0.5 * nu + 0.25) * std::f64::consts::PI;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        a *= (mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
        if a.abs() > prev {
            break;
        }
        prev = a.abs();
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn miller(nu: f64, x: f64) -> f64 {
    let m = nu.floor() as usize;
    let nu0 = nu - m as f64;
    let top = (x.max(m as f64) + 30.0 + 10.0 * x.max(m as f64).sqrt()) as usize;
    let top = top + (top % 2);
    // j[k] ~ J_{nu0 + k}, unnormalized
    let mut jp1 = 0.0;
    let mut j = 1e-300;
    let mut wanted = 0.0;
    let mut norm = 0.0;
    // weights of the normalization sum (x/2)^{nu0} = Σ c_k J_{nu0+2k}
    let mut r = vec![0.0; top / 2 + 1];
    r[0] = libm::tgamma(nu0 + 1.0);
    if top / 2 >= 1 {
        r[1] = libm::tgamma(nu0 + 1.0);
    }
    for k in 1..top / 2 {
        r[k + 1] = r[k] * (nu0 + k as f64) / (k + 1) as f64;
    }
    let c = |k: usize| -> f64 {
        if k == 0 {
            r[0]
        } else {
            (nu0 + 2.0 * k as f64) * r[k]
        }
    };
    for k in (0..=top).rev() {
        if k == m {
            wanted = j;
        }
        if k % 2 == 0 {
            norm += c(k / 2) * j;
        }
        if k == 0 {
            break;
        }
        let jm1 = 2.0 * (nu0 + k as f64) / x * j - jp1;
        jp1 = j;
        j = jm1;
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            wanted *= 1e-250;
            norm *= 1e-250;
        }
    }
    wanted * (0.5 * x).powf(nu0) / norm
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    /// Spherical-type closed forms for half-integer orders.
    fn j_half(l: u32, x: f64) -> f64 {
        let pre = (2.0 / (std::f64::consts::PI * x)).sqrt();
        let (s, c) = x.sin_cos();
        match l {
            0 => pre * s,
            1 => pre * (s / x - c),
            2 => pre * ((3.0 / (x * x) - 1.0) * s - 3.0 * c / x),
            _ => unreachable!(),
        }
    }

    #[test]
    fn half_integer_orders_match_closed_forms() {
        for l in 0..3u32 {
            for k in 1..4000 {
                let x = 0.01 * k as f64 + 0.003;
                let exact = j_half(l, x);
                let got = bessel_j(l as f64 + 0.5, x);
                let tol = 1e-12 * (1.0 + x.powf(-(l as f64)));
                assert!((got - exact).abs() < tol, "l={l} x={x} got={got} exact={exact}");
            }
        }
    }

    #[test]
    fn reference_values() {
        // reference values from 30-digit arithmetic
        let cases = [
            (0.0, 1.0, 0.765197686557966551),
            (0.0, 10.0, -0.245935764451348335),
            (1.0, 10.0, 0.0434727461688614367),
            (2.0, 12.5, -0.173361463438782657),
            (3.0, 40.0, -0.126144815505820803),
            (5.0, 20.0, 0.151169767982394975),
            (2.5, 33.3, -0.12734251981160632),
            (4.5, 17.0, -0.187494699495252224),
        ];
        for (nu, x, exact) in cases {
            let got = bessel_j(nu, x);
            assert!((got - exact).abs() < 1e-13, "nu={nu} x={x} got={got}");
        }
    }

    #[test]
    fn checked_rejects_huge_arguments() {
        assert!(bessel_j_checked(1.0, 2e4).is_err());
        assert!(bessel_j_checked(1.0, 2e3).is_ok());
    }
}
