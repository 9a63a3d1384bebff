//! Adaptive Dormand-Prince 5(4) integration of small complex systems.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// difference between 5th and embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type State = [C64; 2];

fn comb(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..2 {
            out[i] += k[i] * (h * c);
        }
    }
    out
}

/// Integrates `y' = f(x, y)` from `x0` to `x1` (either direction) with mixed
/// absolute/relative tolerance `tol`.
pub fn dopri5(f: impl Fn(f64, &State) -> State, x0: f64, x1: f64, y0: State, tol: f64) -> Result<State> {
    let span = x1 - x0;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut x = x0;
    let mut y = y0;
    let mut h = 0.01 * span.abs();
    let mut k1 = f(x, &y);
    for _ in 0..100_000 {
        let remaining = (x1 - x) * dir;
        if remaining <= 1e-15 * span.abs() {
            return Ok(y);
        }
        h = h.min(remaining);
        let hs = h * dir;
        let k2 = f(x + A21 * hs, &comb(&y, hs, &[(A21, &k1)]));
        let k3 = f(x + 0.3 * hs, &comb(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(x + 0.8 * hs, &comb(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(x + 8.0 / 9.0 * hs, &comb(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(x + hs, &comb(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y_new = comb(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(x + hs, &y_new);
        let mut err = 0.0f64;
        for i in 0..2 {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * hs;
            let scale = tol * (1.0 + y[i].norm().max(y_new[i].norm()));
            err = err.max(e.norm() / scale);
        }
        if !err.is_finite() {
            return Err(Error::Integrator(format!("non-finite state near x={x}")));
        }
        if err <= 1.0 {
            x += hs;
            y = y_new;
            k1 = k7;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < 1e-14 * span.abs() {
            return Err(Error::Integrator(format!("step size underflow near x={x}")));
        }
    }
    Err(Error::Integrator("too many steps".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_complex_oscillator() {
        // u'' = -ω² u with complex ω
        let w = C64::new(2.0, 0.5);
        let f = |_x: f64, y: &State| [y[1], -w * w * y[0]];
        let y = dopri5(f, 0.0, 1.5, [C64::new(1.0, 0.0), C64::new(0.0, 0.0)], 1e-12).unwrap();
        let exact = (w * 1.5).cos();
        assert!((y[0] - exact).norm() < 1e-10);
        let back = dopri5(f, 1.5, 0.0, y, 1e-12).unwrap();
        assert!((back[0] - C64::new(1.0, 0.0)).norm() < 1e-10);
    }
}
