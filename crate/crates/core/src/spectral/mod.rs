//! Eigenvalues of the linearized operator around the self-similar profile.
//!
//! An eigenvalue is a `λ` for which the solution analytic at `ρ = 0` is also
//! analytic at `ρ = 1`. Both Frobenius solutions are seeded from power series
//! near their singular points, continued to a matching point with an adaptive
//! integrator, and compared through their Wronskian. The Wronskian is scaled by
//! Abel's factor so that it does not depend on the matching point, and
//! multiplied by the linear factors whose zeros are the resonant `λ` where the
//! Frobenius recursion at `ρ = 1` divides by zero; the result is analytic in
//! the scanned region and its zeros are counted with the argument principle.

pub mod frobenius;
pub mod ode;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, PotentialForm};
use frobenius::{light_cone_solution, origin_solution, PotentialSeries};

/// Numerical settings of the eigenvalue probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub series_terms: usize,
    /// Where the series at the origin is evaluated.
    pub seed_origin: f64,
    /// Where the series at `ρ = 1` is evaluated.
    pub seed_light_cone: f64,
    pub matching_point: f64,
    pub ode_tol: f64,
    /// Minimal distance of the Frobenius index `(n-5)/2 - λ` from the integers.
    pub resonance_guard: f64,
    /// Radius of the circle used to evaluate near resonant points.
    pub guard_radius: f64,
    /// Resonances `λ_k` below this value are not compensated.
    pub compensation_floor: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            series_terms: 120,
            seed_origin: 0.25,
            seed_light_cone: 0.75,
            matching_point: 0.5,
            ode_tol: 1e-12,
            resonance_guard: 0.05,
            guard_radius: 0.1,
            compensation_floor: -3.5,
        }
    }
}

/// Eigenvalue probe for one dimension.
#[derive(Debug, Clone)]
pub struct EigenProbe {
    params: ModelParams,
    form: PotentialForm,
    config: ProbeConfig,
    series: PotentialSeries,
    resonances: Vec<f64>,
}

impl EigenProbe {
    pub fn new(params: ModelParams, form: PotentialForm, config: ProbeConfig) -> Self {
        let series = PotentialSeries::new(&params, form, config.series_terms);
        let top = 0.5 * (params.nf() - 5.0);
        let resonances = (1..).map(|k| top - k as f64).take_while(|l| *l >= config.compensation_floor).collect();
        Self { params, form, config, series, resonances }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn form(&self) -> PotentialForm {
        self.form
    }

    pub fn config(&self) -> &ProbeConfig {
        &self.config
    }

    /// Distance of the Frobenius index at `ρ = 1` from the nearest non-negative integer.
    pub fn resonance_distance(&self, lambda: C64) -> f64 {
        let idx = C64::new(0.5 * (self.params.nf() - 5.0), 0.0) - lambda;
        let k = idx.re.round().max(0.0);
        (idx - k).norm()
    }

    fn v(&self, rho: f64) -> f64 {
        self.params.potential_with(rho, self.form)
    }

    /// Matching-point independent, resonance-compensated Wronskian.
    /// Fails within the resonance guard.
    pub fn wronskian(&self, lambda: C64) -> Result<C64> {
        let dist = self.resonance_distance(lambda);
        if dist < self.config.resonance_guard {
            return Err(Error::ResonantIndex { lambda: format!("{lambda}"), dist });
        }
        self.wronskian_raw(lambda)
    }

    /// Wronskian evaluated everywhere; inside the resonance guard the value is
    /// the mean over a surrounding circle, which equals the value of the
    /// analytic continuation.
    pub fn wronskian_regular(&self, lambda: C64) -> Result<C64> {
        if self.resonance_distance(lambda) >= self.config.resonance_guard {
            return self.wronskian_raw(lambda);
        }
        let m = 32;
        let r = self.config.guard_radius;
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..m {
            let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / m as f64;
            acc += self.wronskian_raw(lambda + C64::from_polar(r, th))?;
        }
        Ok(acc / m as f64)
    }

    fn wronskian_raw(&self, lambda: C64) -> Result<C64> {
        let c = &self.config;
        let p = &self.params;
        let len = c.series_terms;
        let (u0, du0) = origin_solution(&self.series, p, lambda, c.seed_origin, len)?;
        let (u1, du1) = light_cone_solution(&self.series, p, lambda, c.seed_light_cone, len)?;
        let n1 = p.nf() - 1.0;
        let rhs = |rho: f64, y: &[C64; 2]| -> [C64; 2] {
            let pp = 1.0 - rho * rho;
            let q = n1 / rho - 2.0 * (lambda + 3.0) * rho;
            let r = self.v(rho) - (lambda + 2.0) * (lambda + 3.0);
            [y[1], -(q * y[1] + r * y[0]) / pp]
        };
        let rm = c.matching_point;
        let a = ode::dopri5(rhs, c.seed_origin, rm, [u0, du0], c.ode_tol)?;
        let b = ode::dopri5(rhs, c.seed_light_cone, rm, [u1, du1], c.ode_tol)?;
        let w = a[0] * b[1] - a[1] * b[0];
        let abel = (C64::new((1.0 - rm * rm).ln(), 0.0) * (lambda + 3.0 - 0.5 * n1)).exp() * rm.powf(n1);
        let comp = self.resonances.iter().fold(C64::new(1.0, 0.0), |acc, lk| acc * (lambda - lk));
        Ok(w * abel * comp)
    }

    /// Winding number of the Wronskian along a closed path `t ∈ [0,1] -> λ(t)`.
    pub fn winding(&self, path: &dyn Fn(f64) -> C64, samples: usize) -> Result<f64> {
        let f = |t: f64| self.wronskian_regular(path(t));
        let mut total = 0.0;
        let mut prev_t = 0.0;
        let mut prev = f(0.0)?;
        let first = prev;
        for i in 1..=samples {
            let t = i as f64 / samples as f64;
            let cur = if i == samples { first } else { f(t)? };
            total += self.arg_increment(&f, prev_t, t, prev, cur, 0)?;
            prev_t = t;
            prev = cur;
        }
        Ok(total / (2.0 * std::f64::consts::PI))
    }

    fn arg_increment(
        &self,
        f: &dyn Fn(f64) -> Result<C64>,
        ta: f64,
        tb: f64,
        fa: C64,
        fb: C64,
        depth: u32,
    ) -> Result<f64> {
        let d = (fb / fa).arg();
        if d.abs() < std::f64::consts::FRAC_PI_4 {
            return Ok(d);
        }
        if depth > 40 {
            return Err(Error::PhaseTracking(format!("contour passes too close to a zero near t={ta}")));
        }
        let tm = 0.5 * (ta + tb);
        let fm = f(tm)?;
        Ok(self.arg_increment(f, ta, tm, fa, fm, depth + 1)? + self.arg_increment(f, tm, tb, fm, fb, depth + 1)?)
    }

    /// Number of zeros inside a rectangle.
    pub fn count_in_box(&self, b: &SpectralBox) -> Result<usize> {
        let corners = [
            C64::new(b.re_min, b.im_min),
            C64::new(b.re_max, b.im_min),
            C64::new(b.re_max, b.im_max),
            C64::new(b.re_min, b.im_max),
        ];
        let lens: Vec<f64> = (0..4).map(|i| (corners[(i + 1) % 4] - corners[i]).norm()).collect();
        let perim: f64 = lens.iter().sum();
        let path = move |t: f64| {
            let mut s = t * perim;
            for i in 0..4 {
                if s <= lens[i] || i == 3 {
                    let a = corners[i];
                    let bb = corners[(i + 1) % 4];
                    return a + (bb - a) * (s / lens[i]).min(1.0);
                }
                s -= lens[i];
            }
            unreachable!()
        };
        let samples = ((perim / 0.05).ceil() as usize).max(64);
        round_count(self.winding(&path, samples)?)
    }

    /// Number of zeros inside a disk.
    pub fn count_in_disk(&self, center: C64, radius: f64) -> Result<usize> {
        let path = move |t: f64| center + C64::from_polar(radius, 2.0 * std::f64::consts::PI * t);
        round_count(self.winding(&path, 64)?)
    }

    /// Zeros inside a rectangle, located by subdivision and Newton polishing.
    pub fn zeros_in_box(&self, b: &SpectralBox) -> Result<Vec<Eigenvalue>> {
        let count = self.count_in_box(b)?;
        let mut out = Vec::new();
        self.locate(b, count, 0, &mut out)?;
        Ok(out)
    }

    fn locate(&self, b: &SpectralBox, count: usize, depth: u32, out: &mut Vec<Eigenvalue>) -> Result<()> {
        if count == 0 {
            return Ok(());
        }
        let w = b.re_max - b.re_min;
        let h = b.im_max - b.im_min;
        if w.max(h) < 0.05 || depth > 30 {
            let guess = C64::new(0.5 * (b.re_min + b.re_max), 0.5 * (b.im_min + b.im_max));
            let (lambda, residual) = self.newton(guess)?;
            out.push(Eigenvalue { re: lambda.re, im: lambda.im, multiplicity: count, residual });
            return Ok(());
        }
        // split the longer side; offset the cut slightly to avoid symmetric zeros on it
        let halves = if w >= h {
            let cut = b.re_min + 0.5 * w + 1e-3 * w;
            [SpectralBox { re_max: cut, ..*b }, SpectralBox { re_min: cut, ..*b }]
        } else {
            let cut = b.im_min + 0.5 * h + 1.3e-3 * h;
            [SpectralBox { im_max: cut, ..*b }, SpectralBox { im_min: cut, ..*b }]
        };
        let c0 = self.count_in_box(&halves[0])?;
        self.locate(&halves[0], c0, depth + 1, out)?;
        self.locate(&halves[1], count.saturating_sub(c0), depth + 1, out)
    }

    /// Newton iteration on the Wronskian; returns the root and `|W|` there.
    pub fn newton(&self, mut lambda: C64) -> Result<(C64, f64)> {
        let h = 1e-6;
        for _ in 0..50 {
            let f = self.wronskian_regular(lambda)?;
            let df = (self.wronskian_regular(lambda + h)? - self.wronskian_regular(lambda - h)?) / (2.0 * h);
            let step = f / df;
            lambda -= step;
            if step.norm() < 1e-12 * (1.0 + lambda.norm()) {
                break;
            }
        }
        let f = self.wronskian_regular(lambda)?;
        Ok((lambda, f.norm()))
    }
}

fn round_count(w: f64) -> Result<usize> {
    let r = w.round();
    if (w - r).abs() > 0.05 || r < 0.0 {
        return Err(Error::PhaseTracking(format!("non-integer winding number {w}")));
    }
    Ok(r as usize)
}

/// Axis-aligned rectangle in the `λ` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SpectralBox {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        if !(re_max > re_min && im_max > im_min) {
            return Err(Error::Config(format!("empty box [{re_min},{re_max}]x[{im_min},{im_max}]")));
        }
        Ok(Self { re_min, re_max, im_min, im_max })
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re > self.re_min && z.re < self.re_max && z.im > self.im_min && z.im < self.im_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    /// `|W|` at the polished root.
    pub residual: f64,
}

/// Result of counting zeros in a box with a small disk around a known
/// eigenvalue removed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanReport {
    pub d: u32,
    pub scan_box: SpectralBox,
    pub box_count: usize,
    pub excluded_center: Option<(f64, f64)>,
    pub excluded_radius: f64,
    pub excluded_count: usize,
    /// Zeros in the box outside the excluded disk.
    pub count: usize,
    pub eigenvalues: Vec<Eigenvalue>,
}

/// Counts and locates zeros in `b`, removing the disk of radius `radius`
/// around `exclude` if that center lies in the box.
pub fn scan(probe: &EigenProbe, b: SpectralBox, exclude: Option<C64>, radius: f64) -> Result<ScanReport> {
    let box_count = probe.count_in_box(&b)?;
    let excluded = exclude.filter(|c| b.contains(*c));
    let excluded_count = match excluded {
        Some(c) => probe.count_in_disk(c, radius)?,
        None => 0,
    };
    let count = box_count
        .checked_sub(excluded_count)
        .ok_or_else(|| Error::PhaseTracking(format!("disk count {excluded_count} exceeds box count {box_count}")))?;
    let mut eigenvalues = Vec::new();
    if box_count > 0 {
        eigenvalues = probe.zeros_in_box(&b)?;
    }
    Ok(ScanReport {
        d: probe.params().d,
        scan_box: b,
        box_count,
        excluded_center: excluded.map(|c| (c.re, c.im)),
        excluded_radius: radius,
        excluded_count,
        count,
        eigenvalues,
    })
}

/// Outcome of the spectral-gap search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapReport {
    pub d: u32,
    pub omega_max: f64,
    pub step: f64,
    /// Largest tested `ω` with no eigenvalue other than `λ = 1` in `Re λ >= -ω`.
    pub gap: f64,
    /// Eigenvalues found in the first box that was not empty, if any.
    pub blocking: Vec<Eigenvalue>,
}

/// Searches for the largest `ω <= omega_max` (in steps of `step`) such that the
/// box `[-ω, re_max] × [-im_max, im_max]` contains no zero besides `λ = 1`.
pub fn spectral_gap(probe: &EigenProbe, omega_max: f64, step: f64, re_max: f64, im_max: f64) -> Result<GapReport> {
    let mut gap = 0.0;
    let mut blocking = Vec::new();
    let mut k = 1;
    loop {
        let omega = step * k as f64;
        if omega > omega_max + 1e-12 {
            break;
        }
        let b = SpectralBox::new(-omega, re_max, -im_max, im_max)?;
        let rep = scan(probe, b, Some(C64::new(1.0, 0.0)), 0.1)?;
        if rep.count > 0 {
            blocking = rep.eigenvalues.into_iter().filter(|e| (C64::new(e.re, e.im) - 1.0).norm() > 0.1).collect();
            break;
        }
        gap = omega;
        k += 1;
    }
    Ok(GapReport { d: probe.params().d, omega_max, step, gap, blocking })
}
