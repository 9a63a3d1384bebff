//! Randomized checks of the functional inequalities behind the nonlinear
//! estimates: product, weighted cubic, Lipschitz, square, Hardy-Rellich,
//! weighted sup, corotational sup embedding and the 1-form norm equivalence.
//!
//! Every check evaluates a ratio `lhs / rhs` over a seeded family of even
//! Gaussian sums at two grid resolutions and reports the largest ratio and its
//! drift under refinement. Dilates `u(λ·)` enter through the exact scaling of
//! homogeneous norms, `‖u(λ·)‖_{Ḣ^s} = λ^{s - n/2} ‖u‖_{Ḣ^s}`, so they need no
//! extra grids.

use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::radial::diff::{derivative, laplacian};
use crate::radial::field::RadialField;
use crate::radial::grid::{sphere_area, RadialGrid};
use crate::radial::hankel::{HankelConfig, HankelPlan};
use crate::radial::random::{family_member, seeded_rng, GaussianSum, GaussianSumRanges};
use crate::radial::sobolev::{sobolev_norms_sq, NormSpec};

/// Settings shared by all checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessConfig {
    pub seed: u64,
    pub members: usize,
    pub ranges: GaussianSumRanges,
    pub r_max: f64,
    /// Nodes of the coarse grid; the refined grid has twice as many.
    pub nodes: usize,
    pub dilations: Vec<f64>,
    pub hankel: HankelConfig,
    /// Largest relative change of a maximal ratio under refinement.
    pub drift_tol: f64,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            members: 24,
            ranges: GaussianSumRanges::default(),
            r_max: 14.0,
            nodes: 700,
            dilations: vec![0.125, 0.5, 1.0, 2.0, 8.0],
            hankel: HankelConfig { k_min: 1e-2, k_max: 100.0, k_count: 512, tail_tol: 1e-6 },
            drift_tol: 0.05,
        }
    }
}

/// Seeded family of test functions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Family {
    pub seed: u64,
    pub members: Vec<GaussianSum>,
}

impl Family {
    pub fn new(seed: u64, size: usize, ranges: &GaussianSumRanges) -> Self {
        Self { seed, members: (0..size as u64).map(|i| family_member(seed, i, ranges)).collect() }
    }

    pub fn from_config(cfg: &HarnessConfig) -> Self {
        Self::new(cfg.seed, cfg.members, &cfg.ranges)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn get(&self, i: usize) -> &GaussianSum {
        &self.members[i % self.members.len()]
    }
}

/// Grid and Hankel plan in `R^n` on which ratios are evaluated.
#[derive(Debug, Clone)]
pub struct Workbench {
    grid: Arc<RadialGrid>,
    plan: HankelPlan,
}

impl Workbench {
    pub fn new(n: u32, r_max: f64, nodes: usize, hankel: HankelConfig) -> Result<Self> {
        let grid = Arc::new(RadialGrid::uniform(r_max, nodes, n)?);
        let plan = HankelPlan::new(grid.clone(), hankel)?;
        Ok(Self { grid, plan })
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn dim(&self) -> u32 {
        self.grid.dim()
    }

    pub fn field(&self, f: impl Fn(f64) -> f64) -> RadialField {
        RadialField::from_fn(self.grid.clone(), f)
    }

    /// `‖f‖_{Ḣ^s}` for each exponent.
    pub fn norms(&self, f: &RadialField, s: &[f64]) -> Result<Vec<f64>> {
        Ok(sobolev_norms_sq(&self.plan, f, s)?.into_iter().map(f64::sqrt).collect())
    }

    /// `‖f‖_{Ḣ^{s1} ∩ Ḣ^{s2}}`.
    pub fn intersection(&self, f: &RadialField, s: [f64; 2]) -> Result<f64> {
        let v = self.norms(f, &s)?;
        Ok(v[0].hypot(v[1]))
    }

    /// `‖f‖_{Ḣ^k}` for integer `k` from finite differences:
    /// `‖Δ^m f‖_{L²}` or `‖∇Δ^m f‖_{L²}`.
    pub fn fd_norm(&self, f: &RadialField, k: u32) -> Result<f64> {
        let mut g = f.clone();
        for _ in 0..k / 2 {
            g = laplacian(&g);
        }
        if k % 2 == 1 {
            g = derivative(&g, 1)?;
        }
        Ok(g.l2_norm())
    }
}

/// Norm of the dilate `f(λ·)` in `Ḣ^{s1} ∩ Ḣ^{s2}` from the norms of `f`.
fn dilated(lambda: f64, norms: &[f64], s: [f64; 2], n: u32) -> f64 {
    let h = 0.5 * n as f64;
    (lambda.powf(s[0] - h) * norms[0]).hypot(lambda.powf(s[1] - h) * norms[1])
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// One ratio of the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemberRatio {
    /// Index of the first family member of the tuple.
    pub member: usize,
    pub lambda: f64,
    pub ratio: f64,
}

/// Largest ratio of one inequality over the family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioReport {
    pub id: String,
    pub max_ratio: f64,
    pub argmax: MemberRatio,
    /// Largest ratio on the coarse grid.
    pub coarse_max: f64,
    /// `|max_fine - max_coarse| / max_fine`.
    pub drift: f64,
    pub all_finite: bool,
    pub stable: bool,
    /// Largest ratio over all dilates divided by the largest ratio at `λ = 1`.
    pub dilation_excess: f64,
    /// Ratios on the refined grid.
    pub ratios: Vec<MemberRatio>,
}

impl RatioReport {
    pub fn passed(&self) -> bool {
        self.all_finite && self.stable
    }
}

fn sweep(
    id: &str,
    n: u32,
    cfg: &HarnessConfig,
    eval: impl Fn(&Workbench) -> Result<Vec<MemberRatio>>,
) -> Result<RatioReport> {
    let coarse = eval(&Workbench::new(n, cfg.r_max, cfg.nodes, cfg.hankel)?)?;
    let fine = eval(&Workbench::new(n, cfg.r_max, 2 * cfg.nodes, cfg.hankel)?)?;
    let all_finite = coarse.iter().chain(&fine).all(|m| m.ratio.is_finite());
    let best = |v: &[MemberRatio]| {
        v.iter().copied().fold(MemberRatio { member: 0, lambda: 1.0, ratio: 0.0 }, |a, b| {
            if b.ratio > a.ratio || b.ratio.is_nan() {
                b
            } else {
                a
            }
        })
    };
    let argmax = best(&fine);
    let coarse_max = best(&coarse).ratio;
    let drift = if argmax.ratio > 0.0 { (argmax.ratio - coarse_max).abs() / argmax.ratio } else { 0.0 };
    let at_unit = fine.iter().filter(|m| m.lambda == 1.0).map(|m| m.ratio).fold(0.0, f64::max);
    let dilation_excess = if at_unit > 0.0 { argmax.ratio / at_unit } else { 1.0 };
    Ok(RatioReport {
        id: id.to_string(),
        max_ratio: argmax.ratio,
        argmax,
        coarse_max,
        drift,
        all_finite,
        stable: drift <= cfg.drift_tol,
        dilation_excess,
        ratios: fine,
    })
}

/// Weight `f` in the product estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductWeight {
    One,
    /// `⟨r⟩^{-1}`
    Decaying,
}

/// `‖f u1 u2‖_{Ḣ^{s1-1} ∩ Ḣ^{s2-1}} / (‖u1‖_{Ḣ^{s1} ∩ Ḣ^{s2}} ‖u2‖_{Ḣ^{s1} ∩ Ḣ^{s2}})`
/// over consecutive pairs; requires `1 ≤ s1 ≤ n/2 - 1 ≤ s2`. Dilates are
/// swept for `f ≡ 1` only.
pub fn product_estimate(
    n: u32,
    spec: NormSpec,
    weight: ProductWeight,
    family: &Family,
    cfg: &HarnessConfig,
) -> Result<RatioReport> {
    let h = 0.5 * n as f64;
    if !(1.0 <= spec.s1 && spec.s1 <= h - 1.0 && h - 1.0 <= spec.s2) {
        return Err(Error::Hypothesis(format!("product estimate needs 1 <= s1 <= n/2-1 <= s2, got {spec:?}")));
    }
    let s = [spec.s1, spec.s2];
    let sm = [spec.s1 - 1.0, spec.s2 - 1.0];
    let id = match weight {
        ProductWeight::One => "product",
        ProductWeight::Decaying => "product_decaying_weight",
    };
    sweep(id, n, cfg, |wb| {
        let mut out = Vec::new();
        for i in 0..family.len() {
            let (a, b) = (family.get(i), family.get(i + 1));
            let w = |r: f64| match weight {
                ProductWeight::One => 1.0,
                ProductWeight::Decaying => 1.0 / (1.0 + r * r).sqrt(),
            };
            let prod = wb.field(|r| w(r) * a.eval(r) * b.eval(r));
            let num = wb.norms(&prod, &sm)?;
            let na = wb.norms(&wb.field(|r| a.eval(r)), &s)?;
            let nb = wb.norms(&wb.field(|r| b.eval(r)), &s)?;
            let lambdas: &[f64] = if weight == ProductWeight::One { &cfg.dilations } else { &[1.0] };
            for &l in lambdas {
                let q = ratio(dilated(l, &num, sm, n), dilated(l, &na, s, n) * dilated(l, &nb, s, n));
                out.push(MemberRatio { member: i, lambda: l, ratio: q });
            }
        }
        Ok(out)
    })
}

/// `‖ |·|² u1 u2 u3 ‖_{Ḣ^{s1-1} ∩ Ḣ^{s2-1}} / Π ‖ui‖_{Ḣ^{s1} ∩ Ḣ^{s2}}` over
/// consecutive triples; requires `1 ≤ s1 ≤ (n-3)/2 ≤ s2`.
pub fn cubic_estimate(n: u32, spec: NormSpec, family: &Family, cfg: &HarnessConfig) -> Result<RatioReport> {
    let c = 0.5 * (n as f64 - 3.0);
    if !(1.0 <= spec.s1 && spec.s1 <= c && c <= spec.s2) {
        return Err(Error::Hypothesis(format!("cubic estimate needs 1 <= s1 <= (n-3)/2 <= s2, got {spec:?}")));
    }
    let s = [spec.s1, spec.s2];
    let sm = [spec.s1 - 1.0, spec.s2 - 1.0];
    sweep("cubic", n, cfg, |wb| {
        let mut out = Vec::new();
        for i in 0..family.len() {
            let f = [family.get(i), family.get(i + 1), family.get(i + 2)];
            let w = wb.field(|r| r * r * f[0].eval(r) * f[1].eval(r) * f[2].eval(r));
            let num = wb.norms(&w, &sm)?;
            let dens = f.iter().map(|g| wb.norms(&wb.field(|r| g.eval(r)), &s)).collect::<Result<Vec<_>>>()?;
            for &l in &cfg.dilations {
                // |x|² u1 u2 u3 of the dilates is λ^{-2} times the dilate of the weighted product
                let den: f64 = dens.iter().map(|d| dilated(l, d, s, n)).product();
                out.push(MemberRatio { member: i, lambda: l, ratio: ratio(dilated(l, &num, sm, n) / (l * l), den) });
            }
        }
        Ok(out)
    })
}

/// `‖N(u) - N(v)‖_{Ḣ^{s1-1} ∩ Ḣ^{s2-1}} / ((‖u‖ + ‖v‖) ‖u - v‖)` for the
/// nonlinear remainder `N` of dimension `d`, with members rescaled to norms in
/// `(0, delta]` of `Ḣ^{s1} ∩ Ḣ^{s2}`.
pub fn lipschitz_remainder(
    d: u32,
    spec: NormSpec,
    delta: f64,
    family: &Family,
    cfg: &HarnessConfig,
) -> Result<RatioReport> {
    let params = ModelParams::new(d)?;
    if !(spec.s1 >= 1.0 && delta > 0.0) {
        return Err(Error::Hypothesis(format!("Lipschitz check needs s1 >= 1 and delta > 0, got {spec:?}, {delta}")));
    }
    let s = [spec.s1, spec.s2];
    let sm = [spec.s1 - 1.0, spec.s2 - 1.0];
    let mut rng = seeded_rng(family.seed ^ 0x5eed);
    let radii: Vec<f64> = (0..family.len()).map(|_| delta * rng.gen_range(0.05..1.0)).collect();
    sweep("lipschitz", params.n, cfg, |wb| {
        // rescale on the coarse reference grid so both resolutions see the same data
        let scaled: Vec<GaussianSum> = family
            .members
            .iter()
            .zip(&radii)
            .map(|(m, rad)| Ok(m.scaled(rad / wb.intersection(&wb.field(|r| m.eval(r)), s)?)))
            .collect::<Result<_>>()?;
        let mut out = Vec::new();
        for i in 0..scaled.len() {
            let (a, b) = (&scaled[i], &scaled[(i + 1) % scaled.len()]);
            let ua = wb.field(|r| a.eval(r));
            let ub = wb.field(|r| b.eval(r));
            let na = wb.intersection(&ua, s)?;
            let nb = wb.intersection(&ub, s)?;
            if na > delta * (1.0 + 1e-6) || nb > delta * (1.0 + 1e-6) {
                return Err(Error::Hypothesis(format!("member outside the ball of radius {delta}: {na}, {nb}")));
            }
            let diff = wb.intersection(&ua.axpy(-1.0, &ub)?, s)?;
            if diff == 0.0 {
                continue;
            }
            let dn = wb.field(|r| params.remainder(r, a.eval(r)) - params.remainder(r, b.eval(r)));
            let num = wb.intersection(&dn, sm)?;
            out.push(MemberRatio { member: i, lambda: 1.0, ratio: ratio(num, (na + nb) * diff) });
        }
        Ok(out)
    })
}

/// `‖N(εu)‖_{Ḣ^{s1-1} ∩ Ḣ^{s2-1}} / ‖εu‖²` for each `ε`; tends to a constant
/// as `ε → 0` because the remainder starts quadratically.
pub fn remainder_quadratic_ratio(
    d: u32,
    spec: NormSpec,
    u: &GaussianSum,
    eps: &[f64],
    wb: &Workbench,
) -> Result<Vec<f64>> {
    let params = ModelParams::new(d)?;
    let s = [spec.s1, spec.s2];
    let sm = [spec.s1 - 1.0, spec.s2 - 1.0];
    let base = wb.intersection(&wb.field(|r| u.eval(r)), s)?;
    eps.iter()
        .map(|&e| {
            let nf = wb.field(|r| params.remainder(r, e * u.eval(r)));
            Ok(wb.intersection(&nf, sm)? / (e * base).powi(2))
        })
        .collect()
}

/// Both square estimates for `k ≥ ⌊n/2⌋`:
/// `‖u²‖_{Ḣ^{⌊n/2⌋-1}} / (‖u‖_{Ḣ^{n/2-1}} ‖u‖_{Ḣ^{⌊n/2⌋}})` and
/// `‖u²‖_{Ḣ^k} / (‖u‖_{Ḣ^k} ‖u‖_{Ḣ^{(n-3)/2} ∩ Ḣ^{k+1}})`.
pub fn square_estimates(n: u32, k: u32, family: &Family, cfg: &HarnessConfig) -> Result<[RatioReport; 2]> {
    let fl = (n / 2) as f64;
    let h = 0.5 * n as f64;
    let kf = k as f64;
    if k < n / 2 {
        return Err(Error::Hypothesis(format!("square estimate needs k >= floor(n/2) = {}, got {k}", n / 2)));
    }
    let low = sweep("square_low", n, cfg, |wb| {
        let mut out = Vec::new();
        for (i, m) in family.members.iter().enumerate() {
            let u = wb.field(|r| m.eval(r));
            let sq = wb.field(|r| m.eval(r).powi(2));
            let a = wb.norms(&sq, &[fl - 1.0])?[0];
            let b = wb.norms(&u, &[h - 1.0, fl])?;
            // both sides scale as λ^{⌊n/2⌋-1-n/2}: one ratio covers all dilates
            out.push(MemberRatio { member: i, lambda: 1.0, ratio: ratio(a, b[0] * b[1]) });
        }
        Ok(out)
    })?;
    let hs = [0.5 * (n as f64 - 3.0), kf + 1.0];
    let high = sweep("square_high", n, cfg, |wb| {
        let mut out = Vec::new();
        for (i, m) in family.members.iter().enumerate() {
            let u = wb.field(|r| m.eval(r));
            let sq = wb.field(|r| m.eval(r).powi(2));
            let a = wb.norms(&sq, &[kf])?[0];
            let b = wb.norms(&u, &[kf, hs[0], hs[1]])?;
            for &l in &cfg.dilations {
                let num = l.powf(kf - h) * a;
                let den = l.powf(kf - h) * b[0] * dilated(l, &b[1..], hs, n);
                out.push(MemberRatio { member: i, lambda: l, ratio: ratio(num, den) });
            }
        }
        Ok(out)
    })?;
    Ok([low, high])
}

/// Hardy-Rellich ratio `‖ |·|^{-k} u ‖_{L²} / ‖u‖_{Ḣ^k}` for integer `k < n/2`,
/// both sides from finite differences. The ratio is dilation invariant.
pub fn hardy(n: u32, k: u32, family: &Family, cfg: &HarnessConfig) -> Result<RatioReport> {
    if 2 * k >= n {
        return Err(Error::Hypothesis(format!("Hardy-Rellich needs k < n/2, got k={k}, n={n}")));
    }
    sweep(&format!("hardy_k{k}"), n, cfg, |wb| {
        let mut out = Vec::new();
        for (i, m) in family.members.iter().enumerate() {
            let u = wb.field(|r| m.eval(r));
            let lhs = u.map(|r, v| v * r.powi(-(k as i32))).l2_norm();
            let rhs = wb.fd_norm(&u, k)?;
            out.push(MemberRatio { member: i, lambda: 1.0, ratio: ratio(lhs, rhs) });
        }
        Ok(out)
    })
}

/// Sharp constant of `‖ |·|^{-k} u ‖_{L²} ≤ C ‖u‖_{Ḣ^k}` in `R^n` for `k = 1, 2`.
pub fn hardy_rellich_constant(n: u32, k: u32) -> Option<f64> {
    let nf = n as f64;
    match k {
        0 => Some(1.0),
        1 if n > 2 => Some(2.0 / (nf - 2.0)),
        2 if n > 4 => Some(4.0 / (nf * (nf - 4.0))),
        _ => None,
    }
}

/// `sup_r w(r) |g(r)|` from dense sampling on `[0, r_max]` refined by golden section.
pub fn continuous_sup(g: impl Fn(f64) -> f64, r_max: f64, samples: usize) -> f64 {
    let h = r_max / samples as f64;
    let mut best = (0.0, 0.0f64);
    for i in 0..=samples {
        let r = i as f64 * h;
        let v = g(r).abs();
        if v > best.1 {
            best = (r, v);
        }
    }
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = ((best.0 - h).max(0.0), (best.0 + h).min(r_max));
    for _ in 0..80 {
        let c = hi - gr * (hi - lo);
        let d = lo + gr * (hi - lo);
        if g(c).abs() > g(d).abs() {
            hi = d;
        } else {
            lo = c;
        }
    }
    best.1.max(g(0.5 * (lo + hi)).abs())
}

/// `sup_r r^{n/2-s} |∂_r^α u(r)| / ‖u‖_{Ḣ^{α+s}}` for `α ∈ {0, 1}` and
/// `1/2 < s < n/2`. The ratio is dilation invariant.
pub fn weighted_sup(n: u32, s: f64, order: u32, family: &Family, cfg: &HarnessConfig) -> Result<RatioReport> {
    let h = 0.5 * n as f64;
    if !(0.5 < s && s < h) || order > 1 {
        return Err(Error::Hypothesis(format!(
            "weighted sup needs 1/2 < s < n/2 and order <= 1, got s={s}, order={order}"
        )));
    }
    let a = h - s;
    sweep(&format!("weighted_sup_order{order}"), n, cfg, |wb| {
        let mut out = Vec::new();
        for (i, m) in family.members.iter().enumerate() {
            let lhs =
                continuous_sup(|r| r.powf(a) * if order == 0 { m.eval(r) } else { m.eval_d1(r) }, m.reach(), 4000);
            let rhs = wb.norms(&wb.field(|r| m.eval(r)), &[order as f64 + s])?[0];
            out.push(MemberRatio { member: i, lambda: 1.0, ratio: ratio(lhs, rhs) });
        }
        Ok(out)
    })
}

/// `sup_r r |u(r)| / ‖u‖_{Ḣ^{d/2}(R^{d+2})}`: the sup of the corotational
/// field `u(|x|) x` against the reduced norm. Invariant under `u → λ u(λ·)`.
pub fn corotational_sup(d: u32, family: &Family, cfg: &HarnessConfig) -> Result<RatioReport> {
    if d < 5 {
        return Err(Error::Dimension(d));
    }
    sweep("corotational_sup", d + 2, cfg, |wb| {
        let mut out = Vec::new();
        for (i, m) in family.members.iter().enumerate() {
            out.push(MemberRatio { member: i, lambda: 1.0, ratio: corotational_ratio(d, m, wb)? });
        }
        Ok(out)
    })
}

/// Corotational sup ratio of one function on a given workbench in `R^{d+2}`.
pub fn corotational_ratio(d: u32, u: &GaussianSum, wb: &Workbench) -> Result<f64> {
    let lhs = continuous_sup(|r| r * u.eval(r), u.reach(), 4000);
    let rhs = wb.norms(&wb.field(|r| u.eval(r)), &[0.5 * d as f64])?[0];
    Ok(ratio(lhs, rhs))
}

/// Components `σ_k^{ij}(x) = δ_{ik} x_j - δ_{jk} x_i` of the 1-form of the
/// equivariant ansatz, indexed `[k][i][j]`.
pub fn sigma_form(x: &[f64]) -> Vec<Vec<Vec<f64>>> {
    let d = x.len();
    (0..d)
        .map(|k| {
            (0..d)
                .map(|i| (0..d).map(|j| if i == k { x[j] } else { 0.0 } - if j == k { x[i] } else { 0.0 }).collect())
                .collect()
        })
        .collect()
}

/// `Σ_k |σ_k(x)|²` summed over all matrix entries.
pub fn sigma_norm_sq(x: &[f64]) -> f64 {
    sigma_form(x).iter().flatten().flatten().map(|v| v * v).sum()
}

/// `2(d-1) |S^{d-1}| / |S^{d+1}|`.
pub fn equivalence_constant(d: u32) -> f64 {
    2.0 * (d as f64 - 1.0) * sphere_area(d) / sphere_area(d + 2)
}

/// Ratio `‖u(|·|)σ‖²_{L²(R^d)} / ‖u(|·|)‖²_{L²(R^{d+2})}` across the family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub d: u32,
    pub expected: f64,
    pub values: Vec<f64>,
    pub max_rel_dev: f64,
}

/// Quadrature evaluation of the norm ratio: the numerator integrates
/// `u² Σ|σ|²` over `R^d` with `Σ|σ|²` evaluated from the explicit form along a
/// ray, the denominator integrates `u²` over `R^{d+2}`.
pub fn norm_equivalence(d: u32, family: &Family, cfg: &HarnessConfig) -> Result<EquivalenceReport> {
    if d < 5 {
        return Err(Error::Dimension(d));
    }
    let nodes = 2 * cfg.nodes;
    let gd = Arc::new(RadialGrid::uniform(cfg.r_max, nodes, d)?);
    let gn = Arc::new(RadialGrid::uniform(cfg.r_max, nodes, d + 2)?);
    let mut ray = vec![0.0; d as usize];
    let mut values = Vec::with_capacity(family.len());
    for m in &family.members {
        let num_density: Vec<f64> = gd
            .nodes()
            .iter()
            .map(|&r| {
                ray[0] = r;
                m.eval(r).powi(2) * sigma_norm_sq(&ray)
            })
            .collect();
        let den_density: Vec<f64> = gn.nodes().iter().map(|&r| m.eval(r).powi(2)).collect();
        let num = sphere_area(d) * gd.integrate_radial(&num_density);
        let den = sphere_area(d + 2) * gn.integrate_radial(&den_density);
        values.push(num / den);
    }
    let expected = equivalence_constant(d);
    let max_rel_dev = values.iter().map(|v| (v / expected - 1.0).abs()).fold(0.0, f64::max);
    Ok(EquivalenceReport { d, expected, values, max_rel_dev })
}

/// Monte Carlo estimate of `∫_{R^d} Σ_k |σ_k(x)|² u(|x|)² dx` with Gaussian
/// importance sampling of width `width`; returns `(mean, standard error)`.
pub fn monte_carlo_sigma_integral(d: u32, u: impl Fn(f64) -> f64, samples: usize, width: f64, seed: u64) -> (f64, f64) {
    let mut rng = seeded_rng(seed);
    let df = d as f64;
    let norm = (2.0 * std::f64::consts::PI * width * width).powf(0.5 * df);
    let mut x = vec![0.0; d as usize];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let mut r2 = 0.0;
        for xi in x.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *xi = width * z;
            r2 += *xi * *xi;
        }
        let density = (-0.5 * r2 / (width * width)).exp() / norm;
        let v = u(r2.sqrt()).powi(2) * sigma_norm_sq(&x) / density;
        sum += v;
        sum_sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    (mean, (var / n).sqrt())
}

/// All checks at the reference setting `d = 5`, `n = 7`, `(s1, s2) = (2, 5/2)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub reports: Vec<RatioReport>,
    pub equivalence: EquivalenceReport,
    pub passed: bool,
}

pub fn run_suite(cfg: &HarnessConfig) -> Result<SuiteReport> {
    let d = 5;
    let n = d + 2;
    let spec = NormSpec::new(2.0, 2.5)?;
    let fam = Family::from_config(cfg);
    let mut reports = vec![
        product_estimate(n, spec, ProductWeight::One, &fam, cfg)?,
        product_estimate(n, spec, ProductWeight::Decaying, &fam, cfg)?,
        cubic_estimate(n, spec, &fam, cfg)?,
        lipschitz_remainder(d, spec, 1.0, &fam, cfg)?,
    ];
    reports.extend(square_estimates(n, 3, &fam, cfg)?);
    reports.push(hardy(n, 2, &fam, cfg)?);
    reports.push(weighted_sup(n, 2.0, 0, &fam, cfg)?);
    reports.push(weighted_sup(n, 2.0, 1, &fam, cfg)?);
    reports.push(corotational_sup(d, &fam, cfg)?);
    let equivalence = norm_equivalence(d, &fam, cfg)?;
    let passed = reports.iter().all(RatioReport::passed) && equivalence.max_rel_dev <= 1e-6;
    Ok(SuiteReport { reports, equivalence, passed })
}
