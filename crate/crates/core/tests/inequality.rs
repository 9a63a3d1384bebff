use proptest::prelude::*;
use ymblow::inequality::{
    corotational_ratio, equivalence_constant, hardy, hardy_rellich_constant, monte_carlo_sigma_integral,
    norm_equivalence, product_estimate, sigma_norm_sq, Family, HarnessConfig, ProductWeight, Workbench,
};
use ymblow::radial::random::GaussianSum;
use ymblow::radial::sobolev::NormSpec;
use ymblow::radial::HankelConfig;

fn small(members: usize) -> HarnessConfig {
    HarnessConfig { members, ..HarnessConfig::default() }
}

fn dilate(u: &GaussianSum, k: f64) -> GaussianSum {
    GaussianSum {
        amps: u.amps.clone(),
        rates: u.rates.iter().map(|b| b * k * k).collect(),
        centers: u.centers.iter().map(|c| c / k).collect(),
    }
}

fn negated(f: &Family) -> Family {
    Family { seed: f.seed, members: f.members.iter().map(|m| m.scaled(-1.0)).collect() }
}

#[test]
fn zero_function_gives_zero_ratio() {
    let wb = Workbench::new(7, 14.0, 700, HankelConfig::default()).unwrap();
    let zero = GaussianSum { amps: vec![0.0], rates: vec![1.0], centers: vec![0.0] };
    assert_eq!(corotational_ratio(5, &zero, &wb).unwrap(), 0.0);
}

#[test]
fn product_ratios_ignore_sign() {
    let cfg = small(6);
    let fam = Family::from_config(&cfg);
    let spec = NormSpec::new(2.0, 2.5).unwrap();
    let a = product_estimate(7, spec, ProductWeight::One, &fam, &cfg).unwrap();
    let b = product_estimate(7, spec, ProductWeight::One, &negated(&fam), &cfg).unwrap();
    assert!(a.passed());
    assert!((a.max_ratio - b.max_ratio).abs() <= 1e-12 * a.max_ratio);
}

#[test]
fn product_estimate_checks_its_hypothesis() {
    let cfg = small(2);
    let fam = Family::from_config(&cfg);
    let spec = NormSpec::new(3.0, 3.5).unwrap();
    assert!(product_estimate(7, spec, ProductWeight::One, &fam, &cfg).is_err());
}

#[test]
fn hardy_ratios_stay_below_sharp_constants() {
    assert_eq!(hardy_rellich_constant(7, 0), Some(1.0));
    assert_eq!(hardy_rellich_constant(7, 1), Some(0.4));
    assert!((hardy_rellich_constant(7, 2).unwrap() - 4.0 / 21.0).abs() < 1e-15);
    let cfg = small(12);
    let fam = Family::from_config(&cfg);
    for k in 0..=2 {
        let r = hardy(7, k, &fam, &cfg).unwrap();
        let c = hardy_rellich_constant(7, k).unwrap();
        assert!(r.passed());
        assert!(r.max_ratio <= c * (1.0 + 1e-6), "k = {k}: {} > {c}", r.max_ratio);
    }
}

#[test]
fn corotational_ratio_is_dilation_invariant() {
    let wb = Workbench::new(7, 24.0, 2400, HankelConfig { k_max: 200.0, ..HankelConfig::default() }).unwrap();
    let u = GaussianSum { amps: vec![0.7, -0.4], rates: vec![1.5, 3.0], centers: vec![0.0, 1.2] };
    let base = corotational_ratio(5, &u, &wb).unwrap();
    for k in [0.5, 2.0] {
        let r = corotational_ratio(5, &dilate(&u, k), &wb).unwrap();
        assert!((r / base - 1.0).abs() < 1e-6, "k = {k}: {r} vs {base}");
    }
}

#[test]
fn corotational_ratio_is_homogeneous_of_degree_zero() {
    let wb = Workbench::new(7, 14.0, 700, HankelConfig::default()).unwrap();
    let u = GaussianSum { amps: vec![0.3, 0.8], rates: vec![2.0, 5.0], centers: vec![0.4, 1.5] };
    let a = corotational_ratio(5, &u, &wb).unwrap();
    let b = corotational_ratio(5, &u.scaled(2.0), &wb).unwrap();
    assert!((a - b).abs() <= 1e-12 * a);
}

#[test]
fn norm_equivalence_constant_by_quadrature() {
    let cfg = small(10);
    let r = norm_equivalence(5, &Family::from_config(&cfg), &cfg).unwrap();
    assert!(r.max_rel_dev < 1e-6, "{r:?}");
}

#[test]
fn norm_equivalence_constant_by_monte_carlo() {
    let (mean, se) = monte_carlo_sigma_integral(5, |r| (-r * r).exp(), 200_000, 0.6, 3);
    let exact = equivalence_constant(5) * (std::f64::consts::PI / 2.0).powf(3.5);
    assert!((mean - exact).abs() < 5.0 * se, "{mean} +- {se} vs {exact}");
}

proptest! {
    #[test]
    fn sigma_norm_is_radial(x in prop::collection::vec(-3.0f64..3.0, 5..9)) {
        let d = x.len() as f64;
        let r2: f64 = x.iter().map(|v| v * v).sum();
        prop_assert!((sigma_norm_sq(&x) - 2.0 * (d - 1.0) * r2).abs() <= 1e-12 * (1.0 + r2));
    }
}
