use std::sync::Arc;

use approx::assert_relative_eq;
use proptest::prelude::*;
use ymblow::radial::diff::laplacian;
use ymblow::radial::grid::sphere_area;
use ymblow::radial::sobolev::{dilation_factor, sobolev_norm};
use ymblow::radial::{HankelConfig, HankelPlan, RadialField, RadialGrid};

fn plan(n: u32) -> HankelPlan {
    let grid = Arc::new(RadialGrid::uniform(14.0, 700, n).unwrap());
    HankelPlan::new(grid, HankelConfig::default()).unwrap()
}

fn gaussian_norm(a: f64, s: f64, n: u32) -> f64 {
    let h = 0.5 * n as f64;
    (0.5 * sphere_area(n) * (2.0 * a).powf(s - h) * libm::tgamma(s + h)).sqrt()
}

#[test]
fn gaussian_norms_match_closed_form() {
    let n = 7;
    let p = plan(n);
    for a in [0.5, 1.0, 2.0] {
        let f = RadialField::from_fn(p.grid().clone(), |r| (-a * r * r).exp());
        for s in [0.0, 1.0, 2.0, 2.5] {
            let got = sobolev_norm(&p, &f, s).unwrap();
            assert_relative_eq!(got, gaussian_norm(a, s, n), max_relative = 1e-6);
        }
    }
}

#[test]
fn hankel_transform_is_an_involution() {
    let p = plan(7);
    let f = RadialField::from_fn(p.grid().clone(), |r| (1.0 + r * r) * (-r * r).exp());
    let back = p.inverse(&p.forward(&f).unwrap()).unwrap();
    let err = f.axpy(-1.0, &back).unwrap().sup_norm();
    assert!(err < 1e-6, "round trip error {err}");
}

#[test]
fn laplacian_of_gaussian() {
    let n = 7;
    let grid = Arc::new(RadialGrid::uniform(8.0, 2000, n).unwrap());
    let f = RadialField::from_fn(grid.clone(), |r| (-r * r).exp());
    let lap = laplacian(&f);
    let exact = RadialField::from_fn(grid, |r| (4.0 * r * r - 2.0 * n as f64) * (-r * r).exp());
    let err = lap.axpy(-1.0, &exact).unwrap().sup_norm();
    assert!(err < 1e-4, "laplacian error {err}");
}

#[test]
fn grid_rejects_too_few_nodes() {
    assert!(RadialGrid::uniform(1.0, 4, 7).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn norms_are_homogeneous(c in -5.0f64..5.0, s in 0.0f64..3.0) {
        let p = plan(7);
        let f = RadialField::from_fn(p.grid().clone(), |r| (-r * r).exp() * (1.0 - 0.3 * r * r));
        let a = sobolev_norm(&p, &f, s).unwrap();
        let b = sobolev_norm(&p, &f.scaled(c), s).unwrap();
        prop_assert!((b - c.abs() * a).abs() <= 1e-10 * (1.0 + a));
    }

    #[test]
    fn dilation_scales_norms(lambda in 0.6f64..1.6, s in 0.0f64..3.0) {
        let n = 7;
        let p = plan(n);
        let f = RadialField::from_fn(p.grid().clone(), |r| (-r * r).exp());
        let g = RadialField::from_fn(p.grid().clone(), |r| (-(lambda * r).powi(2)).exp());
        let a = sobolev_norm(&p, &f, s).unwrap();
        let b = sobolev_norm(&p, &g, s).unwrap();
        prop_assert!((b / (dilation_factor(lambda, s, n) * a) - 1.0).abs() < 1e-6);
    }
}
