use approx::assert_relative_eq;
use proptest::prelude::*;
use ymblow::{Error, ModelParams, PotentialForm};

#[test]
fn constants_in_five_dimensions() {
    let p = ModelParams::new(5).unwrap();
    assert_eq!(p.n, 7);
    assert_relative_eq!(p.alpha, 8.0 / 3.0, max_relative = 1e-15);
    assert_relative_eq!(p.beta, 5.0 / 3.0, max_relative = 1e-15);
    assert_relative_eq!(p.phi(0.0), 1.6, max_relative = 1e-15);
}

#[test]
fn dimension_below_five_is_rejected() {
    assert!(matches!(ModelParams::new(4), Err(Error::Dimension(4))));
}

#[test]
fn blowup_solution_refuses_times_past_blowup() {
    let p = ModelParams::new(5).unwrap();
    assert!(matches!(p.blowup_solution(1.0, 1.0, 0.3), Err(Error::PastBlowup { .. })));
    assert!(p.blowup_solution(1.0, 0.999, 0.3).is_ok());
}

#[test]
fn linearized_potential_differs_from_printed_bracket() {
    let p = ModelParams::new(6).unwrap();
    let a = p.potential_with(0.7, PotentialForm::Linearized);
    let b = p.potential_with(0.7, PotentialForm::Printed);
    assert!((a - b).abs() > 1e-3);
}

proptest! {
    #[test]
    fn profile_solves_the_static_equation(d in 5u32..=12, rho in 1e-3f64..1e3) {
        let p = ModelParams::new(d).unwrap();
        prop_assert!(p.profile_ode_residual(rho).abs() <= 1e-10);
    }

    #[test]
    fn gauge_mode_is_an_eigenfunction(d in 5u32..=12, rho in 1e-3f64..50.0) {
        let p = ModelParams::new(d).unwrap();
        let g = p.gauge_g(rho).0.abs();
        prop_assert!(p.gauge_mode_residual(rho).abs() <= 1e-10 * (1.0 + g));
    }

    #[test]
    fn blowup_solution_is_self_similar(blowup in 0.5f64..2.0, frac in 0.0f64..0.99, r in 0.0f64..5.0) {
        let p = ModelParams::new(5).unwrap();
        let t = frac * blowup;
        let s = blowup - t;
        let (u, ut) = p.blowup_solution(blowup, t, r).unwrap();
        prop_assert!((u * s * s - p.phi(r / s)).abs() <= 1e-12 * p.phi(0.0));
        prop_assert!((ut * s * s * s - p.phi1(r / s)).abs() <= 1e-12 * (1.0 + p.phi1(r / s).abs()));
    }
}
