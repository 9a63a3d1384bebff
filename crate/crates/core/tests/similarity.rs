use std::sync::Arc;

use proptest::prelude::*;
use ymblow::radial::sobolev::NormSpec;
use ymblow::radial::RadialGrid;
use ymblow::similarity::free::check_growth_bound;
use ymblow::similarity::modulation::{modulate, ModulationConfig, Perturbation};
use ymblow::similarity::{
    final_decay_fit, gauge_growth_rate, similarity_rhs, Dynamics, NormSeries, SimState, SimSystem, TaperedNorm,
};
use ymblow::ModelParams;

fn grid(n: u32) -> Arc<RadialGrid> {
    Arc::new(RadialGrid::uniform(4.0, 512, n).unwrap())
}

#[test]
fn profile_is_stationary() {
    let p = ModelParams::new(5).unwrap();
    let state = SimState::profile(grid(p.n), &p);
    let (a, b) = similarity_rhs(&state, &p).unwrap();
    assert!(a.sup_norm() < 1e-6, "{}", a.sup_norm());
    assert!(b.sup_norm() < 1e-4, "{}", b.sup_norm());
}

#[test]
fn gauge_direction_grows_at_unit_rate() {
    let p = ModelParams::new(5).unwrap();
    let r = gauge_growth_rate(&p, grid(p.n), 5.0, 0.5).unwrap();
    assert!((r.rate - 1.0).abs() < 0.05, "rate {}", r.rate);
}

#[test]
fn step_above_cfl_limit_is_rejected() {
    let p = ModelParams::new(5).unwrap();
    let sys = SimSystem::new(p, Dynamics::Free, grid(p.n)).unwrap();
    let mut s = SimState::profile(grid(p.n), &p);
    let dt = 2.0 * sys.max_step(0.5);
    assert!(sys.evolve(&mut s, 0.1, dt, 0.5, |_| std::ops::ControlFlow::Continue(())).is_err());
}

#[test]
fn unperturbed_data_selects_unit_blowup_time() {
    let p = ModelParams::new(5).unwrap();
    let g = grid(p.n);
    let sys = SimSystem::new(p, Dynamics::Linearized, g.clone()).unwrap();
    let norm = TaperedNorm::standard(g.clone(), NormSpec::evolution(p.n)).unwrap();
    let source = Arc::new(RadialGrid::uniform(8.0, 1024, p.n).unwrap());
    let m = modulate(&sys, &Perturbation::zero(source), &norm, &ModulationConfig::default()).unwrap();
    assert!((m.t_star - 1.0).abs() < 1e-12, "T* = {}", m.t_star);
    assert!(m.fit.is_none());
}

#[test]
fn growth_bound_catches_an_injected_violation() {
    let tau: Vec<f64> = (0..=40).map(|i| 0.1 * i as f64).collect();
    let ok = NormSeries { tau: tau.clone(), norm: tau.iter().map(|t| (-0.5 * t).exp()).collect() };
    assert!(check_growth_bound(&ok, -0.5, 1e-3).unwrap().passed);
    let mut bad = ok.clone();
    bad.norm[25] *= 1.01;
    let r = check_growth_bound(&bad, -0.5, 1e-3).unwrap();
    assert!(!r.passed);
    assert!((r.violation.unwrap() - 2.5).abs() < 1e-12);
}

proptest! {
    #[test]
    fn decay_fit_recovers_exponential(omega in 0.05f64..2.0, amp in 1e-6f64..1e2) {
        let tau: Vec<f64> = (0..=80).map(|i| 0.1 * i as f64).collect();
        let norm = tau.iter().map(|t| amp * (-omega * t).exp()).collect();
        let fit = final_decay_fit(&NormSeries { tau, norm }, 4.0).unwrap();
        prop_assert!((fit.omega_fit - omega).abs() < 1e-9);
        prop_assert!((fit.amplitude / amp - 1.0).abs() < 1e-8);
        prop_assert!(fit.residual < 1e-9);
    }
}
