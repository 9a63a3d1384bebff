use std::sync::Arc;

use proptest::prelude::*;
use ymblow::physical::{evolve_physical, free_energy, Outcome, PhysConfig, PhysState, PhysSystem};
use ymblow::radial::{RadialField, RadialGrid};
use ymblow::ModelParams;

fn setup(nodes: usize) -> (ModelParams, Arc<RadialGrid>) {
    let p = ModelParams::new(5).unwrap();
    (p, Arc::new(RadialGrid::uniform(8.0, nodes, p.n).unwrap()))
}

fn bump(grid: &Arc<RadialGrid>, amp: f64) -> PhysState {
    let u = RadialField::from_fn(grid.clone(), |r| amp * (-4.0 * (r - 1.0).powi(2)).exp());
    PhysState::new(0.0, u, RadialField::zeros(grid.clone())).unwrap()
}

fn advance(sys: &PhysSystem, init: &PhysState, t_end: f64, steps: usize) -> PhysState {
    let mut s = init.clone();
    let dt = t_end / steps as f64;
    for _ in 0..steps {
        sys.step(&mut s, dt).unwrap();
    }
    s
}

#[test]
fn exact_data_blows_up_at_the_exact_time() {
    let (p, g) = setup(4096);
    let sys = PhysSystem::new(p, g.clone()).unwrap();
    let init = PhysState::exact(g, &p, 1.0, 0.0, 1.0).unwrap();
    let run = evolve_physical(&sys, &init, &PhysConfig::default()).unwrap();
    assert_ne!(run.trajectory.outcome, Outcome::NoBlowup);
    let fit = run.fit.unwrap();
    assert!((fit.t_est - 1.0).abs() < 1e-3, "T = {}", fit.t_est);
    assert!((fit.profile_value / 1.6 - 1.0).abs() < 0.02, "profile {}", fit.profile_value);
}

#[test]
fn zero_data_stays_zero() {
    let (p, g) = setup(512);
    let sys = PhysSystem::new(p, g.clone()).unwrap();
    let cfg = PhysConfig { t_end: 0.5, ..PhysConfig::default() };
    let run = evolve_physical(&sys, &PhysState::zeros(g), &cfg).unwrap();
    assert_eq!(run.trajectory.outcome, Outcome::NoBlowup);
    assert!(run.fit.is_none());
    assert!(run.trajectory.origin.iter().all(|&u| u == 0.0));
}

#[test]
fn time_stepping_is_fourth_order() {
    let (p, g) = setup(400);
    let sys = PhysSystem::new(p, g.clone()).unwrap();
    let init = bump(&g, 0.5);
    let t = 0.5;
    let base = (t / sys.cfl_limit(0.5)).ceil() as usize;
    let reference = advance(&sys, &init, t, 8 * base);
    let e1 = advance(&sys, &init, t, base).u.axpy(-1.0, &reference.u).unwrap().sup_norm();
    let e2 = advance(&sys, &init, t, 2 * base).u.axpy(-1.0, &reference.u).unwrap().sup_norm();
    let order = (e1 / e2).log2();
    assert!(order > 3.5, "observed order {order} ({e1:e}, {e2:e})");
}

#[test]
fn free_energy_is_conserved_before_reaching_the_boundary() {
    let (p, g) = setup(1600);
    let sys = PhysSystem::linear(p, g.clone()).unwrap();
    let init = bump(&g, 1.0);
    let e0 = free_energy(&init);
    let end = advance(&sys, &init, 2.0, 1000);
    let e1 = free_energy(&end);
    assert!((e1 / e0 - 1.0).abs() < 1e-3, "{e0} -> {e1}");
}

#[test]
fn blowup_time_scales_with_the_data() {
    let (p, g) = setup(4096);
    let sys = PhysSystem::new(p, g.clone()).unwrap();
    let mut times = Vec::new();
    for blowup in [0.5, 1.0] {
        let init = PhysState::exact(g.clone(), &p, blowup, 0.0, 1.0).unwrap();
        times.push(evolve_physical(&sys, &init, &PhysConfig::default()).unwrap().fit.unwrap().t_est);
    }
    assert!((times[0] / times[1] - 0.5).abs() < 2e-3, "{times:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn small_data_disperses(amp in 0.01f64..0.1) {
        let (p, g) = setup(800);
        let sys = PhysSystem::new(p, g.clone()).unwrap();
        let cfg = PhysConfig { t_end: 3.0, ..PhysConfig::default() };
        let run = evolve_physical(&sys, &bump(&g, amp), &cfg).unwrap();
        prop_assert_eq!(run.trajectory.outcome, Outcome::NoBlowup);
        let peak = run.trajectory.origin.iter().fold(0.0f64, |m, u| m.max(u.abs()));
        prop_assert!(peak < 10.0 * amp);
    }
}
