//! Subcommand bodies. Each one writes into a fresh run directory and reports
//! the exit code the process should return.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use anyhow::Result;
use num_complex::Complex64 as C64;
use serde_json::json;
use ymblow::inequality::{self, Family, ProductWeight, RatioReport};
use ymblow::physical::{evolve_physical, fit_blowup_corrected, rescaled_profile_error, Outcome, PhysState, PhysSystem};
use ymblow::radial::field::{interpolate_even, RadialField};
use ymblow::radial::grid::RadialGrid;
use ymblow::radial::hankel::HankelPlan;
use ymblow::radial::sobolev::NormSpec;
use ymblow::similarity::modulation::{modulate, Perturbation};
use ymblow::similarity::{
    initial_perturbation, linear_fit, similarity_hankel, Dynamics, SimState, SimSystem, TaperedNorm,
};
use ymblow::spectral::{scan, spectral_gap, EigenProbe, SpectralBox};
use ymblow::ModelParams;

use crate::config::{
    canonical, InequalityConfig, ModulateConfig, PerturbationSpec, PhysData, PhysRunConfig, RunConfig, SimData,
    SimRunConfig, SpectrumConfig, Suite, VerifyConfig,
};
use crate::criteria::{self, leading_stable_rate, CriterionReport, ModulationBench, Timed};
use crate::run::{RunDir, RunRecord};
use crate::Failure;

/// Result of a subcommand that created a run directory.
#[derive(Debug)]
pub struct Finished {
    pub record: RunRecord,
    pub status: String,
    pub exit_code: i32,
}

/// Creates the run directory, stores the canonical configuration and runs
/// `body`, which returns the status and exit code. Failures inside `body` are
/// recorded in `error.json` before they propagate.
fn in_run_dir<C: RunConfig>(
    out: &Path,
    command: &str,
    cfg: &C,
    body: impl FnOnce(&mut RunDir) -> Result<(String, i32)>,
) -> Result<Finished> {
    let mut dir = RunDir::create(out, command)?;
    dir.write_bytes("config.json", canonical(cfg).as_bytes())?;
    let t0 = Instant::now();
    match body(&mut dir) {
        Ok((status, exit_code)) => {
            dir.record_time("run", t0.elapsed().as_secs_f64());
            let record = dir.finish(cfg.config_version(), &status, exit_code)?;
            Ok(Finished { record, status, exit_code })
        }
        Err(e) => {
            let (code, reason) = crate::classify(&e);
            dir.write_json("error.json", &json!({ "reason": reason, "message": e.to_string() }))?;
            dir.finish(cfg.config_version(), "error", code)?;
            Err(e)
        }
    }
}

pub fn params(d: u32) -> Result<String> {
    let p = ModelParams::new(d).map_err(Failure::from)?;
    let v = json!({
        "d": p.d,
        "n": p.n,
        "alpha": p.alpha,
        "beta": p.beta,
        "profile_at_origin": p.phi(0.0),
        "gauge_eigenvalue": 1.0,
    });
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

fn params_for(d: u32) -> Result<ModelParams> {
    Ok(ModelParams::new(d).map_err(Failure::from)?)
}

pub fn evolve_phys(cfg: &PhysRunConfig, out: &Path) -> Result<Finished> {
    let p = params_for(cfg.d)?;
    in_run_dir(out, "evolve-phys", cfg, |dir| {
        let g = Arc::new(RadialGrid::uniform(cfg.r_max, cfg.nodes, p.n).map_err(Failure::from)?);
        let sys = PhysSystem::new(p, g.clone())?;
        let init = match cfg.data {
            PhysData::Exact { blowup, scale } => PhysState::exact(g.clone(), &p, blowup, 0.0, scale)?,
            PhysData::Zero => PhysState::zeros(g.clone()),
            PhysData::Perturbed { seed, index, size } => {
                let plan = HankelPlan::new(g.clone(), similarity_hankel())?;
                let v = Perturbation::seeded(&plan, NormSpec::evolution(p.n), seed, index, size)?;
                let base = PhysState::exact(g.clone(), &p, 1.0, 0.0, 1.0)?;
                PhysState::new(0.0, base.u.axpy(1.0, &v.v0)?, base.ut.axpy(1.0, &v.v1)?)?
            }
        };
        let run = evolve_physical(&sys, &init, &cfg.run).map_err(Failure::from)?;
        let tr = &run.trajectory;
        dir.write_csv("origin.csv", &["t", "u0"], tr.t.iter().zip(&tr.origin).map(|(t, u)| vec![*t, *u]))?;
        let mut summary = json!({
            "outcome": tr.outcome,
            "steps": tr.steps,
            "t_last": tr.t.last(),
            "boundary_contaminated": tr.boundary_contaminated,
            "fit": run.fit,
        });
        if let Some(fit) = run.fit {
            let omega = match cfg.correction_exponent {
                Some(w) => w,
                None => leading_stable_rate(cfg.d)?,
            };
            let corrected = fit_blowup_corrected(tr, cfg.corrected_fit_start, omega, cfg.corrected_fit_search).ok();
            let t_ref = corrected.map_or(fit.t_est, |c| c.t_est);
            let err = rescaled_profile_error(tr, &g, &p, t_ref, cfg.profile_window, cfg.profile_points)?;
            dir.write_csv("profile_error.csv", &["t", "sup_error"], err.iter().map(|(t, e)| vec![*t, *e]))?;
            let mut rows = Vec::new();
            for snap in &tr.snapshots {
                let s = t_ref - snap.t;
                for j in 0..cfg.profile_points {
                    let xi = cfg.profile_window * j as f64 / (cfg.profile_points.max(2) - 1) as f64;
                    let v = interpolate_even(&g, &snap.u, s * xi)?;
                    rows.push(vec![snap.t, xi, s * s * v, p.phi(xi)]);
                }
            }
            dir.write_csv("rescaled_snapshots.csv", &["t", "xi", "rescaled_u", "profile"], rows)?;
            summary["corrected_fit"] = json!(corrected);
            summary["correction_exponent"] = json!(omega);
            summary["reference_time"] = json!(t_ref);
            summary["profile_error_first"] = json!(err.first().map(|e| e.1));
            summary["profile_error_last"] = json!(err.last().map(|e| e.1));
        }
        dir.write_json("blowup_fit.json", &summary)?;
        let status = match tr.outcome {
            Outcome::NoBlowup => "no blowup",
            Outcome::Blowup => "blowup",
            Outcome::ResolutionLimit => "blowup (resolution limit)",
        };
        Ok((status.to_string(), 0))
    })
}

pub fn evolve_sim(cfg: &SimRunConfig, out: &Path) -> Result<Finished> {
    let p = params_for(cfg.d)?;
    let spec = cfg.spec.unwrap_or_else(|| NormSpec::evolution(p.n));
    NormSpec::new(spec.s1, spec.s2).map_err(Failure::from)?;
    in_run_dir(out, "evolve-sim", cfg, |dir| {
        let g = Arc::new(RadialGrid::uniform(cfg.rho_max, cfg.nodes, p.n).map_err(Failure::from)?);
        let sys = SimSystem::new(p, cfg.dynamics, g.clone())?;
        let full = cfg.dynamics == Dynamics::Full;
        let profile = SimState::profile(g.clone(), &p);
        let deviation = match cfg.data {
            SimData::Profile => SimState::new(0.0, RadialField::zeros(g.clone()), RadialField::zeros(g.clone()))?,
            SimData::Gauge { amplitude } => SimState::new(
                0.0,
                RadialField::from_fn(g.clone(), |r| amplitude * p.gauge_mode(r).0),
                RadialField::from_fn(g.clone(), |r| amplitude * p.gauge_mode(r).1),
            )?,
            SimData::Seeded { seed, index, size, t_blowup } => {
                let src = Arc::new(RadialGrid::uniform(cfg.source_r_max, cfg.source_nodes, p.n)?);
                let plan = HankelPlan::new(src, similarity_hankel())?;
                let v = Perturbation::seeded(&plan, NormSpec::evolution(p.n), seed, index, size)?;
                initial_perturbation(g.clone(), &p, &v.v0, &v.v1, t_blowup)?
            }
        };
        let mut state = if full {
            SimState::new(0.0, profile.u1.axpy(1.0, &deviation.u1)?, profile.u2.axpy(1.0, &deviation.u2)?)?
        } else {
            deviation
        };
        let norm = TaperedNorm::standard(g.clone(), spec)?;
        let mut rows = Vec::new();
        let mut failure = None;
        let mut next = 0.0;
        sys.evolve(&mut state, cfg.tau_end, sys.max_step(cfg.cfl), cfg.cfl, |s| {
            if s.tau + 1e-9 >= next {
                next += cfg.sample_every;
                let dev = if full {
                    match (s.u1.axpy(-1.0, &profile.u1), s.u2.axpy(-1.0, &profile.u2)) {
                        (Ok(a), Ok(b)) => SimState { tau: s.tau, u1: a, u2: b },
                        (Err(e), _) | (_, Err(e)) => {
                            failure = Some(e);
                            return std::ops::ControlFlow::Break(());
                        }
                    }
                } else {
                    s.clone()
                };
                match norm.norm(&dev) {
                    Ok(x) => rows.push(vec![s.tau, x, dev.u1.origin_value(), dev.u1.sup_norm()]),
                    Err(e) => {
                        failure = Some(e);
                        return std::ops::ControlFlow::Break(());
                    }
                }
            }
            std::ops::ControlFlow::Continue(())
        })?;
        if let Some(e) = failure {
            return Err(Failure::from(e).into());
        }
        let half: Vec<&Vec<f64>> = rows.iter().filter(|r| r[0] >= 0.5 * cfg.tau_end && r[1] > 0.0).collect();
        let rate = if half.len() >= 3 {
            let xs: Vec<f64> = half.iter().map(|r| r[0]).collect();
            let ys: Vec<f64> = half.iter().map(|r| r[1].ln()).collect();
            linear_fit(&xs, &ys).ok().map(|(a, _)| a)
        } else {
            None
        };
        let last = rows.last().cloned();
        dir.write_csv("norm_series.csv", &["tau", "norm", "origin", "sup_deviation"], rows)?;
        dir.write_csv(
            "final_state.csv",
            &["rho", "u1", "u2"],
            g.nodes().iter().enumerate().map(|(i, &r)| vec![r, state.u1.values()[i], state.u2.values()[i]]),
        )?;
        dir.write_json(
            "summary.json",
            &json!({ "dynamics": cfg.dynamics, "spec": spec, "tau_end": state.tau,
                "last_sample": last, "late_growth_rate": rate }),
        )?;
        Ok(("completed".to_string(), 0))
    })
}

pub fn modulate_cmd(cfg: &ModulateConfig, out: &Path) -> Result<Finished> {
    params_for(cfg.d)?;
    in_run_dir(out, "modulate", cfg, |dir| {
        let bench = ModulationBench::new(cfg.d, cfg.rho_max, cfg.nodes, cfg.source_r_max, cfg.source_nodes)?;
        let v = match cfg.perturbation {
            PerturbationSpec::Zero => Perturbation::zero(bench.source.clone()),
            PerturbationSpec::Seeded { seed, index, size } => {
                Perturbation::seeded(&bench.plan, bench.spec, seed, index, size)?
            }
        };
        let m = modulate(&bench.sim, &v, &bench.norm, &cfg.modulation).map_err(Failure::from)?;
        dir.write_csv(
            "probes.csv",
            &["t_blowup", "origin_value", "tau_end"],
            m.probes.iter().map(|p| vec![p.t_blowup, p.value, p.tau_end]),
        )?;
        dir.write_csv(
            "norm_series.csv",
            &["tau", "norm"],
            m.series.tau.iter().zip(&m.series.norm).map(|(t, x)| vec![*t, *x]),
        )?;
        dir.write_json(
            "modulation.json",
            &json!({ "t_star": m.t_star, "bracket": m.bracket, "iterations": m.iterations,
                "fit": m.fit, "truncation": m.truncation }),
        )?;
        Ok((format!("T* = {:.12}", m.t_star), 0))
    })
}

pub fn spectrum(cfg: &SpectrumConfig, out: &Path) -> Result<Finished> {
    let p = params_for(cfg.d)?;
    in_run_dir(out, "spectrum", cfg, |dir| {
        let probe = EigenProbe::new(p, cfg.form, cfg.probe);
        let [a, b, c, d] = cfg.scan_box;
        let rep = scan(
            &probe,
            SpectralBox::new(a, b, c, d).map_err(Failure::from)?,
            cfg.exclude.map(|[x, y]| C64::new(x, y)),
            cfg.exclude_radius,
        )?;
        let gap = match cfg.gap_omega_max {
            Some(w) => Some(spectral_gap(&probe, w, cfg.gap_step, b.max(1.5), d.max(-c))?),
            None => None,
        };
        dir.write_json("scan.json", &json!({ "count": rep.count, "scan": rep, "gap": gap }))?;
        Ok((format!("count = {}", rep.count), 0))
    })
}

fn suite_reports(cfg: &InequalityConfig) -> Result<(Vec<RatioReport>, Option<serde_json::Value>)> {
    let d = cfg.d;
    let n = d + 2;
    let h = &cfg.harness;
    let fam = Family::from_config(h);
    let spec = NormSpec::new(cfg.spec.s1, cfg.spec.s2).map_err(Failure::from)?;
    let want = |s: Suite| cfg.suite == Suite::All || cfg.suite == s;
    let mut reports = Vec::new();
    let e = |r: ymblow::Result<RatioReport>| r.map_err(Failure::from);
    if want(Suite::Product) {
        reports.push(e(inequality::product_estimate(n, spec, ProductWeight::One, &fam, h))?);
        reports.push(e(inequality::product_estimate(n, spec, ProductWeight::Decaying, &fam, h))?);
    }
    if want(Suite::Cubic) {
        reports.push(e(inequality::cubic_estimate(n, spec, &fam, h))?);
    }
    if want(Suite::Lipschitz) {
        reports.push(e(inequality::lipschitz_remainder(d, spec, cfg.lipschitz_delta, &fam, h))?);
    }
    if want(Suite::Square) {
        reports.extend(inequality::square_estimates(n, cfg.square_k, &fam, h).map_err(Failure::from)?);
    }
    if want(Suite::Hardy) {
        reports.push(e(inequality::hardy(n, cfg.hardy_k, &fam, h))?);
    }
    if want(Suite::WeightedSup) {
        reports.push(e(inequality::weighted_sup(n, cfg.sup_s, 0, &fam, h))?);
        reports.push(e(inequality::weighted_sup(n, cfg.sup_s, 1, &fam, h))?);
    }
    if want(Suite::Corotational) {
        reports.push(e(inequality::corotational_sup(d, &fam, h))?);
    }
    let mut equivalence = None;
    if want(Suite::Equivalence) {
        let eq = inequality::norm_equivalence(d, &Family::new(h.seed, 50, &h.ranges), h).map_err(Failure::from)?;
        let (mc, se) = inequality::monte_carlo_sigma_integral(
            d,
            |r| (-r * r).exp(),
            cfg.monte_carlo_samples,
            cfg.monte_carlo_width,
            h.seed,
        );
        // ∫_{R^{d+2}} e^{-2|x|²} dx = (π/2)^{(d+2)/2}
        let den = (std::f64::consts::PI / 2.0).powf(0.5 * n as f64);
        let (ratio, err) = (mc / den, se / den);
        let passed = eq.max_rel_dev <= cfg.equivalence_tol && (ratio - eq.expected).abs() <= 4.0 * err;
        equivalence = Some(json!({ "expected": eq.expected, "max_rel_dev": eq.max_rel_dev, "values": eq.values,
            "monte_carlo_ratio": ratio, "monte_carlo_stderr": err, "samples": cfg.monte_carlo_samples, "passed": passed }));
    }
    Ok((reports, equivalence))
}

pub fn inequalities(cfg: &InequalityConfig, out: &Path) -> Result<Finished> {
    params_for(cfg.d)?;
    in_run_dir(out, "inequalities", cfg, |dir| {
        let (reports, equivalence) = suite_reports(cfg)?;
        let mut rows = Vec::new();
        for r in &reports {
            for m in &r.ratios {
                rows.push(vec![r.id.clone(), m.member.to_string(), m.lambda.to_string(), m.ratio.to_string()]);
            }
        }
        dir.write_table("ratios.csv", &["inequality", "member", "lambda", "ratio"], rows)?;
        let summary: Vec<_> = reports
            .iter()
            .map(|r| json!({ "id": r.id, "max_ratio": r.max_ratio, "argmax": r.argmax, "coarse_max": r.coarse_max,
                "drift": r.drift, "all_finite": r.all_finite, "stable": r.stable, "dilation_excess": r.dilation_excess }))
            .collect();
        let eq_ok = equivalence.as_ref().is_none_or(|e| e["passed"].as_bool() == Some(true));
        let passed = reports.iter().all(RatioReport::passed) && eq_ok;
        dir.write_json(
            "ratios.json",
            &json!({ "seed": cfg.harness.seed, "passed": passed, "reports": summary, "equivalence": equivalence }),
        )?;
        Ok(if passed { ("all stable".to_string(), 0) } else { ("unstable or unbounded ratio".to_string(), 1) })
    })
}

pub fn verify(cfg: &VerifyConfig, out: &Path, mut progress: impl FnMut(&Timed)) -> Result<Finished> {
    in_run_dir(out, "verify", cfg, |dir| {
        let results = criteria::run_level(cfg.level, cfg.seed, |t| progress(t));
        for t in &results {
            dir.record_time(&format!("criterion_{:02}", t.report.id), t.seconds);
        }
        let reports: Vec<&CriterionReport> = results.iter().map(|t| &t.report).collect();
        let passed = reports.iter().all(|r| r.passed);
        dir.write_json(
            "verify.json",
            &json!({ "level": cfg.level, "seed": cfg.seed, "passed": passed, "criteria": reports }),
        )?;
        let failed: Vec<String> = reports.iter().filter(|r| !r.passed).map(|r| r.id.to_string()).collect();
        Ok(if passed {
            ("all criteria passed".to_string(), 0)
        } else {
            (format!("failed criteria: {}", failed.join(", ")), 1)
        })
    })
}

/// One-line description of a criterion outcome.
pub fn criterion_line(r: &CriterionReport) -> String {
    format!("criterion {:>2} [{}] {}: {}", r.id, if r.passed { "PASS" } else { "FAIL" }, r.name, r.summary)
}
