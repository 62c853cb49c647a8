//! Task execution and report assembly.
//!
//! The report is canonical: for a fixed (config, seed) two runs produce
//! byte-identical JSON. Wall-clock timings therefore go to the log only.

use crate::config::{FixedPair, Scenario, TaskSpec};
use acgeom::contact::{level_set_approximation, ApproxConfig};
use acgeom::disc::{hartogs_sweep, solve_disc, SolveConfig};
use acgeom::exhaustion::{
    d_of_v, df_search, recheck_certificate, DFCertificate, DomainSpec, LadderRung, RhoField,
    SearchConfig,
};
use acgeom::exhaustion::symplectic_check;
use acgeom::field::StructureField;
use acgeom::levi::{LeviDiscConfig, LeviReport};
use acgeom::num::{smax, smin};
use acgeom::poly::PolyField;
use acgeom::sample::{self, Stream};
use acgeom::Error;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use std::time::Instant;

#[derive(Clone, Debug, Serialize)]
pub struct TaskReport {
    pub name: String,
    pub kind: &'static str,
    /// "pass", "fail", or "error"
    pub status: String,
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub tool: String,
    pub scenario: String,
    pub dimension: usize,
    pub seed: u64,
    pub tasks: Vec<TaskReport>,
    pub all_passed: bool,
}

fn cvec(xs: &[[f64; 2]]) -> Vec<Complex64> {
    xs.iter().map(|[a, b]| Complex64::new(*a, *b)).collect()
}

fn err_report(name: &str, kind: &'static str, e: &Error) -> TaskReport {
    TaskReport {
        name: name.to_string(),
        kind,
        status: "error".into(),
        detail: json!({ "error": e.to_string() }),
    }
}

pub fn run_scenario(scenario: &Scenario) -> Result<RunReport, crate::config::ConfigError> {
    let structure = scenario.build_structure()?;
    let domain = scenario.build_domain()?;
    let psi = scenario.build_psi()?;
    let mut certificate: Option<DFCertificate<f64>> = None;
    let mut tasks = Vec::with_capacity(scenario.tasks.len());
    for task in &scenario.tasks {
        let started = Instant::now();
        let report = run_task(scenario, &structure, &domain, &psi, &mut certificate, task);
        log::info!(
            "task {} ({}): {} in {:.2?}",
            report.name,
            report.kind,
            report.status,
            started.elapsed()
        );
        tasks.push(report);
    }
    let all_passed = tasks.iter().all(|t| t.status == "pass");
    Ok(RunReport {
        tool: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
        scenario: scenario.name.clone(),
        dimension: scenario.dimension,
        seed: scenario.seed,
        tasks,
        all_passed,
    })
}

fn run_task(
    scenario: &Scenario,
    structure: &StructureField<f64>,
    domain: &DomainSpec<f64>,
    psi: &PolyField<f64>,
    certificate: &mut Option<DFCertificate<f64>>,
    task: &TaskSpec,
) -> TaskReport {
    let name = task.name().to_string();
    let kind = task.kind();
    match task {
        TaskSpec::Disc {
            center,
            direction,
            tol,
            ..
        } => {
            let mut cfg = SolveConfig::default();
            cfg.tol = *tol;
            cfg.match_tol = *tol;
            match solve_disc(structure, &cvec(center), &cvec(direction), &cfg) {
                Ok(disc) => {
                    let pass = disc.residual <= *tol && disc.log.final_match_error <= *tol;
                    let nodes: Vec<Value> = disc
                        .grid
                        .nodes
                        .iter()
                        .enumerate()
                        .map(|(j, tau)| {
                            let comps: Vec<[f64; 2]> = disc
                                .values
                                .iter()
                                .map(|c| [c[j].re, c[j].im])
                                .collect();
                            json!({ "r": tau.norm(), "theta": tau.arg(), "z": comps })
                        })
                        .collect();
                    TaskReport {
                        name,
                        kind,
                        status: if pass { "pass" } else { "fail" }.into(),
                        detail: json!({
                            "residual": disc.residual,
                            "match_error": disc.log.final_match_error,
                            "newton_steps": disc.log.newton_steps,
                            "picard_steps": disc.log.picard_steps_total,
                            "nodes": nodes,
                        }),
                    }
                }
                Err(e) => err_report(&name, kind, &e),
            }
        }
        TaskSpec::LeviScan {
            n_points,
            dirs_per_point,
            radius,
            gap_tol,
            ..
        } => {
            let dim = scenario.dimension;
            let mut report = LeviReport::default();
            let cfg = LeviDiscConfig::default();
            for i in 0..*n_points {
                let p = sample::ball_point(dim, *radius, scenario.seed, Stream::BallPoints, i as u64);
                for d in 0..*dirs_per_point {
                    let v = sample::unit_direction(
                        dim,
                        scenario.seed,
                        Stream::Directions,
                        (i * dirs_per_point + d) as u64,
                    );
                    if let Err(e) =
                        report.push_sample(structure, &domain.r, &p, &v, 1e-3, &cfg)
                    {
                        return err_report(&name, kind, &e);
                    }
                }
            }
            let pass = report.max_gap() < *gap_tol && !report.records.is_empty();
            TaskReport {
                name,
                kind,
                status: if pass { "pass" } else { "fail" }.into(),
                detail: json!({
                    "max_gap": report.max_gap(),
                    "min_direct": report.min_direct(),
                    "records": report.records,
                }),
            }
        }
        TaskSpec::DfSearch {
            fixed,
            n_collar_points,
            dirs_per_point,
            expect_precondition_failure,
            recheck,
            ..
        } => {
            let mut cfg = SearchConfig::default();
            cfg.seed = scenario.seed;
            cfg.n_collar_points = *n_collar_points;
            cfg.dirs_per_point = *dirs_per_point;
            if *expect_precondition_failure {
                return match df_search(structure, domain, psi, &cfg) {
                    Err(Error::PreconditionFailed { detail }) => TaskReport {
                        name,
                        kind,
                        status: "pass".into(),
                        detail: json!({ "rejected": true, "reason": detail }),
                    },
                    Err(e) => err_report(&name, kind, &e),
                    Ok(outcome) => TaskReport {
                        name,
                        kind,
                        status: "fail".into(),
                        detail: json!({
                            "rejected": false,
                            "unexpected_certificate": outcome.certificate,
                        }),
                    },
                };
            }
            if let Some(pair) = fixed {
                return match fixed_pair_check(structure, domain, psi, pair, &cfg) {
                    Ok((cert, rung)) => {
                        let pass = cert.pass;
                        if pass {
                            *certificate = Some(cert.clone());
                        }
                        TaskReport {
                            name,
                            kind,
                            status: if pass { "pass" } else { "fail" }.into(),
                            detail: json!({ "certificate": cert, "ladder": [rung] }),
                        }
                    }
                    Err(e) => err_report(&name, kind, &e),
                };
            }
            match df_search(structure, domain, psi, &cfg) {
                Ok(outcome) => {
                    let recheck_min = if *recheck {
                        match recheck_certificate(
                            structure,
                            domain,
                            psi,
                            &outcome.certificate,
                            50,
                            scenario.seed.wrapping_add(1),
                            1e-3,
                        ) {
                            Ok(m) => Some(m),
                            Err(e) => return err_report(&name, kind, &e),
                        }
                    } else {
                        None
                    };
                    let pass = outcome.certificate.pass
                        && outcome.eta_half_recheck
                        && recheck_min.map_or(true, |m| m > 0.0);
                    if pass {
                        *certificate = Some(outcome.certificate.clone());
                    }
                    TaskReport {
                        name,
                        kind,
                        status: if pass { "pass" } else { "fail" }.into(),
                        detail: json!({
                            "certificate": outcome.certificate,
                            "ladder": outcome.ladder,
                            "eta_half_recheck": outcome.eta_half_recheck,
                            "recheck_min_levi": recheck_min,
                        }),
                    }
                }
                Err(e @ (Error::SearchExhausted { .. } | Error::PreconditionFailed { .. })) => {
                    TaskReport {
                        name,
                        kind,
                        status: "fail".into(),
                        detail: json!({ "error": e.to_string() }),
                    }
                }
                Err(e) => err_report(&name, kind, &e),
            }
        }
        TaskSpec::Symplectic {
            n_points, n_dirs, ..
        } => {
            let Some(cert) = certificate.as_ref() else {
                return TaskReport {
                    name,
                    kind,
                    status: "fail".into(),
                    detail: json!({ "error": "no passing certificate from an earlier df_search" }),
                };
            };
            let rho = match RhoField::new(&domain.r, psi, cert.a, cert.eta) {
                Ok(r) => r,
                Err(e) => return err_report(&name, kind, &e),
            };
            // only the inner half of the collar: the FD stencils for the
            // closedness check must not straddle the boundary, where the
            // derivatives of ρ are singular
            let mut points = Vec::with_capacity(*n_points);
            let mut index = 0u64;
            while points.len() < *n_points && index < 64 * *n_points as u64 {
                match sample::collar_point(
                    &domain.r,
                    domain.chart_radius,
                    domain.collar_depth,
                    scenario.seed,
                    300_000 + index,
                ) {
                    Ok(p) => {
                        if domain.r.eval_real(&p) < -0.25 * domain.collar_depth {
                            points.push(p);
                        }
                    }
                    Err(e) => return err_report(&name, kind, &e),
                }
                index += 1;
            }
            match symplectic_check(structure, &rho, &points, *n_dirs, scenario.seed, 1e-3) {
                Ok(samples) => {
                    let tame_min = samples
                        .iter()
                        .map(|s| s.tameness_min)
                        .fold(f64::INFINITY, smin);
                    // residual relative to the local magnitude of ω
                    let closed_max = samples
                        .iter()
                        .map(|s| {
                            let scale = s.omega.iter().fold(0.0, |a, &x| smax(a, x.abs()));
                            s.closedness_residual / smax(scale, 1.0)
                        })
                        .fold(0.0, smax);
                    let pass = samples.iter().all(|s| s.tame) && closed_max < 1e-3;
                    TaskReport {
                        name,
                        kind,
                        status: if pass { "pass" } else { "fail" }.into(),
                        detail: json!({
                            "tameness_min": tame_min,
                            "closedness_max_relative": closed_max,
                            "samples": samples,
                        }),
                    }
                }
                Err(e) => err_report(&name, kind, &e),
            }
        }
        TaskSpec::ContactApprox {
            deltas, n_boundary, ..
        } => {
            let Some(cert) = certificate.as_ref() else {
                return TaskReport {
                    name,
                    kind,
                    status: "fail".into(),
                    detail: json!({ "error": "no passing certificate from an earlier df_search" }),
                };
            };
            let mut cfg = ApproxConfig::default();
            cfg.seed = scenario.seed;
            cfg.n_boundary = *n_boundary;
            match level_set_approximation(structure, domain, psi, cert, deltas, &cfg) {
                Ok(record) => {
                    let noncritical: Vec<_> =
                        record.levels.iter().filter(|l| !l.critical).collect();
                    let pass = !noncritical.is_empty()
                        && noncritical.iter().all(|l| l.contact_min_abs > 0.0);
                    TaskReport {
                        name,
                        kind,
                        status: if pass { "pass" } else { "fail" }.into(),
                        detail: serde_json::to_value(&record).unwrap_or(Value::Null),
                    }
                }
                Err(e) => err_report(&name, kind, &e),
            }
        }
        TaskSpec::HartogsSweep {
            center_start,
            center_end,
            direction,
            n_params,
            margin,
            ..
        } => {
            let a = cvec(center_start);
            let b = cvec(center_end);
            let v = cvec(direction);
            let path = |t: f64| -> (Vec<Complex64>, Vec<Complex64>) {
                let p = a
                    .iter()
                    .zip(&b)
                    .map(|(x, y)| x * (1.0 - t) + y * t)
                    .collect();
                (p, v.clone())
            };
            let params: Vec<f64> = (0..*n_params)
                .map(|j| j as f64 / (*n_params as f64 - 1.0))
                .collect();
            let sweep = hartogs_sweep(
                structure,
                &domain.r,
                &path,
                &params,
                &SolveConfig::default(),
                *margin,
            );
            let entries: Vec<Value> = sweep
                .entries
                .iter()
                .map(|(t, res)| match res {
                    Ok(d) => json!({ "t": t, "solved": true, "residual": d.residual }),
                    Err(e) => json!({ "t": t, "solved": false, "error": e.to_string() }),
                })
                .collect();
            let pass = sweep.entries.iter().all(|(_, r)| r.is_ok());
            TaskReport {
                name,
                kind,
                status: if pass { "pass" } else { "fail" }.into(),
                detail: json!({ "entries": entries, "verdicts": sweep.verdicts }),
            }
        }
    }
}

/// Single (A, η) Diederich–Fornaess check on seeded collar samples: the
/// same positivity, direct-Levi, and identity-agreement criteria as one
/// rung of the ladder search.
fn fixed_pair_check(
    structure: &StructureField<f64>,
    domain: &DomainSpec<f64>,
    psi: &PolyField<f64>,
    pair: &FixedPair,
    cfg: &SearchConfig<f64>,
) -> acgeom::Result<(DFCertificate<f64>, LadderRung<f64>)> {
    let rho = RhoField::new(&domain.r, psi, pair.a, pair.eta)?;
    let dim = domain.r.dim();
    let mut min_d = f64::INFINITY;
    let mut min_levi = f64::INFINITY;
    let mut agreement_gap: f64 = 0.0;
    let mut count = 0usize;
    for i in 0..cfg.n_collar_points {
        let p = sample::collar_point(
            &domain.r,
            domain.chart_radius,
            domain.collar_depth,
            cfg.seed,
            i as u64,
        )?;
        for d in 0..cfg.dirs_per_point {
            let v = sample::unit_direction(
                dim,
                cfg.seed,
                Stream::Directions,
                (i * cfg.dirs_per_point + d) as u64,
            );
            let terms = d_of_v(structure, domain, psi, pair.a, pair.eta, &p, &v, cfg.eps)?;
            min_d = smin(min_d, terms.total);
            count += 1;
            if count % 8 == 0 {
                let direct = acgeom::levi::levi_direct(structure, &rho, &p, &v, cfg.eps)?;
                min_levi = smin(min_levi, direct);
                let rv = domain.r.eval_real(&p);
                let formula = pair.eta
                    * (-rv).powf(pair.eta - 2.0)
                    * (-pair.eta * pair.a * psi.eval_real(&p)).exp()
                    * terms.total;
                let gap = (formula - direct).abs() / smax(formula.abs(), direct.abs());
                agreement_gap = smax(agreement_gap, gap);
            }
        }
    }
    let pass = min_d > cfg.margin && min_levi > cfg.margin && agreement_gap < cfg.agreement_tol;
    let cert = DFCertificate {
        a: pair.a,
        eta: pair.eta,
        collar: domain.collar_depth,
        n_samples: count,
        min_d,
        min_levi_rho: min_levi,
        agreement_gap,
        seed: cfg.seed,
        pass,
    };
    let rung = LadderRung {
        a: pair.a,
        eta: pair.eta,
        min_d,
        certified: pass,
    };
    Ok((cert, rung))
}
