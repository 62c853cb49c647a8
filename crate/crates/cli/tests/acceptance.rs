//! End-to-end acceptance checks of the whole toolkit, one test per
//! criterion. Each prints a single pass/fail line (visible with
//! `cargo test -- --nocapture`).

use acgeom::cg::CauchyGreenOp;
use acgeom::contact::{contact_value, level_set_approximation, ApproxConfig};
use acgeom::disc::{disc_jet, hartogs_sweep, solve_disc, JetConfig, SolveConfig};
use acgeom::exhaustion::{
    df_search, recheck_certificate, symplectic_check, DomainSpec, RhoField, SearchConfig,
};
use acgeom::field::StructureField;
use acgeom::grid::DiscGrid;
use acgeom::levi::{
    levi_direct, levi_disc, levi_in_adapted_coords, normalize_at_origin, pushforward_levi_check,
    pushforward_q, standard_levi, LeviDiscConfig,
};
use acgeom::poly::{PolyField, ValueKind};
use acgeom::sample::{self, Stream};
use acgeom::Error;
use num_complex::Complex64;
use std::time::Instant;

fn criterion(n: u32, name: &str, f: impl FnOnce() -> Result<(), String>) {
    match f() {
        Ok(()) => println!("criterion {n:02} {name}: pass"),
        Err(m) => {
            println!("criterion {n:02} {name}: FAIL — {m}");
            panic!("criterion {n:02} {name} failed: {m}");
        }
    }
}

fn cz(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check(ok: bool, msg: impl Fn() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// sup of |∂̄(T f) − f| over 100 interior points by central differences.
fn dbar_residual(
    op: &CauchyGreenOp<f64>,
    grid: &DiscGrid<f64>,
    f: &dyn Fn(Complex64) -> Complex64,
) -> f64 {
    let samples: Vec<Complex64> = grid.nodes.iter().map(|&t| f(t)).collect();
    let img = op.transform(&samples);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let z = Complex64::from_polar(0.05 + 0.85 * (k as f64 / 99.0), k as f64 * 0.37);
        let dx = (img.eval(z + cz(h, 0.0)) - img.eval(z - cz(h, 0.0))) / (2.0 * h);
        let dy = (img.eval(z + cz(0.0, h)) - img.eval(z - cz(0.0, h))) / (2.0 * h);
        let dbar = (dx + cz(0.0, 1.0) * dy) * 0.5;
        worst = worst.max((dbar - f(z)).norm());
    }
    worst
}

#[test]
fn criterion_01_cauchy_green_inverse() {
    criterion(1, "cauchy-green inverse on the 64x64 grid", || {
        let start = Instant::now();
        let grid = DiscGrid::<f64>::new(64, 64);
        let op = CauchyGreenOp::new(&grid).map_err(|e| e.to_string())?;
        let cases: Vec<(&str, Box<dyn Fn(Complex64) -> Complex64>)> = vec![
            ("1", Box::new(|_t| cz(1.0, 0.0))),
            ("conj(t)", Box::new(|t: Complex64| t.conj())),
            ("t conj(t)", Box::new(|t: Complex64| t * t.conj())),
        ];
        for (label, f) in &cases {
            let worst = dbar_residual(&op, &grid, f);
            check(worst < 1e-3, || {
                format!("dbar residual {worst:e} for f = {label}")
            })?;
        }
        // T applied to 1 is ζ̄ pointwise
        let ones: Vec<Complex64> = grid.nodes.iter().map(|_| cz(1.0, 0.0)).collect();
        let img = op.transform(&ones);
        let mut worst: f64 = 0.0;
        for k in 0..100 {
            let z = Complex64::from_polar(0.9 * (k as f64 / 99.0), k as f64 * 1.7);
            worst = worst.max((img.eval(z) - z.conj()).norm());
        }
        check(worst < 1e-4, || format!("|T1 − conj(z)| = {worst:e}"))?;
        let elapsed = start.elapsed();
        check(elapsed.as_secs() < 10, || format!("took {elapsed:.2?}"))
    });
}

#[test]
fn criterion_02_disc_solver() {
    criterion(2, "disc solver: integrable exactness and perturbed convergence", || {
        // Q ≡ 0: the solution is the affine disc itself
        let s0 = StructureField::<f64>::standard(2);
        let p = vec![cz(0.1, -0.05), cz(0.0, 0.2)];
        let v = vec![cz(0.3, 0.0), cz(0.0, 0.15)];
        let d0 = solve_disc(&s0, &p, &v, &SolveConfig::default()).map_err(|e| e.to_string())?;
        // the solution values are the affine disc to machine precision; the
        // grid-measured defect has a ~1e−12 floor from the 1/r weight of the
        // angular derivative at the innermost ring
        check(d0.residual < 1e-11, || format!("affine residual {:e}", d0.residual))?;
        for zeta in [cz(0.0, 0.0), cz(0.5, 0.3), cz(-0.7, 0.2)] {
            let got = d0.eval(zeta);
            for k in 0..2 {
                let want = p[k] + v[k] * zeta;
                check((got[k] - want).norm() < 1e-14, || {
                    format!("affine disc deviates at {zeta}: {:e}", (got[k] - want).norm())
                })?;
            }
        }
        // seeded perturbations with ‖Q‖ ≤ 0.05
        for seed in [1u64, 12, 31] {
            let s = StructureField::seeded_random(2, seed, 0.05).map_err(|e| e.to_string())?;
            let start = Instant::now();
            let d = solve_disc(&s, &p, &v, &SolveConfig::default()).map_err(|e| e.to_string())?;
            let elapsed = start.elapsed();
            check(d.residual < 1e-8, || {
                format!("seed {seed}: residual {:e}", d.residual)
            })?;
            check(d.log.final_match_error < 1e-8, || {
                format!("seed {seed}: match error {:e}", d.log.final_match_error)
            })?;
            check(d.log.newton_steps <= 10, || {
                format!("seed {seed}: {} newton steps", d.log.newton_steps)
            })?;
            check(d.log.picard_steps_total <= 20 * d.log.newton_steps, || {
                format!(
                    "seed {seed}: {} picard steps over {} newton passes",
                    d.log.picard_steps_total, d.log.newton_steps
                )
            })?;
            check(elapsed.as_secs() < 5, || format!("seed {seed}: took {elapsed:.2?}"))?;
        }
        Ok(())
    });
}

#[test]
fn criterion_03_two_method_levi_agreement() {
    criterion(3, "two Levi form methods agree on seeded structures", || {
        let u = PolyField::<f64>::abs_sq(2);
        let cfg = LeviDiscConfig::default();
        let mut count = 0;
        for seed in 0..5u64 {
            let s = StructureField::seeded_random(2, seed, 0.3).map_err(|e| e.to_string())?;
            for i in 0..10u64 {
                let p = sample::ball_point(2, 0.4, seed, Stream::BallPoints, i);
                let t = sample::unit_direction(2, seed, Stream::Directions, i);
                let a = levi_direct(&s, &u, &p, &t, 1e-3).map_err(|e| e.to_string())?;
                let b = levi_disc(&s, &u, &p, &t, &cfg).map_err(|e| e.to_string())?;
                check((a - b).abs() < 1e-4, || {
                    format!("seed {seed} sample {i}: direct {a} vs disc {b}")
                })?;
                count += 1;
            }
        }
        check(count == 50, || format!("only {count} samples"))?;
        // the standard sanity value L(0; e₁) = 4 by both methods
        let s0 = StructureField::<f64>::standard(2);
        let origin = vec![cz(0.0, 0.0); 2];
        let e1 = vec![cz(1.0, 0.0), cz(0.0, 0.0)];
        let a = levi_direct(&s0, &u, &origin, &e1, 1e-3).map_err(|e| e.to_string())?;
        let b = levi_disc(&s0, &u, &origin, &e1, &cfg).map_err(|e| e.to_string())?;
        check((a - 4.0).abs() < 1e-6 && (b - 4.0).abs() < 1e-6, || {
            format!("standard value: direct {a}, disc {b}")
        })
    });
}

#[test]
fn criterion_04_normalization() {
    criterion(4, "quadratic normalization kills the z-linear part", || {
        let origin = vec![cz(0.0, 0.0); 2];
        let phi = PolyField::<f64>::abs_sq(2);
        for seed in 0..20u64 {
            let s = StructureField::seeded_random(2, seed, 0.3).map_err(|e| e.to_string())?;
            let (nm, sp) = normalize_at_origin(&s, 4).map_err(|e| e.to_string())?;
            check(sp.q_origin().max_abs() < 1e-10, || {
                format!("seed {seed}: |Q'(0)| = {:e}", sp.q_origin().max_abs())
            })?;
            // FD z-derivatives of the exact pointwise pushforward at 0
            let h = 1e-5;
            for k in 0..2 {
                let step = |re: f64, im: f64| {
                    let mut w = vec![cz(0.0, 0.0); 2];
                    w[k] = cz(re, im);
                    pushforward_q(&s, &nm.map, &w)
                };
                let qp = step(h, 0.0).map_err(|e| e.to_string())?;
                let qm = step(-h, 0.0).map_err(|e| e.to_string())?;
                let qpi = step(0.0, h).map_err(|e| e.to_string())?;
                let qmi = step(0.0, -h).map_err(|e| e.to_string())?;
                for i in 0..2 {
                    for j in 0..2 {
                        let dx = (qp[(i, j)] - qm[(i, j)]) / cz(2.0 * h, 0.0);
                        let dy = (qpi[(i, j)] - qmi[(i, j)]) / cz(2.0 * h, 0.0);
                        let dz = (dx - cz(0.0, 1.0) * dy) * 0.5;
                        check(dz.norm() < 1e-6, || {
                            format!("seed {seed}: Q'_z(0)[{i}{j}] wrt z_{k} = {:e}", dz.norm())
                        })?;
                    }
                }
            }
            // Levi naturality through the normalization map
            let p = vec![cz(0.04, -0.02), cz(0.01, 0.03)];
            let t = sample::unit_direction(2, seed, Stream::Directions, 77);
            let (lhs, _rhs, gap) =
                pushforward_levi_check(&s, &nm.map, &phi, &p, &t, 1e-3).map_err(|e| e.to_string())?;
            check(gap < 1e-6 * (1.0 + lhs.abs()), || {
                format!("seed {seed}: transport gap {gap:e} at levi {lhs}")
            })?;
            // the ζζ̄ jet coefficient vanishes in normalized coordinates
            let v = vec![cz(0.3, 0.0), cz(0.0, 0.0)];
            let d = solve_disc(&sp, &origin, &v, &SolveConfig::default())
                .map_err(|e| e.to_string())?;
            let jet = disc_jet(&d, &JetConfig::default()).map_err(|e| e.to_string())?;
            let c = jet.c.iter().map(|x| x.norm()).fold(0.0, f64::max);
            check(c < 1e-5, || format!("seed {seed}: normalized |c| = {c:e}"))?;
        }
        // negative control: a surviving z-linear part forces c ≠ 0
        let f = PolyField::new(
            2,
            vec![(vec![1, 0], vec![0, 0], cz(0.4, 0.0))],
            ValueKind::Complex,
        )
        .map_err(|e| e.to_string())?;
        let s_bad = StructureField::single_entry(2, 0, 0, f, 1.0).map_err(|e| e.to_string())?;
        let v = vec![cz(0.3, 0.0), cz(0.0, 0.0)];
        let d = solve_disc(&s_bad, &origin, &v, &SolveConfig::default())
            .map_err(|e| e.to_string())?;
        let jet = disc_jet(&d, &JetConfig::default()).map_err(|e| e.to_string())?;
        let c = jet.c.iter().map(|x| x.norm()).fold(0.0, f64::max);
        check(c > 1e-2, || format!("negative control |c| = {c:e}"))
    });
}

#[test]
fn criterion_05_adapted_coordinates_equality() {
    criterion(5, "disc Levi equals the Hessian form in adapted coordinates", || {
        // r with nonvanishing gradient at 0: |z|² + Re z₁ + 0.5 Re(z₁ z̄₂)
        let r = PolyField::<f64>::abs_sq(2)
            .add(
                &PolyField::new(
                    2,
                    vec![
                        (vec![1, 0], vec![0, 0], cz(0.5, 0.0)),
                        (vec![0, 0], vec![1, 0], cz(0.5, 0.0)),
                        (vec![1, 0], vec![0, 1], cz(0.25, 0.0)),
                        (vec![0, 1], vec![1, 0], cz(0.25, 0.0)),
                    ],
                    ValueKind::Real,
                )
                .map_err(|e| e.to_string())?,
            );
        let cfg = LeviDiscConfig::default();
        for seed in 0..20u64 {
            let s = StructureField::seeded_random(2, seed, 0.2).map_err(|e| e.to_string())?;
            let (_, sp) = normalize_at_origin(&s, 4).map_err(|e| e.to_string())?;
            let t = sample::unit_direction(2, seed, Stream::Directions, 5);
            let (lj, lstd, gap) =
                levi_in_adapted_coords(&sp, &r, &t, &cfg).map_err(|e| e.to_string())?;
            check(gap < 1e-4, || {
                format!("seed {seed}: disc {lj} vs standard {lstd} (gap {gap:e})")
            })?;
        }
        // negative control: skipping normalization leaves an O(Q_z) error
        let origin = vec![cz(0.0, 0.0); 2];
        let mut worst: f64 = 0.0;
        for seed in 0..20u64 {
            let s = StructureField::seeded_random(2, seed, 0.2).map_err(|e| e.to_string())?;
            let t = sample::unit_direction(2, seed, Stream::Directions, 5);
            let lj = levi_disc(&s, &r, &origin, &t, &cfg).map_err(|e| e.to_string())?;
            let lstd = standard_levi(&r, &origin, &t);
            worst = worst.max((lj - lstd).abs());
        }
        check(worst > 1e-2, || {
            format!("non-normalized control gap only {worst:e}")
        })
    });
}

fn certified_search(
    structure: &StructureField<f64>,
    domain: &DomainSpec<f64>,
    label: &str,
) -> Result<(), String> {
    let psi = PolyField::<f64>::abs_sq(2);
    let cfg = SearchConfig::<f64>::default();
    let outcome = df_search(structure, domain, &psi, &cfg)
        .map_err(|e| format!("{label}: {e}"))?;
    let cert = &outcome.certificate;
    check(cert.min_d > 0.0, || format!("{label}: min D = {:e}", cert.min_d))?;
    check(cert.agreement_gap < 1e-3, || {
        format!("{label}: identity gap {:e}", cert.agreement_gap)
    })?;
    check(outcome.eta_half_recheck, || {
        format!("{label}: η/2 does not re-certify")
    })?;
    let fresh = recheck_certificate(structure, domain, &psi, cert, 200, cfg.seed + 1, 1e-3)
        .map_err(|e| format!("{label}: {e}"))?;
    check(fresh > 0.0, || {
        format!("{label}: fresh-sample Levi minimum {fresh:e}")
    })
}

#[test]
fn criterion_06_df_certificates() {
    criterion(6, "exhaustion certificates for ball, egg, perturbed egg", || {
        let start = Instant::now();
        let s0 = StructureField::<f64>::standard(2);
        certified_search(&s0, &DomainSpec::ball(2, 1), "ball")?;
        let egg = DomainSpec::egg(2, 2, 1);
        certified_search(&s0, &egg, "egg")?;
        // a small perturbation that keeps the sampled boundary Levi convex
        let mut done = false;
        let mut last = String::new();
        for seed in 1..=10u64 {
            let s = StructureField::seeded_random(2, seed, 0.05)
                .and_then(|s| s.with_chart_radius(1.5))
                .map_err(|e| e.to_string())?;
            match certified_search(&s, &egg, &format!("egg+seed{seed}")) {
                Ok(()) => {
                    done = true;
                    break;
                }
                Err(m) => last = m,
            }
        }
        check(done, || format!("no perturbed egg certified; last: {last}"))?;
        let elapsed = start.elapsed();
        check(elapsed.as_secs() < 300, || format!("took {elapsed:.2?}"))
    });
}

#[test]
fn criterion_07_negative_controls() {
    criterion(7, "non-pseudoconvex rejection and a Hartogs disc family", || {
        // Ω = {|z₁|² − |z₂|² < 1/4} has Levi-concave boundary directions
        let r = PolyField::new(
            2,
            vec![
                (vec![1, 0], vec![1, 0], cz(1.0, 0.0)),
                (vec![0, 1], vec![0, 1], cz(-1.0, 0.0)),
                (vec![0, 0], vec![0, 0], cz(-0.25, 0.0)),
            ],
            ValueKind::Real,
        )
        .map_err(|e| e.to_string())?;
        let domain = DomainSpec::new(r.clone(), 1.2, None, 2, 64).map_err(|e| e.to_string())?;
        let s0 = StructureField::<f64>::standard(2);
        let psi = PolyField::<f64>::abs_sq(2);
        match df_search(&s0, &domain, &psi, &SearchConfig::default()) {
            Err(Error::PreconditionFailed { .. }) => {}
            Err(e) => return Err(format!("wrong rejection: {e}")),
            Ok(_) => return Err("non-pseudoconvex domain was certified".into()),
        }
        // a family of discs in the z₂-plane: boundaries stay inside Ω while
        // the center node exits through the Hartogs-figure gap
        let path = |t: f64| {
            (
                vec![cz(0.2 + 0.4 * t, 0.0), cz(0.0, 0.0)],
                vec![cz(0.0, 0.0), cz(0.6, 0.0)],
            )
        };
        let params: Vec<f64> = (0..6).map(|k| k as f64 / 5.0).collect();
        let sweep = hartogs_sweep(&s0, &r, &path, &params, &SolveConfig::default(), 1e-3);
        check(sweep.entries.iter().all(|(_, d)| d.is_ok()), || {
            "a family disc failed to solve".into()
        })?;
        let first = sweep.verdicts.first().ok_or("no verdicts")?;
        check(first.contained, || {
            format!("family start not contained: {first:?}")
        })?;
        let last = sweep.verdicts.last().ok_or("no verdicts")?;
        check(last.boundary_contained && !last.contained, || {
            format!("family end should exit through the interior: {last:?}")
        })
    });
}

#[test]
fn criterion_08_symplectic_tameness() {
    criterion(8, "certified exhaustions tame J; pluriharmonic weights do not", || {
        let s0 = StructureField::<f64>::standard(2);
        let domain = DomainSpec::<f64>::ball(2, 1);
        let psi = PolyField::<f64>::abs_sq(2);
        let cfg = SearchConfig::<f64>::default();
        let outcome = df_search(&s0, &domain, &psi, &cfg).map_err(|e| e.to_string())?;
        let cert = outcome.certificate;
        let rho = RhoField::new(&domain.r, &psi, cert.a, cert.eta).map_err(|e| e.to_string())?;
        // inner-collar points so the FD stencils avoid the boundary
        let mut points = Vec::new();
        let mut index = 0u64;
        while points.len() < 8 && index < 512 {
            let p = sample::collar_point(&domain.r, domain.chart_radius, domain.collar_depth, 3, index)
                .map_err(|e| e.to_string())?;
            if domain.r.eval_real(&p) < -0.25 * domain.collar_depth {
                points.push(p);
            }
            index += 1;
        }
        let samples = symplectic_check(&s0, &rho, &points, 4, 3, 1e-3).map_err(|e| e.to_string())?;
        for s in &samples {
            check(s.tame && s.tameness_min > 0.0, || {
                format!("certified ρ not taming: min {:e}", s.tameness_min)
            })?;
        }
        // pluriharmonic u = Re z₁²: ω_u ≡ 0, flagged as not tame
        let u = PolyField::new(
            2,
            vec![
                (vec![2, 0], vec![0, 0], cz(0.5, 0.0)),
                (vec![0, 0], vec![2, 0], cz(0.5, 0.0)),
            ],
            ValueKind::Real,
        )
        .map_err(|e| e.to_string())?;
        let interior = vec![vec![cz(0.2, 0.1), cz(-0.1, 0.3)]];
        let flat = symplectic_check(&s0, &u, &interior, 4, 3, 1e-3).map_err(|e| e.to_string())?;
        check(!flat[0].tame && flat[0].tameness_min.abs() < 1e-8, || {
            format!(
                "pluriharmonic weight: tame = {}, min = {:e}",
                flat[0].tame, flat[0].tameness_min
            )
        })
    });
}

#[test]
fn criterion_09_contact_approximation_ladder() {
    criterion(9, "level sets approximate the boundary confoliation", || {
        let start = Instant::now();
        let s0 = StructureField::<f64>::standard(2);
        let egg = DomainSpec::<f64>::egg(2, 2, 1);
        let psi = PolyField::<f64>::abs_sq(2);
        let outcome =
            df_search(&s0, &egg, &psi, &SearchConfig::default()).map_err(|e| e.to_string())?;
        let mut cfg = ApproxConfig::<f64>::default();
        cfg.n_boundary = 12;
        let deltas = [1e-1, 1e-2, 1e-3, 1e-4];
        let record = level_set_approximation(&s0, &egg, &psi, &outcome.certificate, &deltas, &cfg)
            .map_err(|e| e.to_string())?;
        let usable: Vec<_> = record.levels.iter().filter(|l| !l.critical).collect();
        check(usable.len() >= 2, || {
            format!("only {} non-critical levels", usable.len())
        })?;
        for l in &usable {
            check(l.contact_min_abs > 0.0, || {
                format!("level δ = {}: contact minimum {:e}", l.delta, l.contact_min_abs)
            })?;
        }
        // the boundary itself is a confoliation, with an exactly degenerate
        // direction on the circle {z₂ = 0}
        check(record.boundary_confoliation_min > -1e-6, || {
            format!("sampled boundary minimum {:e}", record.boundary_confoliation_min)
        })?;
        let flat_point = vec![cz(1.0, 0.0), cz(0.0, 0.0)];
        let cs = contact_value(&s0, &egg.r, &flat_point, 1e-3).map_err(|e| e.to_string())?;
        check(cs.confoliation_min.abs() < 1e-6, || {
            format!("degenerate-point confoliation {:e}", cs.confoliation_min)
        })?;
        // C⁰ and C¹ distances decrease along the ladder and end below 1e−3
        for k in 1..usable.len() {
            check(usable[k].c0_distance < usable[k - 1].c0_distance, || {
                format!("c0 not decreasing at δ = {}", usable[k].delta)
            })?;
            check(usable[k].c1_distance < usable[k - 1].c1_distance, || {
                format!("c1 not decreasing at δ = {}", usable[k].delta)
            })?;
        }
        let tail = usable.last().unwrap();
        check(tail.c0_distance < 1e-3 && tail.c1_distance < 1e-3, || {
            format!("final distances c0 {:e}, c1 {:e}", tail.c0_distance, tail.c1_distance)
        })?;
        let elapsed = start.elapsed();
        check(elapsed.as_secs() < 300, || format!("took {elapsed:.2?}"))
    });
}

#[test]
fn criterion_10_deterministic_reports() {
    criterion(10, "bundled scenario reruns are byte-identical", || {
        let scenario = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("scenarios/ball-standard.json");
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut reports = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("run{run}"));
            let output = assert_cmd::Command::cargo_bin("acgeom")
                .map_err(|e| e.to_string())?
                .args(["run"])
                .arg(&scenario)
                .arg("--out")
                .arg(&out)
                .args(["--log-level", "off"])
                .output()
                .map_err(|e| e.to_string())?;
            check(output.status.success(), || {
                format!("run {run} exited {}", output.status)
            })?;
            reports.push(
                std::fs::read(out.join("ball-standard-report.json")).map_err(|e| e.to_string())?,
            );
        }
        check(reports[0] == reports[1], || {
            "reports differ between identical runs".into()
        })
    });
}
