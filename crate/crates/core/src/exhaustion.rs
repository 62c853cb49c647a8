//! Bounded strictly plurisubharmonic exhaustions ρ = −(−r e^{−Aψ})^η on
//! collar neighborhoods of a Levi convex boundary: the explicit
//! positivity quantity D(v), a ladder search over (A, η) producing a
//! numerical certificate, and the tamed symplectic form −d(J^*dρ).

use crate::error::{Error, Result};
use crate::field::Structure;
use crate::forms::{d_one_form_matrix, SmoothField, TangentVector, TwoFormSample};
use crate::levi::{del_j, levi_direct, psh_scan, xi_part, PshClass};
use crate::num::{fl, smax, smin, Real, C};
use crate::poly::PolyField;
use crate::sample::{self, Stream};
use serde::{Deserialize, Serialize};

/// A bounded domain piece Ω ∩ U = {r < 0} with sampled boundary
/// regularity and a collar {−t₀ < r < 0}.
#[derive(Clone, Debug)]
pub struct DomainSpec<T: Real> {
    pub r: PolyField<T>,
    pub chart_radius: T,
    pub collar_depth: T,
    /// measured inf of |dr| over the boundary sample used at construction
    pub min_boundary_gradient: T,
}

impl<T: Real> DomainSpec<T> {
    /// Validate dr ≠ 0 on a seeded boundary sample; collar depth defaults
    /// to 0.1 × sup|r| over a chart sample when not supplied.
    pub fn new(
        r: PolyField<T>,
        chart_radius: T,
        collar_depth: Option<T>,
        seed: u64,
        n_boundary: usize,
    ) -> Result<Self> {
        let mut min_grad = T::infinity();
        for i in 0..n_boundary {
            let p = sample::boundary_point(&r, chart_radius, seed, i as u64)?;
            let g = r.gradient_real(&p);
            let gn = g.iter().map(|&a| a * a).sum::<T>().sqrt();
            min_grad = smin(min_grad, gn);
        }
        if !(min_grad > fl(1e-8)) {
            return Err(Error::DegenerateBoundary {
                norm: min_grad.to_f64().unwrap_or(f64::NAN),
            });
        }
        let collar_depth = match collar_depth {
            Some(t) => t,
            None => {
                let mut sup = T::zero();
                for i in 0..256 {
                    let p = sample::ball_point(r.dim(), chart_radius, seed, Stream::BallPoints, i);
                    sup = smax(sup, r.eval_real(&p).abs());
                }
                fl::<T>(0.1) * sup
            }
        };
        Ok(DomainSpec {
            r,
            chart_radius,
            collar_depth,
            min_boundary_gradient: min_grad,
        })
    }

    /// Unit ball: r = |z|² − 1.
    pub fn ball(dim: usize, seed: u64) -> Self {
        DomainSpec::new(PolyField::ball(dim, T::one()), fl(1.2), None, seed, 64)
            .expect("ball boundary is regular")
    }

    /// Egg domain |z₁|² + |z_n|^{2m} < 1 (weakly pseudoconvex for m ≥ 2):
    /// all coordinates but the last enter quadratically.
    pub fn egg(dim: usize, m: u32, seed: u64) -> Self {
        let mut f = PolyField::constant(dim, C::new(-T::one(), T::zero()));
        for k in 0..dim - 1 {
            let mut e = vec![0u32; dim];
            e[k] = 1;
            f = f.add(&PolyField::monomial(dim, &e, &e, C::new(T::one(), T::zero())));
        }
        let mut e = vec![0u32; dim];
        e[dim - 1] = m;
        f = f.add(&PolyField::monomial(dim, &e, &e, C::new(T::one(), T::zero())));
        DomainSpec::new(f, fl(1.2), None, seed, 64).expect("egg boundary is regular")
    }

    pub fn contains(&self, p: &[C<T>]) -> bool {
        self.r.eval_real(p) < T::zero()
    }

    pub fn in_collar(&self, p: &[C<T>]) -> bool {
        let v = self.r.eval_real(p);
        v < T::zero() && v > -self.collar_depth
    }
}

/// φ = r e^{−Aψ} with exact chain-rule gradient.
pub struct PhiField<'a, T: Real> {
    pub r: &'a PolyField<T>,
    pub psi: &'a PolyField<T>,
    pub a: T,
}

impl<T: Real> SmoothField<T> for PhiField<'_, T> {
    fn dim(&self) -> usize {
        self.r.dim()
    }
    fn value(&self, p: &[C<T>]) -> T {
        self.r.eval_real(p) * (-self.a * self.psi.eval_real(p)).exp()
    }
    fn gradient(&self, p: &[C<T>]) -> Vec<T> {
        let rv = self.r.eval_real(p);
        let e = (-self.a * self.psi.eval_real(p)).exp();
        let gr = self.r.gradient_real(p);
        let gpsi = self.psi.gradient_real(p);
        gr.iter()
            .zip(&gpsi)
            .map(|(&dr, &dpsi)| e * (dr - self.a * rv * dpsi))
            .collect()
    }
}

/// ρ = −(−φ)^η = −(−r)^η e^{−ηAψ} on {r < 0}, with exact gradient
/// dρ = η(−φ)^{η−1} dφ. The base is clamped away from 0 so that stencil
/// evaluations straddling the boundary stay finite.
pub struct RhoField<'a, T: Real> {
    pub phi: PhiField<'a, T>,
    pub eta: T,
}

impl<'a, T: Real> RhoField<'a, T> {
    pub fn new(r: &'a PolyField<T>, psi: &'a PolyField<T>, a: T, eta: T) -> Result<Self> {
        if !(a > T::zero()) {
            return Err(Error::Invalid("exponent A must be positive".into()));
        }
        if !(eta > T::zero() && eta < T::one()) {
            return Err(Error::Invalid("exponent eta must lie in (0, 1)".into()));
        }
        Ok(RhoField {
            phi: PhiField { r, psi, a },
            eta,
        })
    }
}

impl<T: Real> SmoothField<T> for RhoField<'_, T> {
    fn dim(&self) -> usize {
        self.phi.dim()
    }
    fn value(&self, p: &[C<T>]) -> T {
        let m = smax(-self.phi.value(p), fl(1e-300));
        -m.powf(self.eta)
    }
    fn gradient(&self, p: &[C<T>]) -> Vec<T> {
        let m = smax(-self.phi.value(p), fl(1e-300));
        let s = self.eta * m.powf(self.eta - T::one());
        self.phi.gradient(p).iter().map(|&g| s * g).collect()
    }
}

/// The three summands of D(v) and their total:
/// D = A r²[L_ψ − ηA|∂_Jψ(v)|²]
///   + (−r)[L_r − 2ηA Re(∂_Jr(v) conj(∂_Jψ(v)))]
///   + (1−η)|∂_Jr(v)|².
#[derive(Clone, Debug, Serialize)]
pub struct DTerms<T: Real> {
    pub weighted_psi_term: T,
    pub weighted_r_term: T,
    pub gradient_term: T,
    pub total: T,
}

pub fn d_of_v<T: Real>(
    structure: &dyn Structure<T>,
    domain: &DomainSpec<T>,
    psi: &PolyField<T>,
    a: T,
    eta: T,
    p: &[C<T>],
    v: &[C<T>],
    eps: T,
) -> Result<DTerms<T>> {
    let rv = domain.r.eval_real(p);
    if !(rv < T::zero() && rv > -domain.collar_depth) {
        return Err(Error::OutsideCollar {
            r: rv.to_f64().unwrap_or(f64::NAN),
            depth: domain.collar_depth.to_f64().unwrap_or(f64::NAN),
        });
    }
    let l_psi = levi_direct(structure, psi, p, v, eps)?;
    let l_r = levi_direct(structure, &domain.r, p, v, eps)?;
    let dpsi = del_j(structure, psi, p, v)?;
    let dr = del_j(structure, &domain.r, p, v)?;
    let weighted_psi_term = a * rv * rv * (l_psi - eta * a * dpsi.norm_sqr());
    let weighted_r_term = (-rv) * (l_r - fl::<T>(2.0) * eta * a * (dr * dpsi.conj()).re);
    let gradient_term = (T::one() - eta) * dr.norm_sqr();
    Ok(DTerms {
        weighted_psi_term,
        weighted_r_term,
        gradient_term,
        total: weighted_psi_term + weighted_r_term + gradient_term,
    })
}

/// Certificate that ρ = −(−r e^{−Aψ})^η is strictly plurisubharmonic on
/// the sampled collar.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DFCertificate<T: Real> {
    #[serde(rename = "A")]
    pub a: T,
    pub eta: T,
    pub collar: T,
    pub n_samples: usize,
    #[serde(rename = "min_D")]
    pub min_d: T,
    pub min_levi_rho: T,
    /// worst relative gap between η(−r)^{η−2}e^{−ηAψ}D(v) and the
    /// directly computed Levi form of ρ
    pub agreement_gap: T,
    pub seed: u64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DSampleRecord<T: Real> {
    pub point: Vec<(T, T)>,
    pub direction: Vec<(T, T)>,
    pub terms: DTerms<T>,
}

/// One attempted (A, η) pair in the ladder search and the worst D(v)
/// value it produced.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LadderRung<T: Real> {
    #[serde(rename = "A")]
    pub a: T,
    pub eta: T,
    #[serde(rename = "min_D")]
    pub min_d: T,
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DFSearchOutcome<T: Real> {
    pub certificate: DFCertificate<T>,
    /// per-sample D(v) terms at the certified (A, η), for plotting
    pub records: Vec<DSampleRecord<T>>,
    /// every (A, η) attempt in search order, ending with the certified pair
    pub ladder: Vec<LadderRung<T>>,
    /// spot-check: halving η keeps the certificate valid
    pub eta_half_recheck: bool,
}

#[derive(Clone, Debug)]
pub struct SearchConfig<T: Real> {
    pub seed: u64,
    pub n_collar_points: usize,
    pub dirs_per_point: usize,
    pub n_boundary_points: usize,
    pub margin: T,
    pub agreement_tol: T,
    /// circulation step for all Levi evaluations
    pub eps: T,
    pub max_a_doublings: u32,
    pub max_eta_halvings: u32,
    /// number of samples on which the identity with the direct Levi form
    /// of ρ is verified (a subset, for cost)
    pub agreement_samples: usize,
}

impl<T: Real> Default for SearchConfig<T> {
    fn default() -> Self {
        SearchConfig {
            seed: 1,
            n_collar_points: 200,
            dirs_per_point: 4,
            n_boundary_points: 40,
            margin: fl(1e-6),
            agreement_tol: fl(1e-3),
            eps: fl(1e-3),
            max_a_doublings: 10,
            max_eta_halvings: 8,
            agreement_samples: 24,
        }
    }
}

fn collar_samples<T: Real>(
    domain: &DomainSpec<T>,
    cfg: &SearchConfig<T>,
    stream_offset: u64,
) -> Result<Vec<(Vec<C<T>>, Vec<C<T>>)>> {
    let n = domain.r.dim();
    let mut out = Vec::with_capacity(cfg.n_collar_points * cfg.dirs_per_point);
    for i in 0..cfg.n_collar_points {
        let p = sample::collar_point(
            &domain.r,
            domain.chart_radius,
            domain.collar_depth,
            cfg.seed,
            stream_offset + i as u64,
        )?;
        for d in 0..cfg.dirs_per_point {
            let v = sample::unit_direction(
                n,
                cfg.seed,
                Stream::Directions,
                stream_offset * 1000 + (i * cfg.dirs_per_point + d) as u64,
            );
            out.push((p.clone(), v));
        }
    }
    Ok(out)
}

/// Check the two certificate preconditions on samples: ψ strictly psh on
/// the collar, and Levi convexity of the boundary on ξ-directions.
fn check_preconditions<T: Real>(
    structure: &dyn Structure<T>,
    domain: &DomainSpec<T>,
    psi: &PolyField<T>,
    cfg: &SearchConfig<T>,
) -> Result<()> {
    let samples = collar_samples(domain, cfg, 7_000_000)?;
    let scan = psh_scan(structure, psi, &samples, cfg.eps, cfg.margin);
    if scan.class != PshClass::StrictlyPsh {
        return Err(Error::PreconditionFailed {
            detail: format!(
                "weight not strictly plurisubharmonic on the collar (min Levi {:e})",
                scan.min_levi.to_f64().unwrap_or(f64::NAN)
            ),
        });
    }
    let n = domain.r.dim();
    let mut min_levi = T::infinity();
    for i in 0..cfg.n_boundary_points {
        let p = sample::boundary_point(&domain.r, domain.chart_radius, cfg.seed, 9_000_000 + i as u64)?;
        for d in 0..cfg.dirs_per_point {
            let v = sample::unit_direction(n, cfg.seed, Stream::Directions, 9_000_000 + (i * cfg.dirs_per_point + d) as u64);
            if let Some(t) = xi_part(structure, &domain.r, &p, &v)? {
                min_levi = smin(min_levi, levi_direct(structure, &domain.r, &p, &t, cfg.eps)?);
            }
        }
    }
    if min_levi < fl::<T>(-1e-6) {
        return Err(Error::PreconditionFailed {
            detail: format!(
                "boundary not Levi convex: min tangential Levi form {:e}",
                min_levi.to_f64().unwrap_or(f64::NAN)
            ),
        });
    }
    Ok(())
}

struct LadderEval<T: Real> {
    min_d: T,
    min_levi_rho: T,
    agreement_gap: T,
    records: Vec<DSampleRecord<T>>,
}

/// The circulation stencil of the direct Levi form displaces p by ~eps;
/// evaluating ρ across {r = 0} hits the clamped base, so direct checks
/// are restricted to points a safe multiple of eps inside.
fn stencil_safe<T: Real>(domain: &DomainSpec<T>, p: &[C<T>], eps: T) -> bool {
    let g = domain.r.gradient_real(p);
    let gn = g.iter().map(|&a| a * a).sum::<T>().sqrt();
    domain.r.eval_real(p) < -fl::<T>(4.0) * eps * gn
}

fn evaluate_pair<T: Real>(
    structure: &dyn Structure<T>,
    domain: &DomainSpec<T>,
    psi: &PolyField<T>,
    a: T,
    eta: T,
    samples: &[(Vec<C<T>>, Vec<C<T>>)],
    cfg: &SearchConfig<T>,
) -> Result<LadderEval<T>> {
    let rho = RhoField::new(&domain.r, psi, a, eta)?;
    let mut min_d = T::infinity();
    let mut min_levi_rho = T::infinity();
    let mut agreement_gap = T::zero();
    let mut records = Vec::with_capacity(samples.len());
    let stride = (samples.len() / cfg.agreement_samples.max(1)).max(1);
    for (idx, (p, v)) in samples.iter().enumerate() {
        let terms = d_of_v(structure, domain, psi, a, eta, p, v, cfg.eps)?;
        min_d = smin(min_d, terms.total);
        if min_d <= cfg.margin {
            // an uncertifiable sample ends this (A, η) early
            records.push(DSampleRecord {
                point: p.iter().map(|c| (c.re, c.im)).collect(),
                direction: v.iter().map(|c| (c.re, c.im)).collect(),
                terms,
            });
            return Ok(LadderEval {
                min_d,
                min_levi_rho,
                agreement_gap,
                records,
            });
        }
        if idx % stride == 0 && stencil_safe(domain, p, cfg.eps) {
            let direct = levi_direct(structure, &rho, p, v, cfg.eps)?;
            min_levi_rho = smin(min_levi_rho, direct);
            let rv = domain.r.eval_real(p);
            let formula = eta
                * (-rv).powf(eta - fl(2.0))
                * (-eta * a * psi.eval_real(p)).exp()
                * terms.total;
            let gap = (formula - direct).abs() / smax(formula.abs(), direct.abs());
            agreement_gap = smax(agreement_gap, gap);
        }
        records.push(DSampleRecord {
            point: p.iter().map(|c| (c.re, c.im)).collect(),
            direction: v.iter().map(|c| (c.re, c.im)).collect(),
            terms,
        });
    }
    Ok(LadderEval {
        min_d,
        min_levi_rho,
        agreement_gap,
        records,
    })
}

/// Ladder search for a Diederich–Fornaess certificate: η from 1/2
/// downward (largest certified η wins), A doubling from 1 upward.
pub fn df_search<T: Real>(
    structure: &dyn Structure<T>,
    domain: &DomainSpec<T>,
    psi: &PolyField<T>,
    cfg: &SearchConfig<T>,
) -> Result<DFSearchOutcome<T>> {
    check_preconditions(structure, domain, psi, cfg)?;
    let samples = collar_samples(domain, cfg, 0)?;
    let mut worst: Option<(T, T, T)> = None;
    let mut ladder = Vec::new();
    for ke in 0..cfg.max_eta_halvings {
        let eta = fl::<T>(0.5).powi(1 + ke as i32);
        for ka in 0..=cfg.max_a_doublings {
            let a = fl::<T>(2.0).powi(ka as i32);
            let eval = evaluate_pair(structure, domain, psi, a, eta, &samples, cfg)?;
            let certified = eval.min_d > cfg.margin
                && eval.min_levi_rho > cfg.margin
                && eval.agreement_gap < cfg.agreement_tol;
            ladder.push(LadderRung {
                a,
                eta,
                min_d: eval.min_d,
                certified,
            });
            if certified {
                // exponent monotonicity: any smaller η certifies too — spot-check
                let half = evaluate_pair(structure, domain, psi, a, eta * fl(0.5), &samples, cfg)?;
                let recheck = half.min_d > cfg.margin && half.min_levi_rho > cfg.margin;
                let certificate = DFCertificate {
                    a,
                    eta,
                    collar: domain.collar_depth,
                    n_samples: samples.len(),
                    min_d: eval.min_d,
                    min_levi_rho: eval.min_levi_rho,
                    agreement_gap: eval.agreement_gap,
                    seed: cfg.seed,
                    pass: true,
                };
                return Ok(DFSearchOutcome {
                    certificate,
                    records: eval.records,
                    ladder,
                    eta_half_recheck: recheck,
                });
            }
            match &worst {
                Some((_, _, best)) if eval.min_d <= *best => {}
                _ => worst = Some((a, eta, eval.min_d)),
            }
        }
    }
    let (a, eta, min_d) = worst.unwrap_or((T::one(), fl(0.5), -T::infinity()));
    Err(Error::SearchExhausted {
        detail: format!(
            "no (A, eta) certified; best min D = {:e} at A = {}, eta = {}",
            min_d.to_f64().unwrap_or(f64::NAN),
            a.to_f64().unwrap_or(f64::NAN),
            eta.to_f64().unwrap_or(f64::NAN)
        ),
    })
}

/// Independent soundness re-check of a certificate: recompute the direct
/// Levi form of ρ at `n_fresh` fresh seeded collar samples; all values
/// must exceed half the certified margin.
pub fn recheck_certificate<T: Real>(
    structure: &dyn Structure<T>,
    domain: &DomainSpec<T>,
    psi: &PolyField<T>,
    cert: &DFCertificate<T>,
    n_fresh: usize,
    recheck_seed: u64,
    eps: T,
) -> Result<T> {
    let n = domain.r.dim();
    let rho = RhoField::new(&domain.r, psi, cert.a, cert.eta)?;
    let mut min_levi = T::infinity();
    let mut i = 0u64;
    let mut used = 0usize;
    while used < n_fresh && i < 64 * n_fresh as u64 {
        let p = sample::collar_point(
            &domain.r,
            domain.chart_radius,
            domain.collar_depth,
            recheck_seed,
            500_000 + i,
        )?;
        i += 1;
        if !stencil_safe(domain, &p, eps) {
            continue;
        }
        let v = sample::unit_direction(n, recheck_seed, Stream::Recheck, used as u64);
        min_levi = smin(min_levi, levi_direct(structure, &rho, &p, &v, eps)?);
        used += 1;
    }
    if used < n_fresh {
        return Err(Error::PreconditionFailed {
            detail: format!("only {used}/{n_fresh} stencil-safe collar samples"),
        });
    }
    Ok(min_levi)
}

/// ρ value with first (exact) and second (FD of the exact gradient) jets.
#[derive(Clone, Debug, Serialize)]
pub struct RhoJet<T: Real> {
    pub value: T,
    pub gradient: Vec<T>,
    /// real Hessian by central differences of the gradient, row-major 2n×2n
    pub hessian: Vec<T>,
}

pub fn rho_eval<T: Real>(
    domain: &DomainSpec<T>,
    psi: &PolyField<T>,
    a: T,
    eta: T,
    p: &[C<T>],
) -> Result<RhoJet<T>> {
    let rv = domain.r.eval_real(p);
    if !(rv < T::zero()) {
        return Err(Error::OutsideDomain {
            r: rv.to_f64().unwrap_or(f64::NAN),
        });
    }
    let rho = RhoField::new(&domain.r, psi, a, eta)?;
    let n2 = 2 * domain.r.dim();
    let h = fl::<T>(1e-5);
    let mut hessian = vec![T::zero(); n2 * n2];
    for k in 0..n2 {
        let mut step = vec![T::zero(); n2];
        step[k] = T::one();
        let pp = crate::forms::displace(p, &step, h);
        let pm = crate::forms::displace(p, &step, -h);
        let gp = rho.gradient(&pp);
        let gm = rho.gradient(&pm);
        for l in 0..n2 {
            hessian[k * n2 + l] = (gp[l] - gm[l]) / (fl::<T>(2.0) * h);
        }
    }
    Ok(RhoJet {
        value: rho.value(p),
        gradient: rho.gradient(p),
        hessian,
    })
}

/// Symplectic data of ω_u = −d(J^*du) at one point.
#[derive(Clone, Debug, Serialize)]
pub struct SymplecticSample<T: Real> {
    pub point: Vec<(T, T)>,
    /// matrix of ω_u on real coordinate vectors, row-major 2n×2n
    pub omega: Vec<T>,
    /// min over sampled unit v of ω_u(X, JX)
    pub tameness_min: T,
    /// max FD residual of dω_u on coordinate triples
    pub closedness_residual: T,
    pub tame: bool,
}

/// Evaluate ω_u = −d(J^*du) at each point, its tameness minimum over
/// seeded unit directions, and an FD closedness control.
pub fn symplectic_check<T: Real>(
    structure: &dyn Structure<T>,
    u: &dyn SmoothField<T>,
    points: &[Vec<C<T>>],
    n_dirs: usize,
    seed: u64,
    eps: T,
) -> Result<Vec<SymplecticSample<T>>> {
    let n = structure.dim();
    let n2 = 2 * n;
    let omega_form = |q: &[C<T>], dir: &[T]| -> Result<T> {
        let j = structure.j_at(q)?;
        let dir_c: Vec<C<T>> = dir.iter().map(|&a| C::new(a, T::zero())).collect();
        let jdir = j.matvec(&dir_c);
        let g = u.gradient(q);
        let mut acc = T::zero();
        for k in 0..n2 {
            acc = acc + g[k] * jdir[k].re;
        }
        Ok(acc)
    };
    let omega_at = |p: &[C<T>]| -> Result<TwoFormSample<T>> {
        let d = d_one_form_matrix(&omega_form, p, n2, eps)?;
        let mat: Vec<T> = d.mat.iter().map(|&x| -x).collect();
        TwoFormSample::new(p.to_vec(), mat, n2)
    };
    let mut out = Vec::with_capacity(points.len());
    for (pi, p) in points.iter().enumerate() {
        let w = omega_at(p)?;
        // tameness over coordinate complex directions plus seeded ones
        let mut tameness_min = T::infinity();
        let mut dirs: Vec<Vec<C<T>>> = (0..n)
            .map(|k| {
                let mut v = vec![crate::num::czero(); n];
                v[k] = C::new(T::one(), T::zero());
                v
            })
            .collect();
        for d in 0..n_dirs {
            dirs.push(sample::unit_direction(
                n,
                seed,
                Stream::Directions,
                (pi * n_dirs + d) as u64 + 3_000_000,
            ));
        }
        let j = structure.j_at(p)?;
        for v in &dirs {
            let x = TangentVector::new(p.clone(), v.clone()).to_real();
            let jx_c = j.matvec(&x.iter().map(|&a| C::new(a, T::zero())).collect::<Vec<_>>());
            let jx: Vec<T> = jx_c.iter().map(|c| c.re).collect();
            tameness_min = smin(tameness_min, w.eval(&x, &jx));
        }
        // closedness: dω(e_i, e_j, e_k) by central FD of the matrix entries
        let h = fl::<T>(1e-4);
        let mut closedness_residual = T::zero();
        for i in 0..n2 {
            for jj in i + 1..n2 {
                for k in jj + 1..n2 {
                    let deriv = |axis: usize, row: usize, col: usize| -> Result<T> {
                        let mut step = vec![T::zero(); n2];
                        step[axis] = T::one();
                        let wp = omega_at(&crate::forms::displace(p, &step, h))?;
                        let wm = omega_at(&crate::forms::displace(p, &step, -h))?;
                        Ok((wp.mat[row * n2 + col] - wm.mat[row * n2 + col]) / (fl::<T>(2.0) * h))
                    };
                    let res = deriv(i, jj, k)? - deriv(jj, i, k)? + deriv(k, i, jj)?;
                    closedness_residual = smax(closedness_residual, res.abs());
                }
            }
        }
        let tame = tameness_min > T::zero();
        out.push(SymplecticSample {
            point: p.iter().map(|c| (c.re, c.im)).collect(),
            omega: w.mat.clone(),
            tameness_min,
            closedness_residual,
            tame,
        });
    }
    Ok(out)
}

/// CSV dump of per-sample D(v) terms.
pub fn d_terms_csv<T: Real>(records: &[DSampleRecord<T>]) -> String {
    let mut out =
        String::from("point,direction,weighted_psi_term,weighted_r_term,gradient_term,total\n");
    for r in records {
        let pt: Vec<String> = r.point.iter().map(|(a, b)| format!("{a:.6}{b:+.6}i")).collect();
        let dv: Vec<String> = r
            .direction
            .iter()
            .map(|(a, b)| format!("{a:.6}{b:+.6}i"))
            .collect();
        out.push_str(&format!(
            "{};{};{:.8e};{:.8e};{:.8e};{:.8e}\n",
            pt.join("|"),
            dv.join("|"),
            r.terms.weighted_psi_term.to_f64().unwrap_or(f64::NAN),
            r.terms.weighted_r_term.to_f64().unwrap_or(f64::NAN),
            r.terms.gradient_term.to_f64().unwrap_or(f64::NAN),
            r.terms.total.to_f64().unwrap_or(f64::NAN)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::StructureField;
    use crate::num::czero;

    fn small_cfg() -> SearchConfig<f64> {
        SearchConfig {
            n_collar_points: 24,
            dirs_per_point: 3,
            n_boundary_points: 12,
            agreement_samples: 8,
            ..SearchConfig::default()
        }
    }

    #[test]
    fn d_of_v_matches_closed_form_on_ball() {
        // standard structure, r = |z|²−1, ψ = |z|², p = (√(1−δ), 0), v = e₁:
        // L_ψ = L_r = 4, ∂ψ(v) = ∂r(v) = 2√(1−δ), r = −δ
        let s = StructureField::<f64>::standard(2);
        let domain = DomainSpec::ball(2, 3);
        let psi = PolyField::abs_sq(2);
        let delta: f64 = 0.05;
        let (a, eta) = (2.0, 0.25);
        let x = (1.0 - delta).sqrt();
        let p = vec![C::new(x, 0.0), czero()];
        let v = vec![C::new(1.0, 0.0), czero()];
        let terms = d_of_v(&s, &domain, &psi, a, eta, &p, &v, 1e-3).unwrap();
        let pair = 4.0 * (1.0 - delta); // |∂ψ(v)|² = |∂r(v)|² = their product
        let expect = a * delta * delta * (4.0 - eta * a * pair)
            + delta * (4.0 - 2.0 * eta * a * pair)
            + (1.0 - eta) * pair;
        assert!((terms.total - expect).abs() < 1e-7, "{} vs {expect}", terms.total);
    }

    #[test]
    fn d_formula_matches_direct_levi_of_rho() {
        let s = StructureField::<f64>::standard(2);
        let domain = DomainSpec::ball(2, 3);
        let psi = PolyField::abs_sq(2);
        let (a, eta) = (1.0, 0.5);
        let rho = RhoField::new(&domain.r, &psi, a, eta).unwrap();
        let p = vec![C::new(0.97, 0.0), C::new(0.01, 0.02)];
        for v in [
            vec![C::new(1.0, 0.0), czero()],
            vec![czero(), C::new(0.0, 1.0)],
            vec![C::new(0.6, 0.0), C::new(0.0, 0.8)],
        ] {
            let terms = d_of_v(&s, &domain, &psi, a, eta, &p, &v, 1e-3).unwrap();
            let rv = domain.r.eval_real(&p);
            let formula =
                eta * (-rv).powf(eta - 2.0) * (-eta * a * psi.eval_real(&p)).exp() * terms.total;
            let direct = levi_direct(&s, &rho, &p, &v, 1e-4).unwrap();
            let rel = (formula - direct).abs() / formula.abs().max(direct.abs());
            assert!(rel < 1e-3, "formula {formula} direct {direct}");
        }
    }

    #[test]
    fn d_of_v_rejects_points_outside_collar() {
        let s = StructureField::<f64>::standard(2);
        let domain = DomainSpec::ball(2, 3);
        let psi = PolyField::abs_sq(2);
        let v = vec![C::new(1.0, 0.0), czero()];
        let deep = vec![czero(), czero()]; // r = −1, below the collar
        assert!(matches!(
            d_of_v(&s, &domain, &psi, 1.0, 0.5, &deep, &v, 1e-3),
            Err(Error::OutsideCollar { .. })
        ));
    }

    #[test]
    fn df_search_certifies_the_ball() {
        let s = StructureField::<f64>::standard(2);
        let domain = DomainSpec::ball(2, 3);
        let psi = PolyField::abs_sq(2);
        let out = df_search(&s, &domain, &psi, &small_cfg()).unwrap();
        let c = &out.certificate;
        assert!(c.pass && c.min_d > 0.0 && c.min_levi_rho > 0.0);
        assert_eq!(c.eta, 0.5, "largest eta should certify on the ball");
        assert!(out.eta_half_recheck);
        assert!(c.agreement_gap < 1e-3);
        // soundness: fresh samples stay positive
        let fresh = recheck_certificate(&s, &domain, &psi, c, 50, 99, 1e-3).unwrap();
        assert!(fresh > 0.0, "fresh min levi {fresh}");
    }

    #[test]
    fn df_search_rejects_non_pseudoconvex_domain() {
        // r = |z₁|² − |z₂|² − 0.25: boundary strictly concave in z₂
        let s = StructureField::<f64>::standard(2);
        let r = PolyField::new(
            2,
            vec![
                (vec![1, 0], vec![1, 0], C::new(1.0, 0.0)),
                (vec![0, 1], vec![0, 1], C::new(-1.0, 0.0)),
                (vec![0, 0], vec![0, 0], C::new(-0.25, 0.0)),
            ],
            crate::poly::ValueKind::Real,
        )
        .unwrap();
        let domain = DomainSpec::new(r, 1.2, Some(0.1), 3, 32).unwrap();
        let psi = PolyField::abs_sq(2);
        assert!(matches!(
            df_search(&s, &domain, &psi, &small_cfg()),
            Err(Error::PreconditionFailed { .. })
        ));
    }

    #[test]
    fn rho_eval_jets_and_domain_guard() {
        let domain: DomainSpec<f64> = DomainSpec::ball(2, 3);
        let psi = PolyField::abs_sq(2);
        let origin = vec![czero(), czero()];
        let jet = rho_eval(&domain, &psi, 1.0, 0.5, &origin).unwrap();
        // ρ(0) = −(−(−1)·e⁰)^{1/2} = −1
        assert!((jet.value + 1.0).abs() < 1e-14);
        // symmetric Hessian
        for i in 0..4 {
            for j in 0..4 {
                assert!((jet.hessian[i * 4 + j] - jet.hessian[j * 4 + i]).abs() < 1e-5);
            }
        }
        let outside = vec![C::new(1.5, 0.0), czero()];
        assert!(matches!(
            rho_eval(&domain, &psi, 1.0, 0.5, &outside),
            Err(Error::OutsideDomain { .. })
        ));
        assert!(rho_eval(&domain, &psi, 0.0, 0.5, &origin).is_err());
        assert!(rho_eval(&domain, &psi, 1.0, 1.5, &origin).is_err());
    }

    #[test]
    fn rho_increases_toward_the_boundary() {
        let domain = DomainSpec::ball(2, 3);
        let psi = PolyField::abs_sq(2);
        let rho = RhoField::new(&domain.r, &psi, 1.0, 0.5).unwrap();
        let mut last = f64::NEG_INFINITY;
        for k in 1..20 {
            let t = k as f64 / 20.0;
            let p = vec![C::new(t, 0.0), czero()];
            let v = rho.value(&p);
            assert!(v > last && v < 0.0);
            last = v;
        }
    }

    #[test]
    fn symplectic_form_of_abs_sq_is_twice_standard() {
        let s = StructureField::<f64>::standard(2);
        let u = PolyField::abs_sq(2);
        let pts = vec![vec![C::new(0.2, 0.1), C::new(-0.1, 0.3)]];
        let samples = symplectic_check(&s, &u, &pts, 6, 5, 1e-3).unwrap();
        let w = &samples[0];
        // ω(e_{x1}, e_{y1}) = 4 under our Levi normalization
        assert!((w.omega[0 * 4 + 2] - 4.0).abs() < 1e-8, "{}", w.omega[2]);
        assert!((w.tameness_min - 4.0).abs() < 1e-8);
        assert!(w.tame);
        assert!(w.closedness_residual < 1e-4);
    }

    #[test]
    fn pluriharmonic_fails_tameness_and_is_flagged() {
        let s = StructureField::<f64>::standard(2);
        let u = PolyField::monomial(2, &[2, 0], &[0, 0], C::new(0.5, 0.0)).add(
            &PolyField::monomial(2, &[0, 0], &[2, 0], C::new(0.5, 0.0)),
        );
        let pts = vec![vec![C::new(0.1, 0.2), czero()]];
        let samples = symplectic_check(&s, &u, &pts, 4, 5, 1e-3).unwrap();
        assert!(samples[0].tameness_min.abs() < 1e-8);
        assert!(!samples[0].tame);
    }
}
