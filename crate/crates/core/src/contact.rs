//! Confoliation and contact conditions on real hypersurfaces, and the
//! approximation of the boundary confoliation by contact structures
//! pulled back from strictly pseudoconvex level sets of φ = r e^{−Aψ}.
//!
//! Sign pin: we work with α = J^*du, (J^*du)(X) = du(JX); with that
//! convention −dα(X, JX) equals the Levi form of u in our normalization,
//! so confoliation minima are reported as −dα(X, JX) (≥ 0 on Levi convex
//! boundaries).

use crate::error::{Error, Result};
use crate::exhaustion::{DFCertificate, DomainSpec, PhiField, RhoField};
use crate::field::Structure;
use crate::forms::{d_one_form, displace, SmoothField};
use crate::num::{fl, smax, smin, Real, C};
use crate::poly::PolyField;
use crate::sample;
use serde::Serialize;

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Subtract from `v` its components along the (orthonormal) `basis`.
fn project_off<T: Real>(v: &mut [T], basis: &[Vec<T>]) {
    for b in basis {
        let s = dot(v, b);
        for (vk, &bk) in v.iter_mut().zip(b) {
            *vk = *vk - s * bk;
        }
    }
}

/// Apply J(p) to a real vector.
fn apply_j<T: Real>(j: &crate::la::CMat<T>, x: &[T]) -> Vec<T> {
    let xc: Vec<C<T>> = x.iter().map(|&a| C::new(a, T::zero())).collect();
    j.matvec(&xc).iter().map(|c| c.re).collect()
}

/// Orthonormal frame of the tangent space of a level set of u at p,
/// together with the sub-frame of ξ = ker du ∩ ker(J^*du).
#[derive(Clone, Debug)]
pub struct HypersurfacePointFrame<T: Real> {
    pub point: Vec<C<T>>,
    pub level: T,
    /// 2·dim − 1 orthonormal vectors spanning ker du
    pub tangent_basis: Vec<Vec<T>>,
    /// 2·dim − 2 orthonormal vectors spanning ξ (the first 2·dim − 2
    /// entries of `tangent_basis`)
    pub xi_basis: Vec<Vec<T>>,
}

pub fn frame_at<T: Real>(
    structure: &dyn Structure<T>,
    u: &dyn SmoothField<T>,
    p: &[C<T>],
) -> Result<HypersurfacePointFrame<T>> {
    let n2 = 2 * structure.dim();
    let g = u.gradient(p);
    let gn = norm(&g);
    if gn < fl(1e-10) {
        return Err(Error::DegenerateBoundary {
            norm: gn.to_f64().unwrap_or(f64::NAN),
        });
    }
    let ghat: Vec<T> = g.iter().map(|&a| a / gn).collect();
    let j = structure.j_at(p)?;
    // (J^*du)(X) = du(JX) = (Jᵀ∇u)·X
    let mut w: Vec<T> = (0..n2)
        .map(|k| {
            let mut s = T::zero();
            for i in 0..n2 {
                s = s + j[(i, k)].re * g[i];
            }
            s
        })
        .collect();
    project_off(&mut w, std::slice::from_ref(&ghat));
    let wn = norm(&w);
    if wn < fl::<T>(1e-8) * gn {
        return Err(Error::FrameIllConditioned {
            detail: "J^*du nearly parallel to du".into(),
        });
    }
    let what: Vec<T> = w.iter().map(|&a| a / wn).collect();
    // ξ: orthonormal complement of {∇u, Jᵀ∇u} from coordinate seeds
    let mut xi_basis: Vec<Vec<T>> = Vec::with_capacity(n2 - 2);
    for k in 0..n2 {
        if xi_basis.len() == n2 - 2 {
            break;
        }
        let mut v = vec![T::zero(); n2];
        v[k] = T::one();
        project_off(&mut v, std::slice::from_ref(&ghat));
        project_off(&mut v, std::slice::from_ref(&what));
        project_off(&mut v, &xi_basis);
        let vn = norm(&v);
        if vn > fl(1e-4) {
            xi_basis.push(v.iter().map(|&a| a / vn).collect());
        }
    }
    if xi_basis.len() != n2 - 2 {
        return Err(Error::FrameIllConditioned {
            detail: format!("found {} of {} xi directions", xi_basis.len(), n2 - 2),
        });
    }
    let mut tangent_basis = xi_basis.clone();
    tangent_basis.push(what);
    // orient so (∇u, frame) is positive in the ambient space; without
    // this the sign of α∧(dα)^n would jump between sample points
    let mut omat = vec![T::zero(); n2 * n2];
    for (col, v) in std::iter::once(&ghat).chain(tangent_basis.iter()).enumerate() {
        for row in 0..n2 {
            omat[row * n2 + col] = v[row];
        }
    }
    if det_real(&omat, n2) < T::zero() {
        for x in tangent_basis[0].iter_mut().chain(xi_basis[0].iter_mut()) {
            *x = -*x;
        }
    }
    // invariant: du annihilates the whole frame
    for e in &tangent_basis {
        let d = dot(&g, e).abs();
        if d > fl::<T>(1e-10) * (T::one() + gn) {
            return Err(Error::FrameIllConditioned {
                detail: format!("du(e) = {:e} on tangent frame", d.to_f64().unwrap_or(f64::NAN)),
            });
        }
    }
    Ok(HypersurfacePointFrame {
        point: p.to_vec(),
        level: u.value(p),
        tangent_basis,
        xi_basis,
    })
}

/// Signed permutations of 0..n by Heap's algorithm.
fn permutations_with_sign(n: usize) -> Vec<(Vec<usize>, i8)> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut sign = 1i8;
    out.push((idx.clone(), sign));
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                idx.swap(0, i);
            } else {
                idx.swap(c[i], i);
            }
            sign = -sign;
            out.push((idx.clone(), sign));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Determinant of a small real matrix (row-major) by Gauss elimination.
fn det_real<T: Real>(mat: &[T], n: usize) -> T {
    let mut a = mat.to_vec();
    let mut det = T::one();
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col * n + col].abs();
        for r in col + 1..n {
            if a[r * n + col].abs() > best {
                best = a[r * n + col].abs();
                pivot = r;
            }
        }
        if best == T::zero() {
            return T::zero();
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            det = -det;
        }
        let d = a[col * n + col];
        det = det * d;
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            for k in col..n {
                a[r * n + k] = a[r * n + k] - f * a[col * n + k];
            }
        }
    }
    det
}

/// Minimum eigenvalue of a small symmetric matrix by shifted power
/// iteration.
fn sym_min_eigen<T: Real>(mat: &[T], n: usize) -> T {
    let matvec = |m: &[T], v: &[T]| -> Vec<T> {
        (0..n)
            .map(|i| (0..n).map(|k| m[i * n + k] * v[k]).fold(T::zero(), |a, b| a + b))
            .collect()
    };
    let rayleigh_extreme = |m: &[T]| -> T {
        let mut v: Vec<T> = (0..n).map(|i| T::one() + fl::<T>(0.31) * fl(i as f64)).collect();
        let mut lam = T::zero();
        for _ in 0..500 {
            let w = matvec(m, &v);
            let nw = norm(&w);
            if nw == T::zero() {
                return T::zero();
            }
            lam = dot(&w, &v) / dot(&v, &v);
            v = w.iter().map(|&a| a / nw).collect();
        }
        lam
    };
    // bound the spectrum by the max row sum, then invert the ordering
    let bound = (0..n)
        .map(|i| (0..n).map(|k| mat[i * n + k].abs()).fold(T::zero(), |a, b| a + b))
        .fold(T::zero(), smax)
        + T::one();
    let shifted: Vec<T> = (0..n * n)
        .map(|idx| {
            let (i, k) = (idx / n, idx % n);
            let d = if i == k { bound } else { T::zero() };
            d - mat[idx]
        })
        .collect();
    bound - rayleigh_extreme(&shifted)
}

/// Contact data of the level set of u through p.
#[derive(Clone, Debug, Serialize)]
pub struct ContactSample<T: Real> {
    pub point: Vec<(T, T)>,
    pub level: T,
    /// α = J^*du on the tangent frame
    pub alpha_on_basis: Vec<T>,
    /// dα on the tangent frame, row-major
    pub d_alpha: Vec<T>,
    /// α∧(dα)^n on the frame, normalized by the Gram determinant root
    pub contact_scalar: T,
    /// min over unit X ∈ ξ of −dα(X, JX) (the Levi form of u on ξ)
    pub confoliation_min: T,
}

pub fn contact_value<T: Real>(
    structure: &dyn Structure<T>,
    u: &dyn SmoothField<T>,
    p: &[C<T>],
    eps: T,
) -> Result<ContactSample<T>> {
    let frame = frame_at(structure, u, p)?;
    contact_value_on_frame(structure, u, &frame, eps)
}

/// Same as `contact_value` but on a caller-supplied frame (used by the
/// frame-independence checks; the frame need not be orthonormal).
pub fn contact_value_on_frame<T: Real>(
    structure: &dyn Structure<T>,
    u: &dyn SmoothField<T>,
    frame: &HypersurfacePointFrame<T>,
    eps: T,
) -> Result<ContactSample<T>> {
    let dim = structure.dim();
    if dim > 3 {
        return Err(Error::Invalid(
            "contact evaluation capped at complex dimension 3".into(),
        ));
    }
    let p = &frame.point;
    let m = frame.tangent_basis.len(); // 2 dim − 1
    let alpha = |q: &[C<T>], dir: &[T]| -> Result<T> {
        let j = structure.j_at(q)?;
        let jd = apply_j(&j, dir);
        Ok(dot(&u.gradient(q), &jd))
    };
    let alpha_on_basis: Vec<T> = {
        let mut out = Vec::with_capacity(m);
        for e in &frame.tangent_basis {
            out.push(alpha(p, e)?);
        }
        out
    };
    let mut d_alpha = vec![T::zero(); m * m];
    for i in 0..m {
        for k in i + 1..m {
            let v = d_one_form(&alpha, p, &frame.tangent_basis[i], &frame.tangent_basis[k], eps)?;
            d_alpha[i * m + k] = v;
            d_alpha[k * m + i] = -v;
        }
    }
    // α∧(dα)^n on (e_0..e_{2n}) via the full permutation expansion,
    // n = dim − 1; the 1/2^n matches the shuffle convention of ∧
    let n = dim - 1;
    let mut scalar = T::zero();
    for (perm, sign) in permutations_with_sign(m) {
        let mut term = alpha_on_basis[perm[0]];
        for k in 0..n {
            term = term * d_alpha[perm[1 + 2 * k] * m + perm[2 + 2 * k]];
        }
        let s = if sign > 0 { T::one() } else { -T::one() };
        scalar = scalar + s * term;
    }
    scalar = scalar / fl::<T>(2.0f64.powi(n as i32));
    // Gram-root normalization makes the value frame-independent up to sign
    let mut gram = vec![T::zero(); m * m];
    for i in 0..m {
        for k in 0..m {
            gram[i * m + k] = dot(&frame.tangent_basis[i], &frame.tangent_basis[k]);
        }
    }
    let gram_det = det_real(&gram, m);
    if !(gram_det > fl(1e-16)) {
        return Err(Error::FrameIllConditioned {
            detail: "tangent frame Gram determinant not positive".into(),
        });
    }
    scalar = scalar / gram_det.sqrt();
    // confoliation minimum: q(X) = −dα(X, JX) is a quadratic form on ξ
    let j = structure.j_at(p)?;
    let nxi = frame.xi_basis.len();
    let mut qmat = vec![T::zero(); nxi * nxi];
    for a in 0..nxi {
        for b in 0..nxi {
            let jx = apply_j(&j, &frame.xi_basis[b]);
            qmat[a * nxi + b] = -d_one_form(&alpha, p, &frame.xi_basis[a], &jx, eps)?;
        }
    }
    let sym: Vec<T> = (0..nxi * nxi)
        .map(|idx| {
            let (a, b) = (idx / nxi, idx % nxi);
            (qmat[a * nxi + b] + qmat[b * nxi + a]) * fl(0.5)
        })
        .collect();
    let confoliation_min = sym_min_eigen(&sym, nxi);
    Ok(ContactSample {
        point: p.iter().map(|c| (c.re, c.im)).collect(),
        level: frame.level,
        alpha_on_basis,
        d_alpha,
        contact_scalar: scalar,
        confoliation_min,
    })
}

/// Minimum over seeded boundary samples of the confoliation quantity.
#[derive(Clone, Debug, Serialize)]
pub struct ConfoliationReport<T: Real> {
    pub min_value: T,
    pub argmin_point: Vec<(T, T)>,
    pub n_samples: usize,
}

pub fn confoliation_check<T: Real>(
    structure: &dyn Structure<T>,
    u: &dyn SmoothField<T>,
    boundary_points: &[Vec<C<T>>],
    eps: T,
) -> Result<ConfoliationReport<T>> {
    let mut min_value = T::infinity();
    let mut argmin = Vec::new();
    for p in boundary_points {
        let s = contact_value(structure, u, p, eps)?;
        if s.confoliation_min < min_value {
            min_value = s.confoliation_min;
            argmin = s.point.clone();
        }
    }
    Ok(ConfoliationReport {
        min_value,
        argmin_point: argmin,
        n_samples: boundary_points.len(),
    })
}

/// Project q onto {r = 0} by Newton steps along the gradient.
fn project_to_boundary<T: Real>(r: &dyn SmoothField<T>, q: &[C<T>]) -> Result<Vec<C<T>>> {
    let n = r.dim();
    let mut p = q.to_vec();
    for _ in 0..60 {
        let val = r.value(&p);
        if val.abs() < fl(1e-13) {
            return Ok(p);
        }
        let g = r.gradient(&p);
        let g2: T = g.iter().map(|&a| a * a).sum();
        if g2 < fl(1e-18) {
            break;
        }
        let s = val / g2;
        for k in 0..n {
            p[k] = p[k] - C::new(g[k] * s, g[n + k] * s);
        }
    }
    Err(Error::RootFindFailed {
        detail: "boundary re-projection did not converge".into(),
    })
}

/// March from a boundary point along the inward Euclidean normal of bΩ
/// until φ = −c; bisection bracketing then Newton polish in the line
/// parameter.
fn march_to_level<T: Real>(
    phi: &PhiField<T>,
    r: &PolyField<T>,
    p: &[C<T>],
    c: T,
    max_depth: T,
    tol: T,
) -> Result<Vec<C<T>>> {
    let g = r.gradient_real(p);
    let gn = norm(&g);
    if gn < fl(1e-10) {
        return Err(Error::DegenerateBoundary {
            norm: gn.to_f64().unwrap_or(f64::NAN),
        });
    }
    let nhat: Vec<T> = g.iter().map(|&a| -a / gn).collect(); // inward
    let at = |t: T| -> Vec<C<T>> { displace(p, &nhat, t) };
    let f = |t: T| -> T { phi.value(&at(t)) + c };
    // bracket: f(0) = c > 0; expand until f < 0
    let mut hi = max_depth * fl::<T>(0.01);
    let mut lo = T::zero();
    let mut tries = 0;
    while f(hi) > T::zero() {
        lo = hi;
        hi = hi * fl(2.0);
        tries += 1;
        if hi > max_depth || tries > 60 {
            return Err(Error::RootFindFailed {
                detail: "normal line does not reach the level within the collar".into(),
            });
        }
    }
    for _ in 0..80 {
        let mid = (lo + hi) * fl(0.5);
        if f(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < tol {
            break;
        }
    }
    let mut t = (lo + hi) * fl(0.5);
    for _ in 0..8 {
        let q = at(t);
        let val = phi.value(&q) + c;
        let dphi = phi.gradient(&q);
        let slope = dot(&dphi, &nhat);
        if slope.abs() < fl(1e-14) {
            break;
        }
        let step = val / slope;
        t = t - step;
        if step.abs() < tol * fl(0.01) {
            break;
        }
    }
    Ok(at(t))
}

#[derive(Clone, Debug)]
pub struct ApproxConfig<T: Real> {
    /// circulation step for dα
    pub eps: T,
    /// boundary FD step for dπ and tangential derivatives
    pub fd_step: T,
    /// root-finding tolerance in the line parameter
    pub root_tol: T,
    /// |dρ| threshold below which a level is declared critical
    pub noncritical_threshold: T,
    pub n_boundary: usize,
    pub seed: u64,
}

impl<T: Real> Default for ApproxConfig<T> {
    fn default() -> Self {
        ApproxConfig {
            eps: fl(1e-3),
            fd_step: fl(1e-4),
            root_tol: fl(1e-10),
            noncritical_threshold: fl(1e-6),
            n_boundary: 16,
            seed: 1,
        }
    }
}

/// One rung of the δ-ladder.
#[derive(Clone, Debug, Serialize)]
pub struct LevelRecord<T: Real> {
    pub delta: T,
    /// φ-level −δ^{1/η}
    pub phi_level: T,
    /// true when some sample had |dρ| below the threshold (level skipped)
    pub critical: bool,
    /// min |α∧(dα)^n| over the Γ_j samples
    pub contact_min_abs: T,
    /// min confoliation quantity over the Γ_j samples
    pub confoliation_min: T,
    pub c0_distance: T,
    pub c1_distance: T,
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproximationRecord<T: Real> {
    pub levels: Vec<LevelRecord<T>>,
    /// confoliation minimum of bΩ itself (the object being approximated)
    pub boundary_confoliation_min: T,
    pub n_boundary_samples: usize,
}

/// Ambient covector of the pulled-back form at a boundary point: entry k
/// is α_j(Π e_k) with Π the orthogonal projection onto T_p(bΩ); c = None
/// gives the target form J^*dφ on bΩ itself.
fn pullback_covector<T: Real>(
    structure: &dyn Structure<T>,
    domain: &DomainSpec<T>,
    phi: &PhiField<T>,
    c: Option<T>,
    p: &[C<T>],
    cfg: &ApproxConfig<T>,
) -> Result<Vec<T>> {
    let n2 = 2 * structure.dim();
    let g = domain.r.gradient_real(p);
    let gn = norm(&g);
    let ghat: Vec<T> = g.iter().map(|&a| a / gn).collect();
    let alpha_at = |q: &[C<T>], dir: &[T]| -> Result<T> {
        let j = structure.j_at(q)?;
        Ok(dot(&phi.gradient(q), &apply_j(&j, dir)))
    };
    let mut out = Vec::with_capacity(n2);
    for k in 0..n2 {
        let mut e = vec![T::zero(); n2];
        e[k] = T::one();
        project_off(&mut e, std::slice::from_ref(&ghat));
        let value = match c {
            None => alpha_at(p, &e)?,
            Some(c) => {
                if norm(&e) < fl(1e-14) {
                    T::zero()
                } else {
                    // dπ(e) by central differences of the normal march
                    let h = cfg.fd_step;
                    let pp = project_to_boundary(&domain.r, &displace(p, &e, h))?;
                    let pm = project_to_boundary(&domain.r, &displace(p, &e, -h))?;
                    let qp = march_to_level(phi, &domain.r, &pp, c, domain.collar_depth, cfg.root_tol)?;
                    let qm = march_to_level(phi, &domain.r, &pm, c, domain.collar_depth, cfg.root_tol)?;
                    let q0 = march_to_level(phi, &domain.r, p, c, domain.collar_depth, cfg.root_tol)?;
                    let dpi: Vec<T> = (0..n2)
                        .map(|i| {
                            let (a, b) = if i < n2 / 2 {
                                (qp[i].re, qm[i].re)
                            } else {
                                (qp[i - n2 / 2].im, qm[i - n2 / 2].im)
                            };
                            (a - b) / (fl::<T>(2.0) * h)
                        })
                        .collect();
                    alpha_at(&q0, &dpi)?
                }
            }
        };
        out.push(value);
    }
    Ok(out)
}

/// Contact approximation pipeline: pull J^*dφ back from the level sets
/// Γ_j = {φ = −δ_j^{1/η}} to bΩ along Euclidean normals and record
/// contact minima and C⁰/C¹ distances to the boundary form.
pub fn level_set_approximation<T: Real>(
    structure: &dyn Structure<T>,
    domain: &DomainSpec<T>,
    psi: &PolyField<T>,
    cert: &DFCertificate<T>,
    deltas: &[T],
    cfg: &ApproxConfig<T>,
) -> Result<ApproximationRecord<T>> {
    if !cert.pass {
        return Err(Error::PreconditionFailed {
            detail: "level-set approximation requires a passing certificate".into(),
        });
    }
    let phi = PhiField {
        r: &domain.r,
        psi,
        a: cert.a,
    };
    let rho = RhoField::new(&domain.r, psi, cert.a, cert.eta)?;
    let points: Vec<Vec<C<T>>> = (0..cfg.n_boundary)
        .map(|i| sample::boundary_point(&domain.r, domain.chart_radius, cfg.seed, i as u64))
        .collect::<Result<_>>()?;
    // boundary confoliation and target covectors
    let boundary = confoliation_check(structure, &domain.r, &points, cfg.eps)?;
    let mut targets = Vec::with_capacity(points.len());
    for p in &points {
        targets.push(pullback_covector(structure, domain, &phi, None, p, cfg)?);
    }
    let tangent_dirs_at = |p: &[C<T>]| -> Result<Vec<Vec<T>>> {
        Ok(frame_at(structure, &domain.r, p)?.tangent_basis)
    };
    let mut levels = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let c = delta.powf(T::one() / cert.eta);
        let mut critical = false;
        let mut contact_min_abs = T::infinity();
        let mut confoliation_min = T::infinity();
        let mut c0 = T::zero();
        let mut c1 = T::zero();
        for (p, beta) in points.iter().zip(&targets) {
            let q = march_to_level(&phi, &domain.r, p, c, domain.collar_depth, cfg.root_tol)?;
            let drho = norm(&rho.gradient(&q));
            if drho < cfg.noncritical_threshold {
                critical = true;
                break;
            }
            let sample_q = contact_value(structure, &phi, &q, cfg.eps)?;
            contact_min_abs = smin(contact_min_abs, sample_q.contact_scalar.abs());
            confoliation_min = smin(confoliation_min, sample_q.confoliation_min);
            let a = pullback_covector(structure, domain, &phi, Some(c), p, cfg)?;
            for (x, y) in a.iter().zip(beta) {
                c0 = smax(c0, (*x - *y).abs());
            }
            // C¹: tangential FD derivatives of the coefficient difference
            let h = cfg.fd_step;
            for dir in tangent_dirs_at(p)? {
                let pp = project_to_boundary(&domain.r, &displace(p, &dir, h))?;
                let pm = project_to_boundary(&domain.r, &displace(p, &dir, -h))?;
                let ap = pullback_covector(structure, domain, &phi, Some(c), &pp, cfg)?;
                let bp = pullback_covector(structure, domain, &phi, None, &pp, cfg)?;
                let am = pullback_covector(structure, domain, &phi, Some(c), &pm, cfg)?;
                let bm = pullback_covector(structure, domain, &phi, None, &pm, cfg)?;
                for k in 0..ap.len() {
                    let d = ((ap[k] - bp[k]) - (am[k] - bm[k])) / (fl::<T>(2.0) * h);
                    c1 = smax(c1, d.abs());
                }
            }
        }
        levels.push(LevelRecord {
            delta,
            phi_level: -c,
            critical,
            contact_min_abs: if critical { T::nan() } else { contact_min_abs },
            confoliation_min: if critical { T::nan() } else { confoliation_min },
            c0_distance: if critical { T::nan() } else { c0 },
            c1_distance: if critical { T::nan() } else { smax(c0, c1) },
        });
    }
    Ok(ApproximationRecord {
        levels,
        boundary_confoliation_min: boundary.min_value,
        n_boundary_samples: points.len(),
    })
}

/// Sampled 1-form data on a fixed boundary point set: ambient coefficient
/// vectors, optionally with tangential FD derivatives per direction.
#[derive(Clone, Debug, Serialize)]
pub struct FormSamples<T: Real> {
    pub coeffs: Vec<Vec<T>>,
    pub derivs: Vec<Vec<Vec<T>>>,
}

/// C⁰ (k = 0) or C¹ (k = 1) distance between two sampled forms on the
/// same point set.
pub fn ck_distance<T: Real>(a: &FormSamples<T>, b: &FormSamples<T>, k: u8) -> T {
    let mut d = T::zero();
    for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
        for (u, v) in x.iter().zip(y) {
            d = smax(d, (*u - *v).abs());
        }
    }
    if k >= 1 {
        for (dx, dy) in a.derivs.iter().zip(&b.derivs) {
            for (x, y) in dx.iter().zip(dy) {
                for (u, v) in x.iter().zip(y) {
                    d = smax(d, (*u - *v).abs());
                }
            }
        }
    }
    d
}

/// CSV dump of per-sample α coefficients (one row per point).
pub fn alpha_csv<T: Real>(samples: &[ContactSample<T>]) -> String {
    let mut out = String::from("point,level,alpha_coeffs,contact_scalar,confoliation_min\n");
    for s in samples {
        let pt: Vec<String> = s.point.iter().map(|(a, b)| format!("{a:.6}{b:+.6}i")).collect();
        let al: Vec<String> = s
            .alpha_on_basis
            .iter()
            .map(|v| format!("{:.8e}", v.to_f64().unwrap_or(f64::NAN)))
            .collect();
        out.push_str(&format!(
            "{};{:.6};{};{:.8e};{:.8e}\n",
            pt.join("|"),
            s.level.to_f64().unwrap_or(f64::NAN),
            al.join("|"),
            s.contact_scalar.to_f64().unwrap_or(f64::NAN),
            s.confoliation_min.to_f64().unwrap_or(f64::NAN)
        ));
    }
    out
}
