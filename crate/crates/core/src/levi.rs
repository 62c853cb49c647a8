//! Levi forms by two independent methods, quadratic normalization of
//! coordinates at a point, and pushforward of structures under
//! polynomial coordinate changes.
//!
//! Convention: the Levi form is normalized so that for the standard
//! structure L_{|z|²}(p; e₁) = 4, i.e. L equals the Laplacian of r
//! along a parametrized J-holomorphic disc through p in direction e₁.
//! The circulation method computes −d(J^*dr)(X, JX) with X = ι(v),
//! JX = J(p)X, which carries the same normalization.

use crate::disc::{solve_disc, SolveConfig};
use crate::error::{Error, Result};
use crate::field::{CenteredStructure, Structure, StructureField};
use crate::forms::{d_one_form, SmoothField, TangentVector};
use crate::la::CMat;
use crate::num::{czero, fl, smax, Real, C};
use crate::poly::{PolyField, PolyMap, ValueKind};
use serde::Serialize;

/// ∂_J u(p)(v): the (1,0)-part of du at p with respect to J(p),
/// ∂_J u(v) = du(X) − i du(JX) with X = ι(v). For the standard
/// structure this is 2 Σ u_{z_j} v_j.
pub fn del_j<T: Real>(
    structure: &dyn Structure<T>,
    u: &dyn SmoothField<T>,
    p: &[C<T>],
    v: &[C<T>],
) -> Result<C<T>> {
    let j = structure.j_at(p)?;
    let x = TangentVector::new(p.to_vec(), v.to_vec()).to_real();
    let jx_c = j.matvec(&x.iter().map(|&a| C::new(a, T::zero())).collect::<Vec<_>>());
    let jx: Vec<T> = jx_c.iter().map(|c| c.re).collect();
    let g = u.gradient(p);
    let du_x: T = g.iter().zip(&x).map(|(&a, &b)| a * b).sum();
    let du_jx: T = g.iter().zip(&jx).map(|(&a, &b)| a * b).sum();
    Ok(C::new(du_x, -du_jx))
}

/// L^J_u(p; v) = −d(J^*du)(X, JX)(p) by the circulation estimate.
///
/// The 1-form J^*du is sampled pointwise (J varies along the
/// parallelogram edges); no vector-field extension of v is needed.
pub fn levi_direct<T: Real>(
    structure: &dyn Structure<T>,
    u: &dyn SmoothField<T>,
    p: &[C<T>],
    v: &[C<T>],
    eps: T,
) -> Result<T> {
    let n = structure.dim();
    let x = TangentVector::new(p.to_vec(), v.to_vec()).to_real();
    let jp = structure.j_at(p)?;
    let jx_c = jp.matvec(&x.iter().map(|&a| C::new(a, T::zero())).collect::<Vec<_>>());
    let jx: Vec<T> = jx_c.iter().map(|c| c.re).collect();
    let omega = |q: &[C<T>], dir: &[T]| -> Result<T> {
        let jq = structure.j_at(q)?;
        let dir_c: Vec<C<T>> = dir.iter().map(|&a| C::new(a, T::zero())).collect();
        let jdir = jq.matvec(&dir_c);
        let g = u.gradient(q);
        let mut acc = T::zero();
        for k in 0..2 * n {
            acc = acc + g[k] * jdir[k].re;
        }
        Ok(acc)
    };
    let d = d_one_form(&omega, p, &x, &jx, eps)?;
    Ok(-d)
}

#[derive(Clone, Debug)]
pub struct LeviDiscConfig<T: Real> {
    /// scale factor applied to the direction so the disc stays where the
    /// centered structure is a contraction
    pub dilation: T,
    /// base radius of the five-point Laplacian stencil in ζ
    pub stencil: T,
    pub solve: SolveConfig<T>,
}

impl<T: Real> Default for LeviDiscConfig<T> {
    fn default() -> Self {
        let mut solve = SolveConfig::default();
        solve.nr = 24;
        solve.ntheta = 48;
        LeviDiscConfig {
            dilation: fl(0.05),
            stencil: fl(0.2),
            solve,
        }
    }
}

/// L^J_u(p; v) = Δ(u∘z)(0) for a J-holomorphic disc z with z(0) = p,
/// dz(0)(e₁) = ι(v); the quadratic homogeneity L(p; sv) = s²L(p; v)
/// undoes the direction scaling.
pub fn levi_disc<T: Real>(
    structure: &dyn Structure<T>,
    u: &dyn SmoothField<T>,
    p: &[C<T>],
    v: &[C<T>],
    cfg: &LeviDiscConfig<T>,
) -> Result<T> {
    let n = structure.dim();
    let centered = CenteredStructure::new(structure, p)?;
    let vt = centered.push_vector(v);
    let vnorm = vt.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
    let delta = if vnorm > T::one() {
        cfg.dilation / vnorm
    } else {
        cfg.dilation
    };
    let dir: Vec<C<T>> = vt.iter().map(|c| *c * delta).collect();
    let origin = vec![czero(); n];
    let disc = solve_disc(&centered, &origin, &dir, &cfg.solve)?;
    let f = |zeta: C<T>| -> T {
        let w = disc.eval(zeta);
        u.value(&centered.to_base(&w))
    };
    let lap = |h: T| -> T {
        let re = C::new(h, T::zero());
        let im = C::new(T::zero(), h);
        (f(re) + f(-re) + f(im) + f(-im) - fl::<T>(4.0) * f(czero())) / (h * h)
    };
    let l1 = lap(cfg.stencil);
    let l2 = lap(cfg.stencil * fl(0.5));
    let lap_rich = (fl::<T>(4.0) * l2 - l1) / fl::<T>(3.0);
    Ok(lap_rich / (delta * delta))
}

/// Standard Levi form of a polynomial at p: 4 Σ r_{z_j z̄_k} t_j t̄_k,
/// exact from the polynomial Hessian.
pub fn standard_levi<T: Real>(r: &PolyField<T>, p: &[C<T>], t: &[C<T>]) -> T {
    let n = r.dim();
    let mut acc: C<T> = czero();
    for j in 0..n {
        let rj = r.deriv_z(j);
        for k in 0..n {
            acc = acc + rj.deriv_zbar(k).eval(p) * t[j] * t[k].conj();
        }
    }
    fl::<T>(4.0) * acc.re
}

/// Quadratic normalization map Φ(z) = z + Σ_{k,j} φ_{kj} z_k z̄_j with
/// Φ(0) = 0 and dΦ(0) = I.
#[derive(Clone, Debug)]
pub struct NormalizationMap<T: Real> {
    pub map: PolyMap<T>,
    /// coefficient matrices: (a_k)_{sj} multiplies z_k z̄_j in component s
    pub a: Vec<CMat<T>>,
    /// radius within which Newton inversion is guaranteed to converge
    pub invertibility_radius: T,
}

impl<T: Real> NormalizationMap<T> {
    pub fn identity(dim: usize) -> Self {
        NormalizationMap {
            map: PolyMap::identity(dim),
            a: vec![CMat::zeros(dim, dim); dim],
            invertibility_radius: T::infinity(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.a.iter().all(|m| m.max_abs() == T::zero())
    }
}

fn build_normalization<T: Real>(a: Vec<CMat<T>>) -> NormalizationMap<T> {
    let n = a.len();
    let mut comps = Vec::with_capacity(n);
    let mut coeff_sum = T::zero();
    for s in 0..n {
        let mut terms = vec![(unit_exp(n, s), vec![0; n], C::new(T::one(), T::zero()))];
        for k in 0..n {
            for j in 0..n {
                let c = a[k][(s, j)];
                if c.norm() > T::zero() {
                    terms.push((unit_exp(n, k), unit_exp(n, j), c));
                    coeff_sum = coeff_sum + c.norm();
                }
            }
        }
        comps.push(PolyField::new(n, terms, ValueKind::Complex).expect("normalization terms"));
    }
    // ‖dΦ − I‖ ≤ 2·coeff_sum·|z| < 1 gives local invertibility
    let radius = if coeff_sum > T::zero() {
        T::one() / (fl::<T>(4.0) * coeff_sum)
    } else {
        T::infinity()
    };
    NormalizationMap {
        map: PolyMap::new(comps).expect("normalization map"),
        a,
        invertibility_radius: radius,
    }
}

fn unit_exp(n: usize, k: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    e[k] = 1;
    e
}

/// Extract A_k from the z-linear Taylor data of Q and build the
/// coordinate change killing the z-linear part: Q′(0) = 0, Q′_z(0) = 0.
/// Returns the map together with the transformed structure truncated to
/// polynomial degree `degree`.
pub fn normalize_at_origin<T: Real>(
    s: &StructureField<T>,
    degree: u32,
) -> Result<(NormalizationMap<T>, StructureField<T>)> {
    let n = s.dim();
    let q0 = s.q_origin().max_abs();
    if q0 > fl(1e-12) {
        return Err(Error::NotCentered {
            norm: q0.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut a = vec![CMat::zeros(n, n); n];
    for si in 0..n {
        for j in 0..n {
            let entry = s.entry(si, j);
            for k in 0..n {
                a[k][(si, j)] = entry.coefficient(&unit_exp(n, k), &vec![0; n]);
            }
        }
    }
    let norm_map = build_normalization(a);
    let pushed = pushforward_structure_poly(s, &norm_map.map, degree)?;
    // by construction the constant and z-linear parts vanish; the
    // truncation leaves rounding crumbs which are checked then dropped
    let cleaned = strip_normalized_residue(&pushed, fl(1e-9))?;
    Ok((norm_map, cleaned))
}

/// Truncated polynomial pushforward of a polynomial structure:
/// Q′ = (Φ_z Q − Φ_z̄)(Φ̄_z̄ − Φ̄_z Q)⁻¹ ∘ Φ⁻¹, with the matrix inverse
/// expanded as a Neumann series and everything truncated at `degree`.
pub fn pushforward_structure_poly<T: Real>(
    s: &StructureField<T>,
    phi: &PolyMap<T>,
    degree: u32,
) -> Result<StructureField<T>> {
    let n = s.dim();
    let q: Vec<PolyField<T>> = s.entries().to_vec();
    let phi_z: Vec<PolyField<T>> = {
        let mut m = Vec::with_capacity(n * n);
        for si in 0..n {
            for t in 0..n {
                m.push(phi.components()[si].deriv_z(t));
            }
        }
        m
    };
    let phi_zb: Vec<PolyField<T>> = {
        let mut m = Vec::with_capacity(n * n);
        for si in 0..n {
            for t in 0..n {
                m.push(phi.components()[si].deriv_zbar(t));
            }
        }
        m
    };
    let mul_mat = |a: &[PolyField<T>], b: &[PolyField<T>]| -> Vec<PolyField<T>> {
        let mut out = vec![PolyField::zero(n); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = PolyField::zero(n);
                for k in 0..n {
                    acc = acc.add(&a[i * n + k].mul(&b[k * n + j]).truncate(degree));
                }
                out[i * n + j] = acc;
            }
        }
        out
    };
    let sub_mat = |a: &[PolyField<T>], b: &[PolyField<T>]| -> Vec<PolyField<T>> {
        a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
    };
    let conj_mat = |a: &[PolyField<T>]| -> Vec<PolyField<T>> { a.iter().map(|f| f.conj()).collect() };
    let ident: Vec<PolyField<T>> = {
        let mut m = vec![PolyField::zero(n); n * n];
        for i in 0..n {
            m[i * n + i] = PolyField::constant(n, C::new(T::one(), T::zero()));
        }
        m
    };

    let numer = sub_mat(&mul_mat(&phi_z, &q), &phi_zb);
    // M = Φ̄_z̄ − Φ̄_z Q = conj(Φ_z) − conj(Φ_z̄) Q = I + E, E(0) = 0
    let m_mat = sub_mat(&conj_mat(&phi_z), &mul_mat(&conj_mat(&phi_zb), &q));
    let e_mat = sub_mat(&m_mat, &ident);
    // Neumann series Σ (−E)^k up to the truncation degree
    let mut m_inv = ident.clone();
    let mut power = ident.clone();
    for _ in 0..degree {
        // (−E)^{k+1} = −((−E)^k · E); E(0) = 0 so powers raise the valuation
        power = mul_mat(&power, &e_mat)
            .iter()
            .map(|f| f.neg().truncate(degree))
            .collect();
        m_inv = m_inv.iter().zip(&power).map(|(x, y)| x.add(y)).collect();
    }
    let q_of_z = mul_mat(&numer, &m_inv);
    let inv_map = invert_map_truncated(phi, degree)?;
    let q_new: Vec<PolyField<T>> = q_of_z
        .iter()
        .map(|f| f.compose(&inv_map).truncate(degree))
        .collect();
    structure_with_largest_radius(s.dim(), q_new, s.radius())
}

/// Truncated power-series inverse of Φ = id + B: iterate z ← w − B(z).
fn invert_map_truncated<T: Real>(phi: &PolyMap<T>, degree: u32) -> Result<PolyMap<T>> {
    let n = phi.dim_source();
    let b: Vec<PolyField<T>> = (0..n)
        .map(|s| phi.components()[s].sub(&PolyField::coord(n, s)))
        .collect();
    let mut inv = PolyMap::identity(n);
    for _ in 0..degree {
        let comps: Vec<PolyField<T>> = (0..n)
            .map(|s| {
                PolyField::coord(n, s)
                    .sub(&b[s].compose(&inv).truncate(degree))
            })
            .collect();
        inv = PolyMap::new(comps)?;
    }
    Ok(inv)
}

fn structure_with_largest_radius<T: Real>(
    dim: usize,
    q: Vec<PolyField<T>>,
    start: T,
) -> Result<StructureField<T>> {
    let mut radius = if start.is_finite() && start > T::zero() {
        start
    } else {
        T::one()
    };
    for _ in 0..60 {
        match StructureField::new(dim, q.clone(), radius) {
            Ok(s) => return Ok(s),
            Err(_) => radius = radius * fl(0.5),
        }
    }
    Err(Error::NonInvertible {
        context: "pushforward structure has no valid chart radius".into(),
    })
}

/// Drop constant and z-linear terms below `tol` from every entry;
/// anything larger means the structure is not actually normalized.
fn strip_normalized_residue<T: Real>(
    s: &StructureField<T>,
    tol: T,
) -> Result<StructureField<T>> {
    let n = s.dim();
    let mut entries = Vec::with_capacity(n * n);
    for f in s.entries() {
        let mut terms = Vec::new();
        for (exp, &c) in f.terms() {
            let zdeg: u32 = exp.0.iter().sum();
            let bdeg: u32 = exp.1.iter().sum();
            if bdeg == 0 && zdeg <= 1 {
                if c.norm() > tol {
                    return Err(Error::NotNormalized {
                        detail: format!(
                            "surviving low-order coefficient of size {:e}",
                            c.norm().to_f64().unwrap_or(f64::NAN)
                        ),
                    });
                }
                continue;
            }
            terms.push((exp.0.clone(), exp.1.clone(), c));
        }
        entries.push(PolyField::new(n, terms, ValueKind::Complex)?);
    }
    structure_with_largest_radius(n, entries, s.radius())
}

/// Q′(w) by the pushforward formula evaluated pointwise at z = Φ⁻¹(w)
/// (Newton inversion; nothing is truncated).
pub fn pushforward_q<T: Real>(
    s: &dyn Structure<T>,
    phi: &PolyMap<T>,
    w: &[C<T>],
) -> Result<CMat<T>> {
    let z = phi.newton_invert(w, w, fl(1e-13), 60)?;
    let jz = phi.jacobian_z(&z);
    let jzb = phi.jacobian_zbar(&z);
    let q = s.q_at(&z)?;
    let numer = jz.mul(&q).sub(&jzb);
    let denom = jz.conj().sub(&jzb.conj().mul(&q));
    let inv = denom.inverse().map_err(|_| Error::SingularJacobian {
        context: "pushforward denominator Φ̄_z̄ − Φ̄_z Q".into(),
    })?;
    Ok(numer.mul(&inv))
}

/// The pushforward structure as a pointwise-evaluated structure (exact,
/// rational in the coefficients; used for disc transport checks).
pub struct PushforwardStructure<'a, T: Real> {
    pub base: &'a dyn Structure<T>,
    pub map: &'a PolyMap<T>,
}

impl<T: Real> Structure<T> for PushforwardStructure<'_, T> {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn q_at(&self, w: &[C<T>]) -> Result<CMat<T>> {
        pushforward_q(self.base, self.map, w)
    }
}

/// Both sides of the Levi naturality law
/// L^J_{φ∘F}(p; t) = L^{F_*J}_φ(F(p); dF(p)t); returns (lhs, rhs, gap).
pub fn pushforward_levi_check<T: Real>(
    s: &dyn Structure<T>,
    f_map: &PolyMap<T>,
    phi: &PolyField<T>,
    p: &[C<T>],
    t: &[C<T>],
    eps: T,
) -> Result<(T, T, T)> {
    let composed = phi.compose(f_map);
    let lhs = levi_direct(s, &composed, p, t, eps)?;
    let fp = f_map.eval(p);
    // dF(p) acts real-linearly: t ↦ F_z t + F_z̄ t̄
    let jz = f_map.jacobian_z(p);
    let jzb = f_map.jacobian_zbar(p);
    let tbar: Vec<C<T>> = t.iter().map(|c| c.conj()).collect();
    let dft: Vec<C<T>> = jz
        .matvec(t)
        .iter()
        .zip(jzb.matvec(&tbar))
        .map(|(a, b)| *a + b)
        .collect();
    let pushed = PushforwardStructure { base: s, map: f_map };
    let rhs = levi_direct(&pushed, phi, &fp, &dft, eps)?;
    Ok((lhs, rhs, (lhs - rhs).abs()))
}

/// Cross-method comparison at the origin of adapted coordinates:
/// the disc-based Levi form against the standard Hessian form.
pub fn levi_in_adapted_coords<T: Real>(
    s: &StructureField<T>,
    r: &PolyField<T>,
    t: &[C<T>],
    cfg: &LeviDiscConfig<T>,
) -> Result<(T, T, T)> {
    let n = s.dim();
    let q0 = s.q_origin().max_abs();
    let mut zlin = T::zero();
    for si in 0..n {
        for j in 0..n {
            for k in 0..n {
                zlin = smax(
                    zlin,
                    s.entry(si, j).coefficient(&unit_exp(n, k), &vec![0; n]).norm(),
                );
            }
        }
    }
    if q0 > fl(1e-10) || zlin > fl(1e-10) {
        return Err(Error::NotNormalized {
            detail: format!(
                "|Q(0)| = {:e}, |Q_z(0)| = {:e}",
                q0.to_f64().unwrap_or(f64::NAN),
                zlin.to_f64().unwrap_or(f64::NAN)
            ),
        });
    }
    let origin = vec![czero(); n];
    let l_j = levi_disc(s, r, &origin, t, cfg)?;
    let l_std = standard_levi(r, &origin, t);
    Ok((l_j, l_std, (l_j - l_std).abs()))
}

/// One cross-method Levi record.
#[derive(Clone, Debug, Serialize)]
pub struct LeviRecord<T: Real> {
    pub point: Vec<(T, T)>,
    pub direction: Vec<(T, T)>,
    pub l_direct: T,
    pub l_disc: T,
    pub gap: T,
}

#[derive(Clone, Debug, Serialize, Default)]
pub struct LeviReport<T: Real> {
    pub records: Vec<LeviRecord<T>>,
}

impl<T: Real> LeviReport<T> {
    pub fn push_sample(
        &mut self,
        structure: &dyn Structure<T>,
        u: &dyn SmoothField<T>,
        p: &[C<T>],
        v: &[C<T>],
        eps: T,
        cfg: &LeviDiscConfig<T>,
    ) -> Result<()> {
        let l_direct = levi_direct(structure, u, p, v, eps)?;
        let l_disc = levi_disc(structure, u, p, v, cfg)?;
        self.records.push(LeviRecord {
            point: p.iter().map(|c| (c.re, c.im)).collect(),
            direction: v.iter().map(|c| (c.re, c.im)).collect(),
            l_direct,
            l_disc,
            gap: (l_direct - l_disc).abs(),
        });
        Ok(())
    }

    pub fn max_gap(&self) -> T {
        self.records.iter().map(|r| r.gap).fold(T::zero(), smax)
    }

    pub fn min_direct(&self) -> T {
        self.records
            .iter()
            .map(|r| r.l_direct)
            .fold(T::infinity(), crate::num::smin)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("point,direction,l_direct,l_disc,gap\n");
        for r in &self.records {
            let pt: Vec<String> = r
                .point
                .iter()
                .map(|(a, b)| format!("{a:.6}{b:+.6}i"))
                .collect();
            let dv: Vec<String> = r
                .direction
                .iter()
                .map(|(a, b)| format!("{a:.6}{b:+.6}i"))
                .collect();
            out.push_str(&format!(
                "{};{};{:.10e};{:.10e};{:.3e}\n",
                pt.join("|"),
                dv.join("|"),
                r.l_direct.to_f64().unwrap_or(f64::NAN),
                r.l_disc.to_f64().unwrap_or(f64::NAN),
                r.gap.to_f64().unwrap_or(f64::NAN)
            ));
        }
        out
    }
}

/// Unit direction in ξ = ker dr ∩ ker(J^*dr) at p, obtained by real
/// orthogonalization of ι(v) against ∇r and Jᵀ∇r. Returns None when v
/// is essentially normal (or dr vanishes).
pub fn xi_part<T: Real>(
    structure: &dyn Structure<T>,
    r: &dyn SmoothField<T>,
    p: &[C<T>],
    v: &[C<T>],
) -> Result<Option<Vec<C<T>>>> {
    let g = r.gradient(p);
    let j = structure.j_at(p)?;
    let gc: Vec<C<T>> = g.iter().map(|&a| C::new(a, T::zero())).collect();
    // (J^*dr)(X) = dr(JX) = (Jᵀ∇r)·X
    let jt_g: Vec<T> = (0..g.len())
        .map(|k| {
            let mut s = T::zero();
            for i in 0..g.len() {
                s = s + j[(i, k)].re * gc[i].re;
            }
            s
        })
        .collect();
    let mut x = TangentVector::new(p.to_vec(), v.to_vec()).to_real();
    for w in [&g, &jt_g] {
        let w2: T = w.iter().map(|&a| a * a).sum();
        if w2 <= fl(1e-20) {
            return Ok(None);
        }
        let dot: T = x.iter().zip(w.iter()).map(|(&a, &b)| a * b).sum();
        let s = dot / w2;
        for (xk, &wk) in x.iter_mut().zip(w.iter()) {
            *xk = *xk - s * wk;
        }
    }
    let norm = x.iter().map(|&a| a * a).sum::<T>().sqrt();
    if norm < fl(1e-8) {
        return Ok(None);
    }
    for xk in &mut x {
        *xk = *xk / norm;
    }
    Ok(Some(TangentVector::from_real(p.to_vec(), &x).v))
}

/// Verdict of a plurisubharmonicity scan.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub enum PshClass {
    StrictlyPsh,
    Psh,
    NotPsh,
}

#[derive(Clone, Debug, Serialize)]
pub struct PshScan<T: Real> {
    pub min_levi: T,
    pub argmin_point: Vec<(T, T)>,
    pub argmin_direction: Vec<(T, T)>,
    pub class: PshClass,
    pub samples: usize,
    pub failures: usize,
}

/// Minimum of the direct Levi form over the given (point, unit
/// direction) samples; classification uses `margin` on both sides.
pub fn psh_scan<T: Real>(
    structure: &dyn Structure<T>,
    u: &dyn SmoothField<T>,
    samples: &[(Vec<C<T>>, Vec<C<T>>)],
    eps: T,
    margin: T,
) -> PshScan<T> {
    let mut min_levi = T::infinity();
    let mut argp = Vec::new();
    let mut argv = Vec::new();
    let mut failures = 0;
    for (p, v) in samples {
        match levi_direct(structure, u, p, v, eps) {
            Ok(l) => {
                if l < min_levi {
                    min_levi = l;
                    argp = p.clone();
                    argv = v.clone();
                }
            }
            Err(_) => failures += 1,
        }
    }
    let class = if min_levi > margin {
        PshClass::StrictlyPsh
    } else if min_levi > -margin {
        PshClass::Psh
    } else {
        PshClass::NotPsh
    };
    PshScan {
        min_levi,
        argmin_point: argp.iter().map(|c| (c.re, c.im)).collect(),
        argmin_direction: argv.iter().map(|c| (c.re, c.im)).collect(),
        class,
        samples: samples.len(),
        failures,
    }
}
