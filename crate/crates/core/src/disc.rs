//! J-holomorphic discs through a point in a given direction.
//!
//! The disc z: 𝔻 → Cⁿ satisfies z_ζ̄ + Q(z) z̄_ζ̄ = 0. Writing
//! z = h − T_CG[Q(z) z̄_ζ̄] with h a J_st-holomorphic (affine) part turns
//! the system into a fixed point of a contraction once ‖Q‖ is small; an
//! outer Newton loop on the affine data (p′, c′) enforces z(0) = p and
//! dz(0)(e₁) = v, which the transform perturbs at order ‖Q‖.

use crate::cg::{CauchyGreenOp, CgImage};
use crate::error::{Error, Result};
use crate::field::Structure;
use crate::grid::{DiscGrid, PolarDiff};
use crate::la::CMat;
use crate::num::{czero, fl, smax, Real, C};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug)]
pub struct SolveConfig<T: Real> {
    pub nr: usize,
    pub ntheta: usize,
    pub cheb_degree: usize,
    /// target sup-norm of the Cauchy–Riemann defect
    pub tol: T,
    /// target error on z(0) = p and dz(0)(e₁) = v
    pub match_tol: T,
    /// Picard stopping threshold on the sup step
    pub picard_tol: T,
    pub max_picard: usize,
    pub max_newton: usize,
    /// iterates escaping this ball abort the solve
    pub chart_radius: T,
}

impl<T: Real> Default for SolveConfig<T> {
    fn default() -> Self {
        SolveConfig {
            nr: 32,
            ntheta: 64,
            cheb_degree: 8,
            tol: fl(1e-8),
            match_tol: fl(1e-8),
            picard_tol: fl(1e-10),
            max_picard: 50,
            max_newton: 10,
            chart_radius: fl(1e6),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IterationLog<T: Real> {
    pub newton_steps: usize,
    pub picard_steps_total: usize,
    pub final_match_error: T,
    pub picard_step_history: Vec<T>,
}

/// A solved disc: node values, the affine part and nonlinearity samples
/// (which together evaluate the disc anywhere on 𝔻̄), and diagnostics.
#[derive(Clone, Debug)]
pub struct Disc<T: Real> {
    pub grid: DiscGrid<T>,
    /// per component, per node
    pub values: Vec<Vec<C<T>>>,
    pub center: Vec<C<T>>,
    pub direction: Vec<C<T>>,
    /// affine part h(ζ) = p′ + c′ζ
    pub affine: (Vec<C<T>>, Vec<C<T>>),
    /// transformed nonlinearity T[Q(z) z̄_ζ̄] per component
    pub images: Vec<CgImage<T>>,
    /// sup-norm of the Cauchy–Riemann defect on interior nodes
    pub residual: T,
    pub log: IterationLog<T>,
}

impl<T: Real> Disc<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Evaluate the disc anywhere on the closed unit disc via
    /// z(ζ) = h(ζ) − T g(ζ).
    pub fn eval(&self, zeta: C<T>) -> Vec<C<T>> {
        let (p, c) = &self.affine;
        (0..self.dim())
            .map(|k| p[k] + c[k] * zeta - self.images[k].eval(zeta))
            .collect()
    }

    /// Average of a scalar field along the image of the grid circle `ring`.
    pub fn circle_average(&self, field: &dyn crate::forms::SmoothField<T>, ring: usize) -> T {
        let nt = self.grid.ntheta;
        let mut acc = T::zero();
        for m in 0..nt {
            let k = self.grid.idx(ring, m);
            let z: Vec<C<T>> = self.values.iter().map(|comp| comp[k]).collect();
            acc = acc + field.value(&z);
        }
        acc / fl(nt as f64)
    }
}

/// Solve for the J-holomorphic disc with z(0) = p, dz(0)(e₁) = v.
///
/// The structure must already be small (pre-shrunk): the Picard loop is a
/// contraction only for ‖Q‖ (and its first derivatives) well below 1.
pub fn solve_disc<T: Real>(
    structure: &dyn Structure<T>,
    p: &[C<T>],
    v: &[C<T>],
    cfg: &SolveConfig<T>,
) -> Result<Disc<T>> {
    let n = structure.dim();
    assert_eq!(p.len(), n);
    assert_eq!(v.len(), n);
    let grid = DiscGrid::new(cfg.nr, cfg.ntheta);
    let diff = PolarDiff::new(&grid, cfg.cheb_degree)?;
    let op = CauchyGreenOp::new(&grid)?;
    let nodes = grid.len();

    let mut p_aff = p.to_vec();
    let mut c_aff = v.to_vec();
    let mut values: Vec<Vec<C<T>>> = vec![vec![czero(); nodes]; n];
    let mut g_samples: Vec<Vec<C<T>>> = vec![vec![czero(); nodes]; n];
    let mut images: Vec<CgImage<T>> = Vec::new();
    let mut picard_total = 0;
    let mut history = Vec::new();
    let mut match_error = T::infinity();
    let mut newton_used = 0;

    for newton in 0..cfg.max_newton {
        newton_used = newton + 1;
        // affine start for this Newton pass
        for k in 0..n {
            for (j, tau) in grid.nodes.iter().enumerate() {
                values[k][j] = p_aff[k] + c_aff[k] * *tau;
            }
        }
        // Picard loop
        let mut converged = false;
        for _ in 0..cfg.max_picard {
            picard_total += 1;
            compute_nonlinearity(structure, &grid, &diff, &values, &mut g_samples)?;
            images = g_samples.iter().map(|g| op.transform(g)).collect();
            let mut step = T::zero();
            for k in 0..n {
                let tg = images[k].eval_on_grid(&grid);
                for (j, tau) in grid.nodes.iter().enumerate() {
                    let new = p_aff[k] + c_aff[k] * *tau - tg[j];
                    step = smax(step, (new - values[k][j]).norm());
                    values[k][j] = new;
                }
            }
            history.push(step);
            let sup = values
                .iter()
                .flat_map(|comp| comp.iter())
                .map(|z| z.norm())
                .fold(T::zero(), smax);
            if sup > cfg.chart_radius {
                return Err(Error::OutOfChart {
                    radius: sup.to_f64().unwrap_or(f64::NAN),
                    chart: cfg.chart_radius.to_f64().unwrap_or(f64::NAN),
                });
            }
            if step < cfg.picard_tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                what: "Picard iteration for the disc fixed point".into(),
                iterations: cfg.max_picard,
                last_step: history.last().copied().unwrap_or(T::nan()).to_f64().unwrap_or(f64::NAN),
            });
        }
        compute_nonlinearity(structure, &grid, &diff, &values, &mut g_samples)?;
        images = g_samples.iter().map(|g| op.transform(g)).collect();

        // matching errors at the origin
        let z0 = eval_with(&p_aff, &c_aff, &images, czero());
        let zx0 = x_derivative_at_origin(&p_aff, &c_aff, &images);
        let mut err = T::zero();
        for k in 0..n {
            err = smax(err, (z0[k] - p[k]).norm());
            err = smax(err, (zx0[k] - v[k]).norm());
        }
        match_error = err;
        if err <= cfg.match_tol {
            break;
        }
        // quasi-Newton update: the Jacobian of (z(0), z_x(0)) in (p′, c′)
        // is I + O(‖Q‖), so the identity step contracts at rate O(‖Q‖).
        for k in 0..n {
            p_aff[k] = p_aff[k] - (z0[k] - p[k]);
            c_aff[k] = c_aff[k] - (zx0[k] - v[k]);
        }
    }
    if match_error > cfg.match_tol {
        return Err(Error::NoConvergence {
            what: "Newton matching of the disc 1-jet".into(),
            iterations: cfg.max_newton,
            last_step: match_error.to_f64().unwrap_or(f64::NAN),
        });
    }

    // Cauchy–Riemann defect on interior nodes (outermost ring excluded:
    // the radial fit is one-sided there).
    let residual = cr_defect(structure, &grid, &diff, &values)?;

    Ok(Disc {
        grid,
        values,
        center: p.to_vec(),
        direction: v.to_vec(),
        affine: (p_aff, c_aff),
        images,
        residual,
        log: IterationLog {
            newton_steps: newton_used,
            picard_steps_total: picard_total,
            final_match_error: match_error,
            picard_step_history: history,
        },
    })
}

fn compute_nonlinearity<T: Real>(
    structure: &dyn Structure<T>,
    grid: &DiscGrid<T>,
    diff: &PolarDiff<T>,
    values: &[Vec<C<T>>],
    out: &mut [Vec<C<T>>],
) -> Result<()> {
    let n = values.len();
    let mut dz_all: Vec<Vec<C<T>>> = Vec::with_capacity(n);
    for comp in values {
        let (dz, _) = diff.complex_derivs(grid, comp);
        dz_all.push(dz);
    }
    for j in 0..grid.len() {
        let z: Vec<C<T>> = (0..n).map(|k| values[k][j]).collect();
        let q = structure.q_at(&z)?;
        // z̄_ζ̄ = conj(z_ζ)
        let zbar: Vec<C<T>> = (0..n).map(|k| dz_all[k][j].conj()).collect();
        let g = q.matvec(&zbar);
        for k in 0..n {
            out[k][j] = g[k];
        }
    }
    Ok(())
}

fn cr_defect<T: Real>(
    structure: &dyn Structure<T>,
    grid: &DiscGrid<T>,
    diff: &PolarDiff<T>,
    values: &[Vec<C<T>>],
) -> Result<T> {
    let n = values.len();
    let mut dz_all = Vec::with_capacity(n);
    let mut dzb_all = Vec::with_capacity(n);
    for comp in values {
        let (dz, dzb) = diff.complex_derivs(grid, comp);
        dz_all.push(dz);
        dzb_all.push(dzb);
    }
    let mut worst = T::zero();
    for ring in 0..grid.nr.saturating_sub(1) {
        for m in 0..grid.ntheta {
            let j = grid.idx(ring, m);
            let z: Vec<C<T>> = (0..n).map(|k| values[k][j]).collect();
            let q = structure.q_at(&z)?;
            let zbar: Vec<C<T>> = (0..n).map(|k| dz_all[k][j].conj()).collect();
            let qz = q.matvec(&zbar);
            for k in 0..n {
                worst = smax(worst, (dzb_all[k][j] + qz[k]).norm());
            }
        }
    }
    Ok(worst)
}

fn eval_with<T: Real>(
    p_aff: &[C<T>],
    c_aff: &[C<T>],
    images: &[CgImage<T>],
    zeta: C<T>,
) -> Vec<C<T>> {
    (0..p_aff.len())
        .map(|k| p_aff[k] + c_aff[k] * zeta - images[k].eval(zeta))
        .collect()
}

/// z_x(0) = dz(0)(e₁) by centered differences along the real ζ-axis with
/// Richardson extrapolation.
fn x_derivative_at_origin<T: Real>(
    p_aff: &[C<T>],
    c_aff: &[C<T>],
    images: &[CgImage<T>],
) -> Vec<C<T>> {
    let h = fl::<T>(1e-3);
    let d = |step: T| -> Vec<C<T>> {
        let plus = eval_with(p_aff, c_aff, images, C::new(step, T::zero()));
        let minus = eval_with(p_aff, c_aff, images, C::new(-step, T::zero()));
        plus.iter()
            .zip(&minus)
            .map(|(a, b)| (*a - *b) / (fl::<T>(2.0) * step))
            .collect()
    };
    let d1 = d(h);
    let d2 = d(h * fl(0.5));
    d1.iter()
        .zip(&d2)
        .map(|(a, b)| (*b * fl::<T>(4.0) - *a) / fl::<T>(3.0))
        .collect()
}

/// Jet coefficients of z(ζ) = p + tζ + sζ̄ + aζ² + bζ̄² + cζζ̄ + …
/// fitted per component by least squares over small-radius nodes.
#[derive(Clone, Debug)]
pub struct DiscJet<T: Real> {
    pub constant: Vec<C<T>>,
    pub t: Vec<C<T>>,
    pub s: Vec<C<T>>,
    pub a: Vec<C<T>>,
    pub b: Vec<C<T>>,
    pub c: Vec<C<T>>,
}

#[derive(Clone, Debug)]
pub struct JetConfig<T: Real> {
    pub max_radius: T,
    pub fit_degree: u32,
}

impl<T: Real> Default for JetConfig<T> {
    fn default() -> Self {
        JetConfig {
            max_radius: fl(0.2),
            fit_degree: 6,
        }
    }
}

pub fn disc_jet<T: Real>(disc: &Disc<T>, cfg: &JetConfig<T>) -> Result<DiscJet<T>> {
    let grid = &disc.grid;
    let nodes: Vec<usize> = (0..grid.len())
        .filter(|&j| grid.nodes[j].norm() <= cfg.max_radius)
        .collect();
    // monomial basis ζ^a ζ̄^b with a+b ≤ degree, ζ scaled by the fit radius
    let mut basis = Vec::new();
    for total in 0..=cfg.fit_degree {
        for a in (0..=total).rev() {
            basis.push((a, total - a));
        }
    }
    if nodes.len() < 2 * basis.len() {
        return Err(Error::IllConditioned {
            detail: format!(
                "{} small-radius nodes for {} basis functions",
                nodes.len(),
                basis.len()
            ),
        });
    }
    let scale = cfg.max_radius;
    let mut design = CMat::zeros(nodes.len(), basis.len());
    for (row, &j) in nodes.iter().enumerate() {
        let zeta = grid.nodes[j] / scale;
        for (col, &(a, b)) in basis.iter().enumerate() {
            let mut m = C::new(T::one(), T::zero());
            for _ in 0..a {
                m = m * zeta;
            }
            for _ in 0..b {
                m = m * zeta.conj();
            }
            design[(row, col)] = m;
        }
    }
    let pos = |pa: u32, pb: u32| basis.iter().position(|&e| e == (pa, pb)).unwrap();
    let mut jet = DiscJet {
        constant: Vec::new(),
        t: Vec::new(),
        s: Vec::new(),
        a: Vec::new(),
        b: Vec::new(),
        c: Vec::new(),
    };
    for comp in &disc.values {
        let rhs: Vec<C<T>> = nodes.iter().map(|&j| comp[j]).collect();
        let coeffs = design.lstsq(&rhs)?;
        // undo the ζ scaling: coefficient of ζ^aζ̄^b is coeffs / scale^{a+b}
        let unscale = |pa: u32, pb: u32| {
            coeffs[pos(pa, pb)] / C::new(scale.powi((pa + pb) as i32), T::zero())
        };
        jet.constant.push(unscale(0, 0));
        jet.t.push(unscale(1, 0));
        jet.s.push(unscale(0, 1));
        jet.a.push(unscale(2, 0));
        jet.b.push(unscale(0, 2));
        jet.c.push(unscale(1, 1));
    }
    Ok(jet)
}

impl<T: Real> DiscJet<T> {
    pub fn c_norm(&self) -> T {
        self.c.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt()
    }
}

/// Containment verdict for one member of a Hartogs family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Containment<T: Real> {
    pub parameter: T,
    /// max of r over all grid nodes of the disc
    pub interior_max: T,
    /// max of r over the image of the unit circle
    pub boundary_max: T,
    pub contained: bool,
    pub boundary_contained: bool,
    /// interior approaches the boundary while the disc boundary stays
    /// at least `margin` inside
    pub touching: bool,
}

#[derive(Debug)]
pub struct HartogsSweep<T: Real> {
    pub entries: Vec<(T, Result<Disc<T>>)>,
    pub verdicts: Vec<Containment<T>>,
}

/// Sweep a 1-parameter family of discs through (p(t), v(t)) and record
/// where each disc sits relative to Ω = {r < 0}.
pub fn hartogs_sweep<T: Real>(
    structure: &dyn Structure<T>,
    r: &dyn crate::forms::SmoothField<T>,
    path: &dyn Fn(T) -> (Vec<C<T>>, Vec<C<T>>),
    params: &[T],
    cfg: &SolveConfig<T>,
    margin: T,
) -> HartogsSweep<T> {
    let mut entries = Vec::new();
    let mut verdicts = Vec::new();
    for &t in params {
        let (p, v) = path(t);
        let solved = solve_disc(structure, &p, &v, cfg);
        if let Ok(disc) = &solved {
            let mut interior_max = T::neg_infinity();
            for j in 0..disc.grid.len() {
                let z: Vec<C<T>> = disc.values.iter().map(|comp| comp[j]).collect();
                interior_max = smax(interior_max, r.value(&z));
            }
            // include the disc center
            let z0 = disc.eval(czero());
            interior_max = smax(interior_max, r.value(&z0));
            let mut boundary_max = T::neg_infinity();
            let nb = disc.grid.ntheta;
            for m in 0..nb {
                let th = fl::<T>(2.0 * std::f64::consts::PI) * fl(m as f64) / fl(nb as f64);
                let zeta = C::new(th.cos(), th.sin());
                let z = disc.eval(zeta);
                boundary_max = smax(boundary_max, r.value(&z));
            }
            verdicts.push(Containment {
                parameter: t,
                interior_max,
                boundary_max,
                contained: interior_max < T::zero() && boundary_max < T::zero(),
                boundary_contained: boundary_max < T::zero(),
                touching: boundary_max <= -margin && interior_max > -margin,
            });
        }
        entries.push((t, solved));
    }
    HartogsSweep { entries, verdicts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::StructureField;
    use crate::poly::PolyField;

    fn e1(n: usize) -> Vec<C<f64>> {
        let mut v = vec![czero(); n];
        v[0] = C::new(1.0, 0.0);
        v
    }

    #[test]
    fn standard_structure_gives_affine_disc() {
        let s = StructureField::<f64>::standard(2);
        let p = vec![czero(), czero()];
        let cfg = SolveConfig::default();
        let d = solve_disc(&s, &p, &e1(2), &cfg).unwrap();
        assert!(d.residual < 1e-13, "residual {}", d.residual);
        for (j, tau) in d.grid.nodes.iter().enumerate() {
            assert!((d.values[0][j] - tau).norm() < 1e-14);
            assert!(d.values[1][j].norm() < 1e-14);
        }
        assert_eq!(d.log.newton_steps, 1);
    }

    #[test]
    fn perturbed_structure_converges() {
        // Q₂₁ = 0.05 z̄₁ in C² (feeds back into the solved component)
        let f = PolyField::monomial(2, &[0, 0], &[1, 0], C::new(0.05, 0.0));
        let s = StructureField::single_entry(2, 1, 0, f, 2.0).unwrap();
        let p = vec![czero(), czero()];
        let cfg = SolveConfig::default();
        let d = solve_disc(&s, &p, &e1(2), &cfg).unwrap();
        assert!(d.residual < 1e-8, "residual {}", d.residual);
        assert!(d.log.picard_steps_total <= 20 * cfg.max_newton);
        let z0 = d.eval(czero());
        assert!(z0.iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-8);
    }

    #[test]
    fn picard_steps_contract_geometrically() {
        // self-coupled entry Q₁₁ = 0.2 z̄₁ keeps every Picard step active
        let f = PolyField::monomial(2, &[0, 0], &[1, 0], C::new(0.2, 0.0));
        let s = StructureField::single_entry(2, 0, 0, f, 2.0).unwrap();
        let p = vec![czero(), czero()];
        let cfg = SolveConfig::default();
        let d = solve_disc(&s, &p, &e1(2), &cfg).unwrap();
        let h = &d.log.picard_step_history;
        // within one Newton pass the steps should contract at ratio ≤ 2θ
        let mut ok = 0;
        for w in h.windows(2) {
            if w[1] <= 0.5 * w[0] + 1e-12 {
                ok += 1;
            }
        }
        assert!(ok * 10 >= h.len() * 8, "history {h:?}");
    }

    #[test]
    fn dilation_equivariance() {
        // solving for dilate(S, λ) at (p/λ, v/λ) equals the λ-scaled solution
        let f = PolyField::new(
            2,
            vec![
                (vec![0, 0], vec![1, 0], C::new(0.04, 0.01)),
                (vec![0, 1], vec![0, 0], C::new(0.02, -0.03)),
            ],
            crate::poly::ValueKind::Complex,
        )
        .unwrap();
        let s = StructureField::single_entry(2, 1, 0, f, 4.0).unwrap();
        let lambda = 0.5;
        let sd = s.dilate(lambda);
        let p = vec![C::new(0.02, 0.01), C::new(-0.015, 0.0)];
        let v = vec![C::new(0.3, 0.0), C::new(0.1, 0.05)];
        let cfg = SolveConfig::default();
        let d1 = solve_disc(&s, &p, &v, &cfg).unwrap();
        let pl: Vec<C<f64>> = p.iter().map(|c| c / lambda).collect();
        let vl: Vec<C<f64>> = v.iter().map(|c| c / lambda).collect();
        let d2 = solve_disc(&sd, &pl, &vl, &cfg).unwrap();
        let mut worst: f64 = 0.0;
        for j in 0..d1.grid.len() {
            for k in 0..2 {
                worst = worst.max((d1.values[k][j] - d2.values[k][j] * lambda).norm());
            }
        }
        assert!(worst < 1e-8, "equivariance defect {worst}");
    }

    #[test]
    fn jet_of_affine_disc_is_trivial() {
        let s = StructureField::<f64>::standard(2);
        let p = vec![C::new(0.1, 0.0), czero()];
        let d = solve_disc(&s, &p, &e1(2), &SolveConfig::default()).unwrap();
        let jet = disc_jet(&d, &JetConfig::default()).unwrap();
        // fit noise floor is set by the Gram conditioning, ~1e-12
        assert!(jet.c_norm() < 1e-10);
        assert!(jet.a.iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-10);
        assert!(jet.b.iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-10);
        assert!((jet.t[0] - C::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn sweep_flat_discs_in_ball() {
        let s = StructureField::<f64>::standard(2);
        let r = PolyField::ball(2, 1.0);
        let path = |t: f64| {
            (
                vec![czero(), C::new(0.9 * t, 0.0)],
                vec![C::new(0.05, 0.0), czero()],
            )
        };
        let params: Vec<f64> = (0..5).map(|k| k as f64 / 5.0).collect();
        let sweep = hartogs_sweep(&s, &r, &path, &params, &SolveConfig::default(), 1e-3);
        for v in &sweep.verdicts {
            assert!(v.contained, "disc at t={} not contained: {v:?}", v.parameter);
            // psh maximum principle: interior max is attained on the boundary
            assert!(v.interior_max <= v.boundary_max + 1e-10);
        }
    }
}
