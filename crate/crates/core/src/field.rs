//! Almost complex structures on a chart via the anti-linear deformation
//! matrix Q(z), and the dictionary between Q and the real endomorphism J.

use crate::error::{Error, Result};
use crate::la::{j_standard, real_of_antilinear, CMat};
use crate::num::{fl, smax, Real, C};
use crate::poly::{PolyField, ValueKind};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Anything that can report the deformation matrix Q at a chart point.
///
/// `StructureField` stores polynomial entries; derived structures
/// (dilations of non-polynomial data, pushforwards, recentered charts)
/// evaluate pointwise.
pub trait Structure<T: Real> {
    fn dim(&self) -> usize;
    /// Q at p; the structure is valid at p iff ‖Q(p)‖ < 1.
    fn q_at(&self, p: &[C<T>]) -> Result<CMat<T>>;

    /// The real endomorphism J(p) = J_st (I + u)(I − u)⁻¹ with u(v) = Q(p) v̄.
    fn j_at(&self, p: &[C<T>]) -> Result<CMat<T>> {
        let q = self.q_at(p)?;
        j_from_q_matrix(&q)
    }
}

/// An almost complex structure with polynomial Q entries on a chart ball.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize + Real", deserialize = "T: serde::de::DeserializeOwned + Real"))]
pub struct StructureField<T: Real> {
    dim: usize,
    /// Row-major n x n matrix of complex-valued polynomials.
    q: Vec<PolyField<T>>,
    /// Chart ball radius on which ‖Q‖ < 1 was checked.
    radius: T,
}

impl<T: Real> StructureField<T> {
    /// Build and validate on a sampled grid of the chart ball plus the
    /// coefficient-sum analytic bound.
    pub fn new(dim: usize, q: Vec<PolyField<T>>, radius: T) -> Result<Self> {
        if q.len() != dim * dim {
            return Err(Error::Invalid(format!(
                "Q needs {} entries for dimension {dim}, got {}",
                dim * dim,
                q.len()
            )));
        }
        if q.iter().any(|e| e.dim() != dim) {
            return Err(Error::Invalid("Q entry dimension mismatch".into()));
        }
        let s = StructureField { dim, q, radius };
        s.validate()?;
        Ok(s)
    }

    /// The standard structure Q ≡ 0.
    pub fn standard(dim: usize) -> Self {
        // Q ≡ 0 is valid on the whole chart
        StructureField {
            dim,
            q: vec![PolyField::zero(dim); dim * dim],
            radius: T::infinity(),
        }
    }

    /// Single-entry structure Q_{ij} = f.
    pub fn single_entry(dim: usize, i: usize, j: usize, f: PolyField<T>, radius: T) -> Result<Self> {
        let mut q = vec![PolyField::zero(dim); dim * dim];
        q[i * dim + j] = f;
        Self::new(dim, q, radius)
    }

    /// Seeded random polynomial perturbation with approximate sup-norm bound
    /// on the unit ball. Terms are linear in z and z̄ plus one quadratic term
    /// per entry; the whole matrix is rescaled so the analytic coefficient
    /// bound equals `sup_norm`.
    pub fn seeded_random(dim: usize, seed: u64, sup_norm: T) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut q = Vec::with_capacity(dim * dim);
        for _ in 0..dim * dim {
            let mut terms = Vec::new();
            for k in 0..dim {
                let mut ez = vec![0u32; dim];
                ez[k] = 1;
                let c = C::new(
                    fl::<T>(rng.gen_range(-1.0..1.0)),
                    fl::<T>(rng.gen_range(-1.0..1.0)),
                );
                terms.push((ez.clone(), vec![0; dim], c));
                let c = C::new(
                    fl::<T>(rng.gen_range(-1.0..1.0)),
                    fl::<T>(rng.gen_range(-1.0..1.0)),
                );
                terms.push((vec![0; dim], ez, c));
            }
            let mut eq = vec![0u32; dim];
            eq[rng.gen_range(0..dim)] += 1;
            let mut eb = vec![0u32; dim];
            eb[rng.gen_range(0..dim)] += 1;
            terms.push((
                eq,
                eb,
                C::new(
                    fl::<T>(rng.gen_range(-1.0..1.0)),
                    fl::<T>(rng.gen_range(-1.0..1.0)),
                ),
            ));
            q.push(PolyField::new(dim, terms, ValueKind::Complex)?);
        }
        // Rescale by the row-sum coefficient bound.
        let mut bound = T::zero();
        for i in 0..dim {
            let mut row = T::zero();
            for j in 0..dim {
                row = row + q[i * dim + j].coeff_l1();
            }
            bound = smax(bound, row);
        }
        if bound > T::zero() {
            let s = sup_norm / bound;
            for f in &mut q {
                *f = f.scale(C::new(s, T::zero()));
            }
        }
        Self::new(dim, q, T::one())
    }

    /// Same entries revalidated on a different chart ball.
    pub fn with_chart_radius(&self, radius: T) -> Result<Self> {
        Self::new(self.dim, self.q.clone(), radius)
    }

    pub fn entries(&self) -> &[PolyField<T>] {
        &self.q
    }

    pub fn entry(&self, i: usize, j: usize) -> &PolyField<T> {
        &self.q[i * self.dim + j]
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn is_standard(&self) -> bool {
        self.q.iter().all(|f| f.is_zero())
    }

    /// Row-sum bound on ‖Q‖ from coefficient magnitudes, valid on the
    /// closed unit polydisc (hence on the unit ball).
    pub fn analytic_bound(&self) -> T {
        let mut bound = T::zero();
        for i in 0..self.dim {
            let mut row = T::zero();
            for j in 0..self.dim {
                row = row + self.q[i * self.dim + j].coeff_l1();
            }
            bound = smax(bound, row);
        }
        bound
    }

    /// Same bound for the first derivatives (all 2n complex derivatives).
    pub fn analytic_deriv_bound(&self) -> T {
        let mut bound = T::zero();
        for k in 0..self.dim {
            for which in 0..2 {
                let mut worst_row = T::zero();
                for i in 0..self.dim {
                    let mut row = T::zero();
                    for j in 0..self.dim {
                        let e = &self.q[i * self.dim + j];
                        let d = if which == 0 { e.deriv_z(k) } else { e.deriv_zbar(k) };
                        row = row + d.coeff_l1();
                    }
                    worst_row = smax(worst_row, row);
                }
                bound = smax(bound, worst_row);
            }
        }
        bound
    }

    /// Largest sampled ‖Q(p)‖ over a deterministic set of points in the
    /// chart ball: a coarse axis grid plus seeded random fill.
    pub fn sampled_sup_norm(&self, samples: usize) -> T {
        let mut worst = T::zero();
        for p in self.sample_points(samples) {
            if let Ok(q) = self.q_at(&p) {
                worst = smax(worst, q.op_norm());
            }
        }
        worst
    }

    fn sample_points(&self, samples: usize) -> Vec<Vec<C<T>>> {
        let n = self.dim;
        let r = self.radius;
        let mut pts = Vec::new();
        // axis-aligned extremes
        for k in 0..n {
            for &(re, im) in &[(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
                let mut p = vec![C::new(T::zero(), T::zero()); n];
                p[k] = C::new(fl::<T>(re) * r, fl::<T>(im) * r);
                pts.push(p);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5a_017);
        while pts.len() < samples {
            let mut p: Vec<C<T>> = (0..n)
                .map(|_| {
                    C::new(
                        fl::<T>(rng.gen_range(-1.0..1.0)),
                        fl::<T>(rng.gen_range(-1.0..1.0)),
                    )
                })
                .collect();
            let norm = p.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
            if norm > T::one() {
                for c in &mut p {
                    *c = *c / norm;
                }
            }
            for c in &mut p {
                *c = *c * r;
            }
            pts.push(p);
        }
        pts
    }

    fn validate(&self) -> Result<()> {
        if self.is_standard() {
            return Ok(());
        }
        // Analytic bound on the polydisc of radius R; conservative backstop.
        let scaled = self.dilate(self.radius);
        if scaled.analytic_bound() < T::one() {
            return Ok(());
        }
        // Otherwise fall back to the sampled grid check.
        let budget = match self.dim {
            1 => 121,
            2 => 11usize.pow(4),
            _ => 10_000,
        };
        let sup = self.sampled_sup_norm(budget);
        if sup < T::one() {
            Ok(())
        } else {
            Err(Error::NonInvertible {
                context: format!("sampled ‖Q‖ = {sup} ≥ 1 on the chart ball"),
            })
        }
    }

    /// Isotropic dilation: Q′(w) = Q(λ w), validity radius R/λ clamped to 1.
    pub fn dilate(&self, lambda: T) -> Self {
        assert!(lambda > T::zero());
        let q = self.q.iter().map(|f| f.dilate(lambda)).collect();
        let r = smin_one(self.radius / lambda);
        StructureField {
            dim: self.dim,
            q,
            radius: r,
        }
    }

    /// Q(0) as a matrix.
    pub fn q_origin(&self) -> CMat<T> {
        let origin = vec![C::new(T::zero(), T::zero()); self.dim];
        let mut m = CMat::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = self.q[i * self.dim + j].eval(&origin);
            }
        }
        m
    }

    /// Search λ on a halving ladder so that both Q and its first
    /// derivatives are bounded by θ on the unit ball, using the analytic
    /// coefficient bound (≥ the sampled sup, which is also reported by
    /// `sampled_sup_norm` on the result).
    pub fn shrink_to_contraction(&self, theta: T) -> Result<(T, Self)> {
        if !(theta > T::zero() && theta < T::one()) {
            return Err(Error::Invalid("target sup norm must lie in (0, 1)".into()));
        }
        let q0 = self.q_origin().max_abs();
        if q0 > fl(1e-14) {
            return Err(Error::NotCentered {
                norm: q0.to_f64().unwrap_or(f64::NAN),
            });
        }
        let mut lambda = smin_one(self.radius);
        for _ in 0..200 {
            let cand = self.dilate(lambda);
            let b = smax(cand.analytic_bound(), cand.analytic_deriv_bound());
            if b <= theta {
                return Ok((lambda, cand));
            }
            lambda = lambda * fl(0.5);
        }
        Err(Error::NoConvergence {
            what: "contraction shrink".into(),
            iterations: 200,
            last_step: lambda.to_f64().unwrap_or(f64::NAN),
        })
    }
}

fn smin_one<T: Real>(x: T) -> T {
    if x > T::one() {
        T::one()
    } else {
        x
    }
}

impl<T: Real> Structure<T> for StructureField<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn q_at(&self, p: &[C<T>]) -> Result<CMat<T>> {
        let n = self.dim;
        let norm = p.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
        if norm > self.radius * fl(1.0 + 1e-9) {
            return Err(Error::OutOfChart {
                radius: norm.to_f64().unwrap_or(f64::NAN),
                chart: self.radius.to_f64().unwrap_or(f64::NAN),
            });
        }
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.q[i * n + j].eval(p);
            }
        }
        Ok(m)
    }
}

/// J = J_st (I + u)(I − u)⁻¹ from the deformation matrix Q at a point.
pub fn j_from_q_matrix<T: Real>(q: &CMat<T>) -> Result<CMat<T>> {
    let n = q.rows;
    if q.op_norm() >= T::one() {
        return Err(Error::NonInvertible {
            context: "‖Q‖ ≥ 1 at evaluation point".into(),
        });
    }
    let u = real_of_antilinear(q);
    let id = CMat::identity(2 * n);
    let inv = id.sub(&u).inverse()?;
    Ok(j_standard::<T>(n).mul(&id.add(&u)).mul(&inv))
}

/// Recover Q from a real endomorphism with J² = −I: u = −(J_st + J)⁻¹(J_st − J),
/// which must be anti-linear; Q is read off the block form of u.
pub fn q_from_j_matrix<T: Real>(j: &CMat<T>) -> Result<CMat<T>> {
    let two_n = j.rows;
    let n = two_n / 2;
    let jst = j_standard::<T>(n);
    let sum = jst.add(j);
    let inv = sum.inverse().map_err(|_| Error::NonInvertible {
        context: "J_st + J singular".into(),
    })?;
    let u = inv.mul(&jst.sub(j)).scale(C::new(-T::one(), T::zero()));
    // anti-linearity residual ‖u J_st + J_st u‖ should vanish
    let residual = u.mul(&jst).add(&jst.mul(&u)).max_abs();
    if residual > fl(1e-8) {
        return Err(Error::Invalid(format!(
            "deformation of J is not anti-linear (residual {residual:e}); J² = −I violated?"
        )));
    }
    let mut q = CMat::zeros(n, n);
    for i in 0..n {
        for jcol in 0..n {
            // u = [[Re Q, Im Q], [Im Q, −Re Q]]
            q[(i, jcol)] = C::new(u[(i, jcol)].re, u[(n + i, jcol)].re);
        }
    }
    Ok(q)
}

/// Structure given by a pointwise Q evaluator (used for recentered charts
/// and pushforwards, where Q is no longer polynomial).
pub struct FnStructure<T: Real, F>
where
    F: Fn(&[C<T>]) -> Result<CMat<T>>,
{
    dim: usize,
    f: F,
    _marker: std::marker::PhantomData<T>,
}

impl<T: Real, F> FnStructure<T, F>
where
    F: Fn(&[C<T>]) -> Result<CMat<T>>,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnStructure {
            dim,
            f,
            _marker: std::marker::PhantomData,
        }
    }
}

impl<T: Real, F> Structure<T> for FnStructure<T, F>
where
    F: Fn(&[C<T>]) -> Result<CMat<T>>,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn q_at(&self, p: &[C<T>]) -> Result<CMat<T>> {
        (self.f)(p)
    }
}

/// Chart recentering at p with the linear adaptation Λ = I − J_st J(p),
/// which conjugates J(p) into J_st. In the new coordinates
/// w = Λ(z − p) the structure satisfies Q̃(0) = 0.
pub struct CenteredStructure<'a, T: Real> {
    base: &'a dyn Structure<T>,
    center: Vec<C<T>>,
    lambda_real: CMat<T>,
    lambda_inv: CMat<T>,
}

impl<'a, T: Real> CenteredStructure<'a, T> {
    pub fn new(base: &'a dyn Structure<T>, center: &[C<T>]) -> Result<Self> {
        let n = base.dim();
        let jp = base.j_at(center)?;
        let lambda = CMat::identity(2 * n).sub(&j_standard::<T>(n).mul(&jp));
        let lambda_inv = lambda.inverse().map_err(|_| Error::NonInvertible {
            context: "chart adaptation Λ = I − J_st J(p) singular".into(),
        })?;
        Ok(CenteredStructure {
            base,
            center: center.to_vec(),
            lambda_real: lambda,
            lambda_inv,
        })
    }

    /// Map a point of the centered chart back to base coordinates.
    pub fn to_base(&self, w: &[C<T>]) -> Vec<C<T>> {
        let x = complex_to_real(w);
        let y = self.lambda_inv.matvec(&x);
        let z = real_to_complex(&y);
        z.iter().zip(&self.center).map(|(a, b)| *a + *b).collect()
    }

    /// Push a base-chart real tangent vector into the centered chart.
    pub fn push_vector(&self, v: &[C<T>]) -> Vec<C<T>> {
        real_to_complex(&self.lambda_real.matvec(&complex_to_real(v)))
    }

    pub fn pull_vector(&self, v: &[C<T>]) -> Vec<C<T>> {
        real_to_complex(&self.lambda_inv.matvec(&complex_to_real(v)))
    }
}

impl<T: Real> Structure<T> for CenteredStructure<'_, T> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn q_at(&self, w: &[C<T>]) -> Result<CMat<T>> {
        let z = self.to_base(w);
        let j = self.base.j_at(&z)?;
        let jt = self.lambda_real.mul(&j).mul(&self.lambda_inv);
        q_from_j_matrix(&jt)
    }
}

///// Pointwise dilation wrapper for non-polynomial structures: Q′(w) = Q(λ w).
pub struct DilatedStructure<'a, T: Real> {
    base: &'a dyn Structure<T>,
    lambda: T,
}

impl<'a, T: Real> DilatedStructure<'a, T> {
    pub fn new(base: &'a dyn Structure<T>, lambda: T) -> Self {
        DilatedStructure { base, lambda }
    }
}

impl<T: Real> Structure<T> for DilatedStructure<'_, T> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn q_at(&self, w: &[C<T>]) -> Result<CMat<T>> {
        let z: Vec<C<T>> = w.iter().map(|c| *c * self.lambda).collect();
        self.base.q_at(&z)
    }
}

/// Complex n-vector to real 2n-vector (x, y), stored as real-part complexes.
pub fn complex_to_real<T: Real>(v: &[C<T>]) -> Vec<C<T>> {
    v.iter()
        .map(|c| C::new(c.re, T::zero()))
        .chain(v.iter().map(|c| C::new(c.im, T::zero())))
        .collect()
}

/// Real 2n-vector (as real-part complexes) back to a complex n-vector.
pub fn real_to_complex<T: Real>(x: &[C<T>]) -> Vec<C<T>> {
    let n = x.len() / 2;
    (0..n).map(|k| C::new(x[k].re, x[n + k].re)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::czero;

    type S = StructureField<f64>;

    fn origin(n: usize) -> Vec<C<f64>> {
        vec![czero(); n]
    }

    #[test]
    fn standard_structure_gives_j_standard() {
        let s = S::standard(2);
        let j = s.j_at(&origin(2)).unwrap();
        assert!(j.sub(&j_standard::<f64>(2)).max_abs() < 1e-15);
    }

    #[test]
    fn j_squares_to_minus_identity() {
        let f = PolyField::monomial(2, &[0, 0], &[1, 0], C::new(0.1, 0.0)); // 0.1 z̄_1
        let s = S::single_entry(2, 0, 1, f, 1.0).unwrap();
        let p = vec![C::new(0.5, 0.0), czero()];
        let j = s.j_at(&p).unwrap();
        let jj = j.mul(&j).add(&CMat::identity(4));
        assert!(jj.max_abs() < 1e-12);
    }

    #[test]
    fn q_j_roundtrip() {
        let f = PolyField::monomial(2, &[0, 0], &[1, 0], C::new(0.1, 0.0));
        let s = S::single_entry(2, 0, 1, f, 1.0).unwrap();
        let p = vec![C::new(0.5, 0.0), czero()];
        let q = s.q_at(&p).unwrap();
        let j = j_from_q_matrix(&q).unwrap();
        let q2 = q_from_j_matrix(&j).unwrap();
        assert!(q.sub(&q2).max_abs() < 1e-12);
    }

    #[test]
    fn q_from_j_standard_is_zero() {
        let q = q_from_j_matrix(&j_standard::<f64>(3)).unwrap();
        assert!(q.max_abs() == 0.0);
    }

    #[test]
    fn roundtrip_on_seeded_structures() {
        let s = S::seeded_random(2, 42, 0.3).unwrap();
        let mut worst: f64 = 0.0;
        for pidx in 0..100 {
            let t = pidx as f64 / 100.0;
            let p = vec![
                C::new(0.5 * (t * 7.1).sin(), 0.4 * (t * 3.3).cos()),
                C::new(0.3 * (t * 5.7).cos(), 0.5 * (t * 2.9).sin()),
            ];
            let q = s.q_at(&p).unwrap();
            let j = j_from_q_matrix(&q).unwrap();
            let q2 = q_from_j_matrix(&j).unwrap();
            worst = worst.max(q.sub(&q2).max_abs());
        }
        assert!(worst < 1e-10, "roundtrip error {worst}");
    }

    #[test]
    fn dilate_shrinks_sup_norm() {
        let f = PolyField::monomial(2, &[0, 0], &[1, 0], C::new(0.8, 0.0));
        let s = S::single_entry(2, 0, 1, f, 1.0).unwrap();
        let d = s.dilate(0.1);
        // Q'(w) = 0.8 * 0.1 * w̄_1
        assert!((d.analytic_bound() - 0.08).abs() < 1e-15);
        // λμ composition is exact on coefficients
        let a = s.dilate(0.2).dilate(0.5);
        let b = s.dilate(0.1);
        for (x, y) in a.entries().iter().zip(b.entries()) {
            for ((e, c), (e2, c2)) in x.terms().zip(y.terms()) {
                assert_eq!(e, e2);
                assert!((*c - *c2).norm() < 1e-16);
            }
        }
    }

    #[test]
    fn shrink_meets_target() {
        let f = PolyField::monomial(2, &[0, 0], &[1, 0], C::new(0.9, 0.0)); // 0.9 z̄_1
        let s = S::single_entry(2, 0, 1, f, 1.0).unwrap();
        let (lambda, shrunk) = s.shrink_to_contraction(0.05).unwrap();
        assert!(lambda <= 0.06);
        assert!(shrunk.analytic_bound() <= 0.05);
        assert!(shrunk.analytic_deriv_bound() <= 0.05);
        // idempotence: already satisfying structures keep λ large
        let (l2, again) = shrunk.shrink_to_contraction(0.05).unwrap();
        assert_eq!(l2, 1.0);
        assert!(again.analytic_bound() <= 0.05);
    }

    #[test]
    fn shrink_standard_is_identity() {
        let s = S::standard(2);
        let (lambda, _) = s.shrink_to_contraction(0.3).unwrap();
        assert_eq!(lambda, 1.0);
    }

    #[test]
    fn shrink_requires_centering() {
        let f = PolyField::constant(2, C::new(0.3, 0.0));
        let s = S::single_entry(2, 0, 1, f, 1.0).unwrap();
        assert!(matches!(
            s.shrink_to_contraction(0.1),
            Err(Error::NotCentered { .. })
        ));
    }

    #[test]
    fn centered_structure_vanishes_at_origin() {
        let f = PolyField::new(
            2,
            vec![
                (vec![0, 0], vec![1, 0], C::new(0.2, 0.05)),
                (vec![0, 0], vec![0, 0], C::new(0.1, -0.02)),
            ],
            ValueKind::Complex,
        )
        .unwrap();
        let s = S::single_entry(2, 0, 1, f, 2.0).unwrap();
        let p = vec![C::new(0.4, -0.1), C::new(0.2, 0.3)];
        let c = CenteredStructure::new(&s, &p).unwrap();
        let q0 = c.q_at(&origin(2)).unwrap();
        assert!(q0.max_abs() < 1e-12, "Q̃(0) = {}", q0.max_abs());
        // to_base of 0 is the center
        let back = c.to_base(&origin(2));
        for (a, b) in back.iter().zip(&p) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
