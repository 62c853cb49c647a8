//! Polynomials in (z, z̄) with exact derivative jets.
//!
//! Every user-supplied field (the entries of Q, defining functions r,
//! plurisubharmonic weights ψ, the φ of the contact pipeline) is a
//! polynomial in the chart coordinates and their conjugates, so all inner
//! derivatives are exact; finite differences are reserved for composite
//! objects built on top of these.

use crate::error::{Error, Result};
use crate::num::{cone, czero, fl, Real, C};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueKind {
    Real,
    Complex,
}

type Exponents = (Vec<u32>, Vec<u32>);

/// Polynomial in (z_1..z_n, z̄_1..z̄_n) with complex coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "PolyFieldRepr<T>",
    into = "PolyFieldRepr<T>",
    bound(serialize = "T: Serialize + Real", deserialize = "T: serde::de::DeserializeOwned + Real")
)]
pub struct PolyField<T: Real> {
    dim: usize,
    kind: ValueKind,
    terms: BTreeMap<Exponents, C<T>>,
}

/// Wire format: a flat list of {z-exponents, z̄-exponents, re, im} records.
#[derive(Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: serde::de::DeserializeOwned"))]
pub struct PolyFieldRepr<T> {
    pub dim: usize,
    pub kind: ValueKind,
    pub terms: Vec<TermRepr<T>>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: serde::de::DeserializeOwned"))]
pub struct TermRepr<T> {
    pub z: Vec<u32>,
    pub zbar: Vec<u32>,
    pub re: T,
    pub im: T,
}

impl<T: Real> From<PolyField<T>> for PolyFieldRepr<T> {
    fn from(p: PolyField<T>) -> Self {
        PolyFieldRepr {
            dim: p.dim,
            kind: p.kind,
            terms: p
                .terms
                .into_iter()
                .map(|((z, zbar), c)| TermRepr {
                    z,
                    zbar,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

impl<T: Real> TryFrom<PolyFieldRepr<T>> for PolyField<T> {
    type Error = Error;
    fn try_from(r: PolyFieldRepr<T>) -> Result<Self> {
        PolyField::new(
            r.dim,
            r.terms
                .into_iter()
                .map(|t| (t.z, t.zbar, C::new(t.re, t.im)))
                .collect(),
            r.kind,
        )
    }
}

impl<T: Real> PolyField<T> {
    /// Build from a term list; merges duplicates, drops exact zeros and,
    /// for a real-valued field, checks coefficient conjugate symmetry.
    pub fn new(dim: usize, terms: Vec<(Vec<u32>, Vec<u32>, C<T>)>, kind: ValueKind) -> Result<Self> {
        let mut map: BTreeMap<Exponents, C<T>> = BTreeMap::new();
        for (z, zbar, c) in terms {
            if z.len() != dim || zbar.len() != dim {
                return Err(Error::Invalid(format!(
                    "term exponent length {}/{} does not match dimension {dim}",
                    z.len(),
                    zbar.len()
                )));
            }
            let entry = map.entry((z, zbar)).or_insert_with(czero);
            *entry = *entry + c;
        }
        map.retain(|_, c| !(c.re == T::zero() && c.im == T::zero()));
        let p = PolyField { dim, kind, terms: map };
        if kind == ValueKind::Real {
            let defect = p.realness_defect();
            let scale = p.coeff_scale();
            if defect > fl::<T>(1e-12) * (T::one() + scale) {
                return Err(Error::Invalid(format!(
                    "real-valued polynomial has conjugate-asymmetric coefficients (defect {defect:e})"
                )));
            }
        }
        Ok(p)
    }

    /// Largest deviation |c_{ab} − conj(c_{ba})| over all exponent pairs.
    pub fn realness_defect(&self) -> T {
        let mut worst = T::zero();
        for ((a, b), c) in &self.terms {
            let partner = self
                .terms
                .get(&(b.clone(), a.clone()))
                .copied()
                .unwrap_or_else(czero);
            let d = (*c - partner.conj()).norm();
            if d > worst {
                worst = d;
            }
        }
        worst
    }

    fn coeff_scale(&self) -> T {
        self.terms
            .values()
            .map(|c| c.norm())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    pub fn zero(dim: usize) -> Self {
        PolyField {
            dim,
            kind: ValueKind::Real,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: C<T>) -> Self {
        let kind = if c.im == T::zero() {
            ValueKind::Real
        } else {
            ValueKind::Complex
        };
        let mut terms = BTreeMap::new();
        if !(c.re == T::zero() && c.im == T::zero()) {
            terms.insert((vec![0; dim], vec![0; dim]), c);
        }
        PolyField { dim, kind, terms }
    }

    /// The coordinate function z_k (complex-valued).
    pub fn coord(dim: usize, k: usize) -> Self {
        Self::monomial(dim, &unit_exp(dim, k), &vec![0; dim], cone())
    }

    /// The conjugate coordinate z̄_k.
    pub fn coord_bar(dim: usize, k: usize) -> Self {
        Self::monomial(dim, &vec![0; dim], &unit_exp(dim, k), cone())
    }

    pub fn monomial(dim: usize, z: &[u32], zbar: &[u32], c: C<T>) -> Self {
        assert_eq!(z.len(), dim);
        assert_eq!(zbar.len(), dim);
        let mut terms = BTreeMap::new();
        if !(c.re == T::zero() && c.im == T::zero()) {
            terms.insert((z.to_vec(), zbar.to_vec()), c);
        }
        PolyField {
            dim,
            kind: ValueKind::Complex,
            terms,
        }
    }

    /// Σ_j |z_j|², the standard strictly plurisubharmonic weight.
    pub fn abs_sq(dim: usize) -> Self {
        let mut terms = BTreeMap::new();
        for k in 0..dim {
            terms.insert((unit_exp(dim, k), unit_exp(dim, k)), cone());
        }
        PolyField {
            dim,
            kind: ValueKind::Real,
            terms,
        }
    }

    /// |z|² − R², defining function of the ball of radius R.
    pub fn ball(dim: usize, radius: T) -> Self {
        Self::abs_sq(dim).add(&Self::constant(dim, C::new(-radius * radius, T::zero())))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> ValueKind {
        self.kind
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &C<T>)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, z: &[u32], zbar: &[u32]) -> C<T> {
        self.terms
            .get(&(z.to_vec(), zbar.to_vec()))
            .copied()
            .unwrap_or_else(czero)
    }

    /// Total degree, 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|(a, b)| a.iter().sum::<u32>() + b.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Sum of coefficient magnitudes; bounds the sup norm on the unit polydisc.
    pub fn coeff_l1(&self) -> T {
        self.terms.values().map(|c| c.norm()).sum()
    }

    pub fn eval(&self, p: &[C<T>]) -> C<T> {
        assert_eq!(p.len(), self.dim);
        let pbar: Vec<C<T>> = p.iter().map(|z| z.conj()).collect();
        let mut acc = czero();
        for ((a, b), c) in &self.terms {
            acc = acc + *c * monomial_value(p, a) * monomial_value(&pbar, b);
        }
        acc
    }

    /// Evaluate a real-valued field, returning the real part.
    pub fn eval_real(&self, p: &[C<T>]) -> T {
        self.eval(p).re
    }

    pub fn deriv_z(&self, k: usize) -> Self {
        assert!(k < self.dim);
        let mut terms = BTreeMap::new();
        for ((a, b), c) in &self.terms {
            if a[k] == 0 {
                continue;
            }
            let mut a2 = a.clone();
            a2[k] -= 1;
            let coeff = *c * C::new(fl(a[k] as f64), T::zero());
            let entry = terms.entry((a2, b.clone())).or_insert_with(czero::<T>);
            *entry = *entry + coeff;
        }
        PolyField {
            dim: self.dim,
            kind: ValueKind::Complex,
            terms,
        }
    }

    pub fn deriv_zbar(&self, k: usize) -> Self {
        assert!(k < self.dim);
        let mut terms = BTreeMap::new();
        for ((a, b), c) in &self.terms {
            if b[k] == 0 {
                continue;
            }
            let mut b2 = b.clone();
            b2[k] -= 1;
            let coeff = *c * C::new(fl(b[k] as f64), T::zero());
            let entry = terms.entry((a.clone(), b2)).or_insert_with(czero::<T>);
            *entry = *entry + coeff;
        }
        PolyField {
            dim: self.dim,
            kind: ValueKind::Complex,
            terms,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            let entry = terms.entry(k.clone()).or_insert_with(czero::<T>);
            *entry = *entry + *c;
        }
        terms.retain(|_, c| !(c.re == T::zero() && c.im == T::zero()));
        PolyField {
            dim: self.dim,
            kind: combine_kind(self.kind, other.kind),
            terms,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -*c;
        }
        out
    }

    pub fn scale(&self, s: C<T>) -> Self {
        if s.re == T::zero() && s.im == T::zero() {
            return Self::zero(self.dim);
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = *c * s;
        }
        out.kind = if s.im == T::zero() {
            self.kind
        } else {
            ValueKind::Complex
        };
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut terms: BTreeMap<Exponents, C<T>> = BTreeMap::new();
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &other.terms {
                let a: Vec<u32> = a1.iter().zip(a2).map(|(x, y)| x + y).collect();
                let b: Vec<u32> = b1.iter().zip(b2).map(|(x, y)| x + y).collect();
                let entry = terms.entry((a, b)).or_insert_with(czero::<T>);
                *entry = *entry + *c1 * *c2;
            }
        }
        terms.retain(|_, c| !(c.re == T::zero() && c.im == T::zero()));
        PolyField {
            dim: self.dim,
            kind: combine_kind(self.kind, other.kind),
            terms,
        }
    }

    pub fn conj(&self) -> Self {
        let mut terms = BTreeMap::new();
        for ((a, b), c) in &self.terms {
            terms.insert((b.clone(), a.clone()), c.conj());
        }
        PolyField {
            dim: self.dim,
            kind: self.kind,
            terms,
        }
    }

    /// Substitute z ↦ λ z (λ real); each term of total degree d scales by λ^d.
    pub fn dilate(&self, lambda: T) -> Self {
        let mut out = self.clone();
        for ((a, b), c) in out.terms.iter_mut() {
            let d = a.iter().sum::<u32>() + b.iter().sum::<u32>();
            *c = *c * C::new(lambda.powi(d as i32), T::zero());
        }
        out.terms.retain(|_, c| !(c.re == T::zero() && c.im == T::zero()));
        out
    }

    /// Substitute z_k ↦ F_k(w, w̄) where F is a polynomial map; z̄_k becomes
    /// the conjugate polynomial.
    pub fn compose(&self, map: &PolyMap<T>) -> Self {
        assert_eq!(self.dim, map.dim_target());
        let out_dim = map.dim_source();
        let comps: Vec<PolyField<T>> = map.components().to_vec();
        let comps_bar: Vec<PolyField<T>> = comps.iter().map(|f| f.conj()).collect();
        let mut acc = PolyField::zero(out_dim);
        for ((a, b), c) in &self.terms {
            let mut term = PolyField::constant(out_dim, *c);
            for k in 0..self.dim {
                for _ in 0..a[k] {
                    term = term.mul(&comps[k]);
                }
                for _ in 0..b[k] {
                    term = term.mul(&comps_bar[k]);
                }
            }
            acc = acc.add(&term);
        }
        acc.kind = self.kind;
        acc
    }

    /// Drop all terms of total degree above `max_degree`.
    pub fn truncate(&self, max_degree: u32) -> Self {
        let mut out = self.clone();
        out.terms
            .retain(|(a, b), _| a.iter().sum::<u32>() + b.iter().sum::<u32>() <= max_degree);
        out
    }

    /// Exact real gradient (∂/∂x_1..∂/∂x_n, ∂/∂y_1..∂/∂y_n) at p.
    /// Uses u_x = u_z + u_z̄ and u_y = i(u_z − u_z̄); for a real-valued
    /// field both combinations are real.
    pub fn gradient_real(&self, p: &[C<T>]) -> Vec<T> {
        let n = self.dim;
        let pbar: Vec<C<T>> = p.iter().map(|z| z.conj()).collect();
        let mut dz = vec![czero::<T>(); n];
        let mut dzb = vec![czero::<T>(); n];
        for ((a, b), c) in &self.terms {
            let ma_full = monomial_value(p, a);
            let mb_full = monomial_value(&pbar, b);
            for k in 0..n {
                if a[k] > 0 {
                    let mut ma = cone::<T>();
                    for (j, &e) in a.iter().enumerate() {
                        let e_eff = if j == k { e - 1 } else { e };
                        for _ in 0..e_eff {
                            ma = ma * p[j];
                        }
                    }
                    dz[k] = dz[k] + *c * C::new(fl(a[k] as f64), T::zero()) * ma * mb_full;
                }
                if b[k] > 0 {
                    let mut mbk = cone::<T>();
                    for (j, &e) in b.iter().enumerate() {
                        let e_eff = if j == k { e - 1 } else { e };
                        for _ in 0..e_eff {
                            mbk = mbk * pbar[j];
                        }
                    }
                    dzb[k] = dzb[k] + *c * C::new(fl(b[k] as f64), T::zero()) * ma_full * mbk;
                }
            }
        }
        let i = crate::num::ci::<T>();
        let mut grad = vec![T::zero(); 2 * n];
        for k in 0..n {
            grad[k] = (dz[k] + dzb[k]).re;
            grad[n + k] = (i * (dz[k] - dzb[k])).re;
        }
        grad
    }
}

fn combine_kind(a: ValueKind, b: ValueKind) -> ValueKind {
    if a == ValueKind::Real && b == ValueKind::Real {
        ValueKind::Real
    } else {
        ValueKind::Complex
    }
}

fn unit_exp(dim: usize, k: usize) -> Vec<u32> {
    let mut e = vec![0; dim];
    e[k] = 1;
    e
}

#[inline]
fn monomial_value<T: Real>(p: &[C<T>], exps: &[u32]) -> C<T> {
    let mut acc = cone();
    for (z, &e) in p.iter().zip(exps) {
        for _ in 0..e {
            acc = acc * *z;
        }
    }
    acc
}

/// A polynomial map C^n → C^m with components in (z, z̄).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize + Real", deserialize = "T: serde::de::DeserializeOwned + Real"))]
pub struct PolyMap<T: Real> {
    components: Vec<PolyField<T>>,
}

impl<T: Real> PolyMap<T> {
    pub fn new(components: Vec<PolyField<T>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Invalid("polynomial map needs components".into()));
        }
        let d = components[0].dim();
        if components.iter().any(|c| c.dim() != d) {
            return Err(Error::Invalid(
                "polynomial map components have mismatched dimensions".into(),
            ));
        }
        Ok(PolyMap { components })
    }

    pub fn identity(dim: usize) -> Self {
        PolyMap {
            components: (0..dim).map(|k| PolyField::coord(dim, k)).collect(),
        }
    }

    pub fn components(&self) -> &[PolyField<T>] {
        &self.components
    }

    /// Source dimension (number of variables).
    pub fn dim_source(&self) -> usize {
        self.components[0].dim()
    }

    /// Target dimension (number of components).
    pub fn dim_target(&self) -> usize {
        self.components.len()
    }

    pub fn eval(&self, p: &[C<T>]) -> Vec<C<T>> {
        self.components.iter().map(|f| f.eval(p)).collect()
    }

    /// n x n matrix of ∂F^s/∂z_m at p.
    pub fn jacobian_z(&self, p: &[C<T>]) -> crate::la::CMat<T> {
        let n = self.dim_source();
        let m = self.dim_target();
        let mut j = crate::la::CMat::zeros(m, n);
        for s in 0..m {
            for k in 0..n {
                j[(s, k)] = self.components[s].deriv_z(k).eval(p);
            }
        }
        j
    }

    /// n x n matrix of ∂F^s/∂z̄_m at p.
    pub fn jacobian_zbar(&self, p: &[C<T>]) -> crate::la::CMat<T> {
        let n = self.dim_source();
        let m = self.dim_target();
        let mut j = crate::la::CMat::zeros(m, n);
        for s in 0..m {
            for k in 0..n {
                j[(s, k)] = self.components[s].deriv_zbar(k).eval(p);
            }
        }
        j
    }

    /// Real 2n x 2n Jacobian acting on (x, y).
    pub fn real_jacobian(&self, p: &[C<T>]) -> crate::la::CMat<T> {
        let a = self.jacobian_z(p);
        let b = self.jacobian_zbar(p);
        crate::la::real_of_linear(&a).add(&crate::la::real_of_antilinear(&b))
    }

    /// Invert the map near `seed` by a real Newton iteration: find z with
    /// F(z) = w.
    pub fn newton_invert(&self, w: &[C<T>], seed: &[C<T>], tol: T, max_iter: usize) -> Result<Vec<C<T>>> {
        let n = self.dim_source();
        assert_eq!(self.dim_target(), n);
        let mut z = seed.to_vec();
        for _ in 0..max_iter {
            let fz = self.eval(&z);
            let res: Vec<C<T>> = fz.iter().zip(w).map(|(a, b)| *a - *b).collect();
            let rnorm = res.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
            if rnorm <= tol {
                return Ok(z);
            }
            let jac = self.real_jacobian(&z);
            let rhs: Vec<C<T>> = (0..n)
                .map(|k| C::new(res[k].re, T::zero()))
                .chain((0..n).map(|k| C::new(res[k].im, T::zero())))
                .collect();
            let step = jac.solve(&rhs).map_err(|_| Error::SingularJacobian {
                context: "polynomial map inversion".into(),
            })?;
            for k in 0..n {
                z[k] = z[k] - C::new(step[k].re, step[n + k].re);
            }
        }
        Err(Error::NewtonDiverged {
            context: "polynomial map inversion".into(),
        })
    }
}
