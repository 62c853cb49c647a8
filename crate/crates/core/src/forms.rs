//! Tangent vectors, sampled differential forms, and the circulation
//! estimate for exterior derivatives of 1-forms.
//!
//! The 2-form value d ω(X, Y)(p) is computed without extending X, Y to
//! vector fields: integrate ω around the parallelogram centered at p and
//! spanned by εX, εY, divide by ε², and Richardson-extrapolate over two
//! values of ε. Edge integrals use 4-point Gauss–Legendre.

use crate::error::{Error, Result};
use crate::num::{fl, Real, C};

/// A (1,0)-tangent vector at a base point, stored by its complex
/// components; the corresponding real vector is X = (Re v, Im v).
#[derive(Clone, Debug)]
pub struct TangentVector<T: Real> {
    pub base: Vec<C<T>>,
    pub v: Vec<C<T>>,
}

impl<T: Real> TangentVector<T> {
    pub fn new(base: Vec<C<T>>, v: Vec<C<T>>) -> Self {
        TangentVector { base, v }
    }

    /// Real components (x_1..x_n, y_1..y_n).
    pub fn to_real(&self) -> Vec<T> {
        self.v
            .iter()
            .map(|c| c.re)
            .chain(self.v.iter().map(|c| c.im))
            .collect()
    }

    pub fn from_real(base: Vec<C<T>>, x: &[T]) -> Self {
        let n = x.len() / 2;
        TangentVector {
            base,
            v: (0..n).map(|k| C::new(x[k], x[n + k])).collect(),
        }
    }

    pub fn norm(&self) -> T {
        self.v.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt()
    }
}

/// A 1-form sampled at a point: a real-linear functional on R^2n.
#[derive(Clone, Debug)]
pub struct OneFormSample<T: Real> {
    pub base: Vec<C<T>>,
    pub coeffs: Vec<T>,
}

impl<T: Real> OneFormSample<T> {
    pub fn eval(&self, x: &[T]) -> T {
        self.coeffs.iter().zip(x).map(|(&a, &b)| a * b).sum()
    }
}

/// A 2-form sampled at a point: an antisymmetric matrix on coordinate
/// vectors of R^2n.
#[derive(Clone, Debug)]
pub struct TwoFormSample<T: Real> {
    pub base: Vec<C<T>>,
    pub mat: Vec<T>,
    pub dim_real: usize,
}

impl<T: Real> TwoFormSample<T> {
    pub fn new(base: Vec<C<T>>, mat: Vec<T>, dim_real: usize) -> Result<Self> {
        assert_eq!(mat.len(), dim_real * dim_real);
        let mut defect = T::zero();
        let mut scale = T::zero();
        for i in 0..dim_real {
            for j in 0..dim_real {
                let d = (mat[i * dim_real + j] + mat[j * dim_real + i]).abs();
                if d > defect {
                    defect = d;
                }
                let a = mat[i * dim_real + j].abs();
                if a > scale {
                    scale = a;
                }
            }
        }
        if defect > fl::<T>(1e-12) * (T::one() + scale) {
            return Err(Error::Invalid(format!(
                "2-form matrix not antisymmetric (defect {:e})",
                defect.to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(TwoFormSample { base, mat, dim_real })
    }

    pub fn eval(&self, u: &[T], v: &[T]) -> T {
        let n = self.dim_real;
        let mut acc = T::zero();
        for i in 0..n {
            for j in 0..n {
                acc = acc + u[i] * self.mat[i * n + j] * v[j];
            }
        }
        acc
    }
}

/// A real-valued C² function on the chart with an exact gradient.
/// Polynomials implement it exactly; composite functions (the bounded
/// exhaustion ρ, the weight φ = r e^{−Aψ}) implement it by chain rule.
pub trait SmoothField<T: Real> {
    fn dim(&self) -> usize;
    fn value(&self, p: &[C<T>]) -> T;
    /// Real gradient (∂x_1..∂x_n, ∂y_1..∂y_n).
    fn gradient(&self, p: &[C<T>]) -> Vec<T>;
}

impl<T: Real> SmoothField<T> for crate::poly::PolyField<T> {
    fn dim(&self) -> usize {
        crate::poly::PolyField::dim(self)
    }
    fn value(&self, p: &[C<T>]) -> T {
        self.eval_real(p)
    }
    fn gradient(&self, p: &[C<T>]) -> Vec<T> {
        self.gradient_real(p)
    }
}

/// Evaluate the differential du at p on a real vector.
pub fn eval_one_form<T: Real>(u: &dyn SmoothField<T>, p: &[C<T>], x: &[T]) -> T {
    let g = u.gradient(p);
    g.iter().zip(x).map(|(&a, &b)| a * b).sum()
}

/// Displace p by the real vector x (components (dx, dy)).
pub fn displace<T: Real>(p: &[C<T>], x: &[T], scale: T) -> Vec<C<T>> {
    let n = p.len();
    (0..n)
        .map(|k| p[k] + C::new(x[k] * scale, x[n + k] * scale))
        .collect()
}

/// 4-point Gauss–Legendre nodes and weights on [-1/2, 1/2].
fn gauss4<T: Real>() -> [(T, T); 4] {
    let a = fl::<T>(0.339981043584856264802665759103 / 2.0);
    let b = fl::<T>(0.861136311594052575223946488893 / 2.0);
    let wa = fl::<T>(0.652145154862546142626936050778 / 2.0);
    let wb = fl::<T>(0.347854845137453857373063949222 / 2.0);
    [(-b, wb), (-a, wa), (a, wa), (b, wb)]
}

/// Circulation of the 1-form `omega` (given pointwise as p ↦ functional on
/// real vectors) around the parallelogram centered at `p` spanned by
/// `eps·x` and `eps·y`, divided by ε².
fn circulation_over_eps2<T: Real>(
    omega: &dyn Fn(&[C<T>], &[T]) -> Result<T>,
    p: &[C<T>],
    x: &[T],
    y: &[T],
    eps: T,
) -> Result<T> {
    let n2 = x.len();
    let half = fl::<T>(0.5);
    // corners: p ± (ε/2)x ± (ε/2)y; edges traversed x, y, −x, −y
    let add = |a: &[T], sa: T, b: &[T], sb: T| -> Vec<T> {
        (0..n2).map(|k| a[k] * sa + b[k] * sb).collect()
    };
    let mut total = T::zero();
    // Each edge: start corner offset, direction vector.
    let edges: [(Vec<T>, &[T], T); 4] = [
        (add(x, -half, y, -half), x, T::one()),
        (add(x, half, y, -half), y, T::one()),
        (add(x, half, y, half), x, -T::one()),
        (add(x, -half, y, half), y, -T::one()),
    ];
    for (corner, dir, sign) in &edges {
        // integrate ω(dir) along the segment corner .. corner + sign*dir
        // parameterized on [-1/2, 1/2] around the edge midpoint
        let mid = add(corner, T::one(), dir, *sign * half);
        for (node, w) in gauss4::<T>() {
            let off = add(&mid, T::one(), dir, *sign * node);
            let q = displace(p, &off, eps);
            total = total + w * *sign * omega(&q, dir)?;
        }
    }
    // each edge has length ε in chart units, so the line integral carries
    // one factor of ε; dividing by ε leaves circulation/ε².
    Ok(total / eps)
}

/// dω(X, Y)(p) by centered circulation with Richardson extrapolation over
/// ε and ε/2 (the centered estimate has error O(ε²)).
pub fn d_one_form<T: Real>(
    omega: &dyn Fn(&[C<T>], &[T]) -> Result<T>,
    p: &[C<T>],
    x: &[T],
    y: &[T],
    eps: T,
) -> Result<T> {
    let c1 = circulation_over_eps2(omega, p, x, y, eps)?;
    let c2 = circulation_over_eps2(omega, p, x, y, eps * fl(0.5))?;
    let four = fl::<T>(4.0);
    let three = fl::<T>(3.0);
    Ok((four * c2 - c1) / three)
}

/// Assemble the full antisymmetric matrix of dω on coordinate vectors.
pub fn d_one_form_matrix<T: Real>(
    omega: &dyn Fn(&[C<T>], &[T]) -> Result<T>,
    p: &[C<T>],
    dim_real: usize,
    eps: T,
) -> Result<TwoFormSample<T>> {
    let mut mat = vec![T::zero(); dim_real * dim_real];
    for i in 0..dim_real {
        for j in i + 1..dim_real {
            let mut ei = vec![T::zero(); dim_real];
            ei[i] = T::one();
            let mut ej = vec![T::zero(); dim_real];
            ej[j] = T::one();
            let v = d_one_form(omega, p, &ei, &ej, eps)?;
            mat[i * dim_real + j] = v;
            mat[j * dim_real + i] = -v;
        }
    }
    TwoFormSample::new(p.to_vec(), mat, dim_real)
}
