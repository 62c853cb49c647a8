//! Small dense complex matrices.
//!
//! Everything in this crate lives in dimension n ≤ 3 (so real dimension
//! ≤ 6); a plain row-major `Vec` with Gauss elimination is all we need.
//! Real matrices are stored with exactly zero imaginary parts, which the
//! complex arithmetic preserves.

use crate::error::{Error, Result};
use crate::num::{cone, czero, fl, Real, C};

#[derive(Clone, Debug, PartialEq)]
pub struct CMat<T: Real> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![czero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C<T>>>) -> Self {
        let r = rows.len();
        let c = if r > 0 { rows[0].len() } else { 0 };
        debug_assert!(rows.iter().all(|row| row.len() == c));
        CMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn data(&self) -> &[C<T>] {
        &self.data
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == czero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = czero();
                for j in 0..self.cols {
                    s = s + self[(i, j)] * v[j];
                }
                s
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: C<T>) -> Self {
        let mut out = self.clone();
        for x in &mut out.data {
            *x = *x * s;
        }
        out
    }

    fn zip(&self, other: &Self, f: impl Fn(C<T>, C<T>) -> C<T>) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn conj_transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        for x in &mut out.data {
            *x = x.conj();
        }
        out
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|c| c.norm())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let mut pivot = col;
            let mut best = a[(col, col)].norm();
            for r in col + 1..n {
                let v = a[(r, col)].norm();
                if v > best {
                    best = v;
                    pivot = r;
                }
            }
            if best <= T::epsilon() * fl(16.0) {
                return Err(Error::NonInvertible {
                    context: format!("pivot {col} of {n}x{n} matrix"),
                });
            }
            if pivot != col {
                for j in 0..n {
                    let t = a[(col, j)];
                    a[(col, j)] = a[(pivot, j)];
                    a[(pivot, j)] = t;
                    let t = inv[(col, j)];
                    inv[(col, j)] = inv[(pivot, j)];
                    inv[(pivot, j)] = t;
                }
            }
            let d = a[(col, col)];
            for j in 0..n {
                a[(col, j)] = a[(col, j)] / d;
                inv[(col, j)] = inv[(col, j)] / d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f == czero() {
                    continue;
                }
                for j in 0..n {
                    a[(r, j)] = a[(r, j)] - f * a[(col, j)];
                    inv[(r, j)] = inv[(r, j)] - f * inv[(col, j)];
                }
            }
        }
        Ok(inv)
    }

    /// Solve A x = b for square A (Gauss with partial pivoting).
    pub fn solve(&self, b: &[C<T>]) -> Result<Vec<C<T>>> {
        let inv = self.inverse()?;
        Ok(inv.matvec(b))
    }

    /// Operator (spectral) norm via power iteration on AᴴA.
    pub fn op_norm(&self) -> T {
        let ata = self.conj_transpose().mul(self);
        let n = ata.rows;
        if n == 0 {
            return T::zero();
        }
        // Deterministic start with incommensurate components so we do not
        // begin orthogonal to the top eigenvector.
        let mut v: Vec<C<T>> = (0..n)
            .map(|i| C::new(T::one() + fl::<T>(0.37) * fl(i as f64), fl::<T>(0.11) * fl(i as f64)))
            .collect();
        let mut lambda = T::zero();
        for _ in 0..200 {
            let w = ata.matvec(&v);
            let norm = w.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
            if norm == T::zero() {
                return T::zero();
            }
            let next = norm;
            v = w.into_iter().map(|c| c / norm).collect();
            if (next - lambda).abs() <= fl::<T>(1e-15) * (T::one() + next) {
                lambda = next;
                break;
            }
            lambda = next;
        }
        lambda.sqrt()
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt()
    }

    /// Least-squares solution of A x = b via normal equations.
    /// Adequate for the small well-scaled fits used in this crate.
    pub fn lstsq(&self, b: &[C<T>]) -> Result<Vec<C<T>>> {
        assert_eq!(self.rows, b.len());
        let at = self.conj_transpose();
        let ata = at.mul(self);
        let atb = at.matvec(b);
        ata.solve(&atb).map_err(|_| Error::IllConditioned {
            detail: format!("normal equations singular ({}x{})", self.rows, self.cols),
        })
    }

    /// Least-squares pseudo-inverse (AᴴA)⁻¹Aᴴ.
    pub fn pseudo_inverse(&self) -> Result<Self> {
        let at = self.conj_transpose();
        let ata = at.mul(self);
        let inv = ata.inverse().map_err(|_| Error::IllConditioned {
            detail: format!("normal equations singular ({}x{})", self.rows, self.cols),
        })?;
        Ok(inv.mul(&at))
    }
}

impl<T: Real> std::ops::Index<(usize, usize)> for CMat<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for CMat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// Real 2n x 2n block representation of the complex-linear map v ↦ A v,
/// acting on (x, y) with z = x + i y.
pub fn real_of_linear<T: Real>(a: &CMat<T>) -> CMat<T> {
    let n = a.rows;
    let mut m = CMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let re = cre_only(a[(i, j)].re);
            let im = cre_only(a[(i, j)].im);
            m[(i, j)] = re;
            m[(i, n + j)] = -im;
            m[(n + i, j)] = im;
            m[(n + i, n + j)] = re;
        }
    }
    m
}

/// Real 2n x 2n block representation of the anti-linear map v ↦ A v̄.
pub fn real_of_antilinear<T: Real>(a: &CMat<T>) -> CMat<T> {
    let n = a.rows;
    let mut m = CMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let re = cre_only(a[(i, j)].re);
            let im = cre_only(a[(i, j)].im);
            m[(i, j)] = re;
            m[(i, n + j)] = im;
            m[(n + i, j)] = im;
            m[(n + i, n + j)] = -re;
        }
    }
    m
}

/// Standard complex structure J_st on R^2n: (x, y) ↦ (−y, x).
pub fn j_standard<T: Real>(n: usize) -> CMat<T> {
    let mut m = CMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, n + i)] = -cone::<T>();
        m[(n + i, i)] = cone();
    }
    m
}

#[inline]
fn cre_only<T: Real>(x: T) -> C<T> {
    C::new(x, T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = CMat<f64>;

    #[test]
    fn inverse_roundtrip() {
        let a = M::from_rows(vec![
            vec![C::new(2.0, 1.0), C::new(0.5, -0.25)],
            vec![C::new(-1.0, 0.0), C::new(1.5, 0.75)],
        ]);
        let inv = a.inverse().unwrap();
        let id = a.mul(&inv).sub(&M::identity(2));
        assert!(id.max_abs() < 1e-13);
    }

    #[test]
    fn singular_rejected() {
        let a = M::from_rows(vec![
            vec![C::new(1.0, 0.0), C::new(2.0, 0.0)],
            vec![C::new(2.0, 0.0), C::new(4.0, 0.0)],
        ]);
        assert!(a.inverse().is_err());
    }

    #[test]
    fn op_norm_diagonal() {
        let mut a = M::zeros(3, 3);
        a[(0, 0)] = C::new(0.5, 0.0);
        a[(1, 1)] = C::new(0.0, -2.0);
        a[(2, 2)] = C::new(1.0, 1.0);
        assert!((a.op_norm() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn j_standard_squares_to_minus_identity() {
        let j = j_standard::<f64>(3);
        let jj = j.mul(&j).add(&M::identity(6));
        assert!(jj.max_abs() == 0.0);
    }

    #[test]
    fn real_embeddings_act_correctly() {
        // A v with A = [[i]] on v = 1: result i, i.e. (x,y) = (0,1).
        let a = M::from_rows(vec![vec![C::new(0.0, 1.0)]]);
        let m = real_of_linear(&a);
        let out = m.matvec(&[C::new(1.0, 0.0), C::new(0.0, 0.0)]);
        assert!((out[0].re - 0.0).abs() < 1e-15 && (out[1].re - 1.0).abs() < 1e-15);
        // A v̄ with A = [[i]] on v = i: v̄ = −i, result −i·i = 1.
        let m = real_of_antilinear(&a);
        let out = m.matvec(&[C::new(0.0, 0.0), C::new(1.0, 0.0)]);
        assert!((out[0].re - 1.0).abs() < 1e-15 && out[1].re.abs() < 1e-15);
    }
}
