//! Polar discretization of the unit disc, the Cauchy–Green transform,
//! and grid differentiation.
//!
//! Quadrature: Gauss–Legendre in the radius, uniform (trapezoidal) nodes
//! in the angle. The singular Cauchy kernel is handled by constant
//! subtraction against the exact identity −(1/π)∬ dA/(τ−ζ) = ζ̄, so the
//! remaining integrand is bounded.

use crate::error::{Error, Result};
use crate::la::CMat;
use crate::num::{cre, czero, fl, Real, C};

/// Gauss–Legendre nodes/weights on [0, 1], computed in f64 and converted.
pub(crate) fn gauss_legendre_01(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n {
        // initial guess on [-1, 1]
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // Legendre P_n and derivative by recurrence
            let (mut p0, mut p1) = (1.0f64, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0f64, x);
        for j in 2..=n {
            let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1,1] -> [0,1]; reverse so radii increase
        nodes[n - 1 - k] = 0.5 * (x + 1.0);
        weights[n - 1 - k] = 0.5 * w;
    }
    (nodes, weights)
}

/// Discretization of the unit disc.
#[derive(Clone, Debug)]
pub struct DiscGrid<T: Real> {
    pub nr: usize,
    pub ntheta: usize,
    pub radii: Vec<T>,
    pub thetas: Vec<T>,
    /// area weight per node (index i * ntheta + m)
    pub weights: Vec<T>,
    /// node positions τ = r e^{iθ}
    pub nodes: Vec<C<T>>,
}

impl<T: Real> DiscGrid<T> {
    pub fn new(nr: usize, ntheta: usize) -> Self {
        let (rn, rw) = gauss_legendre_01(nr);
        let radii: Vec<T> = rn.iter().map(|&x| fl(x)).collect();
        let dtheta = 2.0 * std::f64::consts::PI / ntheta as f64;
        let thetas: Vec<T> = (0..ntheta).map(|m| fl(dtheta * m as f64)).collect();
        let mut weights = Vec::with_capacity(nr * ntheta);
        let mut nodes = Vec::with_capacity(nr * ntheta);
        for i in 0..nr {
            let w_r: T = fl(rw[i] * dtheta);
            for m in 0..ntheta {
                weights.push(radii[i] * w_r);
                let (s, c) = (thetas[m].sin(), thetas[m].cos());
                nodes.push(C::new(radii[i] * c, radii[i] * s));
            }
        }
        DiscGrid {
            nr,
            ntheta,
            radii,
            thetas,
            weights,
            nodes,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    #[inline]
    pub fn idx(&self, ring: usize, m: usize) -> usize {
        ring * self.ntheta + m
    }

    /// Sum of the quadrature weights; equals π up to rounding.
    pub fn weight_sum(&self) -> T {
        self.weights.iter().copied().sum()
    }

    /// Quadrature of a node-sampled function over the disc.
    pub fn integrate(&self, f: &[C<T>]) -> C<T> {
        let mut acc = czero();
        for (w, v) in self.weights.iter().zip(f) {
            acc = acc + *v * cre(*w);
        }
        acc
    }

    /// Bilinear interpolation of a node-sampled function at ζ (clamped
    /// radially to the node range, periodic in the angle).
    pub fn interpolate(&self, f: &[C<T>], zeta: C<T>) -> C<T> {
        let r = zeta.norm();
        let two_pi = fl::<T>(2.0 * std::f64::consts::PI);
        let mut th = zeta.im.atan2(zeta.re);
        if th < T::zero() {
            th = th + two_pi;
        }
        let dth = two_pi / fl(self.ntheta as f64);
        let m0f = th / dth;
        let m0 = (m0f.floor().to_f64().unwrap_or(0.0) as isize).rem_euclid(self.ntheta as isize) as usize;
        let m1 = (m0 + 1) % self.ntheta;
        let tfrac = m0f - m0f.floor();
        // radial bracket
        let mut i1 = 0;
        while i1 < self.nr && self.radii[i1] < r {
            i1 += 1;
        }
        let (i0, i1, rfrac) = if i1 == 0 {
            (0, 0, T::zero())
        } else if i1 >= self.nr {
            (self.nr - 1, self.nr - 1, T::zero())
        } else {
            let r0 = self.radii[i1 - 1];
            let r1 = self.radii[i1];
            (i1 - 1, i1, (r - r0) / (r1 - r0))
        };
        let one = T::one();
        let get = |i: usize, m: usize| f[self.idx(i, m)];
        let a = get(i0, m0) * cre(one - tfrac) + get(i0, m1) * cre(tfrac);
        let b = get(i1, m0) * cre(one - tfrac) + get(i1, m1) * cre(tfrac);
        a * cre(one - rfrac) + b * cre(rfrac)
    }

    /// Quadrature defect of the singular kernel: (1/π) Σ w_k/(τ_k − ζ) + ζ̄.
    /// Exactly zero for the continuum integral; measures grid quality.
    pub fn kernel_defect(&self, zeta: C<T>) -> C<T> {
        let mut s: C<T> = czero();
        for (k, tau) in self.nodes.iter().enumerate() {
            let d = *tau - zeta;
            if d.norm_sqr() < fl(1e-28) {
                continue;
            }
            s = s + cre(self.weights[k]) / d;
        }
        s / cre(fl::<T>(std::f64::consts::PI)) + zeta.conj()
    }
}

/// Grid-sampled complex function with an optional analytic evaluator for
/// off-node points (used for the singularity subtraction constant and for
/// the exact discrete ∂̄).
pub struct GridFn<'a, T: Real> {
    pub samples: &'a [C<T>],
    pub eval: Option<&'a dyn Fn(C<T>) -> C<T>>,
}

impl<'a, T: Real> GridFn<'a, T> {
    pub fn sampled(samples: &'a [C<T>]) -> Self {
        GridFn { samples, eval: None }
    }

    pub fn with_eval(samples: &'a [C<T>], eval: &'a dyn Fn(C<T>) -> C<T>) -> Self {
        GridFn {
            samples,
            eval: Some(eval),
        }
    }

    fn at(&self, grid: &DiscGrid<T>, zeta: C<T>) -> C<T> {
        match self.eval {
            Some(f) => f(zeta),
            None => grid.interpolate(self.samples, zeta),
        }
    }
}

/// The Cauchy–Green transform at ζ: the solution operator of ∂w/∂ζ̄ = f
/// on the unit disc, T f(ζ) = −(1/π) ∬ f(τ)/(τ − ζ) dA(τ).
///
/// Constant subtraction: T f = −(1/π) ∬ (f(τ) − c)/(τ − ζ) dA + c ζ̄ for
/// any constant c; choosing c ≈ f(ζ) removes the singularity.
pub fn cauchy_green<T: Real>(grid: &DiscGrid<T>, f: &GridFn<T>, zeta: C<T>) -> C<T> {
    assert_eq!(f.samples.len(), grid.len());
    let c = f.at(grid, zeta);
    let mut acc: C<T> = czero();
    for (k, tau) in grid.nodes.iter().enumerate() {
        let d = *tau - zeta;
        if d.norm_sqr() < fl(1e-28) {
            continue;
        }
        acc = acc + (f.samples[k] - c) / d * cre(grid.weights[k]);
    }
    -acc / cre(fl::<T>(std::f64::consts::PI)) + c * zeta.conj()
}

/// Exact ∂̄ of the discrete Cauchy–Green sum, given the analytic ∂̄ of the
/// subtraction function: ∂̄ T_disc f = c(ζ) + ∂̄c(ζ)·E(ζ) with E the
/// kernel defect. The ζ-holomorphic kernel contributes nothing else.
pub fn cauchy_green_dbar<T: Real>(
    grid: &DiscGrid<T>,
    f: &GridFn<T>,
    dbar_f: &dyn Fn(C<T>) -> C<T>,
    zeta: C<T>,
) -> C<T> {
    let c = f.at(grid, zeta);
    c + dbar_f(zeta) * grid.kernel_defect(zeta)
}

/// Differentiation operators on the polar grid: exact trigonometric
/// differentiation in θ, a least-squares Chebyshev fit of configurable
/// degree in r.
pub struct PolarDiff<T: Real> {
    d_theta: CMat<T>,
    d_r: CMat<T>,
}

impl<T: Real> PolarDiff<T> {
    pub fn new(grid: &DiscGrid<T>, cheb_degree: usize) -> Result<Self> {
        let n = grid.ntheta;
        if n % 2 != 0 {
            return Err(Error::Invalid("angular node count must be even".into()));
        }
        // spectral differentiation matrix for period 2π, even N
        let mut dt = CMat::zeros(n, n);
        let h = std::f64::consts::PI / n as f64;
        for j in 0..n {
            for k in 0..n {
                if j == k {
                    continue;
                }
                let d = j as isize - k as isize;
                let sign = if d.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                let v = 0.5 * sign / ((d as f64) * h).tan();
                dt[(j, k)] = cre(fl(v));
            }
        }
        // radial: Chebyshev Vandermonde on r mapped to [-1, 1]
        let nr = grid.nr;
        let m = cheb_degree + 1;
        if m > nr {
            return Err(Error::IllConditioned {
                detail: format!("Chebyshev degree {cheb_degree} needs more than {nr} radial nodes"),
            });
        }
        let mut v = CMat::<T>::zeros(nr, m);
        let mut vd = CMat::<T>::zeros(nr, m);
        for (i, &r) in grid.radii.iter().enumerate() {
            let x = fl::<T>(2.0) * r - T::one();
            // T_j(x) and T_j'(x) by recurrence
            let (mut t0, mut t1) = (T::one(), x);
            let (mut u0, mut u1) = (T::zero(), T::one());
            for j in 0..m {
                let (t, td) = if j == 0 {
                    (T::one(), T::zero())
                } else if j == 1 {
                    (x, T::one())
                } else {
                    let t2 = fl::<T>(2.0) * x * t1 - t0;
                    let u2 = fl::<T>(2.0) * x * u1 - u0;
                    t0 = t1;
                    t1 = t2;
                    u0 = u1;
                    u1 = u2;
                    // T_j' = j * U_{j-1}
                    (t2, fl::<T>(j as f64) * u1)
                };
                v[(i, j)] = cre(t);
                vd[(i, j)] = cre(td * fl(2.0)); // chain rule for r -> 2r − 1
            }
        }
        // D_r = Vd (VᵀV)⁻¹Vᵀ
        let vt = v.conj_transpose();
        let vtv = vt.mul(&v);
        let inv = vtv.inverse().map_err(|_| Error::IllConditioned {
            detail: "radial Chebyshev normal equations singular".into(),
        })?;
        let pinv = inv.mul(&vt);
        let d_r = vd.mul(&pinv);
        Ok(PolarDiff { d_theta: dt, d_r })
    }

    /// ∂f/∂θ at all nodes.
    pub fn dtheta(&self, grid: &DiscGrid<T>, f: &[C<T>]) -> Vec<C<T>> {
        let (nr, nt) = (grid.nr, grid.ntheta);
        let mut out = vec![czero(); nr * nt];
        for i in 0..nr {
            for j in 0..nt {
                let mut acc = czero();
                for k in 0..nt {
                    let c = self.d_theta[(j, k)];
                    if c.re == T::zero() && c.im == T::zero() {
                        continue;
                    }
                    acc = acc + c * f[grid.idx(i, k)];
                }
                out[grid.idx(i, j)] = acc;
            }
        }
        out
    }

    /// ∂f/∂r at all nodes.
    pub fn dr(&self, grid: &DiscGrid<T>, f: &[C<T>]) -> Vec<C<T>> {
        let (nr, nt) = (grid.nr, grid.ntheta);
        let mut out = vec![czero(); nr * nt];
        for m in 0..nt {
            for i in 0..nr {
                let mut acc = czero();
                for k in 0..nr {
                    acc = acc + self.d_r[(i, k)] * f[grid.idx(k, m)];
                }
                out[grid.idx(i, m)] = acc;
            }
        }
        out
    }

    /// ∂f/∂ζ and ∂f/∂ζ̄ at all nodes:
    /// ∂ζ = ½ e^{−iθ}(∂r − (i/r) ∂θ), ∂ζ̄ = ½ e^{iθ}(∂r + (i/r) ∂θ).
    pub fn complex_derivs(&self, grid: &DiscGrid<T>, f: &[C<T>]) -> (Vec<C<T>>, Vec<C<T>>) {
        let fr = self.dr(grid, f);
        let ft = self.dtheta(grid, f);
        let half = cre(fl::<T>(0.5));
        let i_unit = C::new(T::zero(), T::one());
        let mut dz = vec![czero(); f.len()];
        let mut dzb = vec![czero(); f.len()];
        for ring in 0..grid.nr {
            let r = grid.radii[ring];
            for m in 0..grid.ntheta {
                let th = grid.thetas[m];
                let e = C::new(th.cos(), th.sin());
                let k = grid.idx(ring, m);
                let radial = fr[k];
                let angular = i_unit * ft[k] / cre(r);
                dz[k] = half * e.conj() * (radial - angular);
                dzb[k] = half * e * (radial + angular);
            }
        }
        (dz, dzb)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_area() {
        let g = DiscGrid::<f64>::new(32, 64);
        assert!((g.weight_sum() - std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn cauchy_green_of_one_is_zbar() {
        let g = DiscGrid::<f64>::new(32, 64);
        let ones = vec![C::new(1.0, 0.0); g.len()];
        let eval = |_z: C<f64>| C::new(1.0, 0.0);
        let f = GridFn::with_eval(&ones, &eval);
        for &(x, y) in &[(0.0, 0.0), (0.3, -0.2), (0.7, 0.5), (-0.9, 0.1)] {
            let z = C::new(x, y);
            let t = cauchy_green(&g, &f, z);
            assert!((t - z.conj()).norm() < 1e-12, "T1({z}) = {t}");
        }
    }

    #[test]
    fn reference_quadrature_accuracy() {
        // T τ̄ = ζ̄²/2; the subtraction rule is a low-order reference,
        // good to a few 1e-3 on a 64×64 grid
        let g = DiscGrid::<f64>::new(64, 64);
        let samples: Vec<C<f64>> = g.nodes.iter().map(|t| t.conj()).collect();
        let eval = |z: C<f64>| z.conj();
        let f = GridFn::with_eval(&samples, &eval);
        let mut worst: f64 = 0.0;
        for k in 0..40 {
            let z = C::from_polar(0.05 + 0.85 * (k as f64 / 40.0), k as f64 * 0.37);
            worst = worst.max((cauchy_green(&g, &f, z) - z.conj() * z.conj() * 0.5).norm());
        }
        assert!(worst < 5e-3, "quadrature error {worst}");
    }

    #[test]
    fn polar_derivatives_of_affine() {
        let g = DiscGrid::<f64>::new(24, 48);
        let pd = PolarDiff::new(&g, 8).unwrap();
        // f(ζ) = 2 + 3ζ: ∂ζ = 3, ∂ζ̄ = 0
        let f: Vec<C<f64>> = g.nodes.iter().map(|z| C::new(2.0, 0.0) + z * 3.0).collect();
        let (dz, dzb) = pd.complex_derivs(&g, &f);
        // the innermost ring amplifies angular error by 1/r
        for k in 0..g.len() {
            assert!((dz[k] - C::new(3.0, 0.0)).norm() < 1e-9);
            assert!(dzb[k].norm() < 1e-9);
        }
    }

    #[test]
    fn polar_derivatives_of_antiholomorphic() {
        let g = DiscGrid::<f64>::new(24, 48);
        let pd = PolarDiff::new(&g, 8).unwrap();
        // f = ζ̄²: ∂ζ̄ = 2ζ̄, ∂ζ = 0
        let f: Vec<C<f64>> = g.nodes.iter().map(|z| z.conj() * z.conj()).collect();
        let (dz, dzb) = pd.complex_derivs(&g, &f);
        let mut worst: f64 = 0.0;
        for k in 0..g.len() {
            worst = worst.max((dzb[k] - g.nodes[k].conj() * 2.0).norm());
            worst = worst.max(dz[k].norm());
        }
        assert!(worst < 1e-10, "derivative error {worst}");
    }

    #[test]
    fn interpolation_is_exact_on_nodes() {
        let g = DiscGrid::<f64>::new(8, 16);
        let f: Vec<C<f64>> = g.nodes.iter().map(|z| z * z + z.conj()).collect();
        for (k, &tau) in g.nodes.iter().enumerate() {
            assert!((g.interpolate(&f, tau) - f[k]).norm() < 1e-12);
        }
    }
}
