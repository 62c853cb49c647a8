//! Spectral Cauchy–Green transform on the polar grid.
//!
//! The transform acts diagonally on angular Fourier modes: for
//! f = g(r) e^{ilθ} and ζ = ρ e^{iφ},
//!
//!   l ≥ 1:  T f(ζ) = −2 ζ^{l−1} ∫_ρ^1 g(r) r^{1−l} dr,
//!   l ≤ 0:  T f(ζ) =  2 ζ^{l−1} ∫_0^ρ g(r) r^{1−l} dr,
//!
//! with ζ^{l−1} read as ρ^{l−1} e^{i(l−1)φ}. Each mode is fitted radially
//! as r^m · (Chebyshev series) with m absorbing the known vanishing order
//! at r = 0 (weighted least squares: nodes where r^m underflows simply
//! stop contributing). The mode integrals are then smooth polynomial
//! quadratures, so the discrete transform is the exact continuum
//! transform of the fitted truncation — its ∂̄ reproduces the fit itself.

use crate::error::Result;
use crate::grid::DiscGrid;
use crate::la::CMat;
use crate::num::{cre, czero, fl, Real, C};

/// Nodes/weights of a 24-point Gauss–Legendre rule on [0, 1].
fn gl24<T: Real>() -> Vec<(T, T)> {
    // computed once in f64; exact for polynomial degree ≤ 47
    let (n, w) = crate::grid::gauss_legendre_01(24);
    n.iter().zip(&w).map(|(&a, &b)| (fl(a), fl(b))).collect()
}

/// Evaluate a shifted-Chebyshev series Σ c_k T_k(2r − 1) by Clenshaw.
fn clenshaw<T: Real>(coeffs: &[C<T>], r: T) -> C<T> {
    let x = fl::<T>(2.0) * r - T::one();
    let two_x = cre(fl::<T>(2.0) * x);
    let mut b1: C<T> = czero();
    let mut b2: C<T> = czero();
    for &c in coeffs.iter().rev() {
        let b0 = c + two_x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    b1 - b2 * cre(x)
}

struct ModePlan<T: Real> {
    /// signed angular index
    l: isize,
    /// vanishing order absorbed into the radial weight r^m
    m: u32,
    /// maps mode samples (nr values) to Chebyshev coefficients
    pinv: CMat<T>,
}

/// Precomputed transform machinery for one grid. Reused across many
/// transforms; construction cost is one least-squares factorization per
/// angular mode.
pub struct CauchyGreenOp<T: Real> {
    pub nr: usize,
    pub ntheta: usize,
    /// e^{−i l θ_m} DFT phases, row l, column m
    phases: Vec<C<T>>,
    plans: Vec<ModePlan<T>>,
    quad: Vec<(T, T)>,
    radii: Vec<T>,
}

impl<T: Real> CauchyGreenOp<T> {
    pub fn new(grid: &DiscGrid<T>) -> Result<Self> {
        let (nr, nt) = (grid.nr, grid.ntheta);
        let degree = 10.min(nr.saturating_sub(2));
        let mut phases = vec![czero(); nt * nt];
        for l in 0..nt {
            for m in 0..nt {
                let ang = fl::<T>(-2.0 * std::f64::consts::PI) * fl((l * m % nt) as f64)
                    / fl(nt as f64);
                phases[l * nt + m] = C::new(ang.cos(), ang.sin());
            }
        }
        let mut plans = Vec::with_capacity(nt);
        for li in 0..nt {
            let l = if li <= nt / 2 {
                li as isize
            } else {
                li as isize - nt as isize
            };
            // hat_l(r) vanishes like r^{|l|}; absorb r^{m} into the design
            let m = if l >= 1 { (l - 1) as u32 } else { (-l) as u32 };
            let mut design = CMat::<T>::zeros(nr, degree + 1);
            for (i, &r) in grid.radii.iter().enumerate() {
                let rm = r.powi(m as i32);
                let x = fl::<T>(2.0) * r - T::one();
                let (mut t0, mut t1) = (T::one(), x);
                for k in 0..=degree {
                    let tk = if k == 0 {
                        T::one()
                    } else if k == 1 {
                        x
                    } else {
                        let t2 = fl::<T>(2.0) * x * t1 - t0;
                        t0 = t1;
                        t1 = t2;
                        t2
                    };
                    design[(i, k)] = cre(rm * tk);
                }
            }
            let pinv = design.pseudo_inverse()?;
            plans.push(ModePlan { l, m, pinv });
        }
        Ok(CauchyGreenOp {
            nr,
            ntheta: nt,
            phases,
            plans,
            quad: gl24(),
            radii: grid.radii.clone(),
        })
    }

    /// Fit the node samples and return the transformed image.
    pub fn transform(&self, samples: &[C<T>]) -> CgImage<T> {
        let (nr, nt) = (self.nr, self.ntheta);
        assert_eq!(samples.len(), nr * nt);
        let scale = samples.iter().map(|c| c.norm()).fold(T::zero(), crate::num::smax);
        let cutoff = fl::<T>(1e-14) * scale;
        let inv_nt = cre(T::one() / fl::<T>(nt as f64));
        let mut modes = Vec::new();
        let mut hat = vec![czero(); nr];
        for (li, plan) in self.plans.iter().enumerate() {
            let mut maxmag = T::zero();
            for i in 0..nr {
                let mut acc: C<T> = czero();
                for m in 0..nt {
                    acc = acc + samples[i * nt + m] * self.phases[li * nt + m];
                }
                hat[i] = acc * inv_nt;
                maxmag = crate::num::smax(maxmag, hat[i].norm());
            }
            if maxmag <= cutoff {
                continue;
            }
            let coeffs = plan.pinv.matvec(&hat);
            modes.push(CgMode {
                l: plan.l,
                m: plan.m,
                coeffs,
            });
        }
        CgImage {
            modes,
            quad: self.quad.clone(),
        }
    }

    /// Fit residual of the truncation actually transformed, evaluated at
    /// the grid nodes (diagnostic for how well the image represents f).
    pub fn fit_residual(&self, samples: &[C<T>], image: &CgImage<T>) -> T {
        let mut worst = T::zero();
        for (i, &r) in self.radii.iter().enumerate() {
            for mth in 0..self.ntheta {
                let theta = fl::<T>(2.0 * std::f64::consts::PI) * fl(mth as f64)
                    / fl(self.ntheta as f64);
                let mut acc: C<T> = czero();
                for mode in &image.modes {
                    let ang = fl::<T>(mode.l as f64) * theta;
                    let e = C::new(ang.cos(), ang.sin());
                    let radial = clenshaw(&mode.coeffs, r) * cre(r.powi(mode.m as i32));
                    acc = acc + radial * e;
                }
                worst = crate::num::smax(worst, (acc - samples[i * self.ntheta + mth]).norm());
            }
        }
        worst
    }
}

#[derive(Clone, Debug)]
struct CgMode<T: Real> {
    l: isize,
    m: u32,
    coeffs: Vec<C<T>>,
}

/// The transform of one fitted grid function; evaluates anywhere on 𝔻̄.
#[derive(Clone, Debug)]
pub struct CgImage<T: Real> {
    modes: Vec<CgMode<T>>,
    quad: Vec<(T, T)>,
}

impl<T: Real> CgImage<T> {
    /// T f at ζ.
    pub fn eval(&self, zeta: C<T>) -> C<T> {
        let rho = zeta.norm();
        let phi = if rho > T::zero() {
            zeta.im.atan2(zeta.re)
        } else {
            T::zero()
        };
        let mut acc: C<T> = czero();
        for mode in &self.modes {
            let v = self.radial_value(mode, rho);
            if v.re == T::zero() && v.im == T::zero() {
                continue;
            }
            let ang = fl::<T>((mode.l - 1) as f64) * phi;
            acc = acc + v * C::new(ang.cos(), ang.sin());
        }
        acc
    }

    /// Radial factor of the transformed mode at radius ρ (the full mode
    /// contribution is this times e^{i(l−1)φ}).
    fn radial_value(&self, mode: &CgMode<T>, rho: T) -> C<T> {
        let two = fl::<T>(2.0);
        if mode.l >= 1 {
            // −2 ρ^{l−1} ∫_ρ^1 p(r) dr, integrand p = fitted hat / r^{l−1}
            if rho >= T::one() {
                return czero();
            }
            let pow = if mode.l == 1 {
                T::one()
            } else if rho == T::zero() {
                return czero();
            } else {
                rho.powi((mode.l - 1) as i32)
            };
            if pow == T::zero() {
                return czero();
            }
            let len = T::one() - rho;
            let mut s: C<T> = czero();
            for &(x, w) in &self.quad {
                let r = rho + len * x;
                s = s + clenshaw(&mode.coeffs, r) * cre(w);
            }
            -s * cre(len * pow * two)
        } else {
            // 2 ρ^{1+a} Σ w p(ρx) x^{1+2a}, a = −l; all powers positive
            let a = (-mode.l) as i32;
            if rho == T::zero() {
                return czero();
            }
            let lead = rho.powi(1 + a);
            if lead == T::zero() {
                return czero();
            }
            let mut s: C<T> = czero();
            for &(x, w) in &self.quad {
                let xp = x.powi(1 + 2 * a);
                if xp == T::zero() {
                    continue;
                }
                s = s + clenshaw(&mode.coeffs, rho * x) * cre(w * xp);
            }
            s * cre(lead * two)
        }
    }

    /// T f at every node of a grid (radial factors shared per ring).
    pub fn eval_on_grid(&self, grid: &DiscGrid<T>) -> Vec<C<T>> {
        let (nr, nt) = (grid.nr, grid.ntheta);
        let mut out = vec![czero(); nr * nt];
        for mode in &self.modes {
            for (i, &r) in grid.radii.iter().enumerate() {
                let v = self.radial_value(mode, r);
                if v.re == T::zero() && v.im == T::zero() {
                    continue;
                }
                for mth in 0..nt {
                    let ang = fl::<T>((mode.l - 1) as f64) * grid.thetas[mth];
                    out[i * nt + mth] = out[i * nt + mth] + v * C::new(ang.cos(), ang.sin());
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (DiscGrid<f64>, CauchyGreenOp<f64>) {
        let g = DiscGrid::new(32, 64);
        let op = CauchyGreenOp::new(&g).unwrap();
        (g, op)
    }

    fn probe_points() -> Vec<C<f64>> {
        (0..100)
            .map(|k| C::from_polar(0.02 + 0.96 * (k as f64 / 99.0), k as f64 * 0.37))
            .collect()
    }

    #[test]
    fn transform_of_one_is_zbar() {
        let (g, op) = setup();
        let img = op.transform(&vec![C::new(1.0, 0.0); g.len()]);
        for z in probe_points() {
            assert!((img.eval(z) - z.conj()).norm() < 1e-12, "at {z}");
        }
    }

    #[test]
    fn transform_of_taubar() {
        // T τ̄ = ζ̄²/2 exactly
        let (g, op) = setup();
        let samples: Vec<C<f64>> = g.nodes.iter().map(|t| t.conj()).collect();
        let img = op.transform(&samples);
        for z in probe_points() {
            let exact = z.conj() * z.conj() * 0.5;
            assert!((img.eval(z) - exact).norm() < 1e-12, "at {z}");
        }
    }

    #[test]
    fn transform_of_tau_taubar() {
        // T |τ|² = ζ ζ̄²/2: check ∂̄ = |ζ|² directly
        let (g, op) = setup();
        let samples: Vec<C<f64>> = g.nodes.iter().map(|t| t * t.conj()).collect();
        let img = op.transform(&samples);
        for z in probe_points() {
            let exact = z * z.conj() * z.conj() * 0.5;
            assert!((img.eval(z) - exact).norm() < 1e-11, "at {z}");
        }
    }

    #[test]
    fn matches_direct_kernel_sum() {
        // independent check against the subtraction-based quadrature
        let (g, op) = setup();
        let eval = |t: C<f64>| (t * C::new(0.3, 0.1)).exp() * t.conj();
        let samples: Vec<C<f64>> = g.nodes.iter().map(|&t| eval(t)).collect();
        let img = op.transform(&samples);
        let gf = crate::grid::GridFn::with_eval(&samples, &eval);
        let mut worst: f64 = 0.0;
        for z in probe_points() {
            let a = img.eval(z);
            let b = crate::grid::cauchy_green(&g, &gf, z);
            worst = worst.max((a - b).norm());
        }
        assert!(worst < 5e-3, "methods disagree by {worst}");
    }

    #[test]
    fn dbar_by_finite_differences_recovers_input() {
        let (g, op) = setup();
        let eval = |t: C<f64>| (t * 0.7).cos() + t.conj() * t.conj() * C::new(0.2, 0.4);
        let samples: Vec<C<f64>> = g.nodes.iter().map(|&t| eval(t)).collect();
        let img = op.transform(&samples);
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for k in 0..100 {
            let z = C::from_polar(0.05 + 0.85 * (k as f64 / 99.0), k as f64 * 0.37);
            let dx = (img.eval(z + C::new(h, 0.0)) - img.eval(z - C::new(h, 0.0))) / (2.0 * h);
            let dy = (img.eval(z + C::new(0.0, h)) - img.eval(z - C::new(0.0, h))) / (2.0 * h);
            let dbar = (dx + C::new(0.0, 1.0) * dy) * 0.5;
            worst = worst.max((dbar - eval(z)).norm());
        }
        assert!(worst < 1e-6, "∂̄ residual {worst}");
    }

    #[test]
    fn node_values_match_pointwise_eval() {
        let (g, op) = setup();
        let samples: Vec<C<f64>> = g.nodes.iter().map(|&t| (t + t.conj() * t).sin()).collect();
        let img = op.transform(&samples);
        let on_grid = img.eval_on_grid(&g);
        for (k, &tau) in g.nodes.iter().enumerate() {
            assert!((on_grid[k] - img.eval(tau)).norm() < 1e-13);
        }
    }
}
