//! Deterministic seeded samplers for points and directions.
//!
//! Every draw is addressed by (seed, stream, index): a fresh ChaCha8
//! generator is keyed per draw, so sample sets are reproducible
//! byte-for-byte regardless of evaluation order or parallel chunking.

use crate::error::{Error, Result};
use crate::forms::SmoothField;
use crate::num::{Real, C};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream labels keep the independent sample families decorrelated.
#[derive(Clone, Copy, Debug)]
pub enum Stream {
    CollarPoints,
    BoundaryPoints,
    Directions,
    BallPoints,
    Recheck,
    Structure,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::CollarPoints => 0x01,
            Stream::BoundaryPoints => 0x02,
            Stream::Directions => 0x03,
            Stream::BallPoints => 0x04,
            Stream::Recheck => 0x05,
            Stream::Structure => 0x06,
        }
    }
}

fn keyed_rng(seed: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    // splitmix-style mixing of (seed, stream, index) into one key
    let mut x = seed
        .wrapping_mul(0x9e3779b97f4a7c15)
        .wrapping_add(stream.tag().wrapping_mul(0xbf58476d1ce4e5b9))
        .wrapping_add(index.wrapping_mul(0x94d049bb133111eb));
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58476d1ce4e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d049bb133111eb);
    x ^= x >> 31;
    ChaCha8Rng::seed_from_u64(x)
}

fn gaussian<T: Real>(rng: &mut ChaCha8Rng) -> T {
    // Box-Muller from two uniform draws
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    crate::num::fl((-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos())
}

/// Unit (1,0)-direction, uniform on the sphere of C^n.
pub fn unit_direction<T: Real>(dim: usize, seed: u64, stream: Stream, index: u64) -> Vec<C<T>> {
    let mut rng = keyed_rng(seed, stream, index);
    loop {
        let v: Vec<C<T>> = (0..dim)
            .map(|_| C::new(gaussian(&mut rng), gaussian(&mut rng)))
            .collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
        if norm > crate::num::fl(1e-6) {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Point uniform in the real ball of the given radius in C^n ≅ R^2n.
pub fn ball_point<T: Real>(dim: usize, radius: T, seed: u64, stream: Stream, index: u64) -> Vec<C<T>> {
    let mut rng = keyed_rng(seed, stream, index);
    loop {
        let v: Vec<C<T>> = (0..dim)
            .map(|_| C::new(gaussian(&mut rng), gaussian(&mut rng)))
            .collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
        if norm <= crate::num::fl(1e-6) {
            continue;
        }
        let u: f64 = rng.gen::<f64>();
        let r = radius * crate::num::fl::<T>(u.powf(1.0 / (2.0 * dim as f64)));
        return v.into_iter().map(|c| c * (r / norm)).collect();
    }
}

/// Point in the collar {−depth < r < 0} inside the ball of `chart_radius`,
/// by rejection from the chart ball.
pub fn collar_point<T: Real>(
    r: &dyn SmoothField<T>,
    chart_radius: T,
    depth: T,
    seed: u64,
    index: u64,
) -> Result<Vec<C<T>>> {
    let dim = r.dim();
    for attempt in 0..4000u64 {
        let p = ball_point(dim, chart_radius, seed, Stream::CollarPoints, index * 4096 + attempt);
        let val = r.value(&p);
        if val < T::zero() && val > -depth {
            return Ok(p);
        }
    }
    Err(Error::OutsideCollar {
        r: f64::NAN,
        depth: depth.to_f64().unwrap_or(f64::NAN),
    })
}

/// Point on {r = 0}: a chart-ball draw projected onto the zero level by
/// gradient-descent Newton steps.
pub fn boundary_point<T: Real>(
    r: &dyn SmoothField<T>,
    chart_radius: T,
    seed: u64,
    index: u64,
) -> Result<Vec<C<T>>> {
    let dim = r.dim();
    'outer: for attempt in 0..64u64 {
        let mut p = ball_point(
            dim,
            chart_radius,
            seed,
            Stream::BoundaryPoints,
            index * 64 + attempt,
        );
        for _ in 0..80 {
            let val = r.value(&p);
            if val.abs() < crate::num::fl(1e-12) {
                return Ok(p);
            }
            let g = r.gradient(&p);
            let g2: T = g.iter().map(|&a| a * a).sum();
            if g2 < crate::num::fl(1e-16) {
                continue 'outer;
            }
            let s = val / g2;
            for k in 0..dim {
                p[k] = p[k] - C::new(g[k] * s, g[dim + k] * s);
            }
        }
    }
    Err(Error::RootFindFailed {
        detail: "boundary projection did not converge".into(),
    })
}

/// Component of `v` ∂_J-tangent to the level set of r at p:
/// subtract the projection onto the complex gradient `g` (the vector with
/// ∂r(p)(t) = Σ g_k t_k), then renormalize. Returns None if v is
/// essentially normal.
pub fn tangent_part<T: Real>(v: &[C<T>], g: &[C<T>]) -> Option<Vec<C<T>>> {
    let g2: T = g.iter().map(|c| c.norm_sqr()).sum();
    if g2 <= T::zero() {
        return None;
    }
    // pairing Σ g_k t_k = 0 defines the holomorphic tangent space
    let lambda = v
        .iter()
        .zip(g)
        .fold(crate::num::czero::<T>(), |acc, (a, b)| acc + *b * *a)
        / C::new(g2, T::zero());
    let t: Vec<C<T>> = v
        .iter()
        .zip(g)
        .map(|(a, b)| *a - b.conj() * lambda)
        .collect();
    let norm = t.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
    if norm < crate::num::fl(1e-8) {
        return None;
    }
    Some(t.into_iter().map(|c| c / norm).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::PolyField;

    #[test]
    fn draws_are_reproducible_and_streams_differ() {
        let a = unit_direction::<f64>(2, 7, Stream::Directions, 3);
        let b = unit_direction::<f64>(2, 7, Stream::Directions, 3);
        assert_eq!(a, b);
        let c = unit_direction::<f64>(2, 7, Stream::Directions, 4);
        assert_ne!(a, c);
        let d = unit_direction::<f64>(2, 8, Stream::Directions, 3);
        assert_ne!(a, d);
    }

    #[test]
    fn unit_directions_have_unit_norm() {
        for i in 0..50 {
            let v = unit_direction::<f64>(3, 1, Stream::Directions, i);
            let n: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn collar_and_boundary_points_satisfy_constraints() {
        let r = PolyField::<f64>::ball(2, 1.0);
        for i in 0..30 {
            let p = collar_point(&r, 1.2, 0.2, 11, i).unwrap();
            let v = r.eval_real(&p);
            assert!(v < 0.0 && v > -0.2, "r = {v}");
            let q = boundary_point(&r, 1.2, 11, i).unwrap();
            assert!(r.eval_real(&q).abs() < 1e-10);
        }
    }

    #[test]
    fn tangent_part_is_orthogonal_to_pairing() {
        // r = |z|² at p: complex gradient g_k = z̄_k, tangent space Σ z̄_k t_k = 0
        let p = [C::new(0.6, 0.0), C::new(0.0, 0.8)];
        let g: Vec<C<f64>> = p.iter().map(|c| c.conj()).collect();
        let v = unit_direction::<f64>(2, 5, Stream::Directions, 0);
        let t = tangent_part(&v, &g).unwrap();
        let pair = g.iter().zip(&t).fold(C::new(0.0, 0.0), |a, (b, c)| a + b * c);
        assert!(pair.norm() < 1e-12, "pairing {pair}");
        let n: f64 = t.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        assert!((n - 1.0).abs() < 1e-12);
    }
}
