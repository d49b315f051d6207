//! Deterministic low-discrepancy points in cubes, balls, annuli and on spheres.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::Point;

const PRIMES: [u32; 4] = [2, 3, 5, 7];

/// Radical inverse of `i` in base `b`; lies in (0, 1) for `i ≥ 1`.
pub fn radical_inverse(mut i: u64, b: u32) -> f64 {
    let b = b as u64;
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut out = 0.0;
    while i > 0 {
        out += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    out
}

/// Halton sequence in up to four dimensions, indexed from 1, with an optional
/// seeded Cranley–Patterson shift (seed 0 means no shift).
#[derive(Clone, Debug)]
pub struct Halton {
    dims: usize,
    shift: [f64; 4],
}

impl Halton {
    pub fn new(dims: usize, seed: u64) -> Self {
        assert!(dims <= 4, "at most four Halton dimensions");
        let mut shift = [0.0; 4];
        if seed != 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for s in shift.iter_mut() {
                *s = rng.random::<f64>();
            }
        }
        Halton { dims, shift }
    }

    /// The `k`-th point (k = 0, 1, ...), every coordinate in (0, 1).
    pub fn point(&self, k: usize) -> [f64; 4] {
        let mut u = [0.5; 4];
        for (d, slot) in u.iter_mut().enumerate().take(self.dims) {
            let v = (radical_inverse(k as u64 + 1, PRIMES[d]) + self.shift[d]).fract();
            *slot = if v > 0.0 { v } else { f64::EPSILON };
        }
        u
    }
}

/// Unit vector from two (n = 2: one) uniform coordinates, area-preserving.
pub fn sphere_direction(dim: usize, u: &[f64]) -> Point {
    let a = std::f64::consts::TAU * u[0];
    if dim == 2 {
        Point::new2(a.cos(), a.sin())
    } else {
        let z = 1.0 - 2.0 * u[1];
        let s = (1.0 - z * z).max(0.0).sqrt();
        Point::new3(s * a.cos(), s * a.sin(), z)
    }
}

/// Volume-uniform point of the ball `B(center, radius)`.
pub fn ball_point(center: &Point, radius: f64, u: &[f64; 4]) -> Point {
    let dim = center.dim();
    let rho = radius * u[0].powf(1.0 / dim as f64);
    *center + sphere_direction(dim, &u[1..]) * rho
}

/// Volume-uniform point of the open annulus `1 - t < |x| < 1 + t`.
pub fn annulus_point(dim: usize, t: f64, u: &[f64; 4]) -> Point {
    let n = dim as i32;
    let (lo, hi) = ((1.0 - t).powi(n), (1.0 + t).powi(n));
    let rho = (lo + u[0] * (hi - lo)).powf(1.0 / dim as f64);
    sphere_direction(dim, &u[1..]) * rho
}

/// `count` well-spread unit vectors: equally spaced angles on the circle,
/// a Fibonacci lattice on S².
pub fn sphere_points(dim: usize, count: usize) -> Vec<Point> {
    if dim == 2 {
        (0..count)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / count as f64;
                Point::new2(a.cos(), a.sin())
            })
            .collect()
    } else {
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        (0..count)
            .map(|k| {
                let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                let s = (1.0 - z * z).max(0.0).sqrt();
                let a = golden * k as f64;
                Point::new3(s * a.cos(), s * a.sin(), z)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base_two() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert_eq!(radical_inverse(5, 3), 2.0 / 3.0 + 1.0 / 9.0);
    }

    #[test]
    fn halton_is_in_open_unit_cube_and_seeded() {
        let h = Halton::new(3, 0);
        let s = Halton::new(3, 7);
        for k in 0..1000 {
            for v in h.point(k).iter().chain(s.point(k).iter()) {
                assert!(*v > 0.0 && *v < 1.0);
            }
        }
        assert_eq!(Halton::new(3, 7).point(10), s.point(10));
        assert_ne!(h.point(10), s.point(10));
    }

    #[test]
    fn annulus_points_are_inside() {
        let h = Halton::new(3, 0);
        for k in 0..2000 {
            let p = annulus_point(2, 0.5, &h.point(k));
            assert!(p.norm() > 0.5 && p.norm() < 1.5);
            let q = annulus_point(3, 0.2, &h.point(k));
            assert!(q.norm() > 0.8 && q.norm() < 1.2);
        }
    }

    #[test]
    fn ball_points_are_inside() {
        let h = Halton::new(4, 3);
        let c = Point::new3(1.0, -2.0, 0.5);
        for k in 0..2000 {
            assert!(ball_point(&c, 0.3, &h.point(k)).dist(&c) <= 0.3);
        }
    }
}
