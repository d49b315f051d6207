//! Seeded low-discrepancy samples of the unit sphere and of annuli around it.

use nalgebra::{Quaternion, UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::geometry::{point::check_dim, Point, PointSet};
use crate::sampling::{annulus_point, sphere_points, Halton};

/// Equally spaced circle points or a Fibonacci lattice on S², rigidly rotated
/// by a seed-derived rotation (seed 0 leaves the lattice in place).
pub fn sphere_sampler(n: usize, count: usize, seed: u64) -> Result<PointSet> {
    check_dim(n)?;
    if count == 0 {
        return Err(invalid("count must be at least 1"));
    }
    let base = sphere_points(n, count);
    let points = if seed == 0 {
        base
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if n == 2 {
            let a: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            let (c, s) = (a.cos(), a.sin());
            base.iter().map(|p| Point::new2(c * p[0] - s * p[1], s * p[0] + c * p[1])).collect()
        } else {
            let q = loop {
                let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
                let q = Quaternion::new(v[0], v[1], v[2], v[3]);
                let nq = q.norm();
                if nq > 1e-3 && nq <= 1.0 {
                    break UnitQuaternion::from_quaternion(q);
                }
            };
            base.iter()
                .map(|p| {
                    let r = q * Vector3::new(p[0], p[1], p[2]);
                    let r = r / r.norm();
                    Point::new3(r.x, r.y, r.z)
                })
                .collect()
        }
    };
    Ok(PointSet::new(n, points)?.with_label("sphere"))
}

/// Halton points, volume-uniform in `1 − t < |x| < 1 + t`.
pub fn annulus_sampler(n: usize, t: f64, count: usize, seed: u64) -> Result<PointSet> {
    check_dim(n)?;
    if !(t > 0.0 && t < 1.0) {
        return Err(invalid(format!("annulus width {t} outside (0, 1)")));
    }
    if count == 0 {
        return Err(invalid("count must be at least 1"));
    }
    let h = Halton::new(n, seed);
    let points = (0..count).map(|k| annulus_point(n, t, &h.point(k))).collect();
    Ok(PointSet::new(n, points)?.with_label("annulus"))
}
