//! Standardisation `g = ψ ∘ f ∘ φ` with `g(0) = 0`, `g(e₁) = e₁` and
//! `g(B(0,1)) ⊂ B(0,1)`, and the extremal quotient `max|g| / min|g|` on the
//! unit sphere.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exec;
use crate::geometry::hyperplane::tangent_basis;
use crate::geometry::point::{same_dim, Point};
use crate::maps::MapSpec;
use crate::sampling::sphere_points;

pub fn default_sphere_samples(dim: usize) -> usize {
    if dim == 2 {
        4096
    } else {
        16384
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    /// `φ(y) = center + r Q y`.
    pub pre_affine: MapSpec,
    /// `ψ(w) = Pᵀ (w − f(center)) / ρ`.
    pub post_affine: MapSpec,
    pub base_map: MapSpec,
    pub pivot: Point,
    /// `ψ ∘ f ∘ φ`.
    pub g: MapSpec,
    /// Largest sampled `|g(x)|` on the unit sphere.
    pub max_norm: f64,
}

/// Rotation matrix taking `e₁` to the unit vector `v`.
pub(crate) fn rotation_to(v: &Point) -> Matrix3<f64> {
    let mut m = Matrix3::zeros();
    if v.dim() == 2 {
        let (c, s) = (v[0], v[1]);
        m[(0, 0)] = c;
        m[(0, 1)] = -s;
        m[(1, 0)] = s;
        m[(1, 1)] = c;
        return m;
    }
    let e1 = Point::new3(1.0, 0.0, 0.0);
    let c = v.dot(&e1);
    if c < -1.0 + 1e-15 {
        // half-turn about e₃
        return Matrix3::new(-1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0);
    }
    // Rodrigues with unnormalised axis k = e₁ × v: R = I + [k] + [k]² / (1 + c)
    let k = Point::new3(0.0, -v[2], v[1]);
    let kx = Matrix3::new(0.0, -k[2], k[1], k[2], 0.0, -k[0], -k[1], k[0], 0.0);
    Matrix3::identity() + kx + kx * kx * (1.0 / (1.0 + c))
}

fn padded(m: Matrix3<f64>, dim: usize) -> Matrix3<f64> {
    let mut m = m;
    if dim == 2 {
        m[(2, 2)] = 0.0;
    }
    m
}

/// Maximises `h` over the unit sphere by compass search from `u0` with
/// initial angular step `step`.
pub(crate) fn refine_on_sphere<F: Fn(&Point) -> f64>(u0: Point, step: f64, h: F) -> (Point, f64) {
    let mut u = u0;
    let mut val = h(&u);
    let mut step = step;
    while step > 1e-12 {
        let mut moved = false;
        for t in tangent_basis(&u) {
            for sgn in [1.0, -1.0] {
                let cand = (u * step.cos() + t * (sgn * step.sin())).normalized().unwrap();
                let v = h(&cand);
                if v > val {
                    u = cand;
                    val = v;
                    moved = true;
                    break;
                }
            }
            if moved {
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    (u, val)
}

fn sphere_max<F: Fn(&Point) -> f64 + Sync>(dim: usize, samples: usize, h: F) -> (Point, f64) {
    let dirs = sphere_points(dim, samples);
    let vals = exec::map_slice(&dirs, |u| h(u));
    let (k, _) = exec::first_max(vals.iter().map(|v| Some(*v))).expect("at least one sample");
    let spacing = if dim == 2 {
        std::f64::consts::TAU / samples as f64
    } else {
        (4.0 * std::f64::consts::PI / samples as f64).sqrt()
    };
    let (u, v) = refine_on_sphere(dirs[k], spacing, &h);
    if v >= vals[k] {
        (u, v)
    } else {
        (dirs[k], vals[k])
    }
}

pub fn standardize(f: &MapSpec, center: &Point, r: f64, sphere_samples: usize) -> Result<Standardization> {
    same_dim(f.dim(), center.dim())?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid("radius must be positive"));
    }
    if sphere_samples == 0 {
        return Err(invalid("sphere sample count must be at least 1"));
    }
    let dim = f.dim();
    let fc = f.eval_unchecked(center);
    let (u, rho) = sphere_max(dim, sphere_samples, |u| f.eval_unchecked(&(*center + *u * r)).dist(&fc));
    if !(rho > 1e-300) {
        return Err(Error::DegenerateJacobian { det: 0.0 });
    }
    let pivot = *center + u * r;
    let v = (f.eval_unchecked(&pivot) - fc) * (1.0 / rho);
    let q = rotation_to(&u);
    let p = rotation_to(&v);
    let pre = MapSpec::composite(vec![MapSpec::translation(*center)?, MapSpec::from_matrix(dim, padded(q * r, dim))?])?;
    let post = MapSpec::composite(vec![
        MapSpec::from_matrix(dim, padded(p.transpose() * (1.0 / rho), dim))?,
        MapSpec::translation(-fc)?,
    ])?;
    let g = MapSpec::composite(vec![post.clone(), f.clone(), pre.clone()])?;

    let g0 = g.eval_unchecked(&Point::zero(dim));
    let e1 = Point::basis(dim, 0);
    let ge1 = g.eval_unchecked(&e1);
    if g0.norm() > 1e-9 || ge1.dist(&e1) > 1e-9 {
        return Err(invalid(format!("normalisation failed: |g(0)| = {:e}, |g(e1) - e1| = {:e}", g0.norm(), ge1.dist(&e1))));
    }
    let norms = exec::map_slice(&sphere_points(dim, sphere_samples), |y| g.eval_unchecked(y).norm());
    let max_norm = norms.iter().copied().fold(0.0, f64::max);
    if max_norm > 1.0 + 1e-6 {
        return Err(Error::ContainmentViolated { max_norm });
    }
    Ok(Standardization { pre_affine: pre, post_affine: post, base_map: f.clone(), pivot, g, max_norm })
}

/// `max |g| / min |g|` over the unit sphere (sampled, then locally refined).
pub fn extremal_quotient(g: &MapSpec, sphere_samples: usize) -> Result<f64> {
    if sphere_samples == 0 {
        return Err(invalid("sphere sample count must be at least 1"));
    }
    let dim = g.dim();
    let (_, hi) = sphere_max(dim, sphere_samples, |u| g.eval_unchecked(u).norm());
    let (_, neg_lo) = sphere_max(dim, sphere_samples, |u| -g.eval_unchecked(u).norm());
    let lo = -neg_lo;
    if lo < 1e-300 {
        return Err(invalid(format!("min |g| on the sphere vanishes ({lo:e})")));
    }
    Ok(hi / lo)
}
