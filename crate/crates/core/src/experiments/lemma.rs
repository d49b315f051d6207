//! Flatness of the image of `e₁^⊥` under a nearly symmetric map fixing `±e₁`.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::report::{ExperimentReport, Outcome};
use super::EPS_MAX;
use crate::error::{invalid, Result};
use crate::exec;
use crate::generators::sphere_sampler;
use crate::geometry::{local_flatness, FlatnessConfig, Point, PointSet};
use crate::maps::spec::apply;
use crate::maps::MapSpec;
use crate::qs::standardize::rotation_to;

/// Radius of the ball that must lie inside the image of the unit ball.
pub const CONTAINED_RADIUS: f64 = 5.0 / 6.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LemmaConfig {
    /// Samples of the unit sphere for the containment test (0: 4096 in the
    /// plane, 10⁴ in space).
    pub boundary_samples: usize,
    /// Spacing of the samples of `e₁^⊥ ∩ B(0, 1)` (0: 0.0025 in the plane,
    /// 0.01 in space).
    pub plane_spacing: f64,
    pub flatness: FlatnessConfig,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        LemmaConfig { boundary_samples: 0, plane_spacing: 0.0, flatness: FlatnessConfig::default() }
    }
}

/// `s Rᵀ L` for an affine `f = L + v`, which fixes `±e₁` and has the same
/// weak quasisymmetry constant.
pub fn normalize_pm_e1(f: &MapSpec) -> Result<MapSpec> {
    let (l, _) = f.affine_part().ok_or_else(|| invalid("normalization needs an affine map"))?;
    let w = apply(&l, &Point::basis(f.dim(), 0));
    let s = w.norm();
    let r = rotation_to(&w.normalized().ok_or_else(|| invalid("degenerate linear part"))?);
    MapSpec::from_matrix(f.dim(), r.transpose() * l * (1.0 / s))
}

/// `count` normalized linear maps `R₁ diag(1 + δ, 1, …) R₂` with `δ` uniform
/// in `[0, eps_max]`; their weak quasisymmetry constant is `1 + δ`.
pub fn lemma_family(dim: usize, count: usize, eps_max: f64, seed: u64) -> Result<Vec<MapSpec>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rot = |rng: &mut ChaCha8Rng| -> Result<MapSpec> {
        if dim == 2 {
            MapSpec::rotation2(rng.random::<f64>() * TAU)
        } else {
            let axis = crate::sampling::sphere_direction(3, &[rng.random(), rng.random()]);
            MapSpec::rotation3(&axis, rng.random::<f64>() * TAU)
        }
    };
    (0..count)
        .map(|_| {
            let d = rng.random::<f64>() * eps_max;
            let mut diag = vec![1.0; dim];
            diag[0] = 1.0 + d;
            let f = rot(&mut rng)?.after(&MapSpec::diag(&diag)?)?;
            let f = f.after(&rot(&mut rng)?)?;
            normalize_pm_e1(&f)
        })
        .collect()
}

/// Winding number of a closed polygon around `c`.
fn winding(poly: &[Point], c: &Point) -> f64 {
    let mut total = 0.0;
    for i in 0..poly.len() {
        let (a, b) = (poly[i] - *c, poly[(i + 1) % poly.len()] - *c);
        total += (a[0] * b[1] - a[1] * b[0]).atan2(a.dot(&b));
    }
    total / TAU
}

/// Samples of `e₁^⊥ ∩ B(0, 1)` on a square grid.
fn hyperplane_samples(dim: usize, h: f64) -> Vec<Point> {
    let k = (1.0 / h).floor() as i64;
    let mut out = Vec::new();
    if dim == 2 {
        for i in -k..=k {
            out.push(Point::new2(0.0, i as f64 * h));
        }
    } else {
        for i in -k..=k {
            for j in -k..=k {
                let p = Point::new3(0.0, i as f64 * h, j as f64 * h);
                if p.norm() <= 1.0 {
                    out.push(p);
                }
            }
        }
    }
    out
}

pub fn lemma_flat_check(f: &MapSpec, eps: f64, cfg: &LemmaConfig) -> Result<ExperimentReport> {
    let dim = f.dim();
    let mut rep = ExperimentReport::new("lemma_flat_check", json!({ "map": f, "epsilon": eps, "config": cfg }));
    let e1 = Point::basis(dim, 0);
    let fp = f.evaluate(&e1)?;
    let fm = f.evaluate(&(-e1))?;
    let fix_err = fp.dist(&e1).max(fm.dist(&(-e1)));
    let h = f.closed_form_weak_qs();
    let mut guard = Vec::new();
    if !(0.0..=EPS_MAX).contains(&eps) {
        guard.push(format!("epsilon {eps} outside [0, 1/20]"));
    }
    if fix_err > 1e-9 {
        guard.push(format!("map moves ±e₁ by {fix_err:e}"));
    }
    match h {
        None => guard.push("no closed-form weak quasisymmetry constant".into()),
        Some(h) if h > 1.0 + eps + 1e-12 => guard.push(format!("closed-form H = {h} exceeds 1 + epsilon")),
        _ => {}
    }
    if !guard.is_empty() {
        rep.outcome = Outcome::NotApplicable;
        rep.notes = guard;
        return Ok(rep);
    }

    let f0 = f.evaluate(&Point::zero(dim))?;
    let count = match cfg.boundary_samples {
        0 if dim == 2 => 4096,
        0 => 10_000,
        c => c,
    };
    let sphere = sphere_sampler(dim, count, 0)?;
    let image: Vec<Point> = sphere.points().iter().map(|z| f.evaluate(z)).collect::<Result<_>>()?;
    let min_radius = image.iter().map(|p| p.dist(&f0)).fold(f64::INFINITY, f64::min);
    let wind = if dim == 2 { Some(winding(&image, &f0)) } else { None };
    let contained = min_radius >= CONTAINED_RADIUS && wind.is_none_or(|w| (w.abs() - 1.0).abs() < 1e-6);

    let spacing = match cfg.plane_spacing {
        0.0 if dim == 2 => 0.0025,
        0.0 => 0.01,
        s => s,
    };
    let plane: Vec<Point> =
        hyperplane_samples(dim, spacing).iter().map(|x| f.evaluate(x)).collect::<Result<_>>()?;
    let fl = local_flatness(&PointSet::new(dim, plane)?, &f0, 0.5, &cfg.flatness)?;
    // plane points near the rim of the disc are only covered from inside the
    // ball, which doubles the sampling error there
    let resolution = 2.0 * fl.resolution(0.5);
    rep.measured = json!({
        "f0": f0,
        "min_boundary_distance": min_radius,
        "winding": wind,
        "contained": contained,
        "theta": fl.theta,
        "resolution": resolution,
        "closed_form_H": h,
    });
    rep.compare(fl.theta, 20.0 * eps + resolution, 0.0);
    if !contained {
        rep.outcome = Outcome::Fail;
        rep.note(format!("image of the unit sphere comes within {min_radius} of f(0)"));
    }
    Ok(rep)
}

/// Runs [`lemma_flat_check`] on `count` maps from [`lemma_family`], each with
/// `ε` equal to its closed-form `H̃`.
pub fn lemma_suite(dim: usize, count: usize, eps_max: f64, seed: u64, cfg: &LemmaConfig) -> Result<Vec<ExperimentReport>> {
    let family = lemma_family(dim, count, eps_max, seed)?;
    let reports = exec::map_slice(&family, |f| {
        let h = f.closed_form_weak_qs().ok_or_else(|| invalid("family map without closed-form H"))?;
        lemma_flat_check(f, (h - 1.0).max(0.0), cfg)
    });
    reports.into_iter().collect()
}
