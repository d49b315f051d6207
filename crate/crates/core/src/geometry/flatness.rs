//! Local flatness θ_Σ(x, r) and the one-sided Jones β-number.
//!
//! θ is `(1/r) · min_L HD[Σ ∩ B(x,r), (x + L) ∩ B(x,r)]` over hyperplanes `L`
//! through the origin. In the plane the line-to-set half of the Hausdorff
//! distance is computed exactly from the lower envelope of the distance
//! parabolas along the segment; in ℝ³ the disc is sampled on a mesh.
//!
//! The minimisation over planes uses that θ is 1-Lipschitz in the angle
//! between normals: a coarse scan certifies which neighbourhoods can still
//! hold the minimum, those are rescanned finely, and the best few points are
//! polished by golden-section search (n = 2) or compass search (n = 3).

use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exec;
use crate::geometry::hyperplane::{tangent_basis, Hyperplane};
use crate::geometry::index::GridIndex;
use crate::geometry::point::{same_dim, Point};
use crate::geometry::pointset::{sample_spacing, PointSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlatnessConfig {
    /// Mesh spacing for the plane disc in ℝ³; `None` uses the spacing of the
    /// restricted set.
    pub plane_spacing: Option<f64>,
    /// Lower bound on the disc mesh spacing, as a fraction of `r`.
    pub min_mesh_fraction: f64,
    /// Coarse angular step of the planar scan, in degrees.
    pub coarse_step_deg: f64,
    /// Fine angular step, in degrees.
    pub fine_step_deg: f64,
    /// Stopping tolerance of the final polish, in radians.
    pub angle_tol: f64,
    /// Number of coarse trial normals on the hemisphere (n = 3).
    pub coarse_normals_3d: usize,
    /// Number of points used to estimate the sample spacing.
    pub spacing_probe: usize,
}

impl Default for FlatnessConfig {
    fn default() -> Self {
        FlatnessConfig {
            plane_spacing: None,
            min_mesh_fraction: 1.0 / 40.0,
            coarse_step_deg: 1.0,
            fine_step_deg: 0.05,
            angle_tol: 1e-10,
            coarse_normals_3d: 400,
            spacing_probe: 256,
        }
    }
}

/// Result of [`local_flatness`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flatness {
    pub theta: f64,
    pub plane: Hyperplane,
    /// Median nearest-neighbour spacing of `S ∩ B(x, r)`.
    pub spacing: f64,
    pub point_count: usize,
}

impl Flatness {
    /// Implicit resolution error `spacing / r` of the sampled value.
    pub fn resolution(&self, r: f64) -> f64 {
        self.spacing / r
    }
}

fn restricted(s: &PointSet, x: &Point, r: f64) -> Result<Vec<Point>> {
    same_dim(s.dim(), x.dim())?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid(format!("scale must be positive, got {r}")));
    }
    let pts = s.restrict(x, r).into_points();
    if pts.is_empty() {
        return Err(Error::NoPointsAtScale { radius: r });
    }
    Ok(pts)
}

/// `(1/r) · HD[S ∩ B(x,r), H ∩ B(x,r)]` for one candidate hyperplane `H`.
pub fn hyperplane_distance_profile(
    s: &PointSet,
    h: &Hyperplane,
    x: &Point,
    r: f64,
    cfg: &FlatnessConfig,
) -> Result<f64> {
    let pts = restricted(s, x, r)?;
    same_dim(s.dim(), h.normal.dim())?;
    let d = h.signed_distance(x);
    if d.abs() > r {
        return Err(invalid(format!("hyperplane misses B(x, r): distance {} > {r}", d.abs())));
    }
    let center = *x - h.normal * d;
    let rho = (r * r - d * d).max(0.0).sqrt();
    let hd = match s.dim() {
        2 => disc_hd_2d(&pts, &center, &h.normal, rho),
        _ => {
            let spacing = mesh_spacing(&pts, r, cfg);
            let idx = GridIndex::new(&pts, 4);
            disc_hd_3d(&pts, &idx, &center, &h.normal, rho, spacing)
        }
    };
    Ok(hd / r)
}

/// Minimal normalised two-sided distance to a hyperplane through `x`.
pub fn local_flatness(s: &PointSet, x: &Point, r: f64, cfg: &FlatnessConfig) -> Result<Flatness> {
    let pts = restricted(s, x, r)?;
    let spacing = sample_spacing(&pts, cfg.spacing_probe);
    let rel: Vec<Point> = pts.iter().map(|p| *p - *x).collect();
    let (normal, theta) = match s.dim() {
        2 => {
            let phi0 = tls_normal_angle(&rel);
            let ctx = Planar::new(&rel);
            let (phi, val) = minimize_angle(|phi| ctx.two_sided(phi, r) / r, phi0, cfg);
            (angle_normal(phi), val)
        }
        _ => {
            let n0 = tls_normal_3d(&rel);
            let mesh_h = mesh_spacing(&rel, r, cfg);
            let idx = GridIndex::new(&rel, 4);
            let origin = Point::zero(3);
            minimize_normal_3d(|n| disc_hd_3d(&rel, &idx, &origin, n, r, mesh_h) / r, &n0, cfg)
        }
    };
    let plane = Hyperplane::through(x, &normal)?;
    Ok(Flatness { theta: theta.clamp(0.0, 1.0), plane, spacing, point_count: pts.len() })
}

/// One-sided flatness: `(1/r) · min_L sup_{p ∈ S ∩ B(x,r)} dist(p, L)` over all
/// affine hyperplanes `L`, i.e. half the minimal width of the restricted set
/// divided by `r`.
pub fn jones_beta(s: &PointSet, x: &Point, r: f64, cfg: &FlatnessConfig) -> Result<f64> {
    let pts = restricted(s, x, r)?;
    let rel: Vec<Point> = pts.iter().map(|p| *p - *x).collect();
    let width = match s.dim() {
        2 => min_width_2d(&rel),
        _ => {
            let c = centroid(&rel);
            let centred: Vec<Point> = rel.iter().map(|p| *p - c).collect();
            let n0 = tls_normal_3d(&centred);
            // points and centroid lie in B(x, r), so the width is 4r-Lipschitz
            let (_, w) = minimize_normal_3d(|n| width_along(&centred, n) / (4.0 * r), &n0, cfg);
            4.0 * r * w
        }
    };
    Ok((0.5 * width / r).clamp(0.0, 1.0))
}

fn width_along(pts: &[Point], n: &Point) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        let v = p.dot(n);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    hi - lo
}

fn centroid(pts: &[Point]) -> Point {
    let mut c = Point::zero(pts[0].dim());
    for p in pts {
        c += *p;
    }
    c * (1.0 / pts.len() as f64)
}

fn mesh_spacing(pts: &[Point], r: f64, cfg: &FlatnessConfig) -> f64 {
    let h = cfg.plane_spacing.unwrap_or_else(|| sample_spacing(pts, cfg.spacing_probe));
    h.max(r * cfg.min_mesh_fraction)
}

#[inline]
fn angle_normal(phi: f64) -> Point {
    Point::new2(phi.cos(), phi.sin())
}

/// Angle of the normal of the total-least-squares line through the origin.
fn tls_normal_angle(rel: &[Point]) -> f64 {
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in rel {
        sxx += p[0] * p[0];
        syy += p[1] * p[1];
        sxy += p[0] * p[1];
    }
    0.5 * (2.0 * sxy).atan2(sxx - syy) + std::f64::consts::FRAC_PI_2
}

fn tls_normal_3d(rel: &[Point]) -> Point {
    let mut m = Matrix3::<f64>::zeros();
    for p in rel {
        let c = p.raw();
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] += c[i] * c[j];
            }
        }
    }
    let eig = SymmetricEigen::new(m);
    let k = eig.eigenvalues.imin();
    let v = eig.eigenvectors.column(k);
    Point::new3(v[0], v[1], v[2]).normalized().unwrap_or(Point::new3(0.0, 0.0, 1.0))
}

/// Precomputed planar data for the exact segment–set distance.
struct Planar<'a> {
    rel: &'a [Point],
}

impl<'a> Planar<'a> {
    fn new(rel: &'a [Point]) -> Self {
        Planar { rel }
    }

    /// HD between the points and the segment through the origin with normal
    /// angle `phi` and half-length `r`.
    fn two_sided(&self, phi: f64, r: f64) -> f64 {
        disc_hd_2d(self.rel, &Point::zero(2), &angle_normal(phi), r)
    }
}

/// HD between `pts` and the segment `{c + s·u : |s| ≤ rho}`, `u ⊥ n`.
fn disc_hd_2d(pts: &[Point], c: &Point, n: &Point, rho: f64) -> f64 {
    let u = Point::new2(-n[1], n[0]);
    let mut side1 = 0.0f64;
    let mut parab: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        let q = *p - *c;
        let a = q.dot(&u);
        let h = q.dot(n);
        let over = (a.abs() - rho).max(0.0);
        side1 = side1.max(h * h + over * over);
        parab.push((a, h * h));
    }
    let side2 = segment_sup_sq(&mut parab, rho);
    side1.max(side2).sqrt()
}

/// `sup_{|s| ≤ rho} min_i ((s - a_i)² + h_i)`, exact.
///
/// The minimum of equal-curvature parabolas is a lower envelope whose pieces
/// are convex, so the supremum sits at `±rho` or at an envelope breakpoint.
fn segment_sup_sq(parab: &mut Vec<(f64, f64)>, rho: f64) -> f64 {
    parab.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    parab.dedup_by(|later, earlier| later.0 == earlier.0);
    let mut v: Vec<usize> = Vec::with_capacity(parab.len());
    let mut z: Vec<f64> = Vec::with_capacity(parab.len());
    for q in 0..parab.len() {
        let (aq, hq) = parab[q];
        let mut left = f64::NEG_INFINITY;
        while let Some(&p) = v.last() {
            let (ap, hp) = parab[p];
            let s = 0.5 * (ap + aq) + (hq - hp) / (2.0 * (aq - ap));
            if s <= *z.last().unwrap() {
                v.pop();
                z.pop();
            } else {
                left = s;
                break;
            }
        }
        v.push(q);
        z.push(left);
    }
    let value_at = |s: f64| {
        // last piece whose left boundary is <= s
        let k = z.partition_point(|&b| b <= s).saturating_sub(1);
        let (a, h) = parab[v[k]];
        (s - a) * (s - a) + h
    };
    let mut best = value_at(-rho).max(value_at(rho));
    for (k, &b) in z.iter().enumerate().skip(1) {
        if b > -rho && b < rho {
            let (a, h) = parab[v[k]];
            best = best.max((b - a) * (b - a) + h);
        }
    }
    best
}

/// HD between `pts` and the sampled disc `{c + w : w ⊥ n, |w| ≤ rho}` in ℝ³.
fn disc_hd_3d(pts: &[Point], idx: &GridIndex<'_>, c: &Point, n: &Point, rho: f64, h: f64) -> f64 {
    let mut side1 = 0.0f64;
    for p in pts {
        let q = *p - *c;
        let ht = q.dot(n);
        let tang = (q - *n * ht).norm();
        let over = (tang - rho).max(0.0);
        side1 = side1.max(ht * ht + over * over);
    }
    let mut side2 = 0.0f64;
    for m in disc_mesh(c, n, rho, h) {
        side2 = side2.max(idx.nearest(&m).0);
    }
    side1.max(side2).sqrt()
}

/// Square grid of spacing `h` clipped to the disc, plus a rim of the same
/// spacing.
fn disc_mesh(c: &Point, n: &Point, rho: f64, h: f64) -> Vec<Point> {
    let basis = tangent_basis(n);
    let (e1, e2) = (basis[0], basis[1]);
    let k = (rho / h).floor() as i64;
    let mut out = Vec::new();
    for i in -k..=k {
        for j in -k..=k {
            let (a, b) = (i as f64 * h, j as f64 * h);
            if a * a + b * b <= rho * rho {
                out.push(*c + e1 * a + e2 * b);
            }
        }
    }
    let rim = ((std::f64::consts::TAU * rho / h).ceil() as usize).max(8);
    for t in 0..rim {
        let ang = std::f64::consts::TAU * t as f64 / rim as f64;
        out.push(*c + e1 * (rho * ang.cos()) + e2 * (rho * ang.sin()));
    }
    out
}

/// Minimal width of the convex hull by rotating calipers: the optimum has a
/// normal perpendicular to a hull edge.
fn min_width_2d(pts: &[Point]) -> f64 {
    let hull = convex_hull_2d(pts);
    let m = hull.len();
    if m < 3 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    let mut j = 1usize;
    for i in 0..m {
        let a = hull[i];
        let e = hull[(i + 1) % m] - a;
        let len = e.norm();
        let dist = |p: &Point| ((p[0] - a[0]) * e[1] - (p[1] - a[1]) * e[0]).abs() / len;
        while dist(&hull[(j + 1) % m]) > dist(&hull[j]) {
            j = (j + 1) % m;
        }
        best = best.min(dist(&hull[j]));
    }
    best
}

fn convex_hull_2d(pts: &[Point]) -> Vec<Point> {
    let mut p: Vec<Point> = pts.to_vec();
    p.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let turn = |o: &Point, a: &Point, b: &Point| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut lower: Vec<Point> = Vec::new();
    for q in &p {
        while lower.len() >= 2 && turn(&lower[lower.len() - 2], &lower[lower.len() - 1], q) <= 0.0 {
            lower.pop();
        }
        lower.push(*q);
    }
    let mut upper: Vec<Point> = Vec::new();
    for q in p.iter().rev() {
        while upper.len() >= 2 && turn(&upper[upper.len() - 2], &upper[upper.len() - 1], q) <= 0.0 {
            upper.pop();
        }
        upper.push(*q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Canonical (first non-zero coordinate positive) version of a unit normal.
fn canonical_normal(n: Point) -> Point {
    let first = n.coords().iter().copied().find(|v| *v != 0.0).unwrap_or(1.0);
    if first < 0.0 {
        -n
    } else {
        n
    }
}

/// Strictly better: smaller value, ties broken by the lexicographically
/// smaller canonical normal.
fn better(val: f64, n: &Point, best_val: f64, best_n: &Point) -> bool {
    val < best_val
        || (val == best_val && canonical_normal(*n).lex_cmp(&canonical_normal(*best_n)) == std::cmp::Ordering::Less)
}

/// Minimises a 1-Lipschitz function of the normal angle over a half-turn
/// centred on `phi0`. Returns `(angle, value)`.
pub(crate) fn minimize_angle<F>(f: F, phi0: f64, cfg: &FlatnessConfig) -> (f64, f64)
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    let coarse = cfg.coarse_step_deg.to_radians();
    let fine = cfg.fine_step_deg.to_radians().min(coarse);
    let k_half = (std::f64::consts::FRAC_PI_2 / coarse).ceil() as i64;
    let coarse_angles: Vec<f64> = (-k_half..k_half).map(|k| phi0 + k as f64 * coarse).collect();
    let coarse_vals = exec::map_slice(&coarse_angles, |&a| f(a));

    let mut best = (coarse_angles[0], coarse_vals[0]);
    let consider = |a: f64, v: f64, best: &mut (f64, f64)| {
        if better(v, &angle_normal(a), best.1, &angle_normal(best.0)) {
            *best = (a, v);
        }
    };
    for (&a, &v) in coarse_angles.iter().zip(&coarse_vals) {
        consider(a, v, &mut best);
    }

    // every coarse cell that may still contain the minimum
    let j_half = (0.5 * coarse / fine).ceil() as i64;
    let mut fine_angles = Vec::new();
    for (&a, &v) in coarse_angles.iter().zip(&coarse_vals) {
        if v - 0.5 * coarse <= best.1 {
            fine_angles.extend((-j_half..=j_half).filter(|&j| j != 0).map(|j| a + j as f64 * fine));
        }
    }
    let fine_vals = exec::map_slice(&fine_angles, |&a| f(a));
    for (&a, &v) in fine_angles.iter().zip(&fine_vals) {
        consider(a, v, &mut best);
    }

    // polish the best few fine-scale local candidates
    let mut cands: Vec<(f64, f64)> = coarse_angles
        .iter()
        .copied()
        .zip(coarse_vals.iter().copied())
        .chain(fine_angles.iter().copied().zip(fine_vals.iter().copied()))
        .filter(|&(_, v)| v - 0.5 * fine <= best.1)
        .collect();
    cands.sort_by(|x, y| x.1.total_cmp(&y.1).then(x.0.total_cmp(&y.0)));
    let mut seeds: Vec<f64> = Vec::new();
    for (a, _) in cands {
        if seeds.iter().all(|s| (s - a).abs() > 1.5 * fine) {
            seeds.push(a);
        }
        if seeds.len() == 4 {
            break;
        }
    }
    let polished = exec::map_slice(&seeds, |&a| golden_min(&f, a - fine, a + fine, cfg.angle_tol));
    for (a, v) in polished {
        consider(a, v, &mut best);
    }
    best
}

/// Golden-section search on `[lo, hi]`; returns the best point evaluated.
fn golden_min<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut best = if f2 < f1 { (x2, f2) } else { (x1, f1) };
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
            if f1 < best.1 {
                best = (x1, f1);
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
            if f2 < best.1 {
                best = (x2, f2);
            }
        }
    }
    best
}

/// Minimises a 1-Lipschitz function of a unit normal in ℝ³ (up to sign).
/// Returns `(normal, value)`.
pub(crate) fn minimize_normal_3d<F>(f: F, n0: &Point, cfg: &FlatnessConfig) -> (Point, f64)
where
    F: Fn(&Point) -> f64 + Sync + Send,
{
    let basis = tangent_basis(n0);
    let (t1, t2) = (basis[0], basis[1]);
    let count = cfg.coarse_normals_3d.max(8);
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let dirs: Vec<Point> = (0..count)
        .map(|i| {
            let z = 1.0 - (i as f64 + 0.5) / count as f64;
            let s = (1.0 - z * z).max(0.0).sqrt();
            let a = golden * i as f64;
            (*n0 * z + t1 * (s * a.cos()) + t2 * (s * a.sin())).normalized().unwrap()
        })
        .collect();
    let vals = exec::map_slice(&dirs, |d| f(d));
    let mut best = (dirs[0], vals[0]);
    for (d, &v) in dirs.iter().zip(&vals) {
        if better(v, d, best.1, &best.0) {
            best = (*d, v);
        }
    }
    // covering radius of a Fibonacci hemisphere is about this
    let cover = (2.0 * std::f64::consts::PI / count as f64).sqrt();
    let mut order: Vec<usize> = (0..count).filter(|&i| vals[i] - cover <= best.1).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
    let mut seeds: Vec<Point> = Vec::new();
    for i in order {
        if seeds.iter().all(|s| s.dot(&dirs[i]).abs() < (1.5 * cover).cos()) {
            seeds.push(dirs[i]);
        }
        if seeds.len() == 6 {
            break;
        }
    }
    let polished = exec::map_slice(&seeds, |s| compass_search(&f, *s, cover, cfg.angle_tol));
    for (d, v) in polished {
        if better(v, &d, best.1, &best.0) {
            best = (d, v);
        }
    }
    (canonical_normal(best.0), best.1)
}

fn rotate_towards(n: &Point, t: &Point, angle: f64) -> Point {
    (*n * angle.cos() + *t * angle.sin()).normalized().unwrap()
}

fn compass_search<F: Fn(&Point) -> f64>(f: &F, start: Point, step0: f64, tol: f64) -> (Point, f64) {
    let mut cur = start;
    let mut val = f(&cur);
    let mut step = step0;
    while step > tol {
        let basis = tangent_basis(&cur);
        let mut moved = false;
        for t in [basis[0], -basis[0], basis[1], -basis[1]] {
            let cand = rotate_towards(&cur, &t, step);
            let v = f(&cand);
            if v < val {
                cur = cand;
                val = v;
                moved = true;
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    (cur, val)
}
