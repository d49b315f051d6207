//! Sampled weak quasisymmetry constant
//! `H_f(B) = sup |f(x) − f(y)| / |f(x) − f(z)|` over `x, y, z ∈ B`, `|x − y| ≤ |x − z|`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exec;
use crate::geometry::point::{same_dim, Point};
use crate::maps::MapSpec;

const CHUNK: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QsConfig {
    pub triple_count: usize,
    pub seed: u64,
    pub refine_iterations: usize,
    pub step_decay: f64,
}

impl Default for QsConfig {
    fn default() -> Self {
        QsConfig { triple_count: 100_000, seed: 0, refine_iterations: 100, step_decay: 0.7 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QsEstimate {
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "H_tilde")]
    pub h_tilde: f64,
    pub witness: [Point; 3],
    pub triple_count: usize,
    pub seed: u64,
}

fn uniform_in_ball<R: Rng>(rng: &mut R, c: &Point, r: f64) -> Point {
    let dim = c.dim();
    loop {
        let mut v = [0.0; 3];
        for s in v.iter_mut().take(dim) {
            *s = rng.random_range(-1.0..1.0);
        }
        let p = Point::with_dim(dim, v);
        if p.norm_sq() <= 1.0 {
            return *c + p * r;
        }
    }
}

/// Orders `(y, z)` so that `|x − y| ≤ |x − z|`.
fn ordered(x: Point, y: Point, z: Point) -> (Point, Point, Point) {
    if x.dist_sq(&y) <= x.dist_sq(&z) {
        (x, y, z)
    } else {
        (x, z, y)
    }
}

fn ratio(f: &MapSpec, t: &(Point, Point, Point), min_sep: f64) -> Option<f64> {
    let (x, y, z) = t;
    if x.dist(z) < min_sep {
        return None;
    }
    let fx = f.eval_unchecked(x);
    let den = fx.dist(&f.eval_unchecked(z));
    if den < 1e-300 {
        return None;
    }
    Some(fx.dist(&f.eval_unchecked(y)) / den)
}

/// Random sampled triples for chunk `c` (ChaCha8 stream `c`).
fn chunk_triples(seed: u64, c: usize, count: usize, center: &Point, radius: f64) -> Vec<(Point, Point, Point)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(c as u64);
    (0..count)
        .map(|_| {
            let x = uniform_in_ball(&mut rng, center, radius);
            let y = uniform_in_ball(&mut rng, center, radius);
            let z = uniform_in_ball(&mut rng, center, radius);
            ordered(x, y, z)
        })
        .collect()
}

/// Best (ratio, global index, triple) over the sampled triples; lowest index
/// wins ties.
fn sampled_best(
    f: &MapSpec,
    center: &Point,
    radius: f64,
    cfg: &QsConfig,
    keep: impl Fn(&(Point, Point, Point)) -> bool + Sync,
) -> Option<(f64, (Point, Point, Point))> {
    let chunks = cfg.triple_count.div_ceil(CHUNK);
    let min_sep = 1e-9 * radius;
    let per_chunk = exec::map_range(chunks, |c| {
        let count = CHUNK.min(cfg.triple_count - c * CHUNK);
        let mut best: Option<(f64, (Point, Point, Point))> = None;
        for t in chunk_triples(cfg.seed, c, count, center, radius) {
            if !keep(&t) {
                continue;
            }
            if let Some(q) = ratio(f, &t, min_sep) {
                if best.as_ref().is_none_or(|b| q > b.0) {
                    best = Some((q, t));
                }
            }
        }
        best
    });
    let mut best: Option<(f64, (Point, Point, Point))> = None;
    for b in per_chunk.into_iter().flatten() {
        if best.as_ref().is_none_or(|cur| b.0 > cur.0) {
            best = Some(b);
        }
    }
    best
}

fn into_ball(p: Point, c: &Point, r: f64) -> Point {
    let d = p - *c;
    let n = d.norm();
    if n <= r {
        p
    } else {
        *c + d * (r / n)
    }
}

/// Local hill-climbing from a witness: random perturbations of all three
/// points, `y` pushed out to `|x − y| = |x − z|`, step shrinking on failure.
fn refine(
    f: &MapSpec,
    start: (f64, (Point, Point, Point)),
    center: &Point,
    radius: f64,
    cfg: &QsConfig,
) -> (f64, (Point, Point, Point)) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_0f_4ef1);
    let min_sep = 1e-9 * radius;
    let (mut best, mut t) = start;
    let mut step = 0.1 * radius;
    let origin = Point::zero(center.dim());
    for _ in 0..cfg.refine_iterations {
        let mut improved = false;
        for k in 0..8 {
            let (x, mut y, z) = if k == 0 {
                t
            } else {
                (
                    into_ball(t.0 + uniform_in_ball(&mut rng, &origin, step), center, radius),
                    into_ball(t.1 + uniform_in_ball(&mut rng, &origin, step), center, radius),
                    into_ball(t.2 + uniform_in_ball(&mut rng, &origin, step), center, radius),
                )
            };
            let (dy, dz) = (x.dist(&y), x.dist(&z));
            if dy > 0.0 && dy != dz {
                let pushed = x + (y - x) * (dz / dy);
                if pushed.dist(center) <= radius {
                    y = pushed;
                }
            }
            let cand = ordered(x, y, z);
            if let Some(q) = ratio(f, &cand, min_sep) {
                if q > best {
                    best = q;
                    t = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= cfg.step_decay;
        }
    }
    (best, t)
}

fn estimate(best: (f64, (Point, Point, Point)), cfg: &QsConfig) -> QsEstimate {
    let (h, (x, y, z)) = best;
    let h = h.max(1.0);
    QsEstimate { h, h_tilde: h - 1.0, witness: [x, y, z], triple_count: cfg.triple_count, seed: cfg.seed }
}

fn check(f: &MapSpec, center: &Point, radius: f64, cfg: &QsConfig) -> Result<()> {
    same_dim(f.dim(), center.dim())?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid("ball radius must be positive"));
    }
    if cfg.triple_count == 0 {
        return Err(invalid("triple count must be at least 1"));
    }
    Ok(())
}

/// Lower bound for `H_f(B(center, radius))`, deterministic given the seed.
pub fn weak_qs_constant(f: &MapSpec, center: &Point, radius: f64, cfg: &QsConfig) -> Result<QsEstimate> {
    check(f, center, radius, cfg)?;
    let best = sampled_best(f, center, radius, cfg, |_| true).ok_or(Error::AllTriplesSkipped)?;
    Ok(estimate(refine(f, best, center, radius, cfg), cfg))
}

/// Estimates on nested balls `B(center, r)`. Each ball gets its own triple
/// sample; a witness from a smaller ball is also admissible in every larger
/// one, so the running maximum from the smallest radius upward is reported and
/// the estimates are non-decreasing in `r`. Results follow the order of `radii`.
pub fn weak_qs_nested(f: &MapSpec, center: &Point, radii: &[f64], cfg: &QsConfig) -> Result<Vec<QsEstimate>> {
    let rmax = radii.iter().copied().fold(0.0, f64::max);
    check(f, center, rmax, cfg)?;
    if radii.iter().any(|r| *r <= 0.0) {
        return Err(invalid("radii must be positive"));
    }
    let mut order: Vec<usize> = (0..radii.len()).collect();
    order.sort_by(|&a, &b| radii[a].total_cmp(&radii[b]));
    let mut out: Vec<Option<QsEstimate>> = vec![None; radii.len()];
    let mut running: Option<(f64, (Point, Point, Point))> = None;
    for i in order {
        let r = radii[i];
        let refined = sampled_best(f, center, r, cfg, |_| true).map(|b| refine(f, b, center, r, cfg));
        running = match (running, refined) {
            (Some(a), Some(b)) => Some(if b.0 > a.0 { b } else { a }),
            (a, b) => a.or(b),
        };
        out[i] = Some(estimate(running.ok_or(Error::AllTriplesSkipped)?, cfg));
    }
    Ok(out.into_iter().map(Option::unwrap).collect())
}
