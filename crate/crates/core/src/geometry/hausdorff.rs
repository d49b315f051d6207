//! Hausdorff distance between finite point sets.

use crate::error::{Error, Result};
use crate::exec;
use crate::geometry::index::GridIndex;
use crate::geometry::point::{same_dim, Point};
use crate::geometry::pointset::PointSet;

/// Above this many pairs the target set is indexed on a grid.
const INDEX_THRESHOLD: usize = 1 << 16;
const CHUNK: usize = 256;

/// `sup_{a ∈ from} dist(a, to)`.
pub fn directed_hausdorff(from: &[Point], to: &[Point]) -> f64 {
    if from.is_empty() || to.is_empty() {
        return if from.is_empty() { 0.0 } else { f64::INFINITY };
    }
    if from.len().saturating_mul(to.len()) > INDEX_THRESHOLD {
        let idx = GridIndex::new(to, 4);
        let per = exec::map_slice(from, |a| idx.nearest(a).0);
        return per.into_iter().fold(0.0, f64::max).sqrt();
    }
    // early-break scan: a point cannot raise the running max once some
    // target is closer than it
    let chunks: Vec<&[Point]> = from.chunks(CHUNK).collect();
    let per_chunk = exec::map_slice(&chunks, |chunk| {
        let mut cmax = 0.0f64;
        for a in chunk.iter() {
            let mut cmin = f64::INFINITY;
            for b in to {
                let d = a.dist_sq(b);
                if d < cmin {
                    cmin = d;
                    if cmin <= cmax {
                        break;
                    }
                }
            }
            cmax = cmax.max(cmin);
        }
        cmax
    });
    per_chunk.into_iter().fold(0.0, f64::max).sqrt()
}

/// Symmetric Hausdorff distance `max(h(A,B), h(B,A))`.
pub fn hausdorff_distance(a: &PointSet, b: &PointSet) -> Result<f64> {
    same_dim(a.dim(), b.dim())?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(directed_hausdorff(a.points(), b.points()).max(directed_hausdorff(b.points(), a.points())))
}
