//! Uniform-grid nearest-neighbour index over a fixed point set.

use crate::geometry::point::Point;

pub struct GridIndex<'a> {
    points: &'a [Point],
    origin: [f64; 3],
    cell: f64,
    dims: [usize; 3],
    /// `starts[c]..starts[c + 1]` indexes `order` for cell `c`.
    starts: Vec<u32>,
    order: Vec<u32>,
}

impl<'a> GridIndex<'a> {
    /// Builds an index with roughly `target_per_cell` points per occupied cell.
    pub fn new(points: &'a [Point], target_per_cell: usize) -> Self {
        assert!(!points.is_empty(), "GridIndex over an empty set");
        let dim = points[0].dim();
        let mut lo = points[0].raw();
        let mut hi = lo;
        for p in points {
            let c = p.raw();
            for i in 0..dim {
                lo[i] = lo[i].min(c[i]);
                hi[i] = hi[i].max(c[i]);
            }
        }
        let ext: Vec<f64> = (0..dim).map(|i| hi[i] - lo[i]).collect();
        let max_ext = ext.iter().cloned().fold(0.0, f64::max);
        let cells_wanted = (points.len() / target_per_cell.max(1)).max(1) as f64;
        // side length giving about `cells_wanted` cells over the occupied extent
        let vol: f64 = ext.iter().map(|e| e.max(max_ext * 1e-3).max(1e-300)).product();
        let mut cell = (vol / cells_wanted).powf(1.0 / dim as f64);
        if !(cell.is_finite() && cell > 0.0) {
            cell = max_ext.max(1.0);
        }
        let mut dims = [1usize; 3];
        for i in 0..dim {
            dims[i] = ((ext[i] / cell).floor() as usize + 1).min(1 << 12);
        }
        let ncells = dims[0] * dims[1] * dims[2];
        let mut counts = vec![0u32; ncells + 1];
        let keys: Vec<usize> = points
            .iter()
            .map(|p| {
                let k = Self::cell_of_raw(&lo, cell, &dims, &p.raw());
                Self::flat(&dims, k)
            })
            .collect();
        for &k in &keys {
            counts[k + 1] += 1;
        }
        for c in 0..ncells {
            counts[c + 1] += counts[c];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut order = vec![0u32; points.len()];
        for (i, &k) in keys.iter().enumerate() {
            order[fill[k] as usize] = i as u32;
            fill[k] += 1;
        }
        GridIndex { points, origin: lo, cell, dims, starts, order }
    }

    fn cell_of_raw(origin: &[f64; 3], cell: f64, dims: &[usize; 3], c: &[f64; 3]) -> [usize; 3] {
        let mut k = [0usize; 3];
        for i in 0..3 {
            let v = ((c[i] - origin[i]) / cell).floor();
            k[i] = if v <= 0.0 { 0 } else { (v as usize).min(dims[i] - 1) };
        }
        k
    }

    fn flat(dims: &[usize; 3], k: [usize; 3]) -> usize {
        (k[2] * dims[1] + k[1]) * dims[0] + k[0]
    }

    /// Squared distance to the nearest indexed point, with its index.
    pub fn nearest(&self, q: &Point) -> (f64, usize) {
        let qc = Self::cell_of_raw(&self.origin, self.cell, &self.dims, &q.raw());
        let mut best = (f64::INFINITY, usize::MAX);
        let max_ring = *self.dims.iter().max().unwrap();
        for ring in 0..=max_ring {
            self.visit_ring(qc, ring, |idx| {
                let d = self.points[idx].dist_sq(q);
                if d < best.0 || (d == best.0 && idx < best.1) {
                    best = (d, idx);
                }
            });
            let reach = ring as f64 * self.cell;
            if best.0.is_finite() && best.0 <= reach * reach {
                break;
            }
        }
        best
    }

    fn visit_ring(&self, c: [usize; 3], ring: usize, mut f: impl FnMut(usize)) {
        let r = ring as isize;
        let lo = |i: usize| (c[i] as isize - r).max(0) as usize;
        let hi = |i: usize| ((c[i] as isize + r) as usize).min(self.dims[i] - 1);
        for z in lo(2)..=hi(2) {
            for y in lo(1)..=hi(1) {
                for x in lo(0)..=hi(0) {
                    let cheb = (x as isize - c[0] as isize)
                        .abs()
                        .max((y as isize - c[1] as isize).abs())
                        .max((z as isize - c[2] as isize).abs());
                    if cheb != r {
                        continue;
                    }
                    let k = Self::flat(&self.dims, [x, y, z]);
                    for &i in &self.order[self.starts[k] as usize..self.starts[k + 1] as usize] {
                        f(i as usize);
                    }
                }
            }
        }
    }
}
