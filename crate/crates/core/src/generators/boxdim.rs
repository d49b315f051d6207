//! Box-counting dimension on dyadic grids.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::PointSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDimension {
    pub dim: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
    pub scales: Vec<f64>,
    /// Mean of `log N(s)` over the anchor offsets, per scale.
    pub log_counts: Vec<f64>,
}

fn count_boxes(s: &PointSet, origin: &[f64], size: f64) -> usize {
    let mut seen = HashSet::with_capacity(s.len());
    for p in s.points() {
        let key: Vec<i64> = p.coords().iter().zip(origin).map(|(x, o)| ((x - o) / size).floor() as i64).collect();
        seen.insert(key);
    }
    seen.len()
}

/// Slope of `log N(s)` against `log(1/s)` over `s = s_max, s_max/2, ...`
/// down to `s_min`. Grids are anchored at the bounding-box corner and shifted
/// by half a box along each of the first two axes; the four counts are averaged
/// in log.
pub fn box_dimension(s: &PointSet, s_min: f64, s_max: f64) -> Result<BoxDimension> {
    if !(s_min > 0.0 && s_min < s_max) {
        return Err(invalid(format!("need 0 < s_min < s_max, got ({s_min}, {s_max})")));
    }
    if (s_max / s_min).log10() < 2.0 - 1e-9 {
        return Err(Error::InsufficientScaleSpan(format!("[{s_min:e}, {s_max:e}] spans less than two decades")));
    }
    let (lo, _) = s.bounding_box().ok_or(Error::EmptySet)?;
    let mut scales = Vec::new();
    let mut size = s_max;
    while size >= s_min * (1.0 - 1e-12) {
        scales.push(size);
        size *= 0.5;
    }
    let offsets = [[0.0, 0.0], [0.5, 0.0], [0.0, 0.5], [0.5, 0.5]];
    let log_counts: Vec<f64> = scales
        .iter()
        .map(|&size| {
            let total: f64 = offsets
                .iter()
                .map(|off| {
                    let origin: Vec<f64> = lo
                        .coords()
                        .iter()
                        .enumerate()
                        .map(|(i, &c)| c - size * off.get(i).copied().unwrap_or(0.0))
                        .collect();
                    (count_boxes(s, &origin, size) as f64).ln()
                })
                .sum();
            total / offsets.len() as f64
        })
        .collect();
    let xs: Vec<f64> = scales.iter().map(|s| -s.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, log_counts.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&log_counts).map(|(x, y)| (x - mx) * (y - my)).sum();
    let dim = sxy / sxx;
    let ss: f64 = xs.iter().zip(&log_counts).map(|(x, y)| (y - my - dim * (x - mx)).powi(2)).sum();
    Ok(BoxDimension { dim, residual: (ss / n).sqrt(), scales, log_counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{snowflake, AngleSchedule};
    use crate::geometry::Point;

    #[test]
    fn segment_and_circle_are_one_dimensional() {
        let seg: Vec<Point> = (0..=100_000).map(|i| Point::new2(i as f64 / 100_000.0, 0.3 * i as f64 / 100_000.0)).collect();
        let d = box_dimension(&PointSet::new(2, seg).unwrap(), 1e-3, 0.25).unwrap();
        assert!((d.dim - 1.0).abs() < 0.05, "{}", d.dim);
        let circle = PointSet::new(2, crate::sampling::sphere_points(2, 100_000)).unwrap();
        let d = box_dimension(&circle, 1e-3, 0.25).unwrap();
        assert!((d.dim - 1.0).abs() < 0.05, "{}", d.dim);
    }

    #[test]
    fn koch_dimension() {
        let c = snowflake(&AngleSchedule::constant(std::f64::consts::FRAC_PI_3, 7).unwrap()).unwrap();
        let d = box_dimension(&c.polyline, 2e-3, 0.25).unwrap();
        assert!((d.dim - 4f64.ln() / 3f64.ln()).abs() < 0.05, "{} {}", d.dim, d.residual);
    }

    #[test]
    fn short_span_is_rejected() {
        let s = PointSet::new(2, vec![Point::new2(0.0, 0.0), Point::new2(1.0, 1.0)]).unwrap();
        assert!(box_dimension(&s, 0.01, 1.0).is_ok());
        assert!(matches!(box_dimension(&s, 0.1, 9.0), Err(Error::InsufficientScaleSpan(_))));
        assert!(box_dimension(&s, 1.0, 0.5).is_err());
    }
}
