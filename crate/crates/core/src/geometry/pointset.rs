use std::io::{BufRead, Write};

use crate::error::{invalid, Error, Result};
use crate::geometry::point::{check_dim, same_dim, Point};

/// A finite sample of a subset of ℝⁿ (n = 2 or 3).
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    points: Vec<Point>,
    pub label: Option<String>,
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<Point>) -> Result<Self> {
        check_dim(dim)?;
        for p in &points {
            same_dim(dim, p.dim())?;
            if !p.is_finite() {
                return Err(invalid("non-finite coordinate in point set"));
            }
        }
        Ok(PointSet { dim, points, label: None })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points of `self` within the closed ball `B(x, r)`, order preserved.
    pub fn restrict(&self, x: &Point, r: f64) -> PointSet {
        let r2 = r * r;
        let points = self.points.iter().copied().filter(|p| p.dist_sq(x) <= r2).collect();
        PointSet { dim: self.dim, points, label: self.label.clone() }
    }

    /// Axis-aligned bounding box `(min, max)`; `None` for an empty set.
    pub fn bounding_box(&self) -> Option<(Point, Point)> {
        let first = *self.points.first()?;
        let (mut lo, mut hi) = (first.raw(), first.raw());
        for p in &self.points[1..] {
            let c = p.raw();
            for i in 0..3 {
                lo[i] = lo[i].min(c[i]);
                hi[i] = hi[i].max(c[i]);
            }
        }
        Some((Point::with_dim(self.dim, lo), Point::with_dim(self.dim, hi)))
    }

    /// Length of the bounding-box diagonal (an upper bound for the diameter).
    pub fn extent(&self) -> f64 {
        self.bounding_box().map(|(lo, hi)| lo.dist(&hi)).unwrap_or(0.0)
    }

    /// Writes the set in the `# dim=n` CSV format.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# dim={}", self.dim)?;
        if let Some(label) = &self.label {
            writeln!(w, "# label={label}")?;
        }
        let names: Vec<String> = (1..=self.dim).map(|i| format!("x{i}")).collect();
        writeln!(w, "{}", names.join(","))?;
        for p in &self.points {
            let row: Vec<String> = p.coords().iter().map(|v| format!("{v:?}")).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is ascii")
    }

    /// Reads the `# dim=n` CSV format. Other `#` lines and a column-name row
    /// are skipped.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut dim: Option<usize> = None;
        let mut label = None;
        let mut points = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                let meta = meta.trim();
                if let Some(d) = meta.strip_prefix("dim=") {
                    dim = Some(d.trim().parse().map_err(|_| Error::Parse(format!("bad dim header: {line}")))?);
                } else if let Some(l) = meta.strip_prefix("label=") {
                    label = Some(l.to_string());
                }
                continue;
            }
            if line.starts_with('x') {
                continue;
            }
            let d = dim.ok_or_else(|| Error::Parse("missing `# dim=n` header".into()))?;
            let vals: std::result::Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let vals = vals.map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            if vals.len() != d {
                return Err(Error::Parse(format!("line {}: expected {d} columns, got {}", lineno + 1, vals.len())));
            }
            points.push(Point::from_slice(&vals)?);
        }
        let dim = dim.ok_or_else(|| Error::Parse("missing `# dim=n` header".into()))?;
        let mut set = PointSet::new(dim, points)?;
        set.label = label;
        Ok(set)
    }
}

/// Median nearest-neighbour distance, estimated on at most `probe` points.
///
/// This is the "sample spacing" that bounds the resolution error of any
/// flatness value computed from the set.
pub fn sample_spacing(points: &[Point], probe: usize) -> f64 {
    let m = points.len();
    if m < 2 {
        return 0.0;
    }
    let stride = (m / probe.max(1)).max(1);
    let mut nn: Vec<f64> = (0..m)
        .step_by(stride)
        .map(|i| {
            let p = points[i];
            points
                .iter()
                .enumerate()
                .filter(|&(j, q)| j != i && q.dist_sq(&p) > 0.0)
                .map(|(_, q)| q.dist_sq(&p))
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
        .filter(|d| d.is_finite())
        .collect();
    if nn.is_empty() {
        return 0.0;
    }
    nn.sort_by(f64::total_cmp);
    nn[nn.len() / 2]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(n: usize) -> PointSet {
        let pts = (0..n)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / n as f64;
                Point::new2(a.cos(), a.sin())
            })
            .collect();
        PointSet::new(2, pts).unwrap()
    }

    #[test]
    fn restrict_keeps_only_points_in_closed_ball() {
        let s = circle(360);
        let x = Point::new2(1.0, 0.0);
        let r = s.restrict(&x, 0.1);
        assert!(!r.is_empty());
        assert!(r.points().iter().all(|p| p.dist(&x) <= 0.1));
        let missing = s.points().iter().filter(|p| p.dist(&x) <= 0.1).count();
        assert_eq!(missing, r.len());
    }

    #[test]
    fn restrict_large_radius_is_identity() {
        let s = circle(50);
        assert_eq!(s.restrict(&Point::new2(0.3, 0.0), 10.0).points(), s.points());
    }

    #[test]
    fn restrict_two_points() {
        let s = PointSet::new(2, vec![Point::new2(0.0, 0.0), Point::new2(1.0, 0.0)]).unwrap();
        let r = s.restrict(&Point::new2(0.0, 0.0), 0.5);
        assert_eq!(r.points(), &[Point::new2(0.0, 0.0)]);
    }

    #[test]
    fn restrict_can_be_empty() {
        let s = circle(10);
        assert!(s.restrict(&Point::new2(5.0, 5.0), 0.1).is_empty());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let s = circle(17).with_label("ring");
        let text = s.to_csv_string();
        assert!(text.starts_with("# dim=2\n"));
        let back = PointSet::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn csv_rejects_missing_header_and_bad_rows() {
        assert!(PointSet::read_csv("1,2\n".as_bytes()).is_err());
        assert!(PointSet::read_csv("# dim=2\n1,2,3\n".as_bytes()).is_err());
        assert!(PointSet::read_csv("# dim=3\n1,2,x\n".as_bytes()).is_err());
    }

    #[test]
    fn mismatched_point_dimension_is_rejected() {
        let e = PointSet::new(2, vec![Point::new3(0.0, 0.0, 0.0)]).unwrap_err();
        assert_eq!(e, Error::DimensionMismatch { expected: 2, got: 3 });
    }

    #[test]
    fn spacing_of_uniform_circle() {
        let s = circle(1000);
        let h = sample_spacing(s.points(), 64);
        let chord = 2.0 * (std::f64::consts::PI / 1000.0).sin();
        assert!((h - chord).abs() < 1e-12);
    }
}
