//! Variable-angle Koch curves.
//!
//! Each generation replaces a segment of length `ℓ` by four segments of length
//! `pℓ`, `p = 1/(2(1 + cos θ))`: the outer two along the segment and the inner
//! two tilted by `±θ` to the left, so the pieces chain exactly between the
//! original endpoints.

use std::f64::consts::FRAC_PI_2;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exec;
use crate::geometry::{Point, PointSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Angles {
    Constant { theta: f64 },
    /// `θ_j = c · j^{−q}`.
    Power { c: f64, q: f64 },
    List { thetas: Vec<f64> },
}

impl Angles {
    pub fn theta(&self, j: usize) -> Option<f64> {
        match self {
            Angles::Constant { theta } => Some(*theta),
            Angles::Power { c, q } => Some(c * (j as f64).powf(-q)),
            Angles::List { thetas } => thetas.get(j - 1).copied(),
        }
    }
}

/// Parses an angle in radians, or degrees with a `deg` suffix.
fn parse_angle(s: &str) -> Result<f64> {
    let s = s.trim();
    let (num, scale) = match s.strip_suffix("deg") {
        Some(n) => (n, std::f64::consts::PI / 180.0),
        None => (s, 1.0),
    };
    num.trim().parse::<f64>().map(|v| v * scale).map_err(|_| Error::Parse(format!("bad angle {s:?}")))
}

/// `const:60deg`, `power:c,q` or `list:a,b,...`.
impl FromStr for Angles {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').ok_or_else(|| Error::Parse(format!("angle schedule {s:?} lacks a kind")))?;
        match kind {
            "const" => Ok(Angles::Constant { theta: parse_angle(rest)? }),
            "power" => {
                let (c, q) = rest.split_once(',').ok_or_else(|| Error::Parse("power schedule needs c,q".into()))?;
                let q = q.trim().parse().map_err(|_| Error::Parse(format!("bad exponent {q:?}")))?;
                Ok(Angles::Power { c: parse_angle(c)?, q })
            }
            "list" => Ok(Angles::List { thetas: rest.split([',', '\n']).filter(|t| !t.trim().is_empty()).map(parse_angle).collect::<Result<_>>()? }),
            _ => Err(Error::Parse(format!("unknown angle schedule kind {kind:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleSchedule {
    pub angles: Angles,
    pub generations: usize,
}

impl AngleSchedule {
    pub fn new(angles: Angles, generations: usize) -> Result<Self> {
        let s = AngleSchedule { angles, generations };
        s.thetas()?;
        Ok(s)
    }

    pub fn constant(theta: f64, generations: usize) -> Result<Self> {
        Self::new(Angles::Constant { theta }, generations)
    }

    pub fn power(c: f64, q: f64, generations: usize) -> Result<Self> {
        Self::new(Angles::Power { c, q }, generations)
    }

    /// `θ_1, ..., θ_m`, each checked to lie in `[0, π/2)`.
    pub fn thetas(&self) -> Result<Vec<f64>> {
        (1..=self.generations)
            .map(|j| {
                let t = self.angles.theta(j).ok_or_else(|| invalid(format!("angle list has no entry for generation {j}")))?;
                if !(0.0..FRAC_PI_2).contains(&t) {
                    return Err(invalid(format!("angle {t} at generation {j} outside [0, π/2)")));
                }
                Ok(t)
            })
            .collect()
    }
}

/// `4p = 2/(1 + cos θ)`.
pub fn length_factor(theta: f64) -> f64 {
    2.0 / (1.0 + theta.cos())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SnowflakeCurve {
    pub polyline: PointSet,
    pub schedule: AngleSchedule,
    pub length_factors: Vec<f64>,
    pub initial_length: f64,
    pub closed: bool,
}

impl SnowflakeCurve {
    pub fn generations(&self) -> usize {
        self.schedule.generations
    }

    /// Initial length times the product of the recorded factors.
    pub fn predicted_length(&self) -> f64 {
        self.initial_length * self.length_factors.iter().product::<f64>()
    }

    /// Lengths after 0, 1, ..., m generations from the recorded factors.
    pub fn length_sequence(&self) -> Vec<f64> {
        let mut l = self.initial_length;
        let mut out = vec![l];
        for f in &self.length_factors {
            l *= f;
            out.push(l);
        }
        out
    }

    /// Measured length, checked against the factor product to 1e-9 relative.
    pub fn checked_length(&self) -> Result<f64> {
        let measured = polyline_length(self.polyline.points());
        let predicted = self.predicted_length();
        if ((measured - predicted) / predicted).abs() > 1e-9 {
            return Err(invalid(format!("measured length {measured} disagrees with factor product {predicted}")));
        }
        Ok(measured)
    }
}

fn refine(pts: &[[f64; 2]], theta: f64) -> Vec<[f64; 2]> {
    let p = 0.5 / (1.0 + theta.cos());
    let (c, s) = (theta.cos(), theta.sin());
    let pieces = exec::map_range(pts.len() - 1, |i| {
        let (a, b) = (pts[i], pts[i + 1]);
        let d = [b[0] - a[0], b[1] - a[1]];
        let n = [-d[1], d[0]];
        let q1 = [a[0] + p * d[0], a[1] + p * d[1]];
        let apex = [q1[0] + p * (c * d[0] + s * n[0]), q1[1] + p * (c * d[1] + s * n[1])];
        let q3 = [a[0] + (1.0 - p) * d[0], a[1] + (1.0 - p) * d[1]];
        [a, q1, apex, q3]
    });
    let mut out = Vec::with_capacity(4 * (pts.len() - 1) + 1);
    for piece in pieces {
        out.extend_from_slice(&piece);
    }
    out.push(pts[pts.len() - 1]);
    out
}

fn build(initial: Vec<[f64; 2]>, schedule: &AngleSchedule, closed: bool) -> Result<SnowflakeCurve> {
    let thetas = schedule.thetas()?;
    let initial_length = initial.windows(2).map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1])).sum();
    let mut pts = initial;
    for &t in &thetas {
        pts = refine(&pts, t);
    }
    let points = pts.into_iter().map(|p| Point::new2(p[0], p[1])).collect();
    Ok(SnowflakeCurve {
        polyline: PointSet::new(2, points)?.with_label("snowflake"),
        schedule: schedule.clone(),
        length_factors: thetas.iter().map(|&t| length_factor(t)).collect(),
        initial_length,
        closed,
    })
}

/// Arc over the unit segment from the origin to `e₁`, bumps on the left.
pub fn snowflake(schedule: &AngleSchedule) -> Result<SnowflakeCurve> {
    build(vec![[0.0, 0.0], [1.0, 0.0]], schedule, false)
}

/// Closed curve over the unit equilateral triangle, bumps outward; the last
/// point repeats the first.
pub fn snowflake_closed(schedule: &AngleSchedule) -> Result<SnowflakeCurve> {
    let h = 3f64.sqrt() / 2.0;
    build(vec![[0.0, 0.0], [0.5, h], [1.0, 0.0], [0.0, 0.0]], schedule, true)
}

/// Sum of consecutive distances.
pub fn polyline_length(points: &[Point]) -> f64 {
    let d: Vec<f64> = points.windows(2).map(|w| w[0].dist(&w[1])).collect();
    exec::pairwise_sum(&d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_schedule_is_the_segment() {
        let c = snowflake(&AngleSchedule::constant(0.0, 4).unwrap()).unwrap();
        assert_eq!(c.polyline.len(), 4usize.pow(4) + 1);
        assert!((c.checked_length().unwrap() - 1.0).abs() < 1e-12);
        assert!(c.polyline.points().iter().all(|p| p[1] == 0.0));
        assert!((polyline_length(&[Point::new2(0.0, 0.0), Point::new2(1.0, 0.0)]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn koch_lengths() {
        let s = AngleSchedule::new("const:60deg".parse().unwrap(), 3).unwrap();
        let c = snowflake(&s).unwrap();
        assert!((c.checked_length().unwrap() - 64.0 / 27.0).abs() < 1e-12);
        let last = c.polyline.points()[c.polyline.len() - 1];
        assert!((last[0] - 1.0).abs() < 1e-15 && last[1].abs() < 1e-15);
        // the first bump apex sits at (1/2, √3/6)
        let c1 = snowflake(&AngleSchedule::new("const:60deg".parse().unwrap(), 1).unwrap()).unwrap();
        let apex = c1.polyline.points()[2];
        assert!((apex[0] - 0.5).abs() < 1e-15 && (apex[1] - 3f64.sqrt() / 6.0).abs() < 1e-15);
        let closed = snowflake_closed(&s).unwrap();
        assert!((closed.checked_length().unwrap() - 3.0 * 64.0 / 27.0).abs() < 1e-12);
    }

    #[test]
    fn self_consistency_up_to_ten_generations() {
        for schedule in [AngleSchedule::power(1.0, 1.0, 10).unwrap(), AngleSchedule::power(1.0, 0.5, 10).unwrap()] {
            let c = snowflake(&schedule).unwrap();
            c.checked_length().unwrap();
            let seq = c.length_sequence();
            assert!(seq.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn harmonic_and_root_schedules() {
        let len = |q: f64, m: usize| {
            let s = AngleSchedule::power(1.0, q, m).unwrap();
            s.thetas().unwrap().iter().map(|&t| length_factor(t)).product::<f64>()
        };
        // product oracle: Π 2/(1+cos(1/j)) converges
        let oracle: f64 = (1..=20000).map(|j| 2.0 / (1.0 + (1.0 / j as f64).cos())).product();
        assert!(len(1.0, 2000) < oracle && oracle - len(1.0, 2000) < 1e-3);
        assert!(len(0.5, 64) / len(0.5, 32) > 1.05);
    }

    #[test]
    fn schedule_parsing_and_validation() {
        assert_eq!("power:1,0.5".parse::<Angles>().unwrap(), Angles::Power { c: 1.0, q: 0.5 });
        assert_eq!("list:0.1,0.2".parse::<Angles>().unwrap(), Angles::List { thetas: vec![0.1, 0.2] });
        assert!("spiral:1".parse::<Angles>().is_err());
        assert!(AngleSchedule::constant(FRAC_PI_2, 1).is_err());
        assert!(AngleSchedule::new(Angles::List { thetas: vec![0.1] }, 2).is_err());
        let d = "const:90deg".parse::<Angles>().unwrap();
        assert!(AngleSchedule::new(d, 1).is_err());
    }
}
