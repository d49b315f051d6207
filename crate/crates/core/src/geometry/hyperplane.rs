use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::point::Point;

/// `{y : ⟨y, normal⟩ = offset}` with a unit normal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub normal: Point,
    pub offset: f64,
}

impl Hyperplane {
    pub fn new(normal: Point, offset: f64) -> Result<Self> {
        let n = normal.norm();
        if !(n.is_finite() && n > 0.0) || !offset.is_finite() {
            return Err(invalid("hyperplane normal must be finite and non-zero"));
        }
        let normal = normal * (1.0 / n);
        Ok(Hyperplane { normal, offset: offset / n }.canonical())
    }

    /// The hyperplane through `x` with the given (not necessarily unit) normal.
    pub fn through(x: &Point, normal: &Point) -> Result<Self> {
        let n = normal.normalized().ok_or_else(|| invalid("zero normal"))?;
        Ok(Hyperplane { normal: n, offset: n.dot(x) }.canonical())
    }

    /// Flips the sign so the first non-zero normal coordinate is positive.
    pub fn canonical(self) -> Self {
        let first = self.normal.coords().iter().copied().find(|v| *v != 0.0).unwrap_or(1.0);
        if first < 0.0 {
            Hyperplane { normal: -self.normal, offset: -self.offset }
        } else {
            self
        }
    }

    #[inline]
    pub fn signed_distance(&self, y: &Point) -> f64 {
        y.dot(&self.normal) - self.offset
    }

    #[inline]
    pub fn distance(&self, y: &Point) -> f64 {
        self.signed_distance(y).abs()
    }

    pub fn project(&self, y: &Point) -> Point {
        *y - self.normal * self.signed_distance(y)
    }

    /// Orthonormal basis of the direction space of the plane.
    pub fn tangent_basis(&self) -> Vec<Point> {
        tangent_basis(&self.normal)
    }
}

/// Orthonormal vectors completing the unit vector `n` to a basis.
pub(crate) fn tangent_basis(n: &Point) -> Vec<Point> {
    match n.dim() {
        2 => vec![Point::new2(-n[1], n[0])],
        _ => {
            // axis least aligned with n
            let c = n.raw();
            let k = (0..3).min_by(|&a, &b| c[a].abs().total_cmp(&c[b].abs())).unwrap();
            let e = Point::basis(3, k);
            let u = (e - *n * n.dot(&e)).normalized().expect("n is a unit vector");
            let v = cross(n, &u);
            vec![u, v]
        }
    }
}

pub(crate) fn cross(a: &Point, b: &Point) -> Point {
    Point::new3(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_is_unit_and_canonical() {
        let h = Hyperplane::new(Point::new2(-3.0, 4.0), 10.0).unwrap();
        assert!((h.normal.norm() - 1.0).abs() < 1e-12);
        assert!(h.normal[0] > 0.0);
        assert!((h.offset + 2.0).abs() < 1e-12);
        // same plane after canonicalisation
        let y = Point::new2(-6.0, 0.0 + 10.0 / 4.0 - 4.5);
        let raw = (y.dot(&Point::new2(-3.0, 4.0)) - 10.0) / 5.0;
        assert!((h.signed_distance(&y).abs() - raw.abs()).abs() < 1e-12);
    }

    #[test]
    fn tangent_basis_is_orthonormal() {
        for n in [Point::new3(0.0, 0.0, 1.0), Point::new3(1.0, 2.0, -3.0).normalized().unwrap()] {
            let b = tangent_basis(&n);
            assert_eq!(b.len(), 2);
            for u in &b {
                assert!((u.norm() - 1.0).abs() < 1e-14);
                assert!(u.dot(&n).abs() < 1e-14);
            }
            assert!(b[0].dot(&b[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_normal_rejected() {
        assert!(Hyperplane::new(Point::new2(0.0, 0.0), 1.0).is_err());
    }
}
