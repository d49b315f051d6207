use std::fmt;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A point (or vector) of ℝ² or ℝ³.
///
/// Stored inline as three coordinates; for `dim == 2` the third coordinate is
/// always zero, so norms and inner products need no dimension branch.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point {
    c: [f64; 3],
    dim: u8,
}

impl Point {
    pub const fn new2(x: f64, y: f64) -> Self {
        Point { c: [x, y, 0.0], dim: 2 }
    }

    pub const fn new3(x: f64, y: f64, z: f64) -> Self {
        Point { c: [x, y, z], dim: 3 }
    }

    pub fn zero(dim: usize) -> Self {
        Point { c: [0.0; 3], dim: dim as u8 }
    }

    /// The i-th standard basis vector (0-based).
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut p = Point::zero(dim);
        p.c[i] = 1.0;
        p
    }

    pub fn from_slice(xs: &[f64]) -> Result<Self> {
        match *xs {
            [x, y] => Ok(Point::new2(x, y)),
            [x, y, z] => Ok(Point::new3(x, y, z)),
            _ => Err(Error::UnsupportedDimension(xs.len())),
        }
    }

    /// Builds a point of dimension `dim` from the leading coordinates of `xs`.
    pub(crate) fn with_dim(dim: usize, xs: [f64; 3]) -> Self {
        let mut c = xs;
        if dim == 2 {
            c[2] = 0.0;
        }
        Point { c, dim: dim as u8 }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.c[..self.dim as usize]
    }

    #[inline]
    pub(crate) fn raw(&self) -> [f64; 3] {
        self.c
    }

    #[inline]
    pub fn dot(&self, o: &Point) -> f64 {
        self.c[0] * o.c[0] + self.c[1] * o.c[1] + self.c[2] * o.c[2]
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    #[inline]
    pub fn dist(&self, o: &Point) -> f64 {
        self.dist_sq(o).sqrt()
    }

    #[inline]
    pub fn dist_sq(&self, o: &Point) -> f64 {
        let dx = self.c[0] - o.c[0];
        let dy = self.c[1] - o.c[1];
        let dz = self.c[2] - o.c[2];
        dx * dx + dy * dy + dz * dz
    }

    pub fn normalized(&self) -> Option<Point> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| *self * (1.0 / n))
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }

    pub fn to_dvector(&self) -> nalgebra::DVector<f64> {
        nalgebra::DVector::from_column_slice(self.coords())
    }

    pub fn from_dvector(v: &nalgebra::DVector<f64>) -> Result<Self> {
        Point::from_slice(v.as_slice())
    }

    /// Lexicographic comparison of the coordinates.
    pub fn lex_cmp(&self, o: &Point) -> std::cmp::Ordering {
        for i in 0..3 {
            match self.c[i].total_cmp(&o.c[i]) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        std::cmp::Ordering::Equal
    }
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

pub(crate) fn same_dim(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: a, got: b })
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        let p = Point::from_slice(&v)?;
        if !p.is_finite() {
            return Err(invalid("non-finite coordinate"));
        }
        Ok(p)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.coords().to_vec()
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

impl Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords()[i]
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, o: Point) -> Point {
        Point {
            c: [self.c[0] + o.c[0], self.c[1] + o.c[1], self.c[2] + o.c[2]],
            dim: self.dim,
        }
    }
}

impl AddAssign for Point {
    fn add_assign(&mut self, o: Point) {
        *self = *self + o;
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, o: Point) -> Point {
        Point {
            c: [self.c[0] - o.c[0], self.c[1] - o.c[1], self.c[2] - o.c[2]],
            dim: self.dim,
        }
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, s: f64) -> Point {
        Point { c: [self.c[0] * s, self.c[1] * s, self.c[2] * s], dim: self.dim }
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        self * -1.0
    }
}
