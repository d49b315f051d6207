//! Symbolic test maps with closed-form Jacobians.

use nalgebra::{DMatrix, Matrix3};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::geometry::point::{check_dim, same_dim, Point};

pub const MAPSPEC_SCHEMA: &str = "mapspec-v1";

/// A global map of ℝⁿ built from a few analytic families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapSpecJson", into = "MapSpecJson")]
pub struct MapSpec {
    dim: usize,
    kind: MapKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MapKind {
    Identity,
    /// Row-major `dim × dim` matrix, stored padded to 3×3.
    Linear(Matrix3<f64>),
    /// `x ↦ x |x|^(a-1)`.
    RadialStretch { exponent: f64 },
    /// `x ↦ x |x|^(a(|x|)-1)` with `a` moving from `inner` (for `|x| ≤ r0`) to
    /// `outer` (for `|x| ≥ r1`) along a smoothstep.
    RadialBlend { inner: f64, outer: f64, r0: f64, r1: f64 },
    Translation(Point),
    /// `children[0] ∘ children[1] ∘ …`, applied right to left.
    Composite(Vec<MapSpec>),
}

impl MapSpec {
    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(MapSpec { dim, kind: MapKind::Identity })
    }

    pub fn linear(dim: usize, rows: &[Vec<f64>]) -> Result<Self> {
        check_dim(dim)?;
        if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
            return Err(invalid(format!("linear map needs a {dim}x{dim} matrix")));
        }
        let mut m = Matrix3::zeros();
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        Self::from_matrix(dim, m)
    }

    pub(crate) fn from_matrix(dim: usize, m: Matrix3<f64>) -> Result<Self> {
        check_dim(dim)?;
        let mut m = m;
        if dim == 2 {
            for k in 0..3 {
                m[(2, k)] = 0.0;
                m[(k, 2)] = 0.0;
            }
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(invalid("matrix entries must be finite"));
        }
        let det = block_det(&m, dim);
        if det.abs() <= 1e-12 {
            return Err(invalid(format!("linear map is not invertible (det = {det})")));
        }
        Ok(MapSpec { dim, kind: MapKind::Linear(m) })
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let dim = values.len();
        let rows: Vec<Vec<f64>> =
            (0..dim).map(|i| (0..dim).map(|j| if i == j { values[i] } else { 0.0 }).collect()).collect();
        Self::linear(dim, &rows)
    }

    pub fn scaling(dim: usize, s: f64) -> Result<Self> {
        Self::diag(&vec![s; dim])
    }

    /// Rotation of the plane by `angle`.
    pub fn rotation2(angle: f64) -> Result<Self> {
        let (s, c) = angle.sin_cos();
        Self::linear(2, &[vec![c, -s], vec![s, c]])
    }

    /// Rotation of ℝ³ about `axis` by `angle` (Rodrigues).
    pub fn rotation3(axis: &Point, angle: f64) -> Result<Self> {
        let k = axis.normalized().ok_or_else(|| invalid("zero rotation axis"))?;
        let kx = Matrix3::new(0.0, -k[2], k[1], k[2], 0.0, -k[0], -k[1], k[0], 0.0);
        let m = Matrix3::identity() + kx * angle.sin() + kx * kx * (1.0 - angle.cos());
        Self::from_matrix(3, m)
    }

    pub fn radial_stretch(dim: usize, exponent: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(invalid("radial exponent must be positive"));
        }
        Ok(MapSpec { dim, kind: MapKind::RadialStretch { exponent } })
    }

    pub fn radial_blend(dim: usize, inner: f64, outer: f64, r0: f64, r1: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(inner > 0.0 && outer > 0.0 && inner.is_finite() && outer.is_finite()) {
            return Err(invalid("radial exponents must be positive"));
        }
        if !(r0 > 0.0 && r1 > r0 && r1.is_finite()) {
            return Err(invalid("blend radii must satisfy 0 < r0 < r1"));
        }
        Ok(MapSpec { dim, kind: MapKind::RadialBlend { inner, outer, r0, r1 } })
    }

    pub fn translation(v: Point) -> Result<Self> {
        check_dim(v.dim())?;
        if !v.is_finite() {
            return Err(invalid("translation must be finite"));
        }
        Ok(MapSpec { dim: v.dim(), kind: MapKind::Translation(v) })
    }

    /// `children[0] ∘ children[1] ∘ …`.
    pub fn composite(children: Vec<MapSpec>) -> Result<Self> {
        let first = children.first().ok_or_else(|| invalid("composite needs at least one child"))?;
        let dim = first.dim;
        for c in &children {
            same_dim(dim, c.dim)?;
        }
        Ok(MapSpec { dim, kind: MapKind::Composite(children) })
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &MapSpec) -> Result<Self> {
        Self::composite(vec![self.clone(), inner.clone()])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn evaluate(&self, x: &Point) -> Result<Point> {
        same_dim(self.dim, x.dim())?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &Point) -> Point {
        match &self.kind {
            MapKind::Identity => *x,
            MapKind::Linear(m) => apply(m, x),
            MapKind::RadialStretch { exponent } => {
                let rho = x.norm();
                if rho == 0.0 {
                    *x
                } else {
                    *x * rho.powf(exponent - 1.0)
                }
            }
            MapKind::RadialBlend { .. } => {
                let rho = x.norm();
                if rho == 0.0 {
                    *x
                } else {
                    let (h, _) = self.radial_profile(rho);
                    *x * h
                }
            }
            MapKind::Translation(v) => *x + *v,
            MapKind::Composite(cs) => cs.iter().rev().fold(*x, |y, c| c.eval_unchecked(&y)),
        }
    }

    /// For radial maps `x ↦ x h(ρ)`: returns `(h(ρ), g'(ρ))` with `g = ρ h`.
    fn radial_profile(&self, rho: f64) -> (f64, f64) {
        match self.kind {
            MapKind::RadialStretch { exponent: a } => {
                let h = rho.powf(a - 1.0);
                (h, a * h)
            }
            MapKind::RadialBlend { inner, outer, r0, r1 } => {
                let (s, ds) = smoothstep(rho, r0, r1);
                let a = inner + (outer - inner) * s;
                let da = (outer - inner) * ds;
                let l = rho.ln();
                let h = ((a - 1.0) * l).exp();
                // g = exp(a log ρ), g' = g (a/ρ + a' log ρ) = h (a + ρ a' log ρ)
                (h, h * (a + rho * da * l))
            }
            _ => unreachable!("not a radial map"),
        }
    }

    /// Closed-form Jacobian as a `dim × dim` matrix.
    pub fn jacobian(&self, x: &Point) -> Result<DMatrix<f64>> {
        same_dim(self.dim, x.dim())?;
        Ok(to_dmatrix(&self.jac3(x)?, self.dim))
    }

    /// Jacobian padded to 3×3 (zero third row and column when `dim == 2`).
    pub(crate) fn jac3(&self, x: &Point) -> Result<Matrix3<f64>> {
        Ok(match &self.kind {
            MapKind::Identity | MapKind::Translation(_) => eye(self.dim),
            MapKind::Linear(m) => *m,
            MapKind::RadialStretch { exponent } if *exponent == 1.0 => eye(self.dim),
            MapKind::RadialStretch { .. } | MapKind::RadialBlend { .. } => {
                let rho = x.norm();
                if rho == 0.0 {
                    match self.kind {
                        MapKind::RadialBlend { inner, .. } if inner == 1.0 => return Ok(eye(self.dim)),
                        _ => return Err(Error::JacobianAtOrigin),
                    }
                }
                let (h, dg) = self.radial_profile(rho);
                let u = *x * (1.0 / rho);
                let uc = u.raw();
                let mut m = eye(self.dim) * h;
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        m[(i, j)] += (dg - h) * uc[i] * uc[j];
                    }
                }
                m
            }
            MapKind::Composite(cs) => {
                let mut y = *x;
                let mut j = eye(self.dim);
                for c in cs.iter().rev() {
                    j = c.jac3(&y)? * j;
                    y = c.eval_unchecked(&y);
                }
                j
            }
        })
    }

    /// Central-difference Jacobian with step `1e-6 · max(1, |x|)`.
    pub fn jacobian_fd(&self, x: &Point) -> Result<DMatrix<f64>> {
        same_dim(self.dim, x.dim())?;
        let h = 1e-6 * x.norm().max(1.0);
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            let e = Point::basis(self.dim, j) * h;
            let d = (self.eval_unchecked(&(*x + e)) - self.eval_unchecked(&(*x - e))) * (0.5 / h);
            for i in 0..self.dim {
                m[(i, j)] = d[i];
            }
        }
        Ok(m)
    }

    /// `(L, v)` with `f(x) = L x + v` if the map is affine.
    pub fn affine_part(&self) -> Option<(Matrix3<f64>, Point)> {
        match &self.kind {
            MapKind::Identity => Some((eye(self.dim), Point::zero(self.dim))),
            MapKind::Linear(m) => Some((*m, Point::zero(self.dim))),
            MapKind::RadialStretch { exponent } if *exponent == 1.0 => Some((eye(self.dim), Point::zero(self.dim))),
            MapKind::Translation(v) => Some((eye(self.dim), *v)),
            MapKind::Composite(cs) => {
                let mut acc = (eye(self.dim), Point::zero(self.dim));
                for c in cs.iter().rev() {
                    let (m, v) = c.affine_part()?;
                    acc = (m * acc.0, apply(&m, &acc.1) + v);
                }
                Some(acc)
            }
            _ => None,
        }
    }

    /// Exact weak quasisymmetry constant (on any ball) for affine maps:
    /// the ratio of extreme singular values of the linear part.
    pub fn closed_form_weak_qs(&self) -> Option<f64> {
        let (m, _) = self.affine_part()?;
        let (hi, lo) = extreme_singular_values(&m, self.dim);
        Some(hi / lo)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("map spec serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn eye(dim: usize) -> Matrix3<f64> {
    let mut m = Matrix3::zeros();
    for i in 0..dim {
        m[(i, i)] = 1.0;
    }
    m
}

pub(crate) fn apply(m: &Matrix3<f64>, x: &Point) -> Point {
    let c = x.raw();
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = m[(i, 0)] * c[0] + m[(i, 1)] * c[1] + m[(i, 2)] * c[2];
    }
    Point::with_dim(x.dim(), out)
}

fn block_det(m: &Matrix3<f64>, dim: usize) -> f64 {
    if dim == 2 {
        m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
    } else {
        m.determinant()
    }
}

pub(crate) fn to_dmatrix(m: &Matrix3<f64>, dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |i, j| m[(i, j)])
}

/// Largest and smallest singular values of the leading `dim × dim` block.
pub(crate) fn extreme_singular_values(m: &Matrix3<f64>, dim: usize) -> (f64, f64) {
    if dim == 2 {
        let b = m.fixed_view::<2, 2>(0, 0).into_owned();
        let s = b.singular_values();
        (s.max(), s.min())
    } else {
        let s = m.singular_values();
        (s.max(), s.min())
    }
}

/// Jacobian determinant of the leading `dim × dim` block.
pub(crate) fn jac_det(m: &Matrix3<f64>, dim: usize) -> f64 {
    block_det(m, dim)
}

/// `(s, ds/dρ)` of the cubic smoothstep from `r0` to `r1`.
fn smoothstep(rho: f64, r0: f64, r1: f64) -> (f64, f64) {
    if rho <= r0 {
        return (0.0, 0.0);
    }
    if rho >= r1 {
        return (1.0, 0.0);
    }
    let w = r1 - r0;
    let u = (rho - r0) / w;
    (u * u * (3.0 - 2.0 * u), 6.0 * u * (1.0 - u) / w)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct MapSpecJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema: Option<String>,
    variant: String,
    dim: usize,
    #[serde(default)]
    params: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    children: Vec<MapSpecJson>,
}

impl From<MapSpec> for MapSpecJson {
    fn from(m: MapSpec) -> Self {
        let dim = m.dim;
        let (variant, params, children) = match m.kind {
            MapKind::Identity => ("identity", json!({}), vec![]),
            MapKind::Linear(a) => {
                let rows: Vec<Vec<f64>> = (0..dim).map(|i| (0..dim).map(|j| a[(i, j)]).collect()).collect();
                ("linear", json!({ "matrix": rows }), vec![])
            }
            MapKind::RadialStretch { exponent } => ("radial_stretch", json!({ "exponent": exponent }), vec![]),
            MapKind::RadialBlend { inner, outer, r0, r1 } => {
                ("radial_blend", json!({ "inner": inner, "outer": outer, "r0": r0, "r1": r1 }), vec![])
            }
            MapKind::Translation(v) => ("translation", json!({ "vector": v.coords() }), vec![]),
            MapKind::Composite(cs) => ("composite", json!({}), cs.into_iter().map(|c| c.into()).collect()),
        };
        let mut out = MapSpecJson { schema: None, variant: variant.into(), dim, params, children };
        strip_child_schema(&mut out);
        out.schema = Some(MAPSPEC_SCHEMA.into());
        out
    }
}

fn strip_child_schema(j: &mut MapSpecJson) {
    for c in &mut j.children {
        c.schema = None;
        strip_child_schema(c);
    }
}

fn param(p: &Value, key: &str) -> Result<f64> {
    p.get(key).and_then(Value::as_f64).ok_or_else(|| Error::Parse(format!("missing numeric param `{key}`")))
}

impl TryFrom<MapSpecJson> for MapSpec {
    type Error = Error;

    fn try_from(j: MapSpecJson) -> Result<Self> {
        if let Some(s) = &j.schema {
            if s != MAPSPEC_SCHEMA {
                return Err(Error::Parse(format!("unsupported schema `{s}`")));
            }
        }
        let p = &j.params;
        let spec = match j.variant.as_str() {
            "identity" => MapSpec::identity(j.dim)?,
            "linear" => {
                let rows: Vec<Vec<f64>> = serde_json::from_value(p.get("matrix").cloned().unwrap_or(Value::Null))
                    .map_err(|e| Error::Parse(format!("bad matrix: {e}")))?;
                MapSpec::linear(j.dim, &rows)?
            }
            "radial_stretch" => MapSpec::radial_stretch(j.dim, param(p, "exponent")?)?,
            "radial_blend" => MapSpec::radial_blend(
                j.dim,
                param(p, "inner")?,
                param(p, "outer")?,
                param(p, "r0")?,
                param(p, "r1")?,
            )?,
            "translation" => {
                let v: Vec<f64> = serde_json::from_value(p.get("vector").cloned().unwrap_or(Value::Null))
                    .map_err(|e| Error::Parse(format!("bad vector: {e}")))?;
                let v = Point::from_slice(&v)?;
                same_dim(j.dim, v.dim())?;
                MapSpec::translation(v)?
            }
            "composite" => {
                let cs = j.children.into_iter().map(MapSpec::try_from).collect::<Result<Vec<_>>>()?;
                let m = MapSpec::composite(cs)?;
                same_dim(j.dim, m.dim)?;
                m
            }
            other => return Err(Error::Parse(format!("unknown map variant `{other}`"))),
        };
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, rel: f64) -> bool {
        (a - b).norm() <= rel * b.norm().max(1e-300)
    }

    #[test]
    fn evaluate_examples() {
        let x = Point::new2(0.3, -2.0);
        assert_eq!(MapSpec::identity(2).unwrap().evaluate(&x).unwrap(), x);
        let r = MapSpec::radial_stretch(2, 0.5).unwrap();
        assert_eq!(r.evaluate(&Point::new2(4.0, 0.0)).unwrap(), Point::new2(2.0, 0.0));
        assert_eq!(r.evaluate(&Point::new2(0.0, 0.0)).unwrap(), Point::new2(0.0, 0.0));
        let d = MapSpec::diag(&[2.0, 1.0]).unwrap();
        assert_eq!(d.evaluate(&Point::new2(1.0, 1.0)).unwrap(), Point::new2(2.0, 1.0));
    }

    #[test]
    fn composite_applies_right_to_left() {
        let t = MapSpec::translation(Point::new2(1.0, 0.0)).unwrap();
        let s = MapSpec::scaling(2, 3.0).unwrap();
        let ts = MapSpec::composite(vec![t.clone(), s.clone()]).unwrap();
        assert_eq!(ts.evaluate(&Point::new2(1.0, 1.0)).unwrap(), Point::new2(4.0, 3.0));
        let st = s.after(&t).unwrap();
        assert_eq!(st.evaluate(&Point::new2(1.0, 1.0)).unwrap(), Point::new2(6.0, 3.0));
    }

    #[test]
    fn radial_jacobian_singular_values() {
        let a = 0.7;
        let r = MapSpec::radial_stretch(2, a).unwrap();
        let j = r.jacobian(&Point::new2(1.0, 0.0)).unwrap();
        let s = j.singular_values();
        assert!((s.max() - 1.0).abs() < 1e-14 && (s.min() - a).abs() < 1e-14);
        assert_eq!(r.jacobian(&Point::new2(0.0, 0.0)), Err(Error::JacobianAtOrigin));
        let lin = MapSpec::linear(2, &[vec![1.0, 2.0], vec![0.5, 3.0]]).unwrap();
        let j = lin.jacobian(&Point::new2(5.0, 5.0)).unwrap();
        assert_eq!(j, DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.5, 3.0]));
        assert_eq!(MapSpec::identity(3).unwrap().jacobian(&Point::new3(1.0, 2.0, 3.0)).unwrap(), DMatrix::identity(3, 3));
    }

    fn families(dim: usize) -> Vec<MapSpec> {
        let lin = if dim == 2 {
            MapSpec::linear(2, &[vec![1.2, 0.3], vec![-0.1, 0.9]]).unwrap()
        } else {
            MapSpec::linear(3, &[vec![1.2, 0.3, 0.0], vec![-0.1, 0.9, 0.2], vec![0.0, 0.1, 1.1]]).unwrap()
        };
        let shift = MapSpec::translation(Point::basis(dim, 0) * 0.3).unwrap();
        let rad = MapSpec::radial_stretch(dim, 0.8).unwrap();
        let blend = MapSpec::radial_blend(dim, 1.0, 0.8, 1.1, 1.5).unwrap();
        vec![
            lin.clone(),
            rad.clone(),
            blend.clone(),
            MapSpec::composite(vec![lin.clone(), rad.clone(), shift.clone()]).unwrap(),
            MapSpec::composite(vec![rad, lin, blend]).unwrap(),
        ]
    }

    #[test]
    fn finite_differences_agree_with_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in [2, 3] {
            for f in families(dim) {
                for _ in 0..1000 {
                    let c: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.5..2.5)).collect();
                    let x = Point::from_slice(&c).unwrap();
                    if x.norm() < 0.05 {
                        continue;
                    }
                    let exact = f.jacobian(&x).unwrap();
                    let fd = f.jacobian_fd(&x).unwrap();
                    assert!(close(&fd, &exact, 1e-6), "{f:?} at {x:?}\n{exact}\n{fd}");
                }
            }
        }
    }

    #[test]
    fn blend_is_identity_inside() {
        let b = MapSpec::radial_blend(2, 1.0, 0.8, 1.1, 1.5).unwrap();
        let x = Point::new2(0.6, 0.7);
        assert_eq!(b.evaluate(&x).unwrap(), x);
        assert_eq!(b.jacobian(&Point::new2(0.0, 0.0)).unwrap(), DMatrix::identity(2, 2));
        let far = Point::new2(3.0, 0.0);
        assert!((b.evaluate(&far).unwrap()[0] - 3f64.powf(0.8)).abs() < 1e-14);
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(MapSpec::linear(2, &[vec![1.0, 2.0], vec![2.0, 4.0]]).is_err());
        assert!(MapSpec::radial_stretch(2, 0.0).is_err());
        assert!(MapSpec::composite(vec![]).is_err());
        assert!(MapSpec::composite(vec![MapSpec::identity(2).unwrap(), MapSpec::identity(3).unwrap()]).is_err());
        assert!(MapSpec::identity(4).is_err());
    }

    #[test]
    fn json_round_trip() {
        for f in families(3).into_iter().chain(families(2)) {
            let s = f.to_json();
            assert!(s.contains("\"schema\":\"mapspec-v1\""));
            assert_eq!(MapSpec::from_json(&s).unwrap(), f);
        }
        let text = r#"{"variant":"linear","dim":2,"params":{"matrix":[[2,0],[0,1]]}}"#;
        assert_eq!(MapSpec::from_json(text).unwrap(), MapSpec::diag(&[2.0, 1.0]).unwrap());
        assert!(MapSpec::from_json(r#"{"variant":"spiral","dim":2}"#).is_err());
        assert!(MapSpec::from_json(r#"{"schema":"mapspec-v9","variant":"identity","dim":2}"#).is_err());
    }

    #[test]
    fn affine_closed_form_h() {
        let d = MapSpec::diag(&[2.0, 1.0]).unwrap();
        assert!((d.closed_form_weak_qs().unwrap() - 2.0).abs() < 1e-14);
        let rot = MapSpec::rotation3(&Point::new3(1.0, 1.0, 0.0), 0.4).unwrap();
        let sim = MapSpec::composite(vec![MapSpec::scaling(3, 2.5).unwrap(), rot, MapSpec::translation(Point::new3(1.0, 0.0, 0.0)).unwrap()]).unwrap();
        assert!((sim.closed_form_weak_qs().unwrap() - 1.0).abs() < 1e-12);
        assert!(MapSpec::radial_stretch(2, 0.5).unwrap().closed_form_weak_qs().is_none());
        let (m, v) = sim.affine_part().unwrap();
        let x = Point::new3(0.2, -0.4, 0.9);
        assert!((apply(&m, &x) + v).dist(&sim.evaluate(&x).unwrap()) < 1e-14);
    }
}
