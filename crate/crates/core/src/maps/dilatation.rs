//! Maximal dilatation `K_f(Ω) = ess sup max(‖f′‖ⁿ/|J_f|, |J_f|/ℓ(f′)ⁿ)`.
//!
//! The supremum is taken over deterministic Halton samples of the region, so
//! the estimate is a lower bound that is exact whenever both quotients are
//! constant (linear maps, radial stretches).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exec;
use crate::geometry::point::{same_dim, Point};
use crate::maps::spec::{extreme_singular_values, jac_det, MapSpec};
use crate::sampling::{annulus_point, ball_point, Halton};

pub const DEFAULT_SAMPLES: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Ball { center: Point, radius: f64 },
    /// `A_t = {1 - t < |x| < 1 + t}`.
    Annulus { t: f64 },
}

impl Region {
    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid("ball radius must be positive"));
        }
        Ok(Region::Ball { center, radius })
    }

    pub fn annulus(t: f64) -> Result<Self> {
        if !(t > 0.0 && t < 1.0) {
            return Err(invalid(format!("annulus parameter must lie in (0, 1), got {t}")));
        }
        Ok(Region::Annulus { t })
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Region::Ball { center, radius } => {
                same_dim(dim, center.dim())?;
                Region::ball(*center, *radius).map(|_| ())
            }
            Region::Annulus { t } => Region::annulus(*t).map(|_| ()),
        }
    }

    /// The `k`-th deterministic sample.
    pub fn sample(&self, dim: usize, h: &Halton, k: usize) -> Point {
        let u = h.point(k);
        match self {
            Region::Ball { center, radius } => ball_point(center, *radius, &u),
            Region::Annulus { t } => annulus_point(dim, *t, &u),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilatationEstimate {
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "K_tilde")]
    pub k_tilde: f64,
    pub sample_count: usize,
    pub region: Region,
    /// Sample where the larger quotient was attained.
    pub witness: Point,
}

/// Both dilatation quotients of `f` at `x`, as `max(outer, inner)`.
pub fn pointwise_dilatation(f: &MapSpec, x: &Point) -> Result<f64> {
    let dim = f.dim();
    let j = f.jac3(x)?;
    let det = jac_det(&j, dim).abs();
    if det < 1e-300 {
        return Err(Error::DegenerateJacobian { det });
    }
    let (hi, lo) = extreme_singular_values(&j, dim);
    let n = dim as i32;
    Ok((hi.powi(n) / det).max(det / lo.powi(n)))
}

pub fn dilatation(f: &MapSpec, region: &Region, samples: usize) -> Result<DilatationEstimate> {
    region.validate(f.dim())?;
    if samples == 0 {
        return Err(invalid("sample count must be at least 1"));
    }
    let dim = f.dim();
    let dims = if dim == 2 { 2 } else { 3 };
    let halton = Halton::new(dims, 0);
    let vals = exec::map_range(samples, |k| {
        let x = region.sample(dim, &halton, k);
        pointwise_dilatation(f, &x).map(|q| (q, x))
    });
    let mut best = (1.0, region.sample(dim, &halton, 0));
    for v in vals {
        let (q, x) = v?;
        if q > best.0 {
            best = (q, x);
        }
    }
    Ok(DilatationEstimate { k: best.0, k_tilde: best.0 - 1.0, sample_count: samples, region: region.clone(), witness: best.1 })
}

/// `K̃_f(A_t)` for each `t`. Annuli are nested, so the profile is the running
/// maximum of the per-annulus estimates taken from the smallest `t` upward,
/// which makes it non-decreasing in `t`. Output follows input order.
pub fn annulus_dilatation_profile(f: &MapSpec, t_list: &[f64], samples: usize) -> Result<Vec<(f64, f64)>> {
    let mut order: Vec<usize> = (0..t_list.len()).collect();
    order.sort_by(|&a, &b| t_list[a].total_cmp(&t_list[b]));
    let mut out = vec![(0.0, 0.0); t_list.len()];
    let mut running = 0.0f64;
    for i in order {
        let est = dilatation(f, &Region::annulus(t_list[i])?, samples)?;
        running = running.max(est.k_tilde);
        out[i] = (t_list[i], running);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_ball(dim: usize) -> Region {
        Region::ball(Point::zero(dim), 1.0).unwrap()
    }

    #[test]
    fn identity_is_conformal() {
        for dim in [2, 3] {
            let e = dilatation(&MapSpec::identity(dim).unwrap(), &unit_ball(dim), 1000).unwrap();
            assert_eq!(e.k, 1.0);
            assert_eq!(e.k_tilde, 0.0);
        }
    }

    #[test]
    fn diagonal_map_has_k_two() {
        let e = dilatation(&MapSpec::diag(&[2.0, 1.0]).unwrap(), &unit_ball(2), 2000).unwrap();
        assert!((e.k - 2.0).abs() < 1e-9);
        assert_eq!(e.k_tilde, e.k - 1.0);
    }

    #[test]
    fn radial_stretch_closed_forms() {
        for (dim, a) in [(2usize, 0.5f64), (2, 0.8), (3, 0.5), (3, 1.5), (2, 2.0)] {
            let want = if a < 1.0 { (1.0 / a).max(a.powi(1 - dim as i32)) } else { a.max(a.powi(dim as i32 - 1)) };
            let e = dilatation(&MapSpec::radial_stretch(dim, a).unwrap(), &Region::annulus(0.5).unwrap(), 500).unwrap();
            assert!((e.k - want).abs() < 1e-9 * want, "n={dim} a={a}: {} vs {want}", e.k);
        }
    }

    #[test]
    fn profile_of_radial_stretch_is_constant() {
        let p = annulus_dilatation_profile(&MapSpec::radial_stretch(2, 0.8).unwrap(), &[0.5, 0.1, 0.01], 300).unwrap();
        for (_, k) in &p {
            assert!((k - 0.25).abs() < 1e-9);
        }
        assert_eq!(p[1].0, 0.1);
    }

    #[test]
    fn blend_is_conformal_near_sphere() {
        let b = MapSpec::radial_blend(2, 1.0, 0.8, 1.1, 1.5).unwrap();
        let p = annulus_dilatation_profile(&b, &[0.01, 0.05, 0.09, 0.3, 0.6], 4000).unwrap();
        assert!(p[..3].iter().all(|(_, k)| *k == 0.0));
        assert!(p[3].1 > 0.0);
        assert!(p[4].1 >= p[3].1);
    }

    #[test]
    fn region_validation() {
        assert!(Region::annulus(1.0).is_err());
        assert!(Region::ball(Point::zero(2), 0.0).is_err());
        let f = MapSpec::identity(2).unwrap();
        assert!(dilatation(&f, &unit_ball(3), 10).is_err());
        assert!(dilatation(&f, &unit_ball(2), 0).is_err());
    }

    #[test]
    fn similarity_invariance() {
        let f = MapSpec::linear(2, &[vec![1.3, 0.2], vec![0.1, 0.8]]).unwrap();
        let base = dilatation(&f, &unit_ball(2), 500).unwrap().k;
        let rot = MapSpec::rotation2(0.7).unwrap();
        let g = MapSpec::composite(vec![MapSpec::scaling(2, 3.0).unwrap(), f, rot]).unwrap();
        let k = dilatation(&g, &unit_ball(2), 500).unwrap().k;
        assert!((k - base).abs() < 1e-12 * base);
    }
}
