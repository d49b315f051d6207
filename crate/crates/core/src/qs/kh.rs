//! The chain `K_f(Ω) ≤ H_f(Ω)^{n−1}`, checked with both estimators.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::Point;
use crate::maps::{dilatation, MapSpec, Region};
use crate::qs::weak::{weak_qs_constant, QsConfig};

pub const KH_TOLERANCE: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KhReport {
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub dim: usize,
    /// `H^{n−1}`.
    pub bound: f64,
    /// `H^{n−1}(1 + tol) − K`.
    pub margin: f64,
    pub pass: bool,
}

pub fn check_kh_inequality(
    f: &MapSpec,
    center: &Point,
    radius: f64,
    dilatation_samples: usize,
    qs: &QsConfig,
) -> Result<KhReport> {
    let k = dilatation(f, &Region::ball(*center, radius)?, dilatation_samples)?.k;
    let h = weak_qs_constant(f, center, radius, qs)?.h;
    let bound = h.powi(f.dim() as i32 - 1);
    let margin = bound * (1.0 + KH_TOLERANCE) - k;
    Ok(KhReport { k, h, dim: f.dim(), bound, margin, pass: margin >= 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let qs = QsConfig { triple_count: 50_000, seed: 1, ..QsConfig::default() };
        let id = check_kh_inequality(&MapSpec::identity(2).unwrap(), &Point::zero(2), 1.0, 1000, &qs).unwrap();
        assert!(id.pass && id.k == 1.0 && (id.h - 1.0).abs() < 1e-12);
        let d = check_kh_inequality(&MapSpec::diag(&[2.0, 1.0]).unwrap(), &Point::zero(2), 1.0, 1000, &qs).unwrap();
        assert!(d.pass && (d.k - 2.0).abs() < 1e-9 && d.h <= 2.0 + 1e-12);
        let r = check_kh_inequality(&MapSpec::radial_stretch(2, 0.8).unwrap(), &Point::new2(1.0, 0.0), 0.5, 1000, &qs)
            .unwrap();
        assert!(r.pass && (r.k - 1.25).abs() < 1e-9 && r.h >= 1.25, "{r:?}");
    }
}
