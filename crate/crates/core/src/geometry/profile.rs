//! Tables of θ over (center, scale) pairs.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::exec;
use crate::geometry::flatness::{local_flatness, FlatnessConfig};
use crate::geometry::point::{same_dim, Point};
use crate::geometry::pointset::PointSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub center_index: usize,
    pub center: Point,
    pub scale: f64,
    pub theta: f64,
    pub normal: Point,
    pub spacing: f64,
}

/// An entry that could not be evaluated, e.g. no samples near the center.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissingEntry {
    pub center_index: usize,
    pub scale: f64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatnessProfile {
    pub entries: Vec<ProfileEntry>,
    pub missing: Vec<MissingEntry>,
    /// Scales in the order requested (descending).
    pub scales: Vec<f64>,
}

impl FlatnessProfile {
    /// `sup_x θ(x, r)` for every requested scale; `None` when no center could
    /// be evaluated at that scale.
    pub fn sup_per_scale(&self) -> Vec<Option<f64>> {
        self.scales
            .iter()
            .map(|&r| {
                self.entries.iter().filter(|e| e.scale == r).map(|e| e.theta).fold(None, |m, t| {
                    Some(m.map_or(t, |m: f64| m.max(t)))
                })
            })
            .collect()
    }

    /// Whether `sup θ` is non-increasing as the scale decreases.
    pub fn is_monotone(&self) -> bool {
        let sups: Vec<f64> = self.sup_per_scale().into_iter().flatten().collect();
        sups.windows(2).all(|w| w[1] <= w[0])
    }

    /// Largest requested scale `R` such that the set is (δ, R)-Reifenberg flat
    /// on the sampled grid, i.e. `sup θ ≤ δ` at `R` and every smaller scale.
    pub fn reifenberg_scale(&self, delta: f64) -> Option<f64> {
        let sups = self.sup_per_scale();
        let mut found = None;
        for (r, s) in self.scales.iter().zip(&sups).rev() {
            match s {
                Some(v) if *v <= delta => found = Some(*r),
                _ => break,
            }
        }
        found
    }

    /// Monotone and eventually below each `δ`.
    pub fn is_vanishing(&self, deltas: &[f64]) -> bool {
        self.is_monotone() && deltas.iter().all(|&d| self.reifenberg_scale(d).is_some())
    }

    /// CSV with columns `center_index,scale,theta,n1,...,nn`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let dim = self.entries.first().map_or(2, |e| e.normal.dim());
        let cols: Vec<String> = (1..=dim).map(|i| format!("n{i}")).collect();
        writeln!(w, "center_index,scale,theta,{}", cols.join(","))?;
        for e in &self.entries {
            let n: Vec<String> = e.normal.coords().iter().map(|v| format!("{v:?}")).collect();
            writeln!(w, "{},{:?},{:?},{}", e.center_index, e.scale, e.theta, n.join(","))?;
        }
        Ok(())
    }
}

pub fn reifenberg_profile(
    s: &PointSet,
    centers: &[Point],
    scales: &[f64],
    cfg: &FlatnessConfig,
) -> Result<FlatnessProfile> {
    if scales.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(invalid("scales must be positive"));
    }
    if scales.windows(2).any(|w| w[1] > w[0]) {
        return Err(invalid("scales must be sorted descending"));
    }
    for c in centers {
        same_dim(s.dim(), c.dim())?;
    }
    let ns = scales.len();
    let results = exec::map_range(centers.len() * ns, |k| {
        let (ci, si) = (k / ns, k % ns);
        (ci, si, local_flatness(s, &centers[ci], scales[si], cfg))
    });
    let mut entries = Vec::new();
    let mut missing = Vec::new();
    for (ci, si, res) in results {
        match res {
            Ok(f) => entries.push(ProfileEntry {
                center_index: ci,
                center: centers[ci],
                scale: scales[si],
                theta: f.theta,
                normal: f.plane.normal,
                spacing: f.spacing,
            }),
            Err(e) => missing.push(MissingEntry { center_index: ci, scale: scales[si], reason: e.to_string() }),
        }
    }
    Ok(FlatnessProfile { entries, missing, scales: scales.to_vec() })
}
