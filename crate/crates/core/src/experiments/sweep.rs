//! `H̃_f(B(w, s)) / ((K − 1) log(1/(K − 1)))` across a family with known `K`.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::report::{ExperimentReport, Outcome};
use super::K_MAX;
use crate::error::{invalid, Result};
use crate::geometry::Point;
use crate::maps::MapSpec;
use crate::qs::{weak_qs_constant, QsConfig};
use crate::special::{radius_threshold, SpecialFnContext, DEFAULT_HOLDER_M};

/// Maps with maximal dilatation `K` on all of ℝⁿ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MapFamily {
    /// `|x|^{a−1} x` with `a = K^{−1/(n−1)}`.
    RadialStretch { dim: usize },
    /// `diag(K^{1/(n−1)}, 1, …)`.
    Diag { dim: usize },
}

impl MapFamily {
    pub fn dim(&self) -> usize {
        match *self {
            MapFamily::RadialStretch { dim } | MapFamily::Diag { dim } => dim,
        }
    }

    pub fn map(&self, k: f64) -> Result<MapSpec> {
        let n = self.dim();
        let e = 1.0 / (n - 1) as f64;
        match self {
            MapFamily::RadialStretch { .. } => MapSpec::radial_stretch(n, k.powf(-e)),
            MapFamily::Diag { .. } => {
                let mut d = vec![1.0; n];
                d[0] = k.powf(e);
                MapSpec::diag(&d)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub qs: QsConfig,
    /// Outer constant `K′ ≥ K` for the radius threshold.
    pub k_prime: f64,
    pub holder_m: f64,
    /// Relative slack when checking that ratios do not increase toward `K = 1`.
    pub noise: f64,
    /// Largest allowed max/min ratio across the grid.
    pub spread: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { qs: QsConfig::default(), k_prime: K_MAX, holder_m: DEFAULT_HOLDER_M, noise: 0.05, spread: 10.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "H_tilde")]
    pub h_tilde: Option<f64>,
    pub ratio: Option<f64>,
    pub log_r: Option<f64>,
    pub flag: Option<String>,
}

pub fn thm31_sweep(family: &MapFamily, k_grid: &[f64], cfg: &SweepConfig) -> Result<ExperimentReport> {
    if k_grid.is_empty() {
        return Err(invalid("empty K grid"));
    }
    let dim = family.dim();
    let mut rep = ExperimentReport::new("thm31_sweep", json!({ "family": family, "K_grid": k_grid, "config": cfg }));
    let ctx = SpecialFnContext::new(dim)?;
    let mut entries = Vec::new();
    for &k in k_grid {
        let mut e = SweepEntry { k, h_tilde: None, ratio: None, log_r: None, flag: None };
        if k == 1.0 {
            e.h_tilde = Some(0.0);
            e.ratio = Some(0.0);
        } else if !(k > 1.0 && k <= K_MAX + 1e-12) {
            e.flag = Some(format!("K = {k} outside (1, 4/3]"));
        } else {
            match radius_threshold(&ctx, k, cfg.k_prime.max(k), cfg.holder_m) {
                Err(err) => e.flag = Some(format!("radius threshold: {err}")),
                Ok(t) => {
                    e.log_r = Some(t.log_r);
                    if !t.r.is_finite() {
                        e.flag = Some("R overflows f64; only log R recorded".into());
                    }
                    // the family has dilatation K everywhere, so every ball
                    // B(w, s) satisfies K_f(B(w, Rs)) ≤ K; take the unit ball
                    let f = family.map(k)?;
                    let h = weak_qs_constant(&f, &Point::zero(dim), 1.0, &cfg.qs)?.h_tilde;
                    e.h_tilde = Some(h);
                    e.ratio = Some(h / ((k - 1.0) * (1.0 / (k - 1.0)).ln()));
                }
            }
        }
        entries.push(e);
    }
    let mut ordered: Vec<(f64, f64)> =
        entries.iter().filter(|e| e.k > 1.0).filter_map(|e| e.ratio.map(|r| (e.k, r))).collect();
    ordered.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (lo, hi) = ordered.iter().fold((f64::INFINITY, 0.0f64), |a, x| (a.0.min(x.1), a.1.max(x.1)));
    let spread = if ordered.is_empty() { f64::NAN } else { hi / lo };
    let monotone = ordered.windows(2).all(|w| w[0].1 <= w[1].1 * (1.0 + cfg.noise));
    rep.measured = json!({ "entries": entries, "spread": spread, "monotone_toward_one": monotone });
    if ordered.len() < 2 {
        rep.outcome = Outcome::Inconclusive;
        rep.note("fewer than two measured entries");
        return Ok(rep);
    }
    rep.compare(spread, cfg.spread, 0.0);
    if !monotone {
        rep.outcome = Outcome::Fail;
        rep.note("ratio increases as K decreases toward 1");
    }
    if entries.iter().any(|e| e.flag.is_some() && e.ratio.is_none()) {
        rep.note("some grid entries were skipped");
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diag_family_matches_closed_form() {
        let cfg = SweepConfig { qs: QsConfig { triple_count: 20_000, ..QsConfig::default() }, ..SweepConfig::default() };
        let r = thm31_sweep(&MapFamily::Diag { dim: 2 }, &[1.0, 1.05, 1.1, 1.2, 1.3], &cfg).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        let entries: Vec<SweepEntry> = serde_json::from_value(r.measured["entries"].clone()).unwrap();
        assert_eq!(entries[0].ratio, Some(0.0));
        let c = 1.0 / (1.0f64 / 0.3).ln();
        for e in &entries[1..] {
            let h = e.h_tilde.unwrap();
            assert!(h <= e.k - 1.0 + 1e-12 && h > (e.k - 1.0) * 0.99, "{e:?}");
            assert!(h <= c * (e.k - 1.0) * (1.0 / (e.k - 1.0)).ln() + 1e-12);
        }
    }

    #[test]
    fn out_of_range_entries_are_flagged() {
        let cfg = SweepConfig { qs: QsConfig { triple_count: 5_000, ..QsConfig::default() }, ..SweepConfig::default() };
        let r = thm31_sweep(&MapFamily::Diag { dim: 2 }, &[1.1, 1.2, 1.5], &cfg).unwrap();
        let entries: Vec<SweepEntry> = serde_json::from_value(r.measured["entries"].clone()).unwrap();
        assert!(entries[2].flag.is_some() && entries[2].ratio.is_none());
        assert!(MapFamily::RadialStretch { dim: 3 }.map(1.21).is_ok());
    }
}
