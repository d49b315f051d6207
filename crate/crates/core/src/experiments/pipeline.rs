//! Dini-condition verdicts set against direct length measurements.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::report::{ExperimentReport, Outcome};
use super::Subject;
use crate::dini::{classify_increments, classify_rectifiability, dini_integral, DiniConfig, DiniSource, ProfileSource, ScaleProfile, Verdict};
use crate::error::{invalid, Result};
use crate::exec;
use crate::generators::{box_dimension, length_factor, polyline_length, snowflake, sphere_sampler, AngleSchedule, Angles};
use crate::geometry::{local_flatness, reifenberg_profile, sample_spacing, FlatnessConfig, Point, PointSet};
use crate::maps::{annulus_dilatation_profile, MapSpec};
use crate::qs::{weak_qs_nested, QsConfig};
use crate::sampling::sphere_points;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Scales at which the profiles are measured, in `(0, 1)`.
    pub t_list: Vec<f64>,
    pub dilatation_samples: usize,
    pub qs: QsConfig,
    pub centers: usize,
    /// Samples of the image surface in space; planar images are sampled
    /// locally per scale instead.
    pub surface_samples: usize,
    /// Polygon refinements `2^k` points, `k` in this range, for the length of
    /// a planar image curve.
    pub length_levels: (u32, u32),
    /// Generations followed by the length and angle series of a snowflake.
    pub series_generations: usize,
    pub flatness: FlatnessConfig,
    pub dini: DiniConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            t_list: (0..=11).map(|k| 0.5 * 10f64.powf(-0.25 * k as f64)).collect(),
            dilatation_samples: 20_000,
            qs: QsConfig { triple_count: 20_000, refine_iterations: 40, ..QsConfig::default() },
            centers: 8,
            surface_samples: 1 << 16,
            length_levels: (8, 16),
            series_generations: 256,
            flatness: FlatnessConfig::default(),
            dini: DiniConfig::default(),
        }
    }
}

fn increasing(mut v: Vec<(f64, f64)>) -> Result<ScaleProfile> {
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v.dedup_by(|a, b| a.0 == b.0);
    ScaleProfile::new(v, ProfileSource::Measured)
}

fn verdict_value(v: Verdict) -> Value {
    serde_json::to_value(v).expect("verdict serializes")
}

/// Finite ⇔ finite and divergent ⇔ divergent when both are conclusive.
fn agree(a: Verdict, b: Verdict) -> Option<bool> {
    match (a, b) {
        (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => None,
        _ => Some(a == b),
    }
}

pub fn rectifiability_pipeline(subject: &Subject, cfg: &PipelineConfig) -> Result<ExperimentReport> {
    if cfg.t_list.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
        return Err(invalid("profile scales must lie in (0, 1)"));
    }
    let mut rep = ExperimentReport::new("rectifiability_pipeline", json!({ "subject": subject, "config": cfg }));
    let (theta_verdict, length_verdict, extra_ok) = match subject {
        Subject::Map(f) => map_pipeline(f, cfg, &mut rep)?,
        Subject::Snowflake(s) => snowflake_pipeline(s, cfg, &mut rep)?,
    };
    let agreement = match length_verdict {
        Some(l) => agree(theta_verdict, l),
        None => None,
    };
    rep.measured["agreement"] = json!(agreement);
    rep.outcome = match (agreement, extra_ok) {
        (Some(true), true) => Outcome::Pass,
        (Some(false), _) | (_, false) => Outcome::Fail,
        (None, _) => Outcome::Inconclusive,
    };
    Ok(rep)
}

fn map_pipeline(f: &MapSpec, cfg: &PipelineConfig, rep: &mut ExperimentReport) -> Result<(Verdict, Option<Verdict>, bool)> {
    let dim = f.dim();
    let k_profile = increasing(annulus_dilatation_profile(f, &cfg.t_list, cfg.dilatation_samples)?)?;

    let mut radii = cfg.t_list.clone();
    radii.sort_by(|a, b| b.total_cmp(a));
    let centers = sphere_points(dim, cfg.centers);
    let mut h_sup = vec![0.0f64; radii.len()];
    for (i, z) in centers.iter().enumerate() {
        let qs = QsConfig { seed: cfg.qs.seed.wrapping_add(i as u64), ..cfg.qs.clone() };
        for (k, e) in weak_qs_nested(f, z, &radii, &qs)?.iter().enumerate() {
            h_sup[k] = h_sup[k].max(e.h_tilde);
        }
    }
    let h_profile = increasing(radii.iter().copied().zip(h_sup.iter().copied()).collect())?;
    let rect = classify_rectifiability(&k_profile, Some(&h_profile), &cfg.dini)?;

    // flatness of the image at each scale
    let (sup, spacing) = if dim == 2 {
        (planar_theta_profile(f, &centers, &radii, &cfg.flatness)?, None)
    } else {
        let sphere = sphere_sampler(dim, cfg.surface_samples, 0)?;
        let image: Vec<Point> = exec::map_slice(sphere.points(), |z| f.evaluate(z)).into_iter().collect::<Result<_>>()?;
        let spacing = sample_spacing(&image, 256);
        let surface = PointSet::new(dim, image)?;
        let fz: Vec<Point> = centers.iter().map(|z| f.evaluate(z)).collect::<Result<_>>()?;
        let scales: Vec<f64> = radii.iter().copied().filter(|t| *t >= 10.0 * spacing).collect();
        let prof = reifenberg_profile(&surface, &fz, &scales, &cfg.flatness)?;
        let sup = scales.iter().zip(prof.sup_per_scale()).filter_map(|(t, s)| s.map(|s| (*t, s.min(1.0)))).collect();
        (sup, Some(spacing))
    };
    let theta_dini = if sup.len() >= 2 {
        let p = increasing(sup.clone())?;
        let (a, b) = p.t_range();
        Some(dini_integral(&DiniSource::Profile(&p), 2.0, false, a, b, &cfg.dini)?)
    } else {
        None
    };
    let theta_verdict = theta_dini.as_ref().map_or(Verdict::Inconclusive, |r| r.verdict);

    let (length_verdict, lengths) = if dim == 2 {
        let (lo, hi) = cfg.length_levels;
        let lengths: Vec<f64> = (lo..=hi)
            .map(|k| {
                let mut poly: Vec<Point> = sphere_points(2, 1 << k).iter().map(|z| f.evaluate(z)).collect::<Result<_>>()?;
                poly.push(poly[0]);
                Ok(polyline_length(&poly))
            })
            .collect::<Result<_>>()?;
        let ds: Vec<f64> = lengths.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect();
        let xs: Vec<f64> = (1..=ds.len()).map(|k| k as f64).collect();
        (Some(classify_increments(&xs, &ds, 1.0, &cfg.dini).verdict), lengths)
    } else {
        rep.note("length convergence is only measured for planar curves");
        (None, Vec::new())
    };
    // a sufficient condition that holds must not meet a divergent length
    let consistent = !(rect.distortion_hypothesis == crate::dini::Hypothesis::Yes && length_verdict == Some(Verdict::Divergent));
    rep.measured = json!({
        "k_tilde_profile": k_profile.samples(),
        "h_tilde_profile": h_profile.samples(),
        "rectifiability": rect,
        "theta_sup_profile": sup,
        "theta_dini": theta_dini,
        "theta_verdict": verdict_value(theta_verdict),
        "lengths": lengths,
        "length_verdict": length_verdict.map(verdict_value),
        "sample_spacing": spacing,
    });
    Ok((theta_verdict, length_verdict, consistent))
}

/// Image of the arc of the unit circle around `z` that maps onto a
/// neighbourhood of `B(f(z), t)`, sampled with image spacing about `t²/8`.
/// The sampling error `spacing/(2t)` is then `t/16`, below the curvature term
/// `~t/4` of a smooth curve and of the same order in `t`, so it cannot turn a
/// finite flatness integral into a divergent one.
fn local_arc(f: &MapSpec, z: &Point, t: f64) -> Result<Vec<Point>> {
    let phi0 = z[1].atan2(z[0]);
    let at = |phi: f64| f.evaluate(&Point::new2(phi.cos(), phi.sin()));
    let fz = f.evaluate(z)?;
    let mut w = t;
    while w < std::f64::consts::PI && (at(phi0 + w)?.dist(&fz) <= t || at(phi0 - w)?.dist(&fz) <= t) {
        w *= 2.0;
    }
    let w = w.min(std::f64::consts::PI);
    let coarse: Vec<Point> = (0..=64).map(|i| at(phi0 - w + 2.0 * w * i as f64 / 64.0)).collect::<Result<_>>()?;
    let h = t * t / 8.0;
    let n = ((polyline_length(&coarse) / h).ceil() as usize).clamp(64, 2_000_000);
    let pts = exec::map_range(n + 1, |i| at(phi0 - w + 2.0 * w * i as f64 / n as f64));
    pts.into_iter().collect()
}

fn planar_theta_profile(f: &MapSpec, centers: &[Point], radii: &[f64], cfg: &FlatnessConfig) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(radii.len());
    for &t in radii {
        let mut sup = 0.0f64;
        for z in centers {
            let s = PointSet::new(2, local_arc(f, z, t)?)?;
            sup = sup.max(local_flatness(&s, &f.evaluate(z)?, t, cfg)?.theta);
        }
        out.push((t, sup.min(1.0)));
    }
    Ok(out)
}

fn snowflake_pipeline(s: &AngleSchedule, cfg: &PipelineConfig, rep: &mut ExperimentReport) -> Result<(Verdict, Option<Verdict>, bool)> {
    let curve = snowflake(s)?;
    let measured_length = curve.checked_length()?;
    let gens = match &s.angles {
        Angles::List { thetas } => thetas.len(),
        _ => cfg.series_generations.max(s.generations),
    };
    let series = AngleSchedule::new(s.angles.clone(), gens)?.thetas()?;
    let xs: Vec<f64> = (1..=gens).map(|j| j as f64).collect();
    let sq: Vec<f64> = series.iter().map(|t| t * t).collect();
    let theta_series = classify_increments(&xs, &sq, 1.0, &cfg.dini);
    let mut len = 1.0;
    let ds: Vec<f64> = series
        .iter()
        .map(|&t| {
            let next = len * length_factor(t);
            let d = next - len;
            len = next;
            d
        })
        .collect();
    let length_series = classify_increments(&xs, &ds, 1.0, &cfg.dini);

    // measured flatness of the generated polyline, for reference
    let pts = curve.polyline.points();
    let seg = pts.windows(2).map(|w| w[0].dist(&w[1])).fold(f64::INFINITY, f64::min);
    let centers: Vec<Point> = (1..=cfg.centers).map(|i| pts[i * (pts.len() - 1) / (cfg.centers + 1)]).collect();
    let scales: Vec<f64> = (0..).map(|k| 0.25 * 0.5f64.powi(k)).take_while(|t| *t >= 10.0 * seg).collect();
    let sup: Vec<(f64, f64)> = if scales.is_empty() {
        Vec::new()
    } else {
        let prof = reifenberg_profile(&curve.polyline, &centers, &scales, &cfg.flatness)?;
        scales.iter().zip(prof.sup_per_scale()).filter_map(|(t, s)| s.map(|s| (*t, s))).collect()
    };
    let dimension = box_dimension(&curve.polyline, 0.25 * 10f64.powf(-2.0), 0.25).ok().map(|b| b.dim);
    rep.measured = json!({
        "generations": s.generations,
        "measured_length": measured_length,
        "series_generations": gens,
        "theta_series": theta_series,
        "length_series": length_series,
        "final_series_length": len,
        "theta_sup_profile": sup,
        "box_dimension": dimension,
        "theta_verdict": verdict_value(theta_series.verdict),
        "length_verdict": verdict_value(length_series.verdict),
    });
    rep.note("θ-Dini verdict uses the per-generation series Σθ_j² as the proxy for the flatness integral");
    Ok((theta_series.verdict, Some(length_series.verdict), true))
}
