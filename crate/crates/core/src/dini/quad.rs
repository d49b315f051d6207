//! `∫ w(g(t))^p dt/t` near `t = 0` with `w(g) = g` or `g log(1/g)`.
//!
//! With `u = log(1/t)` the integral becomes `∫ w(g(e^{−u}))^p du`, evaluated
//! by the composite trapezoid rule on a uniform grid aligned to decades of
//! `t`. Convergence is judged from the per-decade increments: a power-law fit
//! `d_k ∝ u_k^{−q}` with `q ≤ 1.1` is divergent, otherwise the tail
//! `∫_U^∞` is extrapolated and the integral is finite when both the last
//! relative increment and the relative tail are small.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exec;

const DECADE: f64 = std::f64::consts::LN_10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileSource {
    Measured,
    Analytic,
}

/// Samples `(t, value)` of a non-negative function of scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleProfile {
    samples: Vec<(f64, f64)>,
    pub source: ProfileSource,
}

impl ScaleProfile {
    pub fn new(samples: Vec<(f64, f64)>, source: ProfileSource) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySet);
        }
        for w in samples.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(invalid("profile scales must be strictly increasing"));
            }
        }
        for &(t, v) in &samples {
            if !(t > 0.0 && t <= 1.0) {
                return Err(invalid(format!("profile scale {t} outside (0, 1]")));
            }
            if !v.is_finite() {
                return Err(invalid(format!("profile value at t = {t} is not finite")));
            }
            if v < 0.0 {
                return Err(invalid(format!("negative profile value {v} at t = {t}")));
            }
        }
        Ok(ScaleProfile { samples, source })
    }

    /// Samples an analytic function at `per_decade` log-spaced points between
    /// `t_min` and `t_max`.
    pub fn from_fn(f: impl Fn(f64) -> f64, t_min: f64, t_max: f64, per_decade: usize) -> Result<Self> {
        let (a, b) = (t_min.log10(), t_max.log10());
        let n = (((b - a) * per_decade as f64).ceil() as usize).max(1);
        let samples = (0..=n)
            .map(|i| {
                let t = 10f64.powf(a + (b - a) * i as f64 / n as f64);
                (t, f(t))
            })
            .collect();
        Self::new(samples, ProfileSource::Analytic)
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.samples[0].0, self.samples[self.samples.len() - 1].0)
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|s| s.1 == 0.0)
    }

    /// CSV with columns `t,value`, one sample per row.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,value")?;
        for (t, v) in &self.samples {
            writeln!(w, "{t:?},{v:?}")?;
        }
        Ok(())
    }

    /// Reads `t,value` rows in any order; `#` lines and a header row are
    /// skipped.
    pub fn read_csv<R: BufRead>(r: R, source: ProfileSource) -> Result<Self> {
        let mut samples = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('t') {
                continue;
            }
            let bad = || Error::Parse(format!("line {}: expected `t,value`", lineno + 1));
            let (t, v) = line.split_once(',').ok_or_else(bad)?;
            let t: f64 = t.trim().parse().map_err(|_| bad())?;
            let v: f64 = v.trim().parse().map_err(|_| bad())?;
            samples.push((t, v));
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self::new(samples, source)
    }

    /// Linear interpolation in `log t`; clamps outside the sampled range.
    pub fn value_at(&self, t: f64) -> f64 {
        let s = &self.samples;
        let k = s.partition_point(|p| p.0 < t);
        if k == 0 {
            return s[0].1;
        }
        if k == s.len() {
            return s[s.len() - 1].1;
        }
        let (t0, v0) = s[k - 1];
        let (t1, v1) = s[k];
        let w = (t.ln() - t0.ln()) / (t1.ln() - t0.ln());
        v0 + w * (v1 - v0)
    }
}

/// What is being integrated.
pub enum DiniSource<'a> {
    Profile(&'a ScaleProfile),
    Analytic(&'a (dyn Fn(f64) -> f64 + Sync)),
}

impl DiniSource<'_> {
    fn eval(&self, t: f64) -> f64 {
        match self {
            DiniSource::Profile(p) => p.value_at(t),
            DiniSource::Analytic(f) => f(t),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiniConfig {
    pub nodes_per_decade: usize,
    /// Largest acceptable last-decade increment relative to the total.
    pub cauchy_tol: f64,
    /// Largest acceptable extrapolated tail relative to the total.
    pub tail_tol: f64,
    /// Fitted decay exponents at or below this are divergent.
    pub divergence_exponent: f64,
    /// Analytic sources are followed down to this scale.
    pub floor_t: f64,
}

impl Default for DiniConfig {
    fn default() -> Self {
        DiniConfig { nodes_per_decade: 1000, cauchy_tol: 1e-3, tail_tol: 0.1, divergence_exponent: 1.1, floor_t: 1e-300 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Finite,
    Divergent,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiniReport {
    /// Integral over the requested range (over the evaluated part of it when
    /// `t_min = 0`).
    pub value: f64,
    /// Set when `t_min = 0` and the integral diverges.
    pub infinite: bool,
    pub verdict: Verdict,
    pub p: f64,
    pub log_weighted: bool,
    pub t_min: f64,
    pub t_max: f64,
    /// Smallest scale actually evaluated.
    pub lower_cutoff: f64,
    /// Extrapolated `∫_0^{lower_cutoff}` relative to the evaluated total.
    pub tail_estimate: f64,
    pub fitted_exponent: Option<f64>,
    pub decades: usize,
    pub diagnostic: Option<String>,
}

/// `w(g)^p`, with `0 log(1/0) = 0`.
fn integrand(g: f64, t: f64, p: f64, log_weighted: bool) -> Result<f64> {
    if g < 0.0 || g.is_nan() {
        return Err(invalid(format!("negative profile value {g} at t = {t}")));
    }
    if g == 0.0 {
        return Ok(0.0);
    }
    if log_weighted {
        if g > 1.0 {
            return Err(Error::LogWeightUndefined { t, value: g });
        }
        Ok((g * (1.0 / g).ln()).powf(p))
    } else {
        Ok(g.powf(p))
    }
}

/// Trapezoid rule for `∫_{u0}^{u1} F(u) du` on `m` intervals.
fn trapezoid(src: &DiniSource<'_>, u0: f64, u1: f64, m: usize, p: f64, lw: bool) -> Result<f64> {
    let h = (u1 - u0) / m as f64;
    let vals = exec::map_range(m + 1, |i| {
        let u = if i == m { u1 } else { u0 + i as f64 * h };
        let t = (-u).exp();
        integrand(src.eval(t), t, p, lw).map(|v| if i == 0 || i == m { 0.5 * v } else { v })
    });
    let vals = vals.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(h * exec::pairwise_sum(&vals))
}

/// Classification of a series of non-negative increments `d_k` located at
/// abscissae `x_k > 0` (decade midpoints in `u`, or generation numbers).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesVerdict {
    pub verdict: Verdict,
    pub fitted_exponent: Option<f64>,
    /// Extrapolated remaining sum relative to the total.
    pub tail_estimate: f64,
    /// Last increment relative to the total.
    pub last_relative: f64,
}

/// Power-law decay test on `d_k ∝ x_k^{−q}` over the trailing half of the
/// series (at least three terms). `spacing` is the abscissa step, so the
/// remaining sum is `∫_X^∞ (d/spacing)(x/X)^{−q} dx = X d / (spacing (q−1))`.
pub fn classify_increments(xs: &[f64], ds: &[f64], spacing: f64, cfg: &DiniConfig) -> SeriesVerdict {
    let total: f64 = exec::pairwise_sum(ds);
    let n = ds.len();
    let inconclusive = |q| SeriesVerdict { verdict: Verdict::Inconclusive, fitted_exponent: q, tail_estimate: f64::NAN, last_relative: f64::NAN };
    if n < 2 {
        return inconclusive(None);
    }
    if total == 0.0 {
        return SeriesVerdict { verdict: Verdict::Finite, fitted_exponent: None, tail_estimate: 0.0, last_relative: 0.0 };
    }
    let last_relative = ds[n - 1] / total;
    if ds[n - 1] == 0.0 || last_relative < 1e-15 {
        return SeriesVerdict { verdict: Verdict::Finite, fitted_exponent: None, tail_estimate: last_relative, last_relative };
    }
    let w = (n / 2).max(3).min(n);
    let pts: Vec<(f64, f64)> =
        xs[n - w..].iter().zip(&ds[n - w..]).filter(|(_, d)| **d > 0.0).map(|(x, d)| (x.ln(), d.ln())).collect();
    if pts.len() < 2 {
        return inconclusive(None);
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / m, sy / m);
    let (sxx, sxy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + (p.0 - mx).powi(2), a.1 + (p.0 - mx) * (p.1 - my)));
    if sxx == 0.0 {
        return inconclusive(None);
    }
    let q = -sxy / sxx;
    if q <= cfg.divergence_exponent {
        return SeriesVerdict { verdict: Verdict::Divergent, fitted_exponent: Some(q), tail_estimate: f64::INFINITY, last_relative };
    }
    let x_end = xs[n - 1] + 0.5 * spacing;
    let tail = x_end * ds[n - 1] / (spacing * (q - 1.0)) / total;
    let verdict = if last_relative < cfg.cauchy_tol && tail < cfg.tail_tol { Verdict::Finite } else { Verdict::Inconclusive };
    SeriesVerdict { verdict, fitted_exponent: Some(q), tail_estimate: tail, last_relative }
}

pub fn dini_integral(
    src: &DiniSource<'_>,
    p: f64,
    log_weighted: bool,
    t_min: f64,
    t_max: f64,
    cfg: &DiniConfig,
) -> Result<DiniReport> {
    if !(t_min >= 0.0 && t_min < t_max && t_max <= 1.0) {
        return Err(invalid(format!("need 0 ≤ t_min < t_max ≤ 1, got ({t_min}, {t_max})")));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(invalid("exponent p must be positive"));
    }
    let mut u_lo = -t_max.ln();
    let mut u_hi = if t_min > 0.0 { -t_min.ln() } else { -cfg.floor_t.ln() };
    let mut diagnostic = None;
    if let DiniSource::Profile(pr) = src {
        let (a, b) = pr.t_range();
        u_lo = u_lo.max(-b.ln());
        if -a.ln() < u_hi {
            if t_min == 0.0 || a > t_min {
                diagnostic = Some(format!("profile only sampled down to t = {a:e}"));
            }
            u_hi = -a.ln();
        }
        if u_hi <= u_lo {
            return Err(invalid("profile does not overlap the requested range"));
        }
    }
    let m = cfg.nodes_per_decade.max(2);

    // decade-aligned sweep for the verdict, followed to the floor for
    // analytic sources with t_min = 0
    let u_sweep_end = match src {
        DiniSource::Analytic(_) if t_min == 0.0 => -cfg.floor_t.ln(),
        _ => u_hi,
    };
    let mut xs = Vec::new();
    let mut ds = Vec::new();
    let mut u = u_lo;
    let mut running = 0.0;
    let mut tiny_run = 0;
    while u < u_sweep_end - 1e-12 {
        let u_next = (u + DECADE).min(u_sweep_end);
        let frac = (u_next - u) / DECADE;
        let nodes = ((m as f64 * frac).ceil() as usize).max(2);
        let d = trapezoid(src, u, u_next, nodes, p, log_weighted)?;
        running += d;
        // store per full decade so partial last decades do not bias the fit
        xs.push(0.5 * (u + u_next));
        ds.push(d / frac);
        u = u_next;
        if running > 0.0 && d <= 1e-17 * running {
            tiny_run += 1;
            if tiny_run >= 3 {
                break;
            }
        } else {
            tiny_run = 0;
        }
    }
    let sv = classify_increments(&xs, &ds, DECADE, cfg);

    let value = if t_min == 0.0 && !matches!(src, DiniSource::Profile(_)) {
        running
    } else {
        // exact requested range
        let span = u_hi - u_lo;
        let nodes = ((m as f64 * span / DECADE).ceil() as usize).max(2);
        trapezoid(src, u_lo, u_hi, nodes, p, log_weighted)?
    };
    let decades_spanned = (u_hi.min(u_sweep_end) - u_lo) / DECADE;
    let (verdict, diagnostic) = if decades_spanned < 2.0 {
        (Verdict::Inconclusive, Some(format!("only {decades_spanned:.2} decades of scale available")))
    } else {
        (sv.verdict, diagnostic)
    };
    Ok(DiniReport {
        value,
        infinite: t_min == 0.0 && verdict == Verdict::Divergent,
        verdict,
        p,
        log_weighted,
        t_min,
        t_max,
        lower_cutoff: (-u).exp(),
        tail_estimate: sv.tail_estimate,
        fitted_exponent: sv.fitted_exponent,
        decades: xs.len(),
        diagnostic,
    })
}
