//! Increasing majorants of a scale profile and the change of variables
//! `φ(t) = t (M(t)/c)^{c/M(t)}`.

use serde::{Deserialize, Serialize};

use super::quad::ScaleProfile;
use crate::error::{invalid, Result};
use crate::exec;

/// Above this the profile is reported as not majorizable.
pub const MAJORANT_CAP: f64 = 1e6;

/// A differentiable function of scale.
pub trait ScaleFunction: Sync {
    fn value(&self, t: f64) -> f64;
    fn derivative(&self, t: f64) -> f64;
}

/// `M(t) = coef · t^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub coef: f64,
    pub exponent: f64,
}

impl ScaleFunction for PowerLaw {
    fn value(&self, t: f64) -> f64 {
        self.coef * t.powf(self.exponent)
    }
    fn derivative(&self, t: f64) -> f64 {
        self.coef * self.exponent * t.powf(self.exponent - 1.0)
    }
}

/// Running maximum of a profile, interpolated as a power law between knots
/// (linearly where a knot is zero), extended below the first knot with the
/// slope of the first rising segment and constant above the last.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajorantModel {
    pub knots: Vec<(f64, f64)>,
    /// Smallest `b` with `M ≤ b g` on the samples; infinite when above the cap.
    pub b: f64,
    /// The profile vanished identically and `M(t) = t` was substituted.
    pub zero_profile: bool,
    lead_exponent: f64,
}

impl MajorantModel {
    pub fn is_majorizable(&self) -> bool {
        self.b.is_finite()
    }

    fn segment(&self, t: f64) -> Segment {
        let k = &self.knots;
        let i = k.partition_point(|p| p.0 < t);
        if i == 0 {
            let (t0, m0) = k[0];
            return Segment::Power { t0, m0, s: self.lead_exponent };
        }
        if i == k.len() {
            return Segment::Power { t0: k[i - 1].0, m0: k[i - 1].1, s: 0.0 };
        }
        let (t0, m0) = k[i - 1];
        let (t1, m1) = k[i];
        if m0 > 0.0 && m1 > 0.0 {
            Segment::Power { t0, m0, s: (m1 / m0).ln() / (t1 / t0).ln() }
        } else {
            Segment::Linear { t0, m0, slope: (m1 - m0) / (t1 - t0) }
        }
    }
}

enum Segment {
    Power { t0: f64, m0: f64, s: f64 },
    Linear { t0: f64, m0: f64, slope: f64 },
}

impl ScaleFunction for MajorantModel {
    fn value(&self, t: f64) -> f64 {
        // exact at the knots, so M ≥ g holds without rounding slack
        if let Ok(i) = self.knots.binary_search_by(|p| p.0.total_cmp(&t)) {
            return self.knots[i].1;
        }
        match self.segment(t) {
            Segment::Power { t0, m0, s } => m0 * (t / t0).powf(s),
            Segment::Linear { t0, m0, slope } => m0 + slope * (t - t0),
        }
    }
    fn derivative(&self, t: f64) -> f64 {
        match self.segment(t) {
            Segment::Power { t0, m0, s } => m0 * s * (t / t0).powf(s) / t,
            Segment::Linear { slope, .. } => slope,
        }
    }
}

pub fn build_majorant(profile: &ScaleProfile) -> MajorantModel {
    let s = profile.samples();
    if profile.is_zero() {
        return MajorantModel {
            knots: s.iter().map(|&(t, _)| (t, t)).collect(),
            b: f64::INFINITY,
            zero_profile: true,
            lead_exponent: 1.0,
        };
    }
    let mut m = 0.0f64;
    let knots: Vec<(f64, f64)> = s
        .iter()
        .map(|&(t, g)| {
            m = m.max(g);
            (t, m)
        })
        .collect();
    let mut b = 1.0f64;
    for (&(_, g), &(_, mk)) in s.iter().zip(&knots) {
        if mk > 0.0 {
            b = b.max(if g > 0.0 { mk / g } else { f64::INFINITY });
        }
    }
    if b > MAJORANT_CAP {
        b = f64::INFINITY;
    }
    let lead_exponent = knots
        .windows(2)
        .find(|w| w[0].1 > 0.0 && w[1].1 > w[0].1)
        .map(|w| (w[1].1 / w[0].1).ln() / (w[1].0 / w[0].0).ln())
        .unwrap_or(0.0);
    MajorantModel { knots, b, zero_profile: false, lead_exponent }
}

/// `φ(t) = t ψ^{1/ψ}` with `ψ = M/c`, valid where `0 < M < c`.
pub struct ChangeOfVars<'a, M: ScaleFunction + ?Sized> {
    pub majorant: &'a M,
    pub c: f64,
}

pub fn phi_change_of_vars<M: ScaleFunction + ?Sized>(majorant: &M, c: f64) -> Result<ChangeOfVars<'_, M>> {
    if !(c > 1.0 && c.is_finite()) {
        return Err(invalid(format!("c must exceed 1, got {c}")));
    }
    Ok(ChangeOfVars { majorant, c })
}

impl<M: ScaleFunction + ?Sized> ChangeOfVars<'_, M> {
    fn psi(&self, t: f64) -> Result<f64> {
        let psi = self.majorant.value(t) / self.c;
        if !(psi > 0.0 && psi < 1.0) {
            return Err(invalid(format!("need 0 < M(t) < c at t = {t}, got M/c = {psi}")));
        }
        Ok(psi)
    }

    /// `log φ(t)`; `φ` itself underflows quickly as `M → 0`.
    pub fn log_phi(&self, t: f64) -> Result<f64> {
        let psi = self.psi(t)?;
        Ok(t.ln() + psi.ln() / psi)
    }

    pub fn phi(&self, t: f64) -> Result<f64> {
        self.log_phi(t).map(f64::exp)
    }

    /// `φ′/φ = 1/t + (ψ′/ψ²)(1 + log(1/ψ))`.
    pub fn log_derivative(&self, t: f64) -> Result<f64> {
        let psi = self.psi(t)?;
        let dpsi = self.majorant.derivative(t) / self.c;
        Ok(1.0 / t + dpsi / (psi * psi) * (1.0 + (1.0 / psi).ln()))
    }

    /// Central difference of `log φ` in `t`.
    pub fn log_derivative_fd(&self, t: f64) -> Result<f64> {
        let h = 1e-6 * t;
        Ok((self.log_phi(t + h)? - self.log_phi(t - h)?) / (2.0 * h))
    }

    /// The weighted integral `∫_0^{t0} (M log 1/M)² φ′/φ dt` and its two
    /// pieces `∫ (M log 1/M)² dt/t` and `c² ∫ log²(1/M)(1 + log 1/ψ) ψ′ dt`.
    pub fn two_term_decomposition(&self, t0: f64, nodes_per_decade: usize) -> Result<(f64, f64, f64)> {
        let m = |t: f64| self.majorant.value(t);
        let sq = |t: f64| {
            let v = m(t);
            if v <= 0.0 {
                0.0
            } else {
                (v * (1.0 / v).ln()).powi(2)
            }
        };
        // t φ′/φ = 1 + (t ψ′/ψ²)(1 + log 1/ψ), grouped to stay finite as t → 0
        let lhs = log_quad(
            |t| {
                let psi = self.psi(t)?;
                let tdpsi = t * self.majorant.derivative(t) / self.c;
                Ok(sq(t) * (1.0 + tdpsi / (psi * psi) * (1.0 + (1.0 / psi).ln())))
            },
            t0,
            nodes_per_decade,
        )?;
        let first = log_quad(|t| Ok(sq(t)), t0, nodes_per_decade)?;
        let second = log_quad(
            |t| {
                let psi = self.psi(t)?;
                let dpsi = self.majorant.derivative(t) / self.c;
                let l = (1.0 / m(t)).ln();
                Ok(self.c * self.c * l * l * (1.0 + (1.0 / psi).ln()) * dpsi * t)
            },
            t0,
            nodes_per_decade,
        )?;
        Ok((lhs, first, second))
    }
}

/// `∫_0^{t0} F(t) dt/t` by the trapezoid rule in `u = log(1/t)` down to `t = 1e-300`.
fn log_quad<F: Fn(f64) -> Result<f64> + Sync>(f: F, t0: f64, nodes_per_decade: usize) -> Result<f64> {
    let (u0, u1) = (-t0.ln(), 300.0 * std::f64::consts::LN_10);
    let n = ((u1 - u0) / std::f64::consts::LN_10 * nodes_per_decade as f64).ceil() as usize;
    let h = (u1 - u0) / n as f64;
    let vals = exec::map_range(n + 1, |i| {
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        f((-(u0 + i as f64 * h)).exp()).map(|v| w * v)
    });
    let vals = vals.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(h * exec::pairwise_sum(&vals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dini::ProfileSource;

    fn profile(samples: Vec<(f64, f64)>) -> ScaleProfile {
        ScaleProfile::new(samples, ProfileSource::Measured).unwrap()
    }

    #[test]
    fn increasing_profile_is_its_own_majorant() {
        let p = ScaleProfile::from_fn(|t| t.sqrt(), 1e-6, 1.0, 5).unwrap();
        let m = build_majorant(&p);
        assert_eq!(m.b, 1.0);
        for &(t, g) in p.samples() {
            assert!((m.value(t) - g).abs() < 1e-12);
        }
        // power-law interpolation reproduces √t between knots
        assert!((m.value(2e-3) - 2e-3f64.sqrt()).abs() < 1e-12);
        assert!((m.value(1e-8) - 1e-4).abs() < 1e-12);
    }

    #[test]
    fn dip_sets_b() {
        let p = profile(vec![(0.01, 0.1), (0.1, 0.05), (1.0, 0.2)]);
        let m = build_majorant(&p);
        assert_eq!(m.b, 2.0);
        assert_eq!(m.value(0.1), 0.1);
        let zero_dip = profile(vec![(0.01, 0.1), (0.1, 0.0), (1.0, 0.2)]);
        assert!(!build_majorant(&zero_dip).is_majorizable());
        let z = build_majorant(&profile(vec![(0.01, 0.0), (1.0, 0.0)]));
        assert!(z.zero_profile);
        assert_eq!(z.value(0.5), 0.5);
    }

    #[test]
    fn majorant_contract_on_samples() {
        let p = profile(vec![(1e-4, 0.02), (1e-3, 0.01), (1e-2, 0.05), (1e-1, 0.04), (1.0, 0.3)]);
        let m = build_majorant(&p);
        for (&(t, g), w) in p.samples().iter().zip(m.knots.windows(2).map(|w| w[1].1 >= w[0].1)) {
            assert!(w);
            assert!(m.value(t) >= g && m.value(t) <= m.b * g + 1e-15);
        }
    }

    #[test]
    fn phi_log_derivative_matches_fd() {
        let m = PowerLaw { coef: 1.0, exponent: 0.5 };
        let cv = phi_change_of_vars(&m, 2.0).unwrap();
        for i in 0..=40 {
            let t = 10f64.powf(-4.0 + i as f64 * (4.0 + 0.5f64.log10()) / 40.0);
            let a = cv.log_derivative(t).unwrap();
            let b = cv.log_derivative_fd(t).unwrap();
            assert!(((a - b) / a).abs() < 1e-5, "t={t} {a} {b}");
        }
        assert!(cv.phi(0.5).unwrap() > 0.0);
        assert!(phi_change_of_vars(&PowerLaw { coef: 3.0, exponent: 0.0 }, 2.0).unwrap().log_phi(0.1).is_err());
    }

    #[test]
    fn constant_and_linear_majorants() {
        let m = PowerLaw { coef: 0.4, exponent: 0.0 };
        let cv = phi_change_of_vars(&m, 2.0).unwrap();
        for t in [1e-3, 0.1, 0.7] {
            assert!((cv.log_derivative(t).unwrap() - 1.0 / t).abs() < 1e-12 / t);
            let expect = t * 0.2f64.powf(5.0);
            assert!((cv.phi(t).unwrap() - expect).abs() < 1e-14 * expect.max(1e-300));
        }
        // M = c t, so ψ = t and φ = t · t^{1/t}
        let m = PowerLaw { coef: 2.0, exponent: 1.0 };
        let cv = phi_change_of_vars(&m, 2.0).unwrap();
        for t in [0.05, 0.3, 0.8] {
            assert!((cv.phi(t).unwrap() - t * t.powf(1.0 / t)).abs() < 1e-12);
            let (a, b) = (cv.log_derivative(t).unwrap(), cv.log_derivative_fd(t).unwrap());
            assert!(((a - b) / a).abs() < 1e-5);
        }
        assert!(phi_change_of_vars(&m, 1.0).is_err());
    }

    #[test]
    fn phi_increasing_for_small_t() {
        let p = ScaleProfile::from_fn(|t| 0.5 * t.powf(0.3), 1e-8, 1.0, 3).unwrap();
        let m = build_majorant(&p);
        let cv = phi_change_of_vars(&m, 2.0).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..200 {
            let t = 10f64.powf(-8.0 + 6.0 * i as f64 / 199.0);
            assert!(cv.log_derivative(t).unwrap() > 0.0);
            let lp = cv.log_phi(t).unwrap();
            assert!(lp > prev);
            prev = lp;
        }
    }

    #[test]
    fn decomposition_adds_up() {
        let m = PowerLaw { coef: 1.0, exponent: 0.5 };
        let cv = phi_change_of_vars(&m, 2.0).unwrap();
        let (lhs, a, b) = cv.two_term_decomposition(0.5, 400).unwrap();
        assert!(a.is_finite() && b.is_finite());
        assert!((lhs - a - b).abs() < 1e-8 * lhs.abs().max(1.0), "{lhs} {a} {b}");
    }
}
