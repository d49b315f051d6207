//! Dini-condition verdicts for distortion and quasisymmetry profiles.

use serde::{Deserialize, Serialize};

use super::majorant::{build_majorant, ScaleFunction};
use super::quad::{dini_integral, DiniConfig, DiniReport, DiniSource, ScaleProfile, Verdict};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    Yes,
    No,
    Inconclusive,
}

impl From<Verdict> for Hypothesis {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Finite => Hypothesis::Yes,
            Verdict::Divergent => Hypothesis::No,
            Verdict::Inconclusive => Hypothesis::Inconclusive,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectifiabilityVerdict {
    /// `∫ (M log 1/M)² dt/t` for the majorant `M` of the distortion profile.
    pub distortion_condition: DiniReport,
    pub majorant_b: f64,
    pub zero_profile: bool,
    /// `∫ H̃² dt/t` for the quasisymmetry profile, when given.
    pub qs_condition: Option<DiniReport>,
    pub distortion_hypothesis: Hypothesis,
    pub qs_hypothesis: Option<Hypothesis>,
}

pub fn classify_rectifiability(
    k_profile: &ScaleProfile,
    h_profile: Option<&ScaleProfile>,
    cfg: &DiniConfig,
) -> Result<RectifiabilityVerdict> {
    let m = build_majorant(k_profile);
    let (t_lo, mut t_hi) = k_profile.t_range();
    // the log weight needs M < 1; M is non-decreasing so keep the scales below
    // the first knot where it reaches 1
    if let Some(i) = m.knots.iter().position(|k| k.1 >= 1.0) {
        t_hi = if i == 0 { t_lo } else { m.knots[i - 1].0 };
    }
    let distortion_condition = if t_hi <= t_lo {
        DiniReport {
            value: f64::NAN,
            infinite: false,
            verdict: Verdict::Inconclusive,
            p: 2.0,
            log_weighted: true,
            t_min: t_lo,
            t_max: t_hi,
            lower_cutoff: t_lo,
            tail_estimate: f64::NAN,
            fitted_exponent: None,
            decades: 0,
            diagnostic: Some("majorant is at least 1 at every scale".into()),
        }
    } else if m.zero_profile {
        // the substitute M(t) = t only serves the change of variables; the
        // condition itself is evaluated on the vanishing profile
        dini_integral(&DiniSource::Profile(k_profile), 2.0, true, t_lo, t_hi, cfg)?
    } else {
        let f = |t: f64| m.value(t);
        dini_integral(&DiniSource::Analytic(&f), 2.0, true, t_lo, t_hi, cfg)?
    };
    let qs_condition = match h_profile {
        Some(h) => {
            let (a, b) = h.t_range();
            Some(dini_integral(&DiniSource::Profile(h), 2.0, false, a, b, cfg)?)
        }
        None => None,
    };
    Ok(RectifiabilityVerdict {
        distortion_hypothesis: distortion_condition.verdict.into(),
        qs_hypothesis: qs_condition.as_ref().map(|r| r.verdict.into()),
        distortion_condition,
        majorant_b: m.b,
        zero_profile: m.zero_profile,
        qs_condition,
    })
}
