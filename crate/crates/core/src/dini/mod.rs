//! Dini integrals near scale zero, monotone majorants and rectifiability verdicts.

mod majorant;
mod quad;
mod rectifiability;

pub use majorant::{build_majorant, phi_change_of_vars, ChangeOfVars, MajorantModel, PowerLaw, ScaleFunction, MAJORANT_CAP};
pub use quad::{
    classify_increments, dini_integral, DiniConfig, DiniReport, DiniSource, ProfileSource, ScaleProfile, SeriesVerdict, Verdict,
};
pub use rectifiability::{classify_rectifiability, Hypothesis, RectifiabilityVerdict};
