//! End-to-end checks of the flatness, dimension, quasisymmetry and
//! rectifiability bounds on built-in maps and snowflake curves.

mod dimension;
mod flatness_bound;
mod lemma;
mod pipeline;
mod report;
mod sweep;

use serde::{Deserialize, Serialize};

use crate::generators::AngleSchedule;
use crate::maps::MapSpec;

pub use dimension::{dimension_bound_check, DimensionConfig, DIMENSION_SLACK};
pub use flatness_bound::{flatness_vs_bound, Calibration, FlatnessBoundConfig};
pub use lemma::{lemma_family, lemma_flat_check, lemma_suite, normalize_pm_e1, LemmaConfig, CONTAINED_RADIUS};
pub use pipeline::{rectifiability_pipeline, PipelineConfig};
pub use report::{ExperimentReport, Outcome};
pub use sweep::{thm31_sweep, MapFamily, SweepConfig, SweepEntry};

/// Largest `H̃` (equivalently `ε`) the flatness bounds are stated for.
pub const EPS_MAX: f64 = 1.0 / 20.0;
/// Largest dilatation the weak quasisymmetry bound is stated for.
pub const K_MAX: f64 = 4.0 / 3.0;
/// Largest `A` in the ring distortion bound.
pub const A_MAX: f64 = 16.0 / 9.0;

/// What an experiment is run on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Subject {
    Map(MapSpec),
    Snowflake(AngleSchedule),
}
