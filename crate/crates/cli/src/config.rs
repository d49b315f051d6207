use std::path::Path;

use qsphere::dini::DiniConfig;
use qsphere::experiments::{
    DimensionConfig, FlatnessBoundConfig, LemmaConfig, MapFamily, PipelineConfig, Subject, SweepConfig,
};
use qsphere::geometry::FlatnessConfig;
use qsphere::qs::QsConfig;
use serde::Deserialize;

use crate::CliError;

pub const CONFIG_SCHEMA: &str = "qsphere-config-v1";

/// Contents of a `--config` file. Every field is optional; command-line
/// flags take precedence over anything set here.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema: Option<String>,
    pub seed: Option<u64>,
    pub subject: Option<Subject>,
    pub family: Option<MapFamily>,
    pub k_grid: Option<Vec<f64>>,
    pub t_list: Option<Vec<f64>>,
    pub centers: Option<Vec<Vec<f64>>>,
    pub dim: Option<usize>,
    pub count: Option<usize>,
    pub eps_max: Option<f64>,
    pub qs: Option<QsConfig>,
    pub flatness: Option<FlatnessConfig>,
    pub dini: Option<DiniConfig>,
    pub lemma: LemmaConfig,
    pub flatness_bound: FlatnessBoundConfig,
    pub dimension: DimensionConfig,
    pub sweep: SweepConfig,
    pub pipeline: PipelineConfig,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
        match cfg.schema.as_deref() {
            Some(CONFIG_SCHEMA) => Ok(cfg),
            Some(other) => Err(CliError::Usage(format!("config schema {other:?} is not {CONFIG_SCHEMA:?}"))),
            None => Err(CliError::Usage(format!("config lacks \"schema\": \"{CONFIG_SCHEMA}\""))),
        }
    }

    /// Pushes the seed and shared sections down into the per-experiment
    /// configs. `seed` is the flag value, which wins over the file.
    pub fn resolve(mut self, seed: Option<u64>) -> Self {
        self.seed = seed.or(self.seed);
        if let Some(qs) = &self.qs {
            self.flatness_bound.qs = qs.clone();
            self.dimension.qs = qs.clone();
            self.sweep.qs = qs.clone();
            self.pipeline.qs = qs.clone();
        }
        if let Some(fl) = &self.flatness {
            self.lemma.flatness = fl.clone();
            self.flatness_bound.flatness = fl.clone();
            self.pipeline.flatness = fl.clone();
        }
        if let Some(d) = &self.dini {
            self.pipeline.dini = d.clone();
        }
        if let Some(t) = &self.t_list {
            self.pipeline.t_list = t.clone();
        }
        if let Some(s) = self.seed {
            for qs in [
                &mut self.flatness_bound.qs,
                &mut self.dimension.qs,
                &mut self.sweep.qs,
                &mut self.pipeline.qs,
            ] {
                qs.seed = s;
            }
            if let Some(qs) = &mut self.qs {
                qs.seed = s;
            }
        }
        self
    }

    pub fn qs(&self) -> QsConfig {
        let mut q = self.qs.clone().unwrap_or_default();
        if let Some(s) = self.seed {
            q.seed = s;
        }
        q
    }
}
