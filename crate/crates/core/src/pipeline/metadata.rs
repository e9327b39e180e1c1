use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{PipelineError, RunConfig};
use crate::inp::NetworkModel;
use crate::params::{self, Component};

/// Every key the metadata document must carry.
pub const METADATA_KEYS: [&str; 49] = [
    "adj_list",
    "backup_times",
    "batch_size",
    "duration",
    "extreme_dem_rate",
    "fcv_tune",
    "fractional_cpu_usage",
    "gen_batch_size",
    "gpv_tune",
    "head_pump_tune",
    "index_tracers",
    "inp_paths",
    "junction_tune",
    "max_extreme_dem_junctions",
    "mem_per_worker",
    "noise_range",
    "num_cpus",
    "num_samples",
    "odims",
    "okeys",
    "onames",
    "output_path",
    "p_commercial",
    "pbv_tune",
    "pipe_tune",
    "power_pump_tune",
    "pressure_range",
    "profile_commercial",
    "profile_extreme",
    "profile_household",
    "prv_tune",
    "psv_tune",
    "ray_temp_path",
    "reservoir_tune",
    "save_success_inp",
    "sim_outputs",
    "skip_names",
    "summer_amplitude_range",
    "summer_rolling_rate",
    "summer_start",
    "tank_tune",
    "tcv_tune",
    "temp_path",
    "time_consistency",
    "time_step",
    "verbose",
    "yearly_pattern_num_harmonics",
    "yield_worker_generator",
    "zero_dem_rate",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub network: String,
    /// `(source node, link, destination node)` for every link.
    pub adj_list: Vec<(String, String, String)>,
    /// Parameter keys per component class.
    pub okeys: BTreeMap<String, Vec<String>>,
    /// Component names per class.
    pub onames: BTreeMap<String, Vec<String>>,
    /// Series length of every parameter per class.
    pub odims: BTreeMap<String, BTreeMap<String, usize>>,
    #[serde(flatten)]
    pub run: RunConfig,
}

/// Describe a run over `model` (expected in SI with patterns expanded).
pub fn write_metadata(run: &RunConfig, model: &NetworkModel) -> Metadata {
    let mut okeys: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut odims: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    for id in params::present(model) {
        let Some(values) = params::extract(model, id) else {
            continue;
        };
        let c = id.component.key().to_string();
        okeys.entry(c.clone()).or_default().push(id.parameter.key().to_string());
        odims
            .entry(c)
            .or_default()
            .insert(id.parameter.key().to_string(), values.dimension());
    }
    let onames = Component::ALL
        .iter()
        .map(|c| (c.key().to_string(), c.names(model)))
        .filter(|(_, names)| !names.is_empty())
        .collect();
    Metadata {
        network: model.name.clone(),
        adj_list: model.adjacency(),
        okeys,
        onames,
        odims,
        run: run.clone(),
    }
}

impl Metadata {
    /// Markdown document with the metadata as YAML front matter.
    pub fn to_markdown(&self) -> String {
        let yaml = serde_yaml::to_string(self).expect("metadata always serializes");
        let mut doc = format!("---\n{yaml}---\n\n");
        doc.push_str(&format!("# {}\n\n", self.network));
        doc.push_str(&format!(
            "{} scenarios of {} h at a {} h step.\n\n",
            self.run.num_samples, self.run.adg.duration, self.run.adg.time_step
        ));
        doc.push_str("Tables are named `<component>_<parameter>_<index>_<type>_<io>.csv`.\n");
        doc.push_str("Static tables hold one row per scenario, dynamic tables one row per ");
        doc.push_str("scenario and step, curve tables one row per scenario and curve point.\n");
        doc
    }

    pub fn from_markdown(text: &str) -> Result<Self, PipelineError> {
        let body = text
            .strip_prefix("---\n")
            .ok_or_else(|| PipelineError::Metadata("missing front matter".into()))?;
        let end = body
            .find("\n---\n")
            .ok_or_else(|| PipelineError::Metadata("unterminated front matter".into()))?;
        Ok(serde_yaml::from_str(&body[..=end])?)
    }

    /// Top-level keys of the front matter.
    pub fn keys(text: &str) -> Result<Vec<String>, PipelineError> {
        let body = text
            .strip_prefix("---\n")
            .ok_or_else(|| PipelineError::Metadata("missing front matter".into()))?;
        let end = body
            .find("\n---\n")
            .ok_or_else(|| PipelineError::Metadata("unterminated front matter".into()))?;
        let map: BTreeMap<String, serde_yaml::Value> = serde_yaml::from_str(&body[..=end])?;
        Ok(map.into_keys().collect())
    }
}
