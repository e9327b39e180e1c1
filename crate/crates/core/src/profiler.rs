//! Per-parameter statistics of baseline networks.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::inp::NetworkModel;
use crate::params::{self, ParamId};
use crate::stats;

#[derive(Debug, Error, PartialEq)]
pub enum ProfileError {
    #[error("cannot profile an empty sample")]
    EmptyInput,
    #[error("sample contains a non-finite value")]
    NonFinite,
    #[error("no profiles to merge")]
    NothingToMerge,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std: f64,
    pub q1: f64,
    pub q3: f64,
    pub dimension: usize,
    pub component_count: usize,
}

/// Summary statistics of a flat sample. Quartiles interpolate linearly
/// between order statistics and `std` uses the n − 1 denominator.
pub fn profile_parameter(
    values: &[f64],
    dimension: usize,
    component_count: usize,
) -> Result<ParameterStats, ProfileError> {
    if values.is_empty() {
        return Err(ProfileError::EmptyInput);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(ProfileError::NonFinite);
    }
    let sorted = stats::sorted_copy(values);
    Ok(ParameterStats {
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        mean: stats::mean(values),
        std: stats::sample_std(values),
        q1: stats::quantile_sorted(&sorted, 0.25),
        q3: stats::quantile_sorted(&sorted, 0.75),
        dimension: dimension.max(1),
        component_count,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scope {
    Network(String),
    Global,
}

impl std::fmt::Display for Scope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scope::Network(name) => f.write_str(name),
            Scope::Global => f.write_str("GLOBAL"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkProfile {
    pub scope: Scope,
    pub stats: BTreeMap<ParamId, ParameterStats>,
    /// Raw values behind each entry, kept so global quartiles are exact.
    #[serde(skip)]
    pub samples: BTreeMap<ParamId, Vec<f64>>,
}

impl NetworkProfile {
    pub fn get(&self, id: ParamId) -> Option<&ParameterStats> {
        self.stats.get(&id)
    }

    /// One CSV row per (scope, parameter, statistic).
    pub fn to_table(&self) -> String {
        let mut out = String::from("scope,parameter,statistic,value\n");
        for (id, s) in &self.stats {
            let rows: [(&str, String); 8] = [
                ("min", s.min.to_string()),
                ("max", s.max.to_string()),
                ("mean", s.mean.to_string()),
                ("std", s.std.to_string()),
                ("q1", s.q1.to_string()),
                ("q3", s.q3.to_string()),
                ("dimension", s.dimension.to_string()),
                ("component_count", s.component_count.to_string()),
            ];
            for (name, value) in rows {
                let _ = writeln!(out, "{},{id},{name},{value}", self.scope);
            }
        }
        out
    }
}

/// Profile every catalogue parameter present in `model` (expected in SI).
pub fn profile_network(model: &NetworkModel) -> NetworkProfile {
    let mut stats = BTreeMap::new();
    let mut samples = BTreeMap::new();
    for id in params::present(model) {
        let Some(values) = params::extract(model, id) else {
            continue;
        };
        let flat: Vec<f64> = values.flatten().into_iter().filter(|v| v.is_finite()).collect();
        if let Ok(s) = profile_parameter(&flat, values.dimension(), values.len()) {
            stats.insert(id, s);
            samples.insert(id, flat);
        }
    }
    NetworkProfile {
        scope: Scope::Network(model.name.clone()),
        stats,
        samples,
    }
}

/// Pool the raw samples of several profiles into a GLOBAL profile.
/// Component counts add up; the dimension is the largest seen.
pub fn merge_global(profiles: &[NetworkProfile]) -> Result<NetworkProfile, ProfileError> {
    if profiles.is_empty() {
        return Err(ProfileError::NothingToMerge);
    }
    if let [single] = profiles {
        let mut p = single.clone();
        p.scope = Scope::Global;
        return Ok(p);
    }
    let mut pooled: BTreeMap<ParamId, (Vec<f64>, usize, usize)> = BTreeMap::new();
    for profile in profiles {
        for (id, s) in &profile.stats {
            let entry = pooled.entry(*id).or_insert_with(|| (Vec::new(), 0, 1));
            if let Some(values) = profile.samples.get(id) {
                entry.0.extend_from_slice(values);
            }
            entry.1 += s.component_count;
            entry.2 = entry.2.max(s.dimension);
        }
    }
    let mut stats = BTreeMap::new();
    let mut samples = BTreeMap::new();
    for (id, (values, count, dim)) in pooled {
        if let Ok(s) = profile_parameter(&values, dim, count) {
            stats.insert(id, s);
            samples.insert(id, values);
        }
    }
    Ok(NetworkProfile {
        scope: Scope::Global,
        stats,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_rejected() {
        assert_eq!(profile_parameter(&[], 1, 0), Err(ProfileError::EmptyInput));
        assert_eq!(
            profile_parameter(&[1.0, f64::NAN], 1, 2),
            Err(ProfileError::NonFinite)
        );
    }

    #[test]
    fn single_value() {
        let s = profile_parameter(&[7.0], 1, 1).unwrap();
        assert_eq!((s.min, s.max, s.mean, s.q1, s.q3, s.std), (7.0, 7.0, 7.0, 7.0, 7.0, 0.0));
    }

    #[test]
    fn table_has_eight_rows_per_parameter() {
        let mut model = NetworkModel {
            name: "one".into(),
            ..NetworkModel::default()
        };
        model.junctions.push(crate::inp::Junction {
            name: "J".into(),
            elevation: 10.0,
            base_demand: 0.0,
            demand_pattern: None,
        });
        let p = profile_network(&model);
        let rows = p.to_table().lines().count() - 1;
        assert_eq!(rows, 8 * p.stats.len());
    }
}
