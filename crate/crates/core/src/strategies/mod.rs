//! Sampling strategies: how each parameter of a scenario is drawn from the
//! baseline network and a pair of normalized bounds.

mod scenario;
pub mod terrain;

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::{Component, ParamId, ParamKind, ParamInfo, ParamValues, Parameter};
use crate::profiler::ParameterStats;

pub use scenario::{sample_scenario, scenario_rng, SampledScenario, ScenarioContext};
pub use terrain::{terrain_elevations, TerrainMap};

/// Factor bounds are normalized over scales in `[0, FACTOR_SCALE_MAX]`.
pub const FACTOR_SCALE_MAX: f64 = 2.0;
pub const DEFAULT_SUBSTITUTE_NOISE: (f64, f64) = (0.98, 1.02);
pub const DEFAULT_GRID_EXPONENT: u32 = 7;
pub const DEFAULT_ROUGHNESS: f64 = 0.5;

#[derive(Debug, Error)]
pub enum StrategyError {
    #[error("strategy {strategy:?} cannot be used for {param}")]
    IllegalStrategyForParameter { param: ParamId, strategy: StrategyKind },
    #[error("no statistics available for {0}")]
    MissingStats(ParamId),
    #[error("series strategy for {0} has no series")]
    MissingSeries(ParamId),
    #[error("node {0} has no coordinates")]
    MissingCoordinates(String),
    #[error("bounds of {param} must satisfy 0 <= lb <= ub <= 1 (got {lb}, {ub})")]
    InvalidBounds { param: ParamId, lb: f64, ub: f64 },
    #[error("unknown configuration key {0}")]
    UnknownKey(String),
    #[error(transparent)]
    Yaml(#[from] serde_yaml::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    Keep,
    Series,
    Sampling,
    Perturbation,
    Factor,
    Substitute,
    Terrain,
    Adg,
}

impl StrategyKind {
    /// Strategies whose bounds are worth tuning.
    pub fn is_tunable(self) -> bool {
        matches!(
            self,
            StrategyKind::Sampling
                | StrategyKind::Perturbation
                | StrategyKind::Factor
                | StrategyKind::Terrain
        )
    }

    pub fn is_legal_for(self, id: ParamId) -> bool {
        let elevation = ParamId::new(Component::Junction, Parameter::Elevation);
        let demand = ParamId::new(Component::Junction, Parameter::InputDemand);
        match self {
            StrategyKind::Keep => true,
            StrategyKind::Terrain => id == elevation,
            StrategyKind::Adg => id == demand,
            _ => id.info().kind != ParamKind::Category,
        }
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn one() -> f64 {
    1.0
}

/// Strategy and normalized bounds for one parameter, plus optional knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyEntry {
    pub strategy: StrategyKind,
    #[serde(default)]
    pub lb: f64,
    #[serde(default = "one")]
    pub ub: f64,
    /// Values for the `series` strategy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<Vec<f64>>,
    /// Additive bias range of the `factor` strategy, physical units.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bias: Option<(f64, f64)>,
    /// Run a `factor` entry as `substitute` instead.
    #[serde(default, skip_serializing_if = "is_false")]
    pub use_substitute: bool,
    /// Multiplicative noise range of `substitute`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_exponent: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roughness: Option<f64>,
}

impl StrategyEntry {
    pub fn new(strategy: StrategyKind, lb: f64, ub: f64) -> Self {
        StrategyEntry {
            strategy,
            lb,
            ub,
            series: None,
            bias: None,
            use_substitute: false,
            noise: None,
            grid_exponent: None,
            roughness: None,
        }
    }

    pub fn keep() -> Self {
        StrategyEntry::new(StrategyKind::Keep, 0.0, 1.0)
    }

    /// Strategy actually applied, after the factor/substitute switch.
    pub fn effective_strategy(&self) -> StrategyKind {
        if self.strategy == StrategyKind::Factor && self.use_substitute {
            StrategyKind::Substitute
        } else {
            self.strategy
        }
    }

    /// Bounds in physical units of the parameter's catalogue range.
    pub fn physical_bounds(&self, info: &ParamInfo) -> (f64, f64) {
        (info.denormalize(self.lb), info.denormalize(self.ub))
    }

    /// Scale range of the `factor` strategy.
    pub fn scale_range(&self) -> (f64, f64) {
        (self.lb * FACTOR_SCALE_MAX, self.ub * FACTOR_SCALE_MAX)
    }
}

/// Per-parameter entries. Parameters without an entry are kept as-is.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SamplingConfig {
    pub entries: BTreeMap<ParamId, StrategyEntry>,
}

impl SamplingConfig {
    pub fn entry(&self, id: ParamId) -> StrategyEntry {
        self.entries.get(&id).cloned().unwrap_or_else(StrategyEntry::keep)
    }

    pub fn set(&mut self, id: ParamId, entry: StrategyEntry) {
        self.entries.insert(id, entry);
    }

    pub fn validate(&self) -> Result<(), StrategyError> {
        for (id, e) in &self.entries {
            if !(0.0..=1.0).contains(&e.lb) || !(0.0..=1.0).contains(&e.ub) || e.lb > e.ub {
                return Err(StrategyError::InvalidBounds {
                    param: *id,
                    lb: e.lb,
                    ub: e.ub,
                });
            }
            if !e.effective_strategy().is_legal_for(*id) {
                return Err(StrategyError::IllegalStrategyForParameter {
                    param: *id,
                    strategy: e.strategy,
                });
            }
            if e.strategy == StrategyKind::Series && e.series.as_ref().is_none_or(Vec::is_empty) {
                return Err(StrategyError::MissingSeries(*id));
            }
        }
        Ok(())
    }

    /// Parameters whose bounds can be tuned, in catalogue order.
    pub fn tunable(&self) -> Vec<ParamId> {
        self.entries
            .iter()
            .filter(|(_, e)| e.effective_strategy().is_tunable())
            .map(|(id, _)| *id)
            .collect()
    }

    pub fn from_yaml(text: &str) -> Result<Self, StrategyError> {
        let config: SamplingConfig = serde_yaml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_yaml(&self) -> String {
        serde_yaml::to_string(self).expect("plain maps always serialize")
    }

    /// The starting configuration: demand generator for junction demand,
    /// terrain for junction elevation (bounds spanning the baseline
    /// elevations), factor for pipe diameter and keep for everything else
    /// present in the network.
    pub fn blueprint(present: &[ParamId], baseline: &BTreeMap<ParamId, ParamValues>) -> Self {
        let mut config = SamplingConfig::default();
        for &id in present {
            let entry = match (id.component, id.parameter) {
                (Component::Junction, Parameter::InputDemand) => {
                    StrategyEntry::new(StrategyKind::Adg, 0.0, 1.0)
                }
                (Component::Junction, Parameter::Elevation) => {
                    let info = id.info();
                    let values = baseline.get(&id).map(ParamValues::flatten).unwrap_or_default();
                    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let (mut lb, mut ub) = if lo.is_finite() {
                        (info.normalize(lo), info.normalize(hi))
                    } else {
                        (0.0, 0.05)
                    };
                    if ub - lb < 0.05 {
                        ub = (lb + 0.05).min(1.0);
                        lb = ub - 0.05;
                    }
                    StrategyEntry::new(StrategyKind::Terrain, lb, ub)
                }
                (Component::Pipe, Parameter::Diameter) => {
                    StrategyEntry::new(StrategyKind::Factor, 0.8 / FACTOR_SCALE_MAX, 1.2 / FACTOR_SCALE_MAX)
                }
                _ => StrategyEntry::keep(),
            };
            config.set(id, entry);
        }
        config
    }
}

impl Serialize for SamplingConfig {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        // Every component gets its key, empty or not.
        let mut grouped: BTreeMap<String, BTreeMap<&str, &StrategyEntry>> = Component::ALL
            .iter()
            .map(|c| (format!("{}_tune", c.key()), BTreeMap::new()))
            .collect();
        for (id, e) in &self.entries {
            grouped
                .entry(format!("{}_tune", id.component.key()))
                .or_default()
                .insert(id.parameter.key(), e);
        }
        grouped.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SamplingConfig {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        // Unrelated keys may share the document (run configuration).
        let raw: BTreeMap<String, serde_yaml::Value> = BTreeMap::deserialize(d)?;
        let mut config = SamplingConfig::default();
        for (key, value) in raw {
            let Some(component) = key.strip_suffix("_tune") else {
                continue;
            };
            let component = Component::from_key(component)
                .ok_or_else(|| D::Error::custom(format!("unknown component in '{key}'")))?;
            if value.is_null() {
                continue;
            }
            let params: BTreeMap<String, StrategyEntry> =
                serde_yaml::from_value(value).map_err(D::Error::custom)?;
            for (param, entry) in params {
                let id: ParamId = format!("{}.{param}", component.key())
                    .parse()
                    .map_err(D::Error::custom)?;
                config.entries.insert(id, entry);
            }
        }
        Ok(config)
    }
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.random_range(lo..=hi)
    } else {
        lo
    }
}

fn map_values(values: &ParamValues, mut f: impl FnMut(f64) -> f64) -> ParamValues {
    match values {
        ParamValues::Scalars(v) => ParamValues::Scalars(v.iter().map(|x| f(*x)).collect()),
        ParamValues::Series(v) => {
            ParamValues::Series(v.iter().map(|s| s.iter().map(|x| f(*x)).collect()).collect())
        }
    }
}

/// Draw values for one parameter. `stats` feeds the perturbation strategy;
/// terrain and demand generation need network context and are handled by
/// [`sample_scenario`].
pub fn apply_strategy<R: Rng + ?Sized>(
    id: ParamId,
    entry: &StrategyEntry,
    baseline: &ParamValues,
    stats: Option<&ParameterStats>,
    rng: &mut R,
) -> Result<ParamValues, StrategyError> {
    let strategy = entry.effective_strategy();
    if !strategy.is_legal_for(id) {
        return Err(StrategyError::IllegalStrategyForParameter {
            param: id,
            strategy: entry.strategy,
        });
    }
    let info = id.info();
    let (lo, hi) = entry.physical_bounds(info);
    Ok(match strategy {
        StrategyKind::Keep => baseline.clone(),
        StrategyKind::Series => {
            let series = entry.series.as_ref().ok_or(StrategyError::MissingSeries(id))?;
            match baseline {
                ParamValues::Scalars(v) => ParamValues::Scalars(vec![series[0]; v.len()]),
                ParamValues::Series(v) => ParamValues::Series(vec![series.clone(); v.len()]),
            }
        }
        StrategyKind::Sampling => map_values(baseline, |_| uniform(rng, lo, hi)),
        StrategyKind::Perturbation => {
            let stats = stats.ok_or(StrategyError::MissingStats(id))?;
            let normal = Normal::new(stats.mean, stats.std.max(0.0))
                .map_err(|_| StrategyError::MissingStats(id))?;
            let (glo, ghi) = info.range;
            map_values(baseline, |_| {
                normal.sample(rng).clamp(lo.max(glo), hi.min(ghi))
            })
        }
        StrategyKind::Factor => {
            let (slo, shi) = entry.scale_range();
            let scale = uniform(rng, slo, shi);
            let (blo, bhi) = entry.bias.unwrap_or((0.0, 0.0));
            let bias = uniform(rng, blo, bhi);
            map_values(baseline, |v| scale * v + bias)
        }
        StrategyKind::Substitute => {
            let (nlo, nhi) = entry.noise.unwrap_or(DEFAULT_SUBSTITUTE_NOISE);
            let n = baseline.len();
            if n == 0 {
                return Ok(baseline.clone());
            }
            let donor = rng.random_range(0..n);
            match baseline {
                ParamValues::Scalars(v) => ParamValues::Scalars(
                    (0..n).map(|_| v[donor] * uniform(rng, nlo, nhi)).collect(),
                ),
                ParamValues::Series(v) => ParamValues::Series(
                    (0..n)
                        .map(|_| {
                            let k = uniform(rng, nlo, nhi);
                            v[donor].iter().map(|x| x * k).collect()
                        })
                        .collect(),
                ),
            }
        }
        StrategyKind::Terrain | StrategyKind::Adg => {
            return Err(StrategyError::IllegalStrategyForParameter {
                param: id,
                strategy,
            })
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diam() -> ParamId {
        ParamId::new(Component::Pipe, Parameter::Diameter)
    }

    #[test]
    fn yaml_round_trip() {
        let mut c = SamplingConfig::default();
        c.set(diam(), StrategyEntry::new(StrategyKind::Factor, 0.4, 0.6));
        let mut e = StrategyEntry::new(StrategyKind::Terrain, 0.1, 0.3);
        e.roughness = Some(0.7);
        c.set(ParamId::new(Component::Junction, Parameter::Elevation), e);
        let text = c.to_yaml();
        assert!(text.contains("pipe_tune"));
        assert_eq!(SamplingConfig::from_yaml(&text).unwrap(), c);
    }

    #[test]
    fn terrain_only_for_elevation() {
        let mut c = SamplingConfig::default();
        c.set(diam(), StrategyEntry::new(StrategyKind::Terrain, 0.0, 1.0));
        assert!(matches!(
            c.validate(),
            Err(StrategyError::IllegalStrategyForParameter { .. })
        ));
    }

    #[test]
    fn inverted_bounds_rejected() {
        let mut c = SamplingConfig::default();
        c.set(diam(), StrategyEntry::new(StrategyKind::Sampling, 0.6, 0.4));
        assert!(matches!(c.validate(), Err(StrategyError::InvalidBounds { .. })));
    }

    #[test]
    fn factor_identity() {
        let base = ParamValues::Scalars(vec![0.1, 0.2, 0.3]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let e = StrategyEntry::new(StrategyKind::Factor, 0.5, 0.5);
        assert_eq!(apply_strategy(diam(), &e, &base, None, &mut rng).unwrap(), base);
    }

    #[test]
    fn perturbation_needs_stats() {
        let base = ParamValues::Scalars(vec![0.1]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let e = StrategyEntry::new(StrategyKind::Perturbation, 0.0, 1.0);
        assert!(matches!(
            apply_strategy(diam(), &e, &base, None, &mut rng),
            Err(StrategyError::MissingStats(_))
        ));
    }
}
