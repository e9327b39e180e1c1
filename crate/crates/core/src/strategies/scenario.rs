use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand::Rng;

use super::{
    apply_strategy, terrain_elevations, SamplingConfig, StrategyError, StrategyKind,
    DEFAULT_GRID_EXPONENT, DEFAULT_ROUGHNESS,
};
use crate::adg::{generate_demands, louvain_communities, AdgConfig, GeneratedDemands, Graph};
use crate::inp::{convert_to_si, NetworkModel};
use crate::params::{self, ParamId, ParamValues};
use crate::profiler::{profile_network, NetworkProfile};

/// Everything scenario sampling needs that does not change between
/// scenarios of one network.
#[derive(Debug, Clone)]
pub struct ScenarioContext {
    /// SI model with the run's duration and time step, patterns resampled.
    pub model: NetworkModel,
    /// Parameters present in the model, in catalogue order.
    pub present: Vec<ParamId>,
    pub baseline: BTreeMap<ParamId, ParamValues>,
    pub profile: NetworkProfile,
    /// Fallback statistics when the network lacks a parameter.
    pub global: Option<NetworkProfile>,
    /// Community of every node, in `node_names` order.
    pub communities: Vec<usize>,
    pub adg: AdgConfig,
}

impl ScenarioContext {
    pub fn new(model: &NetworkModel, adg: AdgConfig, global: Option<NetworkProfile>, seed: u64) -> Self {
        let mut model = convert_to_si(model);
        model.times.duration = adg.duration;
        model.times.time_step = adg.time_step;
        params::expand_patterns(&mut model);
        let present = params::present(&model);
        let baseline = present
            .iter()
            .filter_map(|id| Some((*id, params::extract(&model, *id)?)))
            .collect();
        let profile = profile_network(&model);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let communities = louvain_communities(
            &Graph::from_model(&model),
            adg.louvain_resolution,
            adg.louvain_threshold,
            &mut rng,
        );
        ScenarioContext {
            model,
            present,
            baseline,
            profile,
            global,
            communities,
            adg,
        }
    }

    pub fn steps(&self) -> usize {
        self.model.times.num_steps()
    }
}

/// One candidate scenario before simulation.
#[derive(Debug, Clone)]
pub struct SampledScenario {
    /// Sampled value of every present parameter.
    pub inputs: BTreeMap<ParamId, ParamValues>,
    /// The context model with the sampled values written in.
    pub model: NetworkModel,
    pub demands: Option<GeneratedDemands>,
    /// Parameters whose statistics came from the global profile.
    pub imputed: Vec<ParamId>,
}

/// Generator for candidate `index` under `master_seed`.
pub fn scenario_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(master_seed ^ index)
}

/// Draw every present parameter in catalogue order from one generator.
pub fn sample_scenario<R: Rng + ?Sized>(
    ctx: &ScenarioContext,
    config: &SamplingConfig,
    rng: &mut R,
) -> Result<SampledScenario, StrategyError> {
    let mut model = ctx.model.clone();
    let mut inputs = BTreeMap::new();
    let mut demands = None;
    let mut imputed = Vec::new();
    for &id in &ctx.present {
        let baseline = &ctx.baseline[&id];
        let entry = config.entry(id);
        let values = match entry.effective_strategy() {
            StrategyKind::Keep => baseline.clone(),
            StrategyKind::Adg if entry.strategy.is_legal_for(id) => {
                let generated = generate_demands(&ctx.model, &ctx.communities, &ctx.adg, rng);
                let v = ParamValues::Series(generated.series.clone());
                demands = Some(generated);
                v
            }
            StrategyKind::Terrain if entry.strategy.is_legal_for(id) => {
                let points = ctx
                    .model
                    .junctions
                    .iter()
                    .map(|j| {
                        ctx.model
                            .coordinates
                            .get(&j.name)
                            .copied()
                            .ok_or_else(|| StrategyError::MissingCoordinates(j.name.clone()))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let bounds = entry.physical_bounds(id.info());
                ParamValues::Scalars(terrain_elevations(
                    &points,
                    entry.grid_exponent.unwrap_or(DEFAULT_GRID_EXPONENT),
                    bounds,
                    entry.roughness.unwrap_or(DEFAULT_ROUGHNESS),
                    bounds,
                    rng,
                ))
            }
            _ => {
                let stats = match ctx.profile.get(id) {
                    Some(s) => Some(s),
                    None => {
                        let g = ctx.global.as_ref().and_then(|g| g.get(id));
                        if g.is_some() {
                            imputed.push(id);
                        }
                        g
                    }
                };
                apply_strategy(id, &entry, baseline, stats, rng)?
            }
        };
        if entry.effective_strategy() != StrategyKind::Keep {
            params::apply(&mut model, id, &values);
        }
        inputs.insert(id, values);
    }
    Ok(SampledScenario {
        inputs,
        model,
        demands,
        imputed,
    })
}
