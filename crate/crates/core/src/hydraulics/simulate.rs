use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::rules::{validate_scenario, RuleId, RuleSet};
use super::solver::{HydraulicNetwork, HydraulicState};
use crate::inp::NetworkModel;
use crate::params::{ParamId, ParamValues};

/// The seven recorded measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Pressure,
    Demand,
    Head,
    Flowrate,
    Velocity,
    Headloss,
    FrictionFactor,
}

impl OutputKind {
    pub const ALL: [OutputKind; 7] = [
        OutputKind::Pressure,
        OutputKind::Demand,
        OutputKind::Head,
        OutputKind::Flowrate,
        OutputKind::Velocity,
        OutputKind::Headloss,
        OutputKind::FrictionFactor,
    ];

    pub fn key(self) -> &'static str {
        match self {
            OutputKind::Pressure => "pressure",
            OutputKind::Demand => "demand",
            OutputKind::Head => "head",
            OutputKind::Flowrate => "flowrate",
            OutputKind::Velocity => "velocity",
            OutputKind::Headloss => "headloss",
            OutputKind::FrictionFactor => "friction_factor",
        }
    }

    pub fn is_node(self) -> bool {
        matches!(self, OutputKind::Pressure | OutputKind::Demand | OutputKind::Head)
    }

    pub fn values(self, state: &HydraulicState) -> &[f64] {
        match self {
            OutputKind::Pressure => &state.pressure,
            OutputKind::Demand => &state.demand,
            OutputKind::Head => &state.head,
            OutputKind::Flowrate => &state.flow,
            OutputKind::Velocity => &state.velocity,
            OutputKind::Headloss => &state.headloss,
            OutputKind::FrictionFactor => &state.friction,
        }
    }
}

impl fmt::Display for OutputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for OutputKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OutputKind::ALL
            .into_iter()
            .find(|o| o.key() == s)
            .ok_or_else(|| format!("unknown output '{s}'"))
    }
}

/// One simulated scenario: the sampled inputs and one hydraulic state per
/// time step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub inputs: BTreeMap<ParamId, ParamValues>,
    pub snapshots: Vec<HydraulicState>,
    pub valid: bool,
    pub failure_reason: Option<RuleId>,
    pub solver_error: Option<String>,
    /// Tank overflow/underflow and similar non-fatal events.
    pub flags: Vec<String>,
    pub junction_count: usize,
    pub expected_steps: usize,
}

impl ScenarioResult {
    /// Output demand of every junction at every step, flattened.
    pub fn junction_demands(&self) -> Vec<f64> {
        self.snapshots
            .iter()
            .flat_map(|s| s.demand[..self.junction_count].iter().copied())
            .collect()
    }
}

/// Run an extended-period simulation of a model (SI units) and validate it.
/// Junction demands are base demand times the junction's pattern at each
/// step; tank heads are held within a step and levels integrated between
/// steps.
pub fn simulate_scenario(
    model: &NetworkModel,
    inputs: BTreeMap<ParamId, ParamValues>,
    rules: &RuleSet,
) -> ScenarioResult {
    let steps = model.times.num_steps();
    let mut result = ScenarioResult {
        inputs,
        snapshots: Vec::with_capacity(steps),
        valid: false,
        failure_reason: None,
        solver_error: None,
        flags: Vec::new(),
        junction_count: model.junctions.len(),
        expected_steps: steps,
    };
    for v in &model.valves {
        if !v.kind.is_simulated() {
            result
                .flags
                .push(format!("unsupported-for-simulation:{}", v.name));
        }
    }
    let net = match HydraulicNetwork::new(model) {
        Ok(n) => n,
        Err(e) => {
            result.solver_error = Some(e.to_string());
            validate_scenario(&mut result, rules);
            return result;
        }
    };
    let dt_hours = model.times.time_step;
    let mut levels: Vec<f64> = model.tanks.iter().map(|t| t.init_level).collect();
    let mut warm: Option<HydraulicState> = None;
    let mut demands = vec![0.0; model.junctions.len()];
    let mut fixed = vec![0.0; model.reservoirs.len() + model.tanks.len()];
    let mut speeds = vec![0.0; model.pumps.len()];
    let tank_offset = model.junctions.len() + model.reservoirs.len();

    for step in 0..steps {
        let hour = step as f64 * dt_hours;
        for (d, j) in demands.iter_mut().zip(&model.junctions) {
            *d = j.base_demand * model.pattern_value(model.junction_pattern(j), hour);
        }
        for (h, r) in fixed.iter_mut().zip(&model.reservoirs) {
            *h = match &r.head_pattern {
                Some(p) => r.base_head * model.pattern_value(Some(p), hour),
                None => r.base_head,
            };
        }
        for (i, t) in model.tanks.iter().enumerate() {
            fixed[model.reservoirs.len() + i] = t.elevation + levels[i];
        }
        for (w, p) in speeds.iter_mut().zip(&model.pumps) {
            *w = match &p.speed_pattern {
                Some(pat) => p.base_speed * model.pattern_value(Some(pat), hour),
                None => p.base_speed,
            };
        }
        let state = match net.solve(&demands, &fixed, &speeds, warm.as_ref()) {
            Ok(s) => s,
            Err(e) => {
                result.solver_error = Some(format!("step {step}: {e}"));
                break;
            }
        };
        for (i, t) in model.tanks.iter().enumerate() {
            let inflow = state.demand[tank_offset + i];
            let area = t.area();
            let next = levels[i] + inflow * dt_hours * 3600.0 / area;
            if next > t.max_level {
                result.flags.push(format!("tank-overflow:{}:{step}", t.name));
            } else if next < t.min_level {
                result.flags.push(format!("tank-underflow:{}:{step}", t.name));
            }
            levels[i] = next.clamp(t.min_level, t.max_level);
        }
        result.snapshots.push(state.clone());
        warm = Some(state);
    }
    validate_scenario(&mut result, rules);
    result
}
