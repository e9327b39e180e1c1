//! Catalogue of the hydraulic input parameters that can be profiled, sampled
//! and recorded, with their physical ranges and the accessors that read them
//! from (and write them into) a [`NetworkModel`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::inp::{LinkStatus, NetworkModel, PumpKind, ValveKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Component {
    Junction,
    Reservoir,
    Tank,
    Pipe,
    HeadPump,
    PowerPump,
    Prv,
    Psv,
    Pbv,
    Fcv,
    Tcv,
    Gpv,
}

impl Component {
    pub const ALL: [Component; 12] = [
        Component::Junction,
        Component::Reservoir,
        Component::Tank,
        Component::Pipe,
        Component::HeadPump,
        Component::PowerPump,
        Component::Prv,
        Component::Psv,
        Component::Pbv,
        Component::Fcv,
        Component::Tcv,
        Component::Gpv,
    ];

    /// Snake-case key used in configuration files (`<key>_tune`).
    pub fn key(self) -> &'static str {
        match self {
            Component::Junction => "junction",
            Component::Reservoir => "reservoir",
            Component::Tank => "tank",
            Component::Pipe => "pipe",
            Component::HeadPump => "head_pump",
            Component::PowerPump => "power_pump",
            Component::Prv => "prv",
            Component::Psv => "psv",
            Component::Pbv => "pbv",
            Component::Fcv => "fcv",
            Component::Tcv => "tcv",
            Component::Gpv => "gpv",
        }
    }

    /// Token used in table file names (no underscores).
    pub fn file_token(self) -> String {
        self.key().replace('_', "-")
    }

    pub fn from_key(key: &str) -> Option<Self> {
        Component::ALL.into_iter().find(|c| c.key() == key)
    }

    fn valve_kind(self) -> Option<ValveKind> {
        Some(match self {
            Component::Prv => ValveKind::Prv,
            Component::Psv => ValveKind::Psv,
            Component::Pbv => ValveKind::Pbv,
            Component::Fcv => ValveKind::Fcv,
            Component::Tcv => ValveKind::Tcv,
            Component::Gpv => ValveKind::Gpv,
            _ => return None,
        })
    }

    /// Names of the model components of this class, in model order.
    pub fn names(self, model: &NetworkModel) -> Vec<String> {
        match self {
            Component::Junction => model.junctions.iter().map(|j| j.name.clone()).collect(),
            Component::Reservoir => model.reservoirs.iter().map(|r| r.name.clone()).collect(),
            Component::Tank => model.tanks.iter().map(|t| t.name.clone()).collect(),
            Component::Pipe => model.pipes.iter().map(|p| p.name.clone()).collect(),
            Component::HeadPump => model
                .pumps
                .iter()
                .filter(|p| matches!(p.kind, PumpKind::Head { .. }))
                .map(|p| p.name.clone())
                .collect(),
            Component::PowerPump => model
                .pumps
                .iter()
                .filter(|p| matches!(p.kind, PumpKind::Power { .. }))
                .map(|p| p.name.clone())
                .collect(),
            valve => {
                let kind = valve.valve_kind();
                model
                    .valves
                    .iter()
                    .filter(|v| Some(v.kind) == kind)
                    .map(|v| v.name.clone())
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parameter {
    Elevation,
    InputDemand,
    BaseHead,
    HeadPattern,
    Diameter,
    InitialLevel,
    MinLevel,
    MaxLevel,
    MinVolume,
    Length,
    Roughness,
    MinorLoss,
    InitialStatus,
    BaseSpeed,
    Power,
    PumpCurveX,
    PumpCurveY,
    EnergyPattern,
    EfficiencyX,
    EfficiencyY,
    InitialSetting,
}

impl Parameter {
    pub fn key(self) -> &'static str {
        match self {
            Parameter::Elevation => "elevation",
            Parameter::InputDemand => "demand",
            Parameter::BaseHead => "base_head",
            Parameter::HeadPattern => "head_pattern",
            Parameter::Diameter => "diameter",
            Parameter::InitialLevel => "init_level",
            Parameter::MinLevel => "min_level",
            Parameter::MaxLevel => "max_level",
            Parameter::MinVolume => "min_vol",
            Parameter::Length => "length",
            Parameter::Roughness => "roughness",
            Parameter::MinorLoss => "minor_loss",
            Parameter::InitialStatus => "initial_status",
            Parameter::BaseSpeed => "base_speed",
            Parameter::Power => "power",
            Parameter::PumpCurveX => "pump_curve_x",
            Parameter::PumpCurveY => "pump_curve_y",
            Parameter::EnergyPattern => "energy_pattern",
            Parameter::EfficiencyX => "efficiency_x",
            Parameter::EfficiencyY => "efficiency_y",
            Parameter::InitialSetting => "initial_setting",
        }
    }
}

/// How a parameter's values are shaped per component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamKind {
    Static,
    /// Encoded as numeric codes; only `Keep` applies.
    Category,
    Pattern,
    Curve,
}

impl ParamKind {
    /// Table type token.
    pub fn table_type(self) -> &'static str {
        match self {
            ParamKind::Static | ParamKind::Category => "static",
            ParamKind::Pattern => "dynamic",
            ParamKind::Curve => "curve",
        }
    }
}

/// A (component class, parameter) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamId {
    pub component: Component,
    pub parameter: Parameter,
}

impl ParamId {
    pub const fn new(component: Component, parameter: Parameter) -> Self {
        ParamId {
            component,
            parameter,
        }
    }

    pub fn info(self) -> &'static ParamInfo {
        CATALOGUE
            .iter()
            .find(|s| s.id == self)
            .expect("every ParamId constructed from the catalogue")
    }

    pub fn is_catalogued(self) -> bool {
        CATALOGUE.iter().any(|s| s.id == self)
    }
}

impl fmt::Display for ParamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.component.key(), self.parameter.key())
    }
}

impl FromStr for ParamId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (c, p) = s
            .split_once('.')
            .ok_or_else(|| format!("expected <component>.<parameter>, got '{s}'"))?;
        CATALOGUE
            .iter()
            .map(|info| info.id)
            .find(|id| id.component.key() == c && id.parameter.key() == p)
            .ok_or_else(|| format!("unknown parameter '{s}'"))
    }
}

impl Serialize for ParamId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ParamId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamInfo {
    pub id: ParamId,
    pub kind: ParamKind,
    pub unit: &'static str,
    /// Global physical range in SI units; bounds in a sampling configuration
    /// are normalized against it.
    pub range: (f64, f64),
}

impl ParamInfo {
    pub fn denormalize(&self, x: f64) -> f64 {
        self.range.0 + x * (self.range.1 - self.range.0)
    }

    pub fn normalize(&self, v: f64) -> f64 {
        let span = self.range.1 - self.range.0;
        if span <= 0.0 {
            0.0
        } else {
            ((v - self.range.0) / span).clamp(0.0, 1.0)
        }
    }
}

use Component as C;
use ParamKind as K;
use Parameter as P;

const fn info(c: Component, p: Parameter, kind: ParamKind, unit: &'static str, lo: f64, hi: f64) -> ParamInfo {
    ParamInfo {
        id: ParamId::new(c, p),
        kind,
        unit,
        range: (lo, hi),
    }
}

const STATUS: (f64, f64) = (0.0, 2.0);

/// The 38 parameters.
pub static CATALOGUE: [ParamInfo; 38] = [
    info(C::Junction, P::Elevation, K::Static, "m", 0.0, 154.75),
    info(C::Junction, P::InputDemand, K::Pattern, "-", -1.388, 4.814),
    info(C::Reservoir, P::BaseHead, K::Static, "m", 0.0, 500.0),
    info(C::Reservoir, P::HeadPattern, K::Pattern, "-", 0.91, 70.42),
    info(C::Tank, P::Elevation, K::Static, "m", 2.0, 571.12),
    info(C::Tank, P::Diameter, K::Static, "m", 0.3048, 58.309),
    info(C::Tank, P::InitialLevel, K::Static, "m", 0.5, 548.64),
    info(C::Tank, P::MinLevel, K::Static, "m", 0.0, 548.64),
    info(C::Tank, P::MaxLevel, K::Static, "m", 0.5, 548.64),
    info(C::Tank, P::MinVolume, K::Static, "m3", 0.0, 95965.597),
    info(C::Pipe, P::InitialStatus, K::Category, "-", STATUS.0, STATUS.1),
    info(C::Pipe, P::Diameter, K::Static, "m", 0.001, 5.1816),
    info(C::Pipe, P::MinorLoss, K::Static, "-", 0.0, 1000.0),
    info(C::Pipe, P::Roughness, K::Static, "-", 0.0015, 8333.3333),
    info(C::Pipe, P::Length, K::Static, "m", 0.01, 17003.20),
    info(C::HeadPump, P::InitialStatus, K::Category, "-", STATUS.0, STATUS.1),
    info(C::HeadPump, P::BaseSpeed, K::Static, "-", 0.9, 1.0),
    info(C::HeadPump, P::EfficiencyX, K::Curve, "m3/s", 0.0, 0.5),
    info(C::HeadPump, P::EfficiencyY, K::Curve, "%", 0.0, 77.0),
    info(C::HeadPump, P::PumpCurveX, K::Curve, "m3/s", 0.0, 0.88),
    info(C::HeadPump, P::PumpCurveY, K::Curve, "m", 0.0, 211.02),
    info(C::HeadPump, P::EnergyPattern, K::Pattern, "-", 0.024093, 0.1234),
    info(C::PowerPump, P::InitialStatus, K::Category, "-", STATUS.0, STATUS.1),
    info(C::PowerPump, P::BaseSpeed, K::Static, "-", 0.9, 1.0),
    info(C::PowerPump, P::EfficiencyX, K::Curve, "m3/s", 0.0, 0.5),
    info(C::PowerPump, P::EfficiencyY, K::Curve, "%", 0.0, 77.0),
    info(C::PowerPump, P::Power, K::Static, "kW", 372.85, 186424.97),
    info(C::PowerPump, P::EnergyPattern, K::Pattern, "-", 0.024093, 0.1234),
    info(C::Prv, P::InitialStatus, K::Category, "-", STATUS.0, STATUS.1),
    info(C::Prv, P::InitialSetting, K::Static, "m", 0.0, 154.75),
    info(C::Psv, P::InitialStatus, K::Category, "-", STATUS.0, STATUS.1),
    info(C::Psv, P::InitialSetting, K::Static, "m", 38.69, 49.23),
    info(C::Fcv, P::InitialStatus, K::Category, "-", STATUS.0, STATUS.1),
    info(C::Fcv, P::InitialSetting, K::Static, "m3/s", 0.0, 0.9),
    info(C::Tcv, P::InitialStatus, K::Category, "-", STATUS.0, STATUS.1),
    info(C::Tcv, P::InitialSetting, K::Static, "-", 0.0, 403_101_800_000.0),
    info(C::Pbv, P::InitialStatus, K::Category, "-", STATUS.0, STATUS.1),
    info(C::Gpv, P::InitialStatus, K::Category, "-", STATUS.0, STATUS.1),
];

/// Numeric code for a link status: 0 closed, 1 open, 2 check valve.
pub fn status_code(status: LinkStatus) -> f64 {
    match status {
        LinkStatus::Closed => 0.0,
        LinkStatus::Open => 1.0,
        LinkStatus::Cv => 2.0,
    }
}

pub fn status_from_code(code: f64) -> LinkStatus {
    match code.round() as i64 {
        0 => LinkStatus::Closed,
        2 => LinkStatus::Cv,
        _ => LinkStatus::Open,
    }
}

/// Per-component values of one parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ParamValues {
    /// One value per component.
    Scalars(Vec<f64>),
    /// One series (pattern or curve coordinates) per component.
    Series(Vec<Vec<f64>>),
}

impl ParamValues {
    pub fn len(&self) -> usize {
        match self {
            ParamValues::Scalars(v) => v.len(),
            ParamValues::Series(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All values flattened in component order.
    pub fn flatten(&self) -> Vec<f64> {
        match self {
            ParamValues::Scalars(v) => v.clone(),
            ParamValues::Series(v) => v.iter().flatten().copied().collect(),
        }
    }

    /// Series length (1 for scalars).
    pub fn dimension(&self) -> usize {
        match self {
            ParamValues::Scalars(_) => 1,
            ParamValues::Series(v) => v.iter().map(Vec::len).max().unwrap_or(1).max(1),
        }
    }
}

fn curve_points<'a>(model: &'a NetworkModel, name: Option<&str>) -> &'a [(f64, f64)] {
    name.and_then(|n| model.curves.get(n))
        .map(Vec::as_slice)
        .unwrap_or(&[])
}

fn pump_matches(component: Component, kind: &PumpKind) -> bool {
    match component {
        Component::HeadPump => matches!(kind, PumpKind::Head { .. }),
        Component::PowerPump => matches!(kind, PumpKind::Power { .. }),
        _ => false,
    }
}

/// Read a parameter from the model. `None` when no component of the class
/// exists or none of them carries the parameter (e.g. no efficiency curves).
pub fn extract(model: &NetworkModel, id: ParamId) -> Option<ParamValues> {
    use Parameter::*;
    let steps = model.times.num_steps();
    let hours = |k: usize| k as f64 * model.times.time_step;
    let pattern_series = |name: Option<&str>| -> Vec<f64> {
        (0..steps).map(|k| model.pattern_value(name, hours(k))).collect()
    };
    let values = match (id.component, id.parameter) {
        (Component::Junction, Elevation) => {
            ParamValues::Scalars(model.junctions.iter().map(|j| j.elevation).collect())
        }
        (Component::Junction, InputDemand) => ParamValues::Series(
            model
                .junctions
                .iter()
                .map(|j| pattern_series(model.junction_pattern(j)))
                .collect(),
        ),
        (Component::Reservoir, BaseHead) => {
            ParamValues::Scalars(model.reservoirs.iter().map(|r| r.base_head).collect())
        }
        (Component::Reservoir, HeadPattern) => {
            if model.reservoirs.iter().all(|r| r.head_pattern.is_none()) {
                return None;
            }
            ParamValues::Series(
                model
                    .reservoirs
                    .iter()
                    .map(|r| pattern_series(r.head_pattern.as_deref()))
                    .collect(),
            )
        }
        (Component::Tank, p) => ParamValues::Scalars(
            model
                .tanks
                .iter()
                .map(|t| match p {
                    Elevation => t.elevation,
                    Diameter => t.diameter,
                    InitialLevel => t.init_level,
                    MinLevel => t.min_level,
                    MaxLevel => t.max_level,
                    _ => t.min_volume,
                })
                .collect(),
        ),
        (Component::Pipe, p) => ParamValues::Scalars(
            model
                .pipes
                .iter()
                .map(|pipe| match p {
                    InitialStatus => status_code(pipe.status),
                    Diameter => pipe.diameter,
                    MinorLoss => pipe.minor_loss,
                    Roughness => pipe.roughness,
                    _ => pipe.length,
                })
                .collect(),
        ),
        (c @ (Component::HeadPump | Component::PowerPump), p) => {
            let pumps: Vec<_> = model
                .pumps
                .iter()
                .filter(|pump| pump_matches(c, &pump.kind))
                .collect();
            match p {
                InitialStatus => {
                    ParamValues::Scalars(pumps.iter().map(|p| status_code(p.status)).collect())
                }
                BaseSpeed => ParamValues::Scalars(pumps.iter().map(|p| p.base_speed).collect()),
                Power => ParamValues::Scalars(
                    pumps
                        .iter()
                        .map(|p| match p.kind {
                            PumpKind::Power { power } => power,
                            PumpKind::Head { .. } => 0.0,
                        })
                        .collect(),
                ),
                EnergyPattern => {
                    if pumps.iter().all(|p| p.energy_pattern.is_none()) {
                        return None;
                    }
                    ParamValues::Series(
                        pumps
                            .iter()
                            .map(|p| pattern_series(p.energy_pattern.as_deref()))
                            .collect(),
                    )
                }
                PumpCurveX | PumpCurveY => ParamValues::Series(
                    pumps
                        .iter()
                        .map(|p| {
                            let name = match &p.kind {
                                PumpKind::Head { curve } => Some(curve.as_str()),
                                PumpKind::Power { .. } => None,
                            };
                            curve_points(model, name)
                                .iter()
                                .map(|(x, y)| if p_is_x(p_param(id)) { *x } else { *y })
                                .collect()
                        })
                        .collect(),
                ),
                EfficiencyX | EfficiencyY => {
                    if pumps.iter().all(|p| p.efficiency_curve.is_none()) {
                        return None;
                    }
                    ParamValues::Series(
                        pumps
                            .iter()
                            .map(|p| {
                                curve_points(model, p.efficiency_curve.as_deref())
                                    .iter()
                                    .map(|(x, y)| if p_is_x(p_param(id)) { *x } else { *y })
                                    .collect()
                            })
                            .collect(),
                    )
                }
                _ => return None,
            }
        }
        (valve, p) => {
            let kind = valve.valve_kind()?;
            let valves: Vec<_> = model.valves.iter().filter(|v| v.kind == kind).collect();
            match p {
                // Valves carry no explicit status in the modelled subset.
                InitialStatus => ParamValues::Scalars(vec![1.0; valves.len()]),
                InitialSetting => ParamValues::Scalars(valves.iter().map(|v| v.setting).collect()),
                _ => return None,
            }
        }
    };
    (!values.is_empty()).then_some(values)
}

fn p_param(id: ParamId) -> Parameter {
    id.parameter
}

fn p_is_x(p: Parameter) -> bool {
    matches!(p, Parameter::PumpCurveX | Parameter::EfficiencyX)
}

/// Catalogue entries present in a model, in catalogue order.
pub fn present(model: &NetworkModel) -> Vec<ParamId> {
    CATALOGUE
        .iter()
        .map(|s| s.id)
        .filter(|id| extract(model, *id).is_some())
        .collect()
}

/// Write per-component values back into the model. Pattern parameters become
/// one pattern per component (named `<parameter>:<component>`), at the
/// hydraulic time step; call [`expand_patterns`] first so existing patterns
/// keep their meaning.
pub fn apply(model: &mut NetworkModel, id: ParamId, values: &ParamValues) {
    use Parameter::*;
    let scalars = |v: &ParamValues| match v {
        ParamValues::Scalars(s) => s.clone(),
        ParamValues::Series(s) => s.iter().map(|x| x.first().copied().unwrap_or(0.0)).collect(),
    };
    let series = |v: &ParamValues| match v {
        ParamValues::Series(s) => s.clone(),
        ParamValues::Scalars(s) => s.iter().map(|x| vec![*x]).collect(),
    };
    match (id.component, id.parameter) {
        (Component::Junction, Elevation) => {
            for (j, v) in model.junctions.iter_mut().zip(scalars(values)) {
                j.elevation = v;
            }
        }
        (Component::Junction, InputDemand) => {
            for (j, s) in model.junctions.iter_mut().zip(series(values)) {
                let name = format!("demand:{}", j.name);
                model.patterns.insert(name.clone(), s);
                j.demand_pattern = Some(name);
            }
        }
        (Component::Reservoir, BaseHead) => {
            for (r, v) in model.reservoirs.iter_mut().zip(scalars(values)) {
                r.base_head = v;
            }
        }
        (Component::Reservoir, HeadPattern) => {
            for (r, s) in model.reservoirs.iter_mut().zip(series(values)) {
                let name = format!("head:{}", r.name);
                model.patterns.insert(name.clone(), s);
                r.head_pattern = Some(name);
            }
        }
        (Component::Tank, p) => {
            for (t, v) in model.tanks.iter_mut().zip(scalars(values)) {
                match p {
                    Elevation => t.elevation = v,
                    Diameter => t.diameter = v,
                    InitialLevel => t.init_level = v,
                    MinLevel => t.min_level = v,
                    MaxLevel => t.max_level = v,
                    _ => t.min_volume = v,
                }
            }
        }
        (Component::Pipe, p) => {
            for (pipe, v) in model.pipes.iter_mut().zip(scalars(values)) {
                match p {
                    InitialStatus => pipe.status = status_from_code(v),
                    Diameter => pipe.diameter = v,
                    MinorLoss => pipe.minor_loss = v,
                    Roughness => pipe.roughness = v,
                    _ => pipe.length = v,
                }
            }
        }
        (c @ (Component::HeadPump | Component::PowerPump), p) => {
            let idx: Vec<usize> = model
                .pumps
                .iter()
                .enumerate()
                .filter(|(_, pump)| pump_matches(c, &pump.kind))
                .map(|(i, _)| i)
                .collect();
            match p {
                InitialStatus | BaseSpeed | Power => {
                    for (i, v) in idx.into_iter().zip(scalars(values)) {
                        let pump = &mut model.pumps[i];
                        match p {
                            InitialStatus => pump.status = status_from_code(v),
                            BaseSpeed => pump.base_speed = v,
                            _ => {
                                if let PumpKind::Power { power } = &mut pump.kind {
                                    *power = v;
                                }
                            }
                        }
                    }
                }
                EnergyPattern => {
                    for (i, s) in idx.into_iter().zip(series(values)) {
                        let name = format!("energy:{}", model.pumps[i].name);
                        model.patterns.insert(name.clone(), s);
                        model.pumps[i].energy_pattern = Some(name);
                    }
                }
                PumpCurveX | PumpCurveY | EfficiencyX | EfficiencyY => {
                    for (i, s) in idx.into_iter().zip(series(values)) {
                        let pump = &mut model.pumps[i];
                        let is_pump_curve = matches!(p, PumpCurveX | PumpCurveY);
                        let (old, prefix) = if is_pump_curve {
                            match &pump.kind {
                                PumpKind::Head { curve } => (Some(curve.clone()), "pump"),
                                PumpKind::Power { .. } => (None, "pump"),
                            }
                        } else {
                            (pump.efficiency_curve.clone(), "effic")
                        };
                        let Some(old) = old else { continue };
                        let mut points = model.curves.get(&old).cloned().unwrap_or_default();
                        points.resize(s.len(), (0.0, 0.0));
                        for (pt, v) in points.iter_mut().zip(&s) {
                            if p_is_x(p) {
                                pt.0 = *v;
                            } else {
                                pt.1 = *v;
                            }
                        }
                        let name = format!("{prefix}:{}", pump.name);
                        model.curves.insert(name.clone(), points);
                        if is_pump_curve {
                            pump.kind = PumpKind::Head { curve: name };
                        } else {
                            pump.efficiency_curve = Some(name);
                        }
                    }
                }
                _ => {}
            }
        }
        (valve, InitialSetting) => {
            if let Some(kind) = valve.valve_kind() {
                let vals = scalars(values);
                for (v, s) in model.valves.iter_mut().filter(|v| v.kind == kind).zip(vals) {
                    v.setting = s;
                }
            }
        }
        _ => {}
    }
}

/// Resample every pattern onto the hydraulic time step over the simulation
/// duration, so that per-step series can be attached without changing the
/// meaning of existing patterns.
pub fn expand_patterns(model: &mut NetworkModel) {
    let steps = model.times.num_steps();
    let dt = model.times.time_step;
    let expanded: Vec<(String, Vec<f64>)> = model
        .patterns
        .keys()
        .map(|name| {
            let series = (0..steps)
                .map(|k| model.pattern_value(Some(name), k as f64 * dt))
                .collect();
            (name.clone(), series)
        })
        .collect();
    model.patterns.extend(expanded);
    model.times.pattern_step = dt;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_ids_unique_and_parse() {
        for (i, a) in CATALOGUE.iter().enumerate() {
            for b in &CATALOGUE[i + 1..] {
                assert_ne!(a.id, b.id);
            }
            let parsed: ParamId = a.id.to_string().parse().unwrap();
            assert_eq!(parsed, a.id);
            assert!(a.range.0 <= a.range.1);
        }
    }

    #[test]
    fn file_tokens_have_no_underscore() {
        for c in Component::ALL {
            assert!(!c.file_token().contains('_'));
        }
    }
}
