use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{HeadlossFormula, InpError, NetworkModel, PumpKind, ValveKind};

const FT: f64 = 0.3048;
const INCH: f64 = 0.0254;
const US_GALLON: f64 = 3.785_411_784e-3;
const IMP_GALLON: f64 = 4.546_09e-3;
const ACRE_FOOT: f64 = 1_233.481_837_547_52;
const HP_TO_KW: f64 = 0.745_699_872;
/// Metres of water column per psi (EPANET uses 0.4333 psi per foot).
pub const PSI_TO_M: f64 = FT / 0.4333;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FlowUnit {
    Cfs,
    Gpm,
    Mgd,
    Imgd,
    Afd,
    Lps,
    Lpm,
    Mld,
    Cmh,
    Cmd,
}

impl FlowUnit {
    /// Cubic metres per second for one unit of flow.
    pub fn to_cms(self) -> f64 {
        match self {
            FlowUnit::Cfs => FT * FT * FT,
            FlowUnit::Gpm => US_GALLON / 60.0,
            FlowUnit::Mgd => US_GALLON * 1e6 / 86_400.0,
            FlowUnit::Imgd => IMP_GALLON * 1e6 / 86_400.0,
            FlowUnit::Afd => ACRE_FOOT / 86_400.0,
            FlowUnit::Lps => 1e-3,
            FlowUnit::Lpm => 1e-3 / 60.0,
            FlowUnit::Mld => 1e3 / 86_400.0,
            FlowUnit::Cmh => 1.0 / 3_600.0,
            FlowUnit::Cmd => 1.0 / 86_400.0,
        }
    }

    pub fn is_us(self) -> bool {
        matches!(
            self,
            FlowUnit::Cfs | FlowUnit::Gpm | FlowUnit::Mgd | FlowUnit::Imgd | FlowUnit::Afd
        )
    }

    pub fn token(self) -> &'static str {
        match self {
            FlowUnit::Cfs => "CFS",
            FlowUnit::Gpm => "GPM",
            FlowUnit::Mgd => "MGD",
            FlowUnit::Imgd => "IMGD",
            FlowUnit::Afd => "AFD",
            FlowUnit::Lps => "LPS",
            FlowUnit::Lpm => "LPM",
            FlowUnit::Mld => "MLD",
            FlowUnit::Cmh => "CMH",
            FlowUnit::Cmd => "CMD",
        }
    }
}

impl fmt::Display for FlowUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for FlowUnit {
    type Err = InpError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "CFS" => FlowUnit::Cfs,
            "GPM" => FlowUnit::Gpm,
            "MGD" => FlowUnit::Mgd,
            "IMGD" => FlowUnit::Imgd,
            "AFD" => FlowUnit::Afd,
            "LPS" => FlowUnit::Lps,
            "LPM" => FlowUnit::Lpm,
            "MLD" => FlowUnit::Mld,
            "CMH" => FlowUnit::Cmh,
            "CMD" => FlowUnit::Cmd,
            other => return Err(InpError::UnsupportedUnit(other.to_string())),
        })
    }
}

/// Multipliers from file units to SI for each kind of quantity.
#[derive(Debug, Clone, Copy)]
struct Factors {
    flow: f64,
    length: f64,
    diameter: f64,
    dw_roughness: f64,
    power: f64,
    volume: f64,
    pressure: f64,
}

impl Factors {
    fn for_unit(unit: FlowUnit) -> Self {
        if unit.is_us() {
            Factors {
                flow: unit.to_cms(),
                length: FT,
                diameter: INCH,
                // millifeet to millimetres
                dw_roughness: FT,
                power: HP_TO_KW,
                volume: FT * FT * FT,
                pressure: PSI_TO_M,
            }
        } else {
            Factors {
                flow: unit.to_cms(),
                length: 1.0,
                diameter: 1e-3,
                dw_roughness: 1.0,
                power: 1.0,
                volume: 1.0,
                pressure: 1.0,
            }
        }
    }

    fn inverted(self) -> Self {
        Factors {
            flow: 1.0 / self.flow,
            length: 1.0 / self.length,
            diameter: 1.0 / self.diameter,
            dw_roughness: 1.0 / self.dw_roughness,
            power: 1.0 / self.power,
            volume: 1.0 / self.volume,
            pressure: 1.0 / self.pressure,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum CurveRole {
    /// flow vs head
    Pump,
    /// flow vs efficiency percent
    Efficiency,
    /// flow vs head loss
    Valve,
    /// level vs volume
    Volume,
}

fn curve_roles(model: &NetworkModel) -> BTreeMap<String, CurveRole> {
    let mut roles = BTreeMap::new();
    for pump in &model.pumps {
        if let PumpKind::Head { curve } = &pump.kind {
            roles.insert(curve.clone(), CurveRole::Pump);
        }
        if let Some(c) = &pump.efficiency_curve {
            roles.insert(c.clone(), CurveRole::Efficiency);
        }
    }
    for valve in &model.valves {
        if let Some(c) = &valve.setting_curve {
            roles.insert(c.clone(), CurveRole::Valve);
        }
    }
    for tank in &model.tanks {
        if let Some(c) = &tank.volume_curve {
            roles.insert(c.clone(), CurveRole::Volume);
        }
    }
    roles
}

fn rescale(model: &mut NetworkModel, f: Factors) {
    let dw = model.headloss == HeadlossFormula::DarcyWeisbach;
    for j in &mut model.junctions {
        j.elevation *= f.length;
        j.base_demand *= f.flow;
    }
    for r in &mut model.reservoirs {
        r.base_head *= f.length;
    }
    for t in &mut model.tanks {
        t.elevation *= f.length;
        t.init_level *= f.length;
        t.min_level *= f.length;
        t.max_level *= f.length;
        t.diameter *= f.length;
        t.min_volume *= f.volume;
    }
    for p in &mut model.pipes {
        p.length *= f.length;
        p.diameter *= f.diameter;
        if dw {
            p.roughness *= f.dw_roughness;
        }
    }
    for p in &mut model.pumps {
        if let PumpKind::Power { power } = &mut p.kind {
            *power *= f.power;
        }
    }
    for v in &mut model.valves {
        v.diameter *= f.diameter;
        match v.kind {
            ValveKind::Prv | ValveKind::Psv | ValveKind::Pbv => v.setting *= f.pressure,
            ValveKind::Fcv => v.setting *= f.flow,
            ValveKind::Tcv | ValveKind::Gpv => {}
        }
    }
    let roles = curve_roles(model);
    for (name, points) in model.curves.iter_mut() {
        let (sx, sy) = match roles.get(name) {
            Some(CurveRole::Pump) | Some(CurveRole::Valve) => (f.flow, f.length),
            Some(CurveRole::Efficiency) => (f.flow, 1.0),
            Some(CurveRole::Volume) => (f.length, f.volume),
            None => (1.0, 1.0),
        };
        for (x, y) in points.iter_mut() {
            *x *= sx;
            *y *= sy;
        }
    }
}

/// Convert every quantity to SI: lengths, diameters and heads in m, flows in
/// m³/s, power in kW, volumes in m³. Darcy-Weisbach roughness ends up in mm.
/// The original unit tag is kept; a second call is a no-op.
pub fn convert_to_si(model: &NetworkModel) -> NetworkModel {
    let mut out = model.clone();
    if !out.in_si {
        let f = Factors::for_unit(out.flow_unit);
        rescale(&mut out, f);
        out.in_si = true;
    }
    out
}

/// Inverse of [`convert_to_si`], back to the model's original unit system.
pub(crate) fn convert_from_si(model: &NetworkModel) -> NetworkModel {
    let mut out = model.clone();
    if out.in_si {
        let f = Factors::for_unit(out.flow_unit).inverted();
        rescale(&mut out, f);
        out.in_si = false;
    }
    out
}
