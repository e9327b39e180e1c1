//! EPANET INP reading and writing.
//!
//! Only the hydraulic subset of the format is modelled. Sections outside the
//! whitelist are skipped and recorded in [`NetworkModel::skipped_sections`].

mod parse;
mod units;
mod write;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::{parse_inp, read_inp_file};
pub use units::{convert_to_si, FlowUnit, PSI_TO_M};
pub use write::serialize_inp;

#[derive(Debug, Error)]
pub enum InpError {
    #[error("line {line}: malformed [{section}] entry: {reason}")]
    MalformedSection {
        line: usize,
        section: String,
        reason: String,
    },
    #[error("{owner} references unknown {kind} '{target}'")]
    DanglingReference {
        owner: String,
        kind: &'static str,
        target: String,
    },
    #[error("duplicate {kind} name '{name}'")]
    DuplicateName { kind: &'static str, name: String },
    #[error("unsupported flow unit '{0}'")]
    UnsupportedUnit(String),
    #[error("input is not valid UTF-8 (byte offset {0})")]
    Encoding(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeadlossFormula {
    HazenWilliams,
    DarcyWeisbach,
    ChezyManning,
}

impl HeadlossFormula {
    pub fn token(self) -> &'static str {
        match self {
            HeadlossFormula::HazenWilliams => "H-W",
            HeadlossFormula::DarcyWeisbach => "D-W",
            HeadlossFormula::ChezyManning => "C-M",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Junction {
    pub name: String,
    pub elevation: f64,
    pub base_demand: f64,
    pub demand_pattern: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reservoir {
    pub name: String,
    pub base_head: f64,
    pub head_pattern: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tank {
    pub name: String,
    pub elevation: f64,
    pub init_level: f64,
    pub min_level: f64,
    pub max_level: f64,
    pub diameter: f64,
    pub min_volume: f64,
    pub volume_curve: Option<String>,
}

impl Tank {
    /// Cross-sectional area of the cylindrical tank.
    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.diameter * self.diameter / 4.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkStatus {
    Open,
    Closed,
    /// Check valve: the pipe only conducts flow from start to end.
    Cv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pipe {
    pub name: String,
    pub start: String,
    pub end: String,
    pub length: f64,
    pub diameter: f64,
    pub roughness: f64,
    pub minor_loss: f64,
    pub status: LinkStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PumpKind {
    Head { curve: String },
    /// Constant power in kW (hp before conversion for US units).
    Power { power: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pump {
    pub name: String,
    pub start: String,
    pub end: String,
    pub kind: PumpKind,
    pub base_speed: f64,
    pub speed_pattern: Option<String>,
    pub energy_pattern: Option<String>,
    pub efficiency_curve: Option<String>,
    pub status: LinkStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ValveKind {
    Prv,
    Psv,
    Pbv,
    Fcv,
    Tcv,
    Gpv,
}

impl ValveKind {
    pub fn token(self) -> &'static str {
        match self {
            ValveKind::Prv => "PRV",
            ValveKind::Psv => "PSV",
            ValveKind::Pbv => "PBV",
            ValveKind::Fcv => "FCV",
            ValveKind::Tcv => "TCV",
            ValveKind::Gpv => "GPV",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        Some(match s.to_ascii_uppercase().as_str() {
            "PRV" => ValveKind::Prv,
            "PSV" => ValveKind::Psv,
            "PBV" => ValveKind::Pbv,
            "FCV" => ValveKind::Fcv,
            "TCV" => ValveKind::Tcv,
            "GPV" => ValveKind::Gpv,
            _ => return None,
        })
    }

    /// GPV and PBV are read but not simulated.
    pub fn is_simulated(self) -> bool {
        !matches!(self, ValveKind::Pbv | ValveKind::Gpv)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Valve {
    pub name: String,
    pub start: String,
    pub end: String,
    pub diameter: f64,
    pub kind: ValveKind,
    /// Pressure (PRV/PSV/PBV), flow (FCV) or loss coefficient (TCV). Unused for GPV.
    pub setting: f64,
    /// Head-loss curve of a GPV.
    pub setting_curve: Option<String>,
    pub minor_loss: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationTimes {
    /// Hours.
    pub duration: f64,
    /// Hydraulic time step, hours.
    pub time_step: f64,
    /// Pattern time step, hours.
    pub pattern_step: f64,
}

impl Default for SimulationTimes {
    fn default() -> Self {
        SimulationTimes {
            duration: 0.0,
            time_step: 1.0,
            pattern_step: 1.0,
        }
    }
}

impl SimulationTimes {
    /// Number of recorded snapshots. A zero duration still yields a single
    /// steady-state snapshot.
    pub fn num_steps(&self) -> usize {
        if self.duration <= 0.0 {
            1
        } else {
            (self.duration / self.time_step).round().max(1.0) as usize
        }
    }
}

/// Typed network graph plus the operating data needed for hydraulics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkModel {
    pub name: String,
    pub junctions: Vec<Junction>,
    pub reservoirs: Vec<Reservoir>,
    pub tanks: Vec<Tank>,
    pub pipes: Vec<Pipe>,
    pub pumps: Vec<Pump>,
    pub valves: Vec<Valve>,
    pub patterns: BTreeMap<String, Vec<f64>>,
    pub curves: BTreeMap<String, Vec<(f64, f64)>>,
    pub coordinates: BTreeMap<String, (f64, f64)>,
    pub times: SimulationTimes,
    pub flow_unit: FlowUnit,
    pub headloss: HeadlossFormula,
    /// Pattern applied to junctions without their own (EPANET's `Pattern` option).
    pub default_pattern: Option<String>,
    /// Set once [`convert_to_si`] has run.
    pub in_si: bool,
    /// Sections that were present but not modelled.
    pub skipped_sections: Vec<String>,
    /// Non-fatal findings (negative demands, unsupported valves, controls present).
    pub flags: Vec<String>,
}

impl Default for NetworkModel {
    fn default() -> Self {
        NetworkModel {
            name: String::new(),
            junctions: Vec::new(),
            reservoirs: Vec::new(),
            tanks: Vec::new(),
            pipes: Vec::new(),
            pumps: Vec::new(),
            valves: Vec::new(),
            patterns: BTreeMap::new(),
            curves: BTreeMap::new(),
            coordinates: BTreeMap::new(),
            times: SimulationTimes::default(),
            flow_unit: FlowUnit::Gpm,
            headloss: HeadlossFormula::HazenWilliams,
            default_pattern: None,
            in_si: false,
            skipped_sections: Vec::new(),
            flags: Vec::new(),
        }
    }
}

/// Node classes in the fixed order used for node indexing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeKind {
    Junction,
    Reservoir,
    Tank,
}

/// Link classes in the fixed order used for link indexing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LinkKind {
    Pipe,
    Pump,
    Valve,
}

impl NetworkModel {
    pub fn node_count(&self) -> usize {
        self.junctions.len() + self.reservoirs.len() + self.tanks.len()
    }

    pub fn link_count(&self) -> usize {
        self.pipes.len() + self.pumps.len() + self.valves.len()
    }

    /// Node names in index order: junctions, reservoirs, tanks.
    pub fn node_names(&self) -> Vec<&str> {
        self.junctions
            .iter()
            .map(|j| j.name.as_str())
            .chain(self.reservoirs.iter().map(|r| r.name.as_str()))
            .chain(self.tanks.iter().map(|t| t.name.as_str()))
            .collect()
    }

    /// Link names in index order: pipes, pumps, valves.
    pub fn link_names(&self) -> Vec<&str> {
        self.pipes
            .iter()
            .map(|p| p.name.as_str())
            .chain(self.pumps.iter().map(|p| p.name.as_str()))
            .chain(self.valves.iter().map(|v| v.name.as_str()))
            .collect()
    }

    /// `(start, link, end)` for every link in index order.
    pub fn adjacency(&self) -> Vec<(String, String, String)> {
        let pipes = self
            .pipes
            .iter()
            .map(|p| (p.start.clone(), p.name.clone(), p.end.clone()));
        let pumps = self
            .pumps
            .iter()
            .map(|p| (p.start.clone(), p.name.clone(), p.end.clone()));
        let valves = self
            .valves
            .iter()
            .map(|v| (v.start.clone(), v.name.clone(), v.end.clone()));
        pipes.chain(pumps).chain(valves).collect()
    }

    pub fn node_kind(&self, name: &str) -> Option<NodeKind> {
        if self.junctions.iter().any(|j| j.name == name) {
            Some(NodeKind::Junction)
        } else if self.reservoirs.iter().any(|r| r.name == name) {
            Some(NodeKind::Reservoir)
        } else if self.tanks.iter().any(|t| t.name == name) {
            Some(NodeKind::Tank)
        } else {
            None
        }
    }

    /// Elevation of any node; reservoirs report their base head.
    pub fn node_elevation(&self, name: &str) -> Option<f64> {
        if let Some(j) = self.junctions.iter().find(|j| j.name == name) {
            return Some(j.elevation);
        }
        if let Some(t) = self.tanks.iter().find(|t| t.name == name) {
            return Some(t.elevation);
        }
        self.reservoirs
            .iter()
            .find(|r| r.name == name)
            .map(|r| r.base_head)
    }

    /// Pattern value at a given hour, wrapping around the pattern length.
    /// A missing or empty pattern is the constant 1.
    pub fn pattern_value(&self, pattern: Option<&str>, hour: f64) -> f64 {
        let Some(values) = pattern.and_then(|p| self.patterns.get(p)) else {
            return 1.0;
        };
        if values.is_empty() {
            return 1.0;
        }
        let step = if self.times.pattern_step > 0.0 {
            self.times.pattern_step
        } else {
            1.0
        };
        let idx = ((hour / step) + 1e-9).floor() as usize % values.len();
        values[idx]
    }

    /// Demand pattern name effective for a junction.
    pub fn junction_pattern<'a>(&'a self, junction: &'a Junction) -> Option<&'a str> {
        junction
            .demand_pattern
            .as_deref()
            .or(self.default_pattern.as_deref())
            .or_else(|| self.patterns.contains_key("1").then_some("1"))
    }

    /// Check the structural invariants: unique names, endpoints and
    /// pattern/curve references resolve.
    pub fn validate(&self) -> Result<(), InpError> {
        use std::collections::HashSet;
        let mut nodes = HashSet::new();
        for name in self.node_names() {
            if !nodes.insert(name) {
                return Err(InpError::DuplicateName {
                    kind: "node",
                    name: name.to_string(),
                });
            }
        }
        let mut links = HashSet::new();
        for name in self.link_names() {
            if !links.insert(name) {
                return Err(InpError::DuplicateName {
                    kind: "link",
                    name: name.to_string(),
                });
            }
        }
        for (start, link, end) in self.adjacency() {
            for node in [&start, &end] {
                if !nodes.contains(node.as_str()) {
                    return Err(InpError::DanglingReference {
                        owner: format!("link {link}"),
                        kind: "node",
                        target: node.clone(),
                    });
                }
            }
        }
        let pattern_refs = self
            .junctions
            .iter()
            .filter_map(|j| j.demand_pattern.as_ref().map(|p| (&j.name, p)))
            .chain(
                self.reservoirs
                    .iter()
                    .filter_map(|r| r.head_pattern.as_ref().map(|p| (&r.name, p))),
            )
            .chain(self.pumps.iter().flat_map(|p| {
                [p.speed_pattern.as_ref(), p.energy_pattern.as_ref()]
                    .into_iter()
                    .flatten()
                    .map(move |pat| (&p.name, pat))
            }));
        for (owner, pattern) in pattern_refs {
            if !self.patterns.contains_key(pattern) {
                return Err(InpError::DanglingReference {
                    owner: owner.clone(),
                    kind: "pattern",
                    target: pattern.clone(),
                });
            }
        }
        let curve_refs = self
            .pumps
            .iter()
            .flat_map(|p| {
                let head = match &p.kind {
                    PumpKind::Head { curve } => Some(curve),
                    PumpKind::Power { .. } => None,
                };
                [head, p.efficiency_curve.as_ref()]
                    .into_iter()
                    .flatten()
                    .map(move |c| (&p.name, c))
            })
            .chain(
                self.valves
                    .iter()
                    .filter_map(|v| v.setting_curve.as_ref().map(|c| (&v.name, c))),
            )
            .chain(
                self.tanks
                    .iter()
                    .filter_map(|t| t.volume_curve.as_ref().map(|c| (&t.name, c))),
            );
        for (owner, curve) in curve_refs {
            match self.curves.get(curve) {
                Some(points) if !points.is_empty() => {}
                _ => {
                    return Err(InpError::DanglingReference {
                        owner: owner.clone(),
                        kind: "curve",
                        target: curve.clone(),
                    })
                }
            }
        }
        Ok(())
    }
}
