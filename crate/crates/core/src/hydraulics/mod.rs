//! Hydraulic simulation: head loss relations, the steady-state solver, the
//! extended-period driver and the scenario rules.

pub mod headloss;
mod rules;
mod simulate;
mod solver;

use thiserror::Error;

pub use headloss::headloss;
pub use rules::{validate_scenario, Rule, RuleId, RuleSet};
pub use simulate::{simulate_scenario, OutputKind, ScenarioResult};
pub use solver::{
    fit_pump_curve, solve_steady_state, HydraulicNetwork, HydraulicState, LinkState, PumpCurve,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolverError {
    #[error("no reservoir or tank fixes a head")]
    NoFixedHead,
    #[error("junction index {0} is not connected to any fixed head")]
    Disconnected(usize),
    #[error("singular system matrix")]
    Singular,
    #[error("no convergence after {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("pump {0} has no usable head curve")]
    BadPumpCurve(String),
    #[error("link references unknown node {0}")]
    UnknownNode(String),
    #[error("boundary vectors do not match the network")]
    DimensionMismatch,
}
