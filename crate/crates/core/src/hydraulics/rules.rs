use serde::{Deserialize, Serialize};

use super::simulate::ScenarioResult;
use crate::inp::NetworkModel;
use crate::params::ParamKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleId {
    PressureInRange,
    NoSolverDivergence,
    TimeConsistency,
}

impl RuleId {
    pub fn key(self) -> &'static str {
        match self {
            RuleId::PressureInRange => "pressure_in_range",
            RuleId::NoSolverDivergence => "no_solver_divergence",
            RuleId::TimeConsistency => "time_consistency",
        }
    }
}

impl std::fmt::Display for RuleId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Rule {
    /// Junction pressure in `(min, max]` at every step, except the listed
    /// junction indices.
    PressureInRange { min: f64, max: f64, skip: Vec<usize> },
    NoSolverDivergence,
    /// One snapshot per step and one value per step in every pattern input.
    TimeConsistency,
}

impl Rule {
    pub fn id(&self) -> RuleId {
        match self {
            Rule::PressureInRange { .. } => RuleId::PressureInRange,
            Rule::NoSolverDivergence => RuleId::NoSolverDivergence,
            Rule::TimeConsistency => RuleId::TimeConsistency,
        }
    }

    pub fn check(&self, result: &ScenarioResult) -> bool {
        match self {
            Rule::PressureInRange { min, max, skip } => result.snapshots.iter().all(|s| {
                s.pressure[..result.junction_count]
                    .iter()
                    .enumerate()
                    .all(|(j, p)| skip.contains(&j) || (*p > *min && *p <= *max))
            }),
            Rule::NoSolverDivergence => {
                result.solver_error.is_none()
                    && result.snapshots.iter().all(|s| {
                        s.head.iter().chain(&s.flow).all(|v| v.is_finite())
                    })
            }
            Rule::TimeConsistency => {
                result.snapshots.len() == result.expected_steps
                    && result.inputs.iter().all(|(id, values)| {
                        id.info().kind != ParamKind::Pattern
                            || match values {
                                crate::params::ParamValues::Series(s) => {
                                    s.iter().all(|v| v.len() == result.expected_steps)
                                }
                                crate::params::ParamValues::Scalars(_) => true,
                            }
                    })
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
}

impl RuleSet {
    pub fn empty() -> Self {
        RuleSet { rules: Vec::new() }
    }

    /// Pressure in `(lo, hi]` m on all junctions not named in `skip_names`,
    /// no solver divergence and time consistency.
    pub fn standard(model: &NetworkModel, pressure_range: (f64, f64), skip_names: &[String]) -> Self {
        let skip = model
            .junctions
            .iter()
            .enumerate()
            .filter(|(_, j)| skip_names.contains(&j.name))
            .map(|(i, _)| i)
            .collect();
        RuleSet {
            rules: vec![
                Rule::NoSolverDivergence,
                Rule::TimeConsistency,
                Rule::PressureInRange {
                    min: pressure_range.0,
                    max: pressure_range.1,
                    skip,
                },
            ],
        }
    }

    pub fn first_failure(&self, result: &ScenarioResult) -> Option<RuleId> {
        self.rules.iter().find(|r| !r.check(result)).map(Rule::id)
    }
}

/// Apply every rule; sets `valid` and the first failing rule. Returns `valid`.
pub fn validate_scenario(result: &mut ScenarioResult, rules: &RuleSet) -> bool {
    result.failure_reason = rules.first_failure(result);
    result.valid = result.failure_reason.is_none();
    result.valid
}
