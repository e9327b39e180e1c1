//! Sampling-bound tuning: a particle swarm per parameter, run one
//! parameter at a time with every other entry frozen, repeated over epochs.

mod pso;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hydraulics::{simulate_scenario, RuleSet};
use crate::params::ParamId;
use crate::stats;
use crate::strategies::{sample_scenario, scenario_rng, SamplingConfig, ScenarioContext};

pub use pso::{project, pso_maximize, Bounds, Particle, PsoOutcome, SwarmConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessBreakdown {
    pub f_success: f64,
    pub f_ubiqr: f64,
    pub f_range: f64,
    pub f_pso: f64,
}

impl FitnessBreakdown {
    pub fn compose(f_success: f64, f_ubiqr: f64, f_range: f64, alpha: f64) -> Self {
        FitnessBreakdown {
            f_success,
            f_ubiqr,
            f_range,
            f_pso: f_success * (alpha * f_ubiqr + (1.0 - alpha) * f_range),
        }
    }
}

/// Share of valid cases.
pub fn f_success(valid: &[bool]) -> f64 {
    if valid.is_empty() {
        return 0.0;
    }
    valid.iter().filter(|v| **v).count() as f64 / valid.len() as f64
}

/// Upper Tukey fence `q3 + 1.5·(q3 − q1)`.
pub fn ubiqr(values: &[f64]) -> f64 {
    let sorted = stats::sorted_copy(values);
    let q1 = stats::quantile_sorted(&sorted, 0.25);
    let q3 = stats::quantile_sorted(&sorted, 0.75);
    q3 + 1.5 * (q3 - q1)
}

/// Spread of generated junction demand relative to the baseline. Zero when
/// either side is empty or the baseline fence is zero.
pub fn f_ubiqr(generated: &[f64], baseline: &[f64]) -> f64 {
    if generated.is_empty() || baseline.is_empty() {
        return 0.0;
    }
    ratio(ubiqr(generated), ubiqr(baseline))
}

fn ratio(generated: f64, baseline: f64) -> f64 {
    if baseline == 0.0 || !baseline.is_finite() {
        log::warn!("baseline demand spread is zero; spread term set to 0");
        return 0.0;
    }
    generated / baseline
}

pub fn f_range(lb: f64, ub: f64) -> f64 {
    (ub - lb).abs()
}

/// Result of simulating a batch of sampled cases.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseBatch {
    pub valid: Vec<bool>,
    /// Junction output demands of the valid cases, pooled.
    pub demands: Vec<f64>,
}

/// Simulates sampled cases under a fixed evaluation seed so that every
/// configuration is judged on the same random streams.
#[derive(Debug, Clone)]
pub struct Evaluator {
    pub scenario: ScenarioContext,
    pub rules: RuleSet,
    pub n_cases: usize,
    pub alpha: f64,
    pub eval_seed: u64,
    pub baseline_ubiqr: f64,
}

impl Evaluator {
    pub fn new(scenario: ScenarioContext, rules: RuleSet, n_cases: usize, alpha: f64, eval_seed: u64) -> Self {
        let baseline = simulate_scenario(&scenario.model, scenario.baseline.clone(), &RuleSet::empty());
        let demands = baseline.junction_demands();
        let baseline_ubiqr = if demands.is_empty() { 0.0 } else { ubiqr(&demands) };
        Evaluator {
            scenario,
            rules,
            n_cases: n_cases.max(1),
            alpha,
            eval_seed,
            baseline_ubiqr,
        }
    }

    pub fn run_cases(&self, config: &SamplingConfig) -> CaseBatch {
        let outcomes: Vec<(bool, Vec<f64>)> = (0..self.n_cases as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = scenario_rng(self.eval_seed, i);
                let Ok(sampled) = sample_scenario(&self.scenario, config, &mut rng) else {
                    return (false, Vec::new());
                };
                let result = simulate_scenario(&sampled.model, sampled.inputs, &self.rules);
                let demands = if result.valid { result.junction_demands() } else { Vec::new() };
                (result.valid, demands)
            })
            .collect();
        let valid = outcomes.iter().map(|o| o.0).collect();
        let demands = outcomes.into_iter().flat_map(|o| o.1).collect();
        CaseBatch { valid, demands }
    }

    /// Composite fitness with a given range term.
    pub fn evaluate(&self, config: &SamplingConfig, range: f64) -> FitnessBreakdown {
        let batch = self.run_cases(config);
        let success = f_success(&batch.valid);
        let spread = if batch.demands.is_empty() {
            0.0
        } else {
            ratio(ubiqr(&batch.demands), self.baseline_ubiqr)
        };
        FitnessBreakdown::compose(success, spread, range, self.alpha)
    }

    /// Fitness of a whole configuration: the range term is the mean bound
    /// width over the tunable parameters (1 when there are none).
    pub fn composite(&self, config: &SamplingConfig) -> FitnessBreakdown {
        let tunable = config.tunable();
        let range = if tunable.is_empty() {
            1.0
        } else {
            tunable
                .iter()
                .map(|id| {
                    let e = config.entry(*id);
                    f_range(e.lb, e.ub)
                })
                .sum::<f64>()
                / tunable.len() as f64
        };
        self.evaluate(config, range)
    }
}

fn with_bounds(config: &SamplingConfig, id: ParamId, b: Bounds) -> SamplingConfig {
    let mut c = config.clone();
    let mut e = c.entry(id);
    e.lb = b.0;
    e.ub = b.1;
    c.set(id, e);
    c
}

/// Swarm search over the bounds of one parameter, everything else frozen.
pub fn pso_optimize_parameter<R: Rng + ?Sized>(
    id: ParamId,
    frozen: &SamplingConfig,
    evaluator: &Evaluator,
    swarm: &SwarmConfig,
    rng: &mut R,
) -> (Bounds, FitnessBreakdown) {
    let entry = frozen.entry(id);
    let outcome = pso_maximize((entry.lb, entry.ub), swarm, rng, |b| {
        evaluator.evaluate(&with_bounds(frozen, id, b), f_range(b.0, b.1)).f_pso
    });
    let best = outcome.best;
    (best, evaluator.evaluate(&with_bounds(frozen, id, best), f_range(best.0, best.1)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub order: Vec<ParamId>,
    /// Parameters whose new bounds were kept.
    pub accepted: Vec<ParamId>,
    pub fitness: FitnessBreakdown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HspoReport {
    pub config: SamplingConfig,
    pub initial: FitnessBreakdown,
    pub epochs: Vec<EpochRecord>,
}

impl HspoReport {
    pub fn final_fitness(&self) -> FitnessBreakdown {
        self.epochs.last().map_or(self.initial, |e| e.fitness)
    }
}

/// Divide-and-conquer tuning. Each epoch visits the tunable parameters in
/// random order; a parameter's new bounds are kept only when the composite
/// fitness of the whole configuration does not drop. Stops after
/// `max_epochs` or once an epoch gains less than `tolerance`.
pub fn hspo_run<R: Rng + ?Sized>(
    evaluator: &Evaluator,
    blueprint: &SamplingConfig,
    swarm: &SwarmConfig,
    rng: &mut R,
) -> HspoReport {
    let mut config = blueprint.clone();
    let initial = evaluator.composite(&config);
    let mut report = HspoReport {
        config: config.clone(),
        initial,
        epochs: Vec::new(),
    };
    let params = config.tunable();
    if params.is_empty() {
        return report;
    }
    let mut current = initial;
    for epoch in 0..swarm.max_epochs {
        let start = current.f_pso;
        let mut order = params.clone();
        order.shuffle(rng);
        let mut accepted = Vec::new();
        for &id in &order {
            let (best, _) = pso_optimize_parameter(id, &config, evaluator, swarm, rng);
            let candidate = with_bounds(&config, id, best);
            let fitness = evaluator.composite(&candidate);
            if fitness.f_pso >= current.f_pso {
                config = candidate;
                current = fitness;
                accepted.push(id);
            }
            log::info!("epoch {epoch} {id}: bounds {best:?}, composite {:.4}", current.f_pso);
        }
        report.epochs.push(EpochRecord {
            epoch,
            order,
            accepted,
            fitness: current,
        });
        if current.f_pso - start < swarm.tolerance {
            break;
        }
    }
    report.config = config;
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_by_hand() {
        let f = FitnessBreakdown::compose(0.5, 1.2, 0.4, 0.5);
        assert_eq!(f.f_pso, 0.4);
        assert_eq!(FitnessBreakdown::compose(0.0, 3.0, 1.0, 0.5).f_pso, 0.0);
    }

    #[test]
    fn fence_of_four() {
        assert_eq!(ubiqr(&[1.0, 2.0, 3.0, 4.0]), 5.5);
        assert_eq!(f_ubiqr(&[1.0, 2.0], &[0.0, 0.0]), 0.0);
    }
}
