use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Normalized `(lb, ub)` pair.
pub type Bounds = (f64, f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SwarmConfig {
    pub swarm_size: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Swarm iterations per parameter.
    pub iterations: usize,
    pub max_epochs: usize,
    /// Weight of the spread term against the range term.
    pub alpha: f64,
    pub n_cases: usize,
    /// Smallest composite gain that keeps the epochs going.
    pub tolerance: f64,
    pub max_velocity: f64,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        SwarmConfig {
            swarm_size: 20,
            inertia: 0.729,
            cognitive: 1.494,
            social: 1.494,
            iterations: 20,
            max_epochs: 10,
            alpha: 0.5,
            n_cases: 100,
            tolerance: 1e-3,
            max_velocity: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub position: Bounds,
    pub velocity: Bounds,
    pub best: Bounds,
    pub best_fitness: f64,
}

/// Clamp into `[0, 1]` and swap so that `lb <= ub`.
pub fn project(b: Bounds) -> Bounds {
    let lo = b.0.clamp(0.0, 1.0);
    let hi = b.1.clamp(0.0, 1.0);
    if lo <= hi {
        (lo, hi)
    } else {
        (hi, lo)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoOutcome {
    pub best: Bounds,
    pub fitness: f64,
    /// Global best after initialization and after every iteration.
    pub history: Vec<f64>,
}

/// Maximize `fitness` over bound pairs. Particle 0 starts at `incumbent`,
/// the rest uniformly at random; all start at rest. The global best only
/// changes on strict improvement, so the result is never worse than the
/// incumbent. Particles of one iteration are evaluated in parallel.
pub fn pso_maximize<R, F>(incumbent: Bounds, swarm: &SwarmConfig, rng: &mut R, fitness: F) -> PsoOutcome
where
    R: Rng + ?Sized,
    F: Fn(Bounds) -> f64 + Sync,
{
    let n = swarm.swarm_size.max(1);
    let mut positions = vec![project(incumbent)];
    while positions.len() < n {
        positions.push(project((rng.random::<f64>(), rng.random::<f64>())));
    }
    let scores: Vec<f64> = positions.par_iter().map(|p| fitness(*p)).collect();
    let mut particles: Vec<Particle> = positions
        .iter()
        .zip(&scores)
        .map(|(p, s)| Particle {
            position: *p,
            velocity: (0.0, 0.0),
            best: *p,
            best_fitness: *s,
        })
        .collect();
    let mut g = 0;
    for (i, p) in particles.iter().enumerate() {
        if p.best_fitness > particles[g].best_fitness {
            g = i;
        }
    }
    let mut gbest = particles[g].best;
    let mut gfit = particles[g].best_fitness;
    let mut history = vec![gfit];
    let vmax = swarm.max_velocity;

    for _ in 0..swarm.iterations {
        for p in particles.iter_mut() {
            let step = |x: f64, v: f64, pb: f64, gb: f64, r1: f64, r2: f64| {
                (swarm.inertia * v + swarm.cognitive * r1 * (pb - x) + swarm.social * r2 * (gb - x))
                    .clamp(-vmax, vmax)
            };
            let (r1a, r2a, r1b, r2b) = (rng.random(), rng.random(), rng.random(), rng.random());
            p.velocity = (
                step(p.position.0, p.velocity.0, p.best.0, gbest.0, r1a, r2a),
                step(p.position.1, p.velocity.1, p.best.1, gbest.1, r1b, r2b),
            );
            p.position = project((p.position.0 + p.velocity.0, p.position.1 + p.velocity.1));
        }
        let scores: Vec<f64> = particles.par_iter().map(|p| fitness(p.position)).collect();
        for (p, s) in particles.iter_mut().zip(scores) {
            if s > p.best_fitness {
                p.best = p.position;
                p.best_fitness = s;
            }
            if s > gfit {
                gbest = p.position;
                gfit = s;
            }
        }
        history.push(gfit);
    }
    PsoOutcome {
        best: gbest,
        fitness: gfit,
        history,
    }
}
