//! Automatic demand generator: per-junction demand multiplier series built
//! from a profile-driven daily pattern, a yearly seasonal pattern and noise.

mod louvain;
mod savgol;

use std::f64::consts::{FRAC_PI_4, PI};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::inp::NetworkModel;
use crate::stats;

pub use louvain::{louvain_communities, Graph};
pub use savgol::{smooth_savgol, SavGolError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Low,
    Medium,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DemandProfile {
    Household,
    Commercial,
    Extreme,
    ZeroDemand,
}

/// Consumption level cut points: low `[0, q1)`, medium `[q1, q3)`, high `[q3, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsumptionBounds {
    pub q1: f64,
    pub q3: f64,
}

impl ConsumptionBounds {
    pub fn from_samples(samples: &[f64]) -> Self {
        let sorted = stats::sorted_copy(samples);
        ConsumptionBounds {
            q1: stats::quantile_sorted(&sorted, 0.25),
            q3: stats::quantile_sorted(&sorted, 0.75),
        }
    }

    pub fn range(&self, level: Level) -> (f64, f64) {
        match level {
            Level::Low => (0.0, self.q1),
            Level::Medium => (self.q1, self.q3),
            Level::High => (self.q3, 1.0),
        }
    }

    fn draw<R: Rng + ?Sized>(&self, level: Level, rng: &mut R) -> f64 {
        let (lo, hi) = self.range(level);
        match level {
            Level::High if hi > lo => rng.random_range(lo..=hi),
            _ if hi > lo => rng.random_range(lo..hi),
            _ => lo,
        }
    }
}

/// Draw `n` uniform values on `[0, 1]` and take their quartiles.
pub fn consumption_levels<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ConsumptionBounds {
    let samples: Vec<f64> = (0..n.max(1)).map(|_| rng.random::<f64>()).collect();
    ConsumptionBounds::from_samples(&samples)
}

/// Generator settings. Field names double as configuration keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdgConfig {
    /// Hours.
    pub duration: f64,
    /// Hours.
    pub time_step: f64,
    pub p_commercial: (f64, f64),
    pub extreme_dem_rate: f64,
    pub max_extreme_dem_junctions: usize,
    pub zero_dem_rate: f64,
    /// Use the baseline share of zero base-demand junctions instead of `zero_dem_rate`.
    pub zero_dem_from_baseline: bool,
    pub noise_range: (f64, f64),
    /// Standard deviation of the white noise inside the daily pattern.
    pub daily_noise_std: f64,
    /// Start of summer as a fraction of the year.
    pub summer_start: f64,
    /// Length of summer as a fraction of the year.
    pub summer_span: f64,
    pub summer_amplitude_range: (f64, f64),
    pub summer_rolling_rate: f64,
    pub yearly_pattern_num_harmonics: usize,
    pub profile_household: [Level; 4],
    pub profile_commercial: [Level; 4],
    pub profile_extreme: [Level; 4],
    /// Uniform draws behind the consumption quartiles.
    pub consumption_samples: usize,
    pub savgol_window: usize,
    pub savgol_order: usize,
    pub louvain_resolution: f64,
    pub louvain_threshold: f64,
}

impl Default for AdgConfig {
    fn default() -> Self {
        use Level::*;
        AdgConfig {
            duration: 24.0,
            time_step: 1.0,
            p_commercial: (0.25, 0.35),
            extreme_dem_rate: 0.02,
            max_extreme_dem_junctions: 2,
            zero_dem_rate: 0.05,
            zero_dem_from_baseline: false,
            noise_range: (0.01, 0.05),
            daily_noise_std: 0.02,
            summer_start: 5.0 / 12.0,
            summer_span: 3.0 / 12.0,
            summer_amplitude_range: (1.0, 2.0),
            summer_rolling_rate: 0.2,
            yearly_pattern_num_harmonics: 3,
            profile_household: [Low, High, Medium, Low],
            profile_commercial: [High, High, High, Medium],
            profile_extreme: [High, High, High, High],
            consumption_samples: 100,
            savgol_window: 7,
            savgol_order: 2,
            louvain_resolution: 1.0,
            louvain_threshold: 1e-7,
        }
    }
}

impl AdgConfig {
    pub fn steps(&self) -> usize {
        (self.duration / self.time_step).round().max(1.0) as usize
    }

    /// Samples per period of the yearly pattern: one day for runs of at
    /// most 24 h, one year otherwise.
    pub fn period(&self) -> usize {
        let hours = if self.duration <= 24.0 { 24.0 } else { 8760.0 };
        (hours / self.time_step).round().max(1.0) as usize
    }

    pub fn levels(&self, profile: DemandProfile) -> Option<[Level; 4]> {
        match profile {
            DemandProfile::Household => Some(self.profile_household),
            DemandProfile::Commercial => Some(self.profile_commercial),
            DemandProfile::Extreme => Some(self.profile_extreme),
            DemandProfile::ZeroDemand => None,
        }
    }
}

fn normal<R: Rng + ?Sized>(rng: &mut R, std: f64) -> f64 {
    if std <= 0.0 {
        return 0.0;
    }
    Normal::new(0.0, std).map_or(0.0, |d| d.sample(rng))
}

fn smooth(series: Vec<f64>, config: &AdgConfig) -> Vec<f64> {
    smooth_savgol(&series, config.savgol_window, config.savgol_order).unwrap_or(series)
}

/// Daily component for one junction. One day of level samples (four
/// six-hour segments) is drawn and tiled over the run. Each sample `x`
/// becomes `cos(θ) + sin(θ) + z` with `θ = x·π/4`, which keeps the level
/// ordering since `cos + sin` rises on `[0, π/4]`. The result is smoothed
/// and min-max normalized. Zero-demand junctions get all zeros.
pub fn daily_pattern<R: Rng + ?Sized>(
    profile: DemandProfile,
    bounds: ConsumptionBounds,
    config: &AdgConfig,
    rng: &mut R,
) -> Vec<f64> {
    let n = config.steps();
    let Some(levels) = config.levels(profile) else {
        return vec![0.0; n];
    };
    let per_day = ((24.0 / config.time_step).round() as usize).max(1);
    let day: Vec<f64> = (0..per_day)
        .map(|k| {
            let hour = k as f64 * config.time_step;
            let segment = ((hour / 6.0).floor() as usize).min(3);
            bounds.draw(levels[segment], rng)
        })
        .collect();
    let raw: Vec<f64> = (0..n)
        .map(|t| {
            let theta = day[t % per_day] * FRAC_PI_4;
            theta.cos() + theta.sin() + normal(rng, config.daily_noise_std)
        })
        .collect();
    let mut out = smooth(raw, config);
    stats::min_max_normalize(&mut out);
    out
}

/// `C·cos(2π(t − s_peak)/period)` for `t = 0..n`.
pub fn seasonal_component(n: usize, period: usize, amplitude: f64, peak: f64) -> Vec<f64> {
    let p = period.max(1) as f64;
    (0..n)
        .map(|t| amplitude * (2.0 * PI * (t as f64 - peak) / p).cos())
        .collect()
}

/// `A_0 + Σ A_n cos(2πnt/period) + B_n sin(2πnt/period)` for `t = 0..n`.
pub fn fourier_component(n: usize, period: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let p = period.max(1) as f64;
    (0..n)
        .map(|t| {
            let x = 2.0 * PI * t as f64 / p;
            a[0] + (1..a.len())
                .map(|k| a[k] * (k as f64 * x).cos() + b[k] * (k as f64 * x).sin())
                .sum::<f64>()
        })
        .collect()
}

/// Index of the summer peak: mid-summer by default, anywhere in the period
/// with probability `summer_rolling_rate`.
pub fn summer_peak<R: Rng + ?Sized>(config: &AdgConfig, rng: &mut R) -> f64 {
    let period = config.period() as f64;
    if rng.random_bool(config.summer_rolling_rate.clamp(0.0, 1.0)) {
        rng.random_range(0.0..period)
    } else {
        ((config.summer_start + config.summer_span / 2.0) * period).rem_euclid(period)
    }
}

/// Yearly component shared by every junction of a scenario. Built over at
/// least one full period, normalized there, then cut to the run length so a
/// short run sees its slice of the year rather than a stretched copy.
pub fn yearly_pattern<R: Rng + ?Sized>(config: &AdgConfig, rng: &mut R) -> Vec<f64> {
    let n = config.steps();
    let period = config.period();
    let len = n.max(period);
    let h = config.yearly_pattern_num_harmonics;
    let a: Vec<f64> = (0..=h).map(|_| rng.random::<f64>()).collect();
    let b: Vec<f64> = (0..=h).map(|_| rng.random::<f64>()).collect();
    let (clo, chi) = config.summer_amplitude_range;
    let c = if chi > clo { rng.random_range(clo..=chi) } else { clo };
    let peak = summer_peak(config, rng);
    let (nlo, nhi) = config.noise_range;
    let std = if nhi > nlo { rng.random_range(nlo..=nhi) } else { nlo };
    let y = fourier_component(len, period, &a, &b);
    let s = seasonal_component(len, period, c, peak);
    let mut out: Vec<f64> = y
        .iter()
        .zip(&s)
        .map(|(y, s)| y + s + normal(rng, std))
        .collect();
    stats::min_max_normalize(&mut out);
    out.truncate(n);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileAssignment {
    /// Profile of every junction, in junction order.
    pub profiles: Vec<DemandProfile>,
    pub p_commercial: f64,
    /// Commercial junctions before extreme and zero-demand reassignment.
    pub commercial_before_special: usize,
    pub extreme_scenario: bool,
}

impl ProfileAssignment {
    pub fn count(&self, profile: DemandProfile) -> usize {
        self.profiles.iter().filter(|p| **p == profile).count()
    }
}

/// Junction community ids from a node-level partition ordered like
/// `NetworkModel::node_names` (junctions come first).
fn junction_communities(model: &NetworkModel, communities: &[usize]) -> Vec<usize> {
    (0..model.junctions.len())
        .map(|j| communities.get(j).copied().unwrap_or(j))
        .collect()
}

/// Assign consumption profiles. Whole communities, visited in random
/// order, become commercial until `floor(p·N)` junctions are taken; the
/// rest are households. Extreme and zero-demand junctions are then drawn
/// from that pool.
pub fn assign_profiles<R: Rng + ?Sized>(
    model: &NetworkModel,
    communities: &[usize],
    config: &AdgConfig,
    rng: &mut R,
) -> ProfileAssignment {
    let n = model.junctions.len();
    let (plo, phi) = config.p_commercial;
    let p = if phi > plo { rng.random_range(plo..phi) } else { plo };
    let mut profiles = vec![DemandProfile::Household; n];
    if n == 0 {
        return ProfileAssignment {
            profiles,
            p_commercial: p,
            commercial_before_special: 0,
            extreme_scenario: false,
        };
    }
    let target = (p * n as f64).floor() as usize;
    let junction_comm = junction_communities(model, communities);
    let mut ids: Vec<usize> = junction_comm.clone();
    ids.sort_unstable();
    ids.dedup();
    ids.shuffle(rng);
    let mut taken = 0;
    'outer: for c in ids {
        for (j, _) in junction_comm.iter().enumerate().filter(|(_, cc)| **cc == c) {
            if taken == target {
                break 'outer;
            }
            profiles[j] = DemandProfile::Commercial;
            taken += 1;
        }
    }

    let mut pool: Vec<usize> = (0..n).collect();
    pool.shuffle(rng);
    let extreme_scenario = rng.random_bool(config.extreme_dem_rate.clamp(0.0, 1.0));
    if extreme_scenario && config.max_extreme_dem_junctions > 0 {
        let k = rng.random_range(1..=config.max_extreme_dem_junctions).min(pool.len());
        for j in pool.drain(..k) {
            profiles[j] = DemandProfile::Extreme;
        }
    }
    let rate = if config.zero_dem_from_baseline {
        model.junctions.iter().filter(|j| j.base_demand == 0.0).count() as f64 / n as f64
    } else {
        config.zero_dem_rate
    };
    let zeros = ((rate * n as f64).round() as usize).min(pool.len());
    for j in pool.drain(..zeros) {
        profiles[j] = DemandProfile::ZeroDemand;
    }
    ProfileAssignment {
        profiles,
        p_commercial: p,
        commercial_before_special: taken,
        extreme_scenario,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedDemands {
    pub assignment: ProfileAssignment,
    pub bounds: ConsumptionBounds,
    /// One multiplier series per junction, in junction order.
    pub series: Vec<Vec<f64>>,
}

/// Demand multipliers for every junction of one scenario: daily pattern of
/// the junction's profile plus the scenario's yearly pattern plus Gaussian
/// noise with its own standard deviation, normalized to `[0, 1]`.
pub fn generate_demands<R: Rng + ?Sized>(
    model: &NetworkModel,
    communities: &[usize],
    config: &AdgConfig,
    rng: &mut R,
) -> GeneratedDemands {
    let bounds = consumption_levels(rng, config.consumption_samples.max(4));
    let assignment = assign_profiles(model, communities, config, rng);
    let yearly = yearly_pattern(config, rng);
    let (nlo, nhi) = config.noise_range;
    let series = assignment
        .profiles
        .iter()
        .map(|&profile| {
            if profile == DemandProfile::ZeroDemand {
                return vec![0.0; config.steps()];
            }
            let daily = daily_pattern(profile, bounds, config, rng);
            let std = if nhi > nlo { rng.random_range(nlo..=nhi) } else { nlo };
            let mut d: Vec<f64> = daily
                .iter()
                .zip(&yearly)
                .map(|(d, y)| d + y + normal(rng, std))
                .collect();
            stats::min_max_normalize(&mut d);
            d
        })
        .collect();
    GeneratedDemands {
        assignment,
        bounds,
        series,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn levels_partition_unit_interval() {
        let b = ConsumptionBounds { q1: 0.3, q3: 0.7 };
        assert_eq!(b.range(Level::Low), (0.0, 0.3));
        assert_eq!(b.range(Level::High), (0.7, 1.0));
    }

    #[test]
    fn seasonal_peaks_at_s_peak() {
        let s = seasonal_component(8760, 8760, 1.0, 4745.3);
        let arg = (0..s.len()).max_by(|a, b| s[*a].total_cmp(&s[*b])).unwrap();
        assert_eq!(arg, 4745);
    }

    #[test]
    fn constant_fourier_without_harmonics() {
        let y = fourier_component(10, 24, &[0.4], &[0.0]);
        assert!(y.iter().all(|v| *v == 0.4));
    }

    #[test]
    fn zero_demand_daily_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = ConsumptionBounds { q1: 0.25, q3: 0.75 };
        let d = daily_pattern(DemandProfile::ZeroDemand, b, &AdgConfig::default(), &mut rng);
        assert_eq!(d, vec![0.0; 24]);
    }
}
