mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wdngen::adg::{
    assign_profiles, consumption_levels, daily_pattern, generate_demands, louvain_communities,
    seasonal_component, smooth_savgol, yearly_pattern, AdgConfig, ConsumptionBounds,
    DemandProfile, Graph,
};
use wdngen::stats;

fn week() -> AdgConfig {
    AdgConfig {
        duration: 168.0,
        ..AdgConfig::default()
    }
}

fn hanoi_communities(seed: u64) -> (wdngen::NetworkModel, Vec<usize>) {
    let model = common::load_si("hanoi.inp");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = louvain_communities(&Graph::from_model(&model), 1.0, 1e-7, &mut rng);
    (model, c)
}

#[test]
fn quartiles_of_even_grid() {
    let b = ConsumptionBounds::from_samples(&[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]);
    assert!((b.q1 - 0.25).abs() < 1e-15);
    assert!((b.q3 - 0.75).abs() < 1e-15);
    let flat = ConsumptionBounds::from_samples(&[0.5; 10]);
    assert_eq!((flat.q1, flat.q3), (0.5, 0.5));
}

#[test]
fn quartiles_average_to_uniform_quartiles() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 2000;
    let (mut s1, mut s3) = (0.0, 0.0);
    for _ in 0..n {
        let b = consumption_levels(&mut rng, 100);
        s1 += b.q1;
        s3 += b.q3;
    }
    assert!((s1 / n as f64 - 0.25).abs() < 0.05);
    assert!((s3 / n as f64 - 0.75).abs() < 0.05);
}

#[test]
fn pattern_lengths_follow_duration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let b = ConsumptionBounds { q1: 0.25, q3: 0.75 };
    let day = AdgConfig::default();
    assert_eq!(daily_pattern(DemandProfile::Household, b, &day, &mut rng).len(), 24);
    assert_eq!(yearly_pattern(&day, &mut rng).len(), 24);
    let year = AdgConfig {
        duration: 8760.0,
        ..AdgConfig::default()
    };
    assert_eq!(daily_pattern(DemandProfile::Commercial, b, &year, &mut rng).len(), 8760);
    assert_eq!(yearly_pattern(&year, &mut rng).len(), 8760);
}

#[test]
fn household_morning_exceeds_night() {
    let cfg = AdgConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut night, mut morning) = (0.0, 0.0);
    for _ in 0..500 {
        let b = consumption_levels(&mut rng, 100);
        let d = daily_pattern(DemandProfile::Household, b, &cfg, &mut rng);
        night += d[0..6].iter().sum::<f64>();
        morning += d[6..12].iter().sum::<f64>();
    }
    assert!(morning > night);
}

#[test]
fn summer_mean_exceeds_annual_mean() {
    let cfg = AdgConfig {
        duration: 8760.0,
        ..AdgConfig::default()
    };
    // Mid-summer peak, June to August inclusive.
    let peak = (cfg.summer_start + cfg.summer_span / 2.0) * 8760.0;
    let s = seasonal_component(8760, 8760, 1.0, peak);
    let start = (cfg.summer_start * 8760.0) as usize;
    let end = ((cfg.summer_start + cfg.summer_span) * 8760.0) as usize;
    let summer = stats::mean(&s[start..end]);
    assert!(summer > stats::mean(&s));
}

#[test]
fn yearly_is_normalized() {
    let cfg = AdgConfig {
        duration: 8760.0,
        ..AdgConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let y = yearly_pattern(&cfg, &mut rng);
    let lo = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert_eq!((lo, hi), (0.0, 1.0));
}

/// Exhaustive modularity maximization over set partitions.
fn best_partition(g: &Graph) -> (Vec<usize>, f64) {
    fn rec(i: usize, n: usize, cur: &mut Vec<usize>, k: usize, g: &Graph, best: &mut (Vec<usize>, f64)) {
        if i == n {
            let q = g.modularity(cur, 1.0);
            if q > best.1 + 1e-12 {
                *best = (cur.clone(), q);
            }
            return;
        }
        for c in 0..=k {
            cur.push(c);
            rec(i + 1, n, cur, k.max(c + 1), g, best);
            cur.pop();
        }
    }
    let mut best = (vec![], f64::NEG_INFINITY);
    rec(0, g.n, &mut vec![], 0, g, &mut best);
    best
}

#[test]
fn louvain_matches_brute_force_on_two_cliques() {
    let mut edges = vec![];
    for base in [0, 3] {
        edges.extend([(base, base + 1, 1.0), (base, base + 2, 1.0), (base + 1, base + 2, 1.0)]);
    }
    edges.push((1, 4, 1.0));
    let g = Graph::new(6, edges);
    let (best, q) = best_partition(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let found = louvain_communities(&g, 1.0, 1e-7, &mut rng);
    assert_eq!(found, best);
    assert!((g.modularity(&found, 1.0) - q).abs() < 1e-12);
}

#[test]
fn louvain_never_worse_than_singletons() {
    let (model, c) = hanoi_communities(3);
    let g = Graph::from_model(&model);
    let singletons: Vec<usize> = (0..g.n).collect();
    assert!(g.modularity(&c, 1.0) >= g.modularity(&singletons, 1.0));
    assert!(c.iter().copied().max().unwrap() >= 1);
    let single = Graph::new(1, vec![]);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert_eq!(louvain_communities(&single, 1.0, 1e-7, &mut rng), vec![0]);
}

#[test]
fn profile_counts() {
    let (model, c) = hanoi_communities(1);
    let n = model.junctions.len();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cfg = AdgConfig::default();
    for _ in 0..200 {
        let a = assign_profiles(&model, &c, &cfg, &mut rng);
        assert!(a.p_commercial > 0.25 && a.p_commercial < 0.35);
        assert_eq!(a.commercial_before_special, (a.p_commercial * n as f64).floor() as usize);
        assert!(a.count(DemandProfile::Extreme) <= 2);
        assert_eq!(a.count(DemandProfile::ZeroDemand), (0.05 * n as f64).round() as usize);
    }
    let empty = wdngen::NetworkModel::default();
    assert!(assign_profiles(&empty, &[], &cfg, &mut rng).profiles.is_empty());
}

#[test]
fn hundred_junctions_at_28_percent() {
    let mut model = wdngen::NetworkModel::default();
    for i in 0..100 {
        model.junctions.push(wdngen::inp::Junction {
            name: format!("J{i}"),
            elevation: 0.0,
            base_demand: 1.0,
            demand_pattern: None,
        });
    }
    let cfg = AdgConfig {
        p_commercial: (0.28, 0.28),
        ..AdgConfig::default()
    };
    let communities: Vec<usize> = (0..100).map(|i| i / 10).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let a = assign_profiles(&model, &communities, &cfg, &mut rng);
    assert_eq!(a.commercial_before_special, 28);
}

#[test]
fn generated_series_are_unit_normalized() {
    let (model, c) = hanoi_communities(2);
    let cfg = week();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let g = generate_demands(&model, &c, &cfg, &mut rng);
        for (s, p) in g.series.iter().zip(&g.assignment.profiles) {
            assert_eq!(s.len(), 168);
            if *p == DemandProfile::ZeroDemand {
                assert!(s.iter().all(|v| *v == 0.0));
            } else {
                let lo = s.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                assert_eq!((lo, hi), (0.0, 1.0));
            }
        }
    }
}

#[test]
fn generation_is_deterministic() {
    let (model, c) = hanoi_communities(2);
    let cfg = week();
    let a = generate_demands(&model, &c, &cfg, &mut ChaCha8Rng::seed_from_u64(77));
    let b = generate_demands(&model, &c, &cfg, &mut ChaCha8Rng::seed_from_u64(77));
    assert_eq!(a, b);
}

#[test]
fn savgol_reduces_noise_on_sine() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    use rand_distr::{Distribution, Normal};
    let noise = Normal::new(0.0, 0.2).unwrap();
    let clean: Vec<f64> = (0..200).map(|t| (t as f64 * 0.1).sin()).collect();
    let noisy: Vec<f64> = clean.iter().map(|c| c + noise.sample(&mut rng)).collect();
    let smooth = smooth_savgol(&noisy, 7, 2).unwrap();
    let err = |s: &[f64]| s.iter().zip(&clean).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    assert!(err(&smooth) < err(&noisy));
    let ramp: Vec<f64> = (0..30).map(|t| 0.3 * t as f64 - 2.0).collect();
    for (a, b) in smooth_savgol(&ramp, 7, 1).unwrap().iter().zip(&ramp) {
        assert!((a - b).abs() < 1e-9);
    }
}

fn profile_series(g: &wdngen::adg::GeneratedDemands) -> Vec<(DemandProfile, &Vec<f64>)> {
    g.assignment
        .profiles
        .iter()
        .copied()
        .zip(&g.series)
        .filter(|(p, _)| matches!(p, DemandProfile::Household | DemandProfile::Commercial))
        .collect()
}

#[test]
fn daily_period_dominates_autocorrelation() {
    let (model, c) = hanoi_communities(2);
    let cfg = AdgConfig {
        noise_range: (0.01, 0.01),
        ..week()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (mut hits, mut total) = (0, 0);
    for _ in 0..100 {
        let g = generate_demands(&model, &c, &cfg, &mut rng);
        for (_, s) in profile_series(&g) {
            let acf: Vec<f64> = (2..=48).map(|lag| stats::autocorrelation(s, lag)).collect();
            let best = (0..acf.len()).max_by(|a, b| acf[*a].total_cmp(&acf[*b])).unwrap() + 2;
            hits += usize::from(best == 24);
            total += 1;
        }
    }
    assert!(hits as f64 >= 0.9 * total as f64, "{hits}/{total}");
}

#[test]
fn scenarios_are_diverse_and_profiles_cluster() {
    let (model, c) = hanoi_communities(2);
    let cfg = week();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut flat = Vec::new();
    let (mut within, mut nw, mut cross, mut nc) = (0.0, 0, 0.0, 0);
    for _ in 0..100 {
        let g = generate_demands(&model, &c, &cfg, &mut rng);
        flat.push(g.series.concat());
        let ps = profile_series(&g);
        for i in 0..ps.len() {
            for j in i + 1..ps.len() {
                let r = stats::pearson(ps[i].1, ps[j].1);
                if ps[i].0 == ps[j].0 {
                    within += r;
                    nw += 1;
                } else {
                    cross += r;
                    nc += 1;
                }
            }
        }
    }
    let diversity = stats::off_diagonal_mean(&stats::correlation_matrix(&flat));
    assert!(diversity < 0.9, "{diversity}");
    assert!(within / nw as f64 > cross / nc as f64);

    // One shared pattern per node, as in LeakDB-style data.
    let shared = &generate_demands(&model, &c, &cfg, &mut rng).series[0];
    let reused: Vec<Vec<f64>> = (0..10)
        .map(|k| shared.iter().map(|v| v * (1.0 + 0.001 * k as f64)).collect())
        .collect();
    assert!(stats::off_diagonal_mean(&stats::correlation_matrix(&reused)) > 0.99);
}
