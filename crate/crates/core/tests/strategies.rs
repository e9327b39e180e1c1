mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wdngen::adg::AdgConfig;
use wdngen::params::{Component, ParamId, ParamValues, Parameter};
use wdngen::profiler::profile_parameter;
use wdngen::stats;
use wdngen::strategies::{
    apply_strategy, sample_scenario, terrain_elevations, SamplingConfig, ScenarioContext,
    StrategyEntry, StrategyError, StrategyKind, TerrainMap,
};

const ELEVATION: ParamId = ParamId::new(Component::Junction, Parameter::Elevation);
const DEMAND: ParamId = ParamId::new(Component::Junction, Parameter::InputDemand);
const DIAMETER: ParamId = ParamId::new(Component::Pipe, Parameter::Diameter);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn hanoi_ctx() -> ScenarioContext {
    ScenarioContext::new(&common::load_si("hanoi.inp"), AdgConfig::default(), None, 0)
}

#[test]
fn keep_and_unit_factor_are_identity() {
    let ctx = hanoi_ctx();
    let base = &ctx.baseline[&DIAMETER];
    let keep = StrategyEntry::keep();
    assert_eq!(&apply_strategy(DIAMETER, &keep, base, None, &mut rng(1)).unwrap(), base);
    let unit = StrategyEntry::new(StrategyKind::Factor, 0.5, 0.5);
    assert_eq!(&apply_strategy(DIAMETER, &unit, base, None, &mut rng(1)).unwrap(), base);
}

#[test]
fn degenerate_sampling_is_flat() {
    let ctx = hanoi_ctx();
    let e = StrategyEntry::new(StrategyKind::Sampling, 0.12, 0.12);
    let out = apply_strategy(ELEVATION, &e, &ctx.baseline[&ELEVATION], None, &mut rng(2)).unwrap();
    let flat = ELEVATION.info().denormalize(0.12);
    assert!(out.flatten().iter().all(|v| *v == flat));
}

#[test]
fn series_copied_to_every_component() {
    let ctx = hanoi_ctx();
    let mut e = StrategyEntry::new(StrategyKind::Series, 0.0, 1.0);
    let series: Vec<f64> = (0..24).map(|k| k as f64 / 23.0).collect();
    e.series = Some(series.clone());
    let out = apply_strategy(DEMAND, &e, &ctx.baseline[&DEMAND], None, &mut rng(0)).unwrap();
    match out {
        ParamValues::Series(s) => assert!(s.iter().all(|x| *x == series) && s.len() == 31),
        _ => panic!("expected series"),
    }
}

#[test]
fn substitute_stays_near_one_donor() {
    let ctx = hanoi_ctx();
    let base = ctx.baseline[&DIAMETER].flatten();
    let mut e = StrategyEntry::new(StrategyKind::Factor, 0.4, 0.6);
    e.use_substitute = true;
    for seed in 0..20 {
        let out = apply_strategy(DIAMETER, &e, &ctx.baseline[&DIAMETER], None, &mut rng(seed))
            .unwrap()
            .flatten();
        let donor = base
            .iter()
            .find(|d| out.iter().all(|v| *v >= 0.98 * *d && *v <= 1.02 * *d))
            .copied();
        assert!(donor.is_some(), "seed {seed}");
    }
}

#[test]
fn perturbation_uses_stats_and_clips() {
    let base = ParamValues::Scalars(vec![0.5; 2000]);
    let stats = profile_parameter(&[0.3, 0.5, 0.7], 1, 3).unwrap();
    let e = StrategyEntry::new(StrategyKind::Perturbation, 0.0, 0.1);
    let out = apply_strategy(DIAMETER, &e, &base, Some(&stats), &mut rng(3)).unwrap().flatten();
    let hi = DIAMETER.info().denormalize(0.1);
    assert!(out.iter().all(|v| *v >= DIAMETER.info().range.0 && *v <= hi));
    let wide = StrategyEntry::new(StrategyKind::Perturbation, 0.0, 1.0);
    let out = apply_strategy(DIAMETER, &wide, &base, Some(&stats), &mut rng(3)).unwrap().flatten();
    assert!((stats::mean(&out) - 0.5).abs() < 0.02);
    assert!((stats::sample_std(&out) - 0.2).abs() < 0.02);
}

#[test]
fn illegal_strategies_rejected() {
    let base = ParamValues::Scalars(vec![1.0]);
    let e = StrategyEntry::new(StrategyKind::Terrain, 0.0, 1.0);
    assert!(matches!(
        apply_strategy(DIAMETER, &e, &base, None, &mut rng(0)),
        Err(StrategyError::IllegalStrategyForParameter { .. })
    ));
    let a = StrategyEntry::new(StrategyKind::Adg, 0.0, 1.0);
    let mut c = SamplingConfig::default();
    c.set(ELEVATION, a);
    assert!(c.validate().is_err());
}

#[test]
fn flat_terrain_without_noise() {
    let map = TerrainMap::generate(4, (5.0, 5.0), 0.0, &mut rng(0));
    let n = map.side();
    assert!((0..n).all(|x| (0..n).all(|y| map.height(x, y) == 5.0)));
    let pts = [(0.0, 0.0), (3.0, 1.0), (10.0, 7.0)];
    let out = terrain_elevations(&pts, 4, (5.0, 5.0), 0.0, (0.0, 10.0), &mut rng(0));
    assert!(out.iter().all(|v| *v == 5.0));
}

#[test]
fn terrain_respects_bounds_and_is_smoother_than_sampling() {
    let ctx = hanoi_ctx();
    let model = &ctx.model;
    let pts: Vec<(f64, f64)> = model.junctions.iter().map(|j| model.coordinates[&j.name]).collect();
    let index: std::collections::HashMap<&str, usize> =
        model.junctions.iter().enumerate().map(|(i, j)| (j.name.as_str(), i)).collect();
    let pairs: Vec<(usize, usize)> = model
        .pipes
        .iter()
        .filter_map(|p| Some((*index.get(p.start.as_str())?, *index.get(p.end.as_str())?)))
        .collect();
    let bounds = (10.0, 60.0);
    let mut r = rng(5);
    let (mut terrain_diffs, mut random_diffs) = (Vec::new(), Vec::new());
    for _ in 0..1000 {
        let t = terrain_elevations(&pts, 7, bounds, 0.5, bounds, &mut r);
        assert!(t.iter().all(|v| *v >= bounds.0 && *v <= bounds.1));
        let u: Vec<f64> = (0..pts.len()).map(|_| rand::Rng::random_range(&mut r, bounds.0..=bounds.1)).collect();
        for &(a, b) in &pairs {
            terrain_diffs.push(t[a] - t[b]);
            random_diffs.push(u[a] - u[b]);
        }
    }
    let var = |v: &[f64]| stats::sample_std(v).powi(2);
    assert!(var(&terrain_diffs) < var(&random_diffs));
}

#[test]
fn blueprint_defaults() {
    let ctx = hanoi_ctx();
    let c = SamplingConfig::blueprint(&ctx.present, &ctx.baseline);
    assert_eq!(c.entry(DEMAND).strategy, StrategyKind::Adg);
    assert_eq!(c.entry(ELEVATION).strategy, StrategyKind::Terrain);
    let d = c.entry(DIAMETER);
    assert_eq!(d.strategy, StrategyKind::Factor);
    assert_eq!(d.scale_range(), (0.8, 1.2));
    for (id, e) in &c.entries {
        if ![DEMAND, ELEVATION, DIAMETER].contains(id) {
            assert_eq!(e.strategy, StrategyKind::Keep, "{id}");
        }
    }
    c.validate().unwrap();
    assert_eq!(SamplingConfig::from_yaml(&c.to_yaml()).unwrap(), c);
    let (lo, hi) = c.entry(ELEVATION).physical_bounds(ELEVATION.info());
    let e = ctx.baseline[&ELEVATION].flatten();
    assert!(e.iter().all(|v| *v >= lo - 1e-9 && *v <= hi + 1e-9));
}

#[test]
fn yaml_uses_tune_keys() {
    let text = "
junction_tune:
  elevation: {strategy: sampling, lb: 0.1, ub: 0.3}
pipe_tune:
  diameter: {strategy: factor, lb: 0.4, ub: 0.6, use_substitute: true}
duration: 24
";
    let c = SamplingConfig::from_yaml(text).unwrap();
    assert_eq!(c.entries.len(), 2);
    assert_eq!(c.entry(DIAMETER).effective_strategy(), StrategyKind::Substitute);
    assert!(SamplingConfig::from_yaml("junction_tune:\n  elevation: {strategy: adg}\n").is_err());
    assert!(SamplingConfig::from_yaml("pump_tune:\n  x: {strategy: keep}\n").is_err());
}

#[test]
fn scenario_sampling_is_deterministic() {
    let ctx = hanoi_ctx();
    let c = SamplingConfig::blueprint(&ctx.present, &ctx.baseline);
    let a = sample_scenario(&ctx, &c, &mut rng(42)).unwrap();
    let b = sample_scenario(&ctx, &c, &mut rng(42)).unwrap();
    assert_eq!(a.inputs, b.inputs);
    assert_eq!(a.model, b.model);
    let other = sample_scenario(&ctx, &c, &mut rng(43)).unwrap();
    assert_ne!(a.inputs[&DEMAND], other.inputs[&DEMAND]);
    assert_eq!(a.inputs[&DEMAND].len(), 31);
    let j = &a.model.junctions[3];
    let pattern = &a.model.patterns[j.demand_pattern.as_ref().unwrap()];
    assert_eq!(pattern.len(), 24);
}

#[test]
fn terrain_needs_coordinates() {
    let mut model = common::load_si("hanoi.inp");
    model.coordinates.clear();
    let ctx = ScenarioContext::new(&model, AdgConfig::default(), None, 0);
    let mut c = SamplingConfig::default();
    c.set(ELEVATION, StrategyEntry::new(StrategyKind::Terrain, 0.0, 0.5));
    assert!(matches!(
        sample_scenario(&ctx, &c, &mut rng(0)),
        Err(StrategyError::MissingCoordinates(_))
    ));
}

#[test]
fn perturbation_falls_back_to_global() {
    let model = common::load_si("hanoi.inp");
    let global = wdngen::profiler::merge_global(&[wdngen::profiler::profile_network(&model)]).unwrap();
    let mut ctx = ScenarioContext::new(&model, AdgConfig::default(), Some(global), 0);
    ctx.profile.stats.remove(&DIAMETER);
    let mut c = SamplingConfig::default();
    c.set(DIAMETER, StrategyEntry::new(StrategyKind::Perturbation, 0.0, 1.0));
    let s = sample_scenario(&ctx, &c, &mut rng(0)).unwrap();
    assert_eq!(s.imputed, vec![DIAMETER]);
}

proptest! {
    #[test]
    fn sampling_within_bounds(lb in 0.0f64..1.0, width in 0.0f64..1.0, seed in any::<u64>()) {
        let ub = (lb + width).min(1.0);
        let e = StrategyEntry::new(StrategyKind::Sampling, lb, ub);
        let base = ParamValues::Series(vec![vec![0.0; 5]; 4]);
        let out = apply_strategy(DEMAND, &e, &base, None, &mut rng(seed)).unwrap();
        let info = DEMAND.info();
        let (lo, hi) = (info.denormalize(lb), info.denormalize(ub));
        prop_assert_eq!(out.len(), 4);
        prop_assert!(out.flatten().iter().all(|v| *v >= lo && *v <= hi));
    }

    #[test]
    fn strategies_deterministic(seed in any::<u64>(), kind in 0usize..4) {
        let kinds = [StrategyKind::Sampling, StrategyKind::Factor, StrategyKind::Perturbation, StrategyKind::Keep];
        let e = StrategyEntry::new(kinds[kind], 0.3, 0.7);
        let base = ParamValues::Scalars(vec![0.2, 0.4, 0.9]);
        let stats = profile_parameter(&[0.2, 0.4, 0.9], 1, 3).unwrap();
        let a = apply_strategy(DIAMETER, &e, &base, Some(&stats), &mut rng(seed)).unwrap();
        let b = apply_strategy(DIAMETER, &e, &base, Some(&stats), &mut rng(seed)).unwrap();
        prop_assert_eq!(a, b);
    }
}
