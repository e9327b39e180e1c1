mod common;

use proptest::prelude::*;
use wdngen::params::{self, Component, ParamId, Parameter};
use wdngen::profiler::{merge_global, profile_network, profile_parameter, ProfileError, Scope};
use wdngen::NetworkModel;

const CORPUS: [&str; 7] = [
    "hanoi.inp",
    "toy3.inp",
    "single_pipe.inp",
    "y_network.inp",
    "loop4.inp",
    "pump_tank_small.inp",
    "pump_tank_gpm.inp",
];

/// Textbook formulas, written out independently of the crate's helpers.
fn oracle(values: &[f64]) -> (f64, f64, f64, f64, f64, f64) {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let q = |p: f64| {
        let h = (n - 1.0) * p;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        v[lo] + (h - lo as f64) * (v[hi] - v[lo])
    };
    (v[0], v[v.len() - 1], mean, var.sqrt(), q(0.25), q(0.75))
}

#[test]
fn four_values() {
    let s = profile_parameter(&[1.0, 2.0, 3.0, 4.0], 1, 4).unwrap();
    assert_eq!((s.min, s.max, s.mean, s.q1, s.q3), (1.0, 4.0, 2.5, 1.75, 3.25));
    assert!((s.std - 1.2909944).abs() < 1e-7);
    assert_eq!(profile_parameter(&[], 1, 0), Err(ProfileError::EmptyInput));
}

#[test]
fn hanoi_profile_has_no_tank_entries() {
    let p = profile_network(&common::load_si("hanoi.inp"));
    for param in [Parameter::Diameter, Parameter::Length, Parameter::Roughness] {
        assert!(p.get(ParamId::new(Component::Pipe, param)).is_some());
    }
    assert!(p.get(ParamId::new(Component::Junction, Parameter::Elevation)).is_some());
    assert!(p.stats.keys().all(|id| id.component != Component::Tank));
    assert_eq!(p.scope, Scope::Network("hanoi".into()));
}

#[test]
fn single_junction_profile() {
    let mut m = NetworkModel::default();
    m.junctions.push(wdngen::inp::Junction {
        name: "J".into(),
        elevation: 10.0,
        base_demand: 0.0,
        demand_pattern: None,
    });
    let p = profile_network(&m);
    let s = p.get(ParamId::new(Component::Junction, Parameter::Elevation)).unwrap();
    assert_eq!((s.min, s.max, s.mean, s.q1, s.q3, s.std), (10.0, 10.0, 10.0, 10.0, 10.0, 0.0));
}

#[test]
fn corpus_profile_matches_brute_force() {
    for name in CORPUS {
        let model = common::load_si(name);
        let p = profile_network(&model);
        for id in params::present(&model) {
            let values = params::extract(&model, id).unwrap();
            let flat = values.flatten();
            let s = p.get(id).unwrap();
            let (min, max, mean, std, q1, q3) = oracle(&flat);
            assert_eq!((s.min, s.max, s.q1, s.q3), (min, max, q1, q3), "{name} {id}");
            assert!((s.mean - mean).abs() <= 1e-12 * mean.abs().max(1.0));
            assert!((s.std - std).abs() <= 1e-12 * std.max(1.0));
            assert_eq!(s.component_count, values.len());
        }
    }
}

#[test]
fn pooled_elevations() {
    let mk = |name: &str, elevations: &[f64]| {
        let mut m = NetworkModel {
            name: name.into(),
            ..NetworkModel::default()
        };
        for (i, e) in elevations.iter().enumerate() {
            m.junctions.push(wdngen::inp::Junction {
                name: format!("J{i}"),
                elevation: *e,
                base_demand: 0.0,
                demand_pattern: None,
            });
        }
        profile_network(&m)
    };
    let g = merge_global(&[mk("a", &[0.0, 10.0]), mk("b", &[20.0, 30.0])]).unwrap();
    let s = g.get(ParamId::new(Component::Junction, Parameter::Elevation)).unwrap();
    assert_eq!((s.min, s.max, s.mean, s.component_count), (0.0, 30.0, 15.0, 4));
    assert_eq!(g.scope, Scope::Global);

    let single = mk("a", &[1.0, 2.0]);
    let merged = merge_global(std::slice::from_ref(&single)).unwrap();
    assert_eq!(merged.stats, single.stats);
    assert_eq!(merge_global(&[]), Err(ProfileError::NothingToMerge));
}

#[test]
fn global_corpus_ranges() {
    let profiles: Vec<_> = CORPUS.iter().map(|n| profile_network(&common::load_si(n))).collect();
    let g = merge_global(&profiles).unwrap();
    let demand = g.get(ParamId::new(Component::Junction, Parameter::InputDemand)).unwrap();
    assert!(demand.min >= -1.388 && demand.max <= 4.814);
    let head = g.get(ParamId::new(Component::Reservoir, Parameter::BaseHead)).unwrap();
    assert!(head.min >= 0.0 && head.max <= 500.0);
    for p in &profiles {
        for (id, s) in &p.stats {
            let gs = g.get(*id).unwrap();
            assert!(gs.min <= s.min && gs.max >= s.max);
        }
    }
}

#[test]
fn table_rows() {
    let p = profile_network(&common::load_si("hanoi.inp"));
    let table = p.to_table();
    assert!(table.starts_with("scope,parameter,statistic,value\n"));
    assert!(table.contains("hanoi,pipe.diameter,q1,"));
}

proptest! {
    #[test]
    fn order_statistics_are_ordered(values in prop::collection::vec(-1e6f64..1e6, 1..200)) {
        let s = profile_parameter(&values, 1, values.len()).unwrap();
        prop_assert!(s.min <= s.q1 && s.q1 <= s.q3 && s.q3 <= s.max);
        prop_assert!(s.std >= 0.0);
    }
}
