mod common;

use std::collections::BTreeMap;

use common::*;
use wdngen::hydraulics::{
    headloss, simulate_scenario, solve_steady_state, validate_scenario, LinkState, RuleId, RuleSet,
};
use wdngen::inp::{parse_inp, HeadlossFormula, Pipe, LinkStatus};

const SMALL: [&str; 5] = [
    "single_pipe.inp",
    "y_network.inp",
    "toy3.inp",
    "loop4.inp",
    "pump_tank_small.inp",
];

#[test]
fn hazen_williams_reference_value() {
    let pipe = Pipe {
        name: "P".into(),
        start: "A".into(),
        end: "B".into(),
        length: 1000.0,
        diameter: 0.3,
        roughness: 130.0,
        minor_loss: 0.0,
        status: LinkStatus::Open,
    };
    // 10.667 · 130^-1.852 · 0.3^-4.871 · 1000 · 0.1^1.852
    let expected = 10.667 * 130f64.powf(-1.852) * 0.3f64.powf(-4.871) * 1000.0 * 0.1f64.powf(1.852);
    let (h, _) = headloss(0.1, &pipe, HeadlossFormula::HazenWilliams);
    assert!((h - expected).abs() < 1e-12);
    assert!((h - 6.43).abs() / 6.43 < 0.005, "{h}");
    let (hn, _) = headloss(-0.1, &pipe, HeadlossFormula::HazenWilliams);
    assert_eq!(hn, -h);
}

#[test]
fn small_networks_match_newton_oracle() {
    for name in SMALL {
        let model = load_si(name);
        let (demands, fixed) = boundary_at_start(&model);
        let ours = solve_steady_state(&model, &demands, &fixed).unwrap();
        let (heads, flows) = oracle_solve(&model, &demands, &fixed);
        for (j, h) in heads.iter().enumerate() {
            assert!(rel_close(ours.head[j], *h, 1e-6), "{name} head {j}: {} vs {h}", ours.head[j]);
        }
        for (k, q) in flows.iter().enumerate() {
            assert!(rel_close(ours.flow[k], *q, 1e-6), "{name} flow {k}: {} vs {q}", ours.flow[k]);
        }
    }
}

#[test]
fn single_pipe_head_drop() {
    let model = load_si("single_pipe.inp");
    let state = solve_steady_state(&model, &[0.1], &[100.0]).unwrap();
    let expected = 100.0 - headloss(0.1, &model.pipes[0], HeadlossFormula::HazenWilliams).0;
    assert!((state.head[0] - expected).abs() < 1e-6);
    assert!((state.head[0] - 93.57).abs() < 0.05);
    let still = solve_steady_state(&model, &[0.0], &[100.0]).unwrap();
    assert!((still.head[0] - 100.0).abs() < 1e-9);
    assert!(still.flow[0].abs() < 1e-8, "{still:?}");
}

#[test]
fn symmetric_sources_split_equally() {
    let model = load_si("y_network.inp");
    let (d, f) = boundary_at_start(&model);
    let state = solve_steady_state(&model, &d, &f).unwrap();
    assert!((state.flow[0] - state.flow[1]).abs() < 1e-12);
    assert!((state.flow[0] - 0.02).abs() < 1e-9);
}

#[test]
fn extended_period_conserves_mass_and_energy() {
    for name in SMALL.iter().copied().chain(["hanoi.inp", "pump_tank_gpm.inp"]) {
        let model = load_si(name);
        let result = simulate_scenario(&model, BTreeMap::new(), &RuleSet::empty());
        assert!(result.solver_error.is_none(), "{name}: {:?}", result.solver_error);
        assert_eq!(result.snapshots.len(), model.times.num_steps(), "{name}");
        for s in &result.snapshots {
            assert!(mass_residual(&model, &s.flow, &s.demand) < 1e-6, "{name}");
            for (k, p) in model.pipes.iter().enumerate() {
                if s.status[k] == LinkState::Closed {
                    assert_eq!(s.flow[k], 0.0);
                    continue;
                }
                let (h, _) = headloss(s.flow[k], p, model.headloss);
                let tol = 1e-6;
                // Near-zero flows are linearized with a tiny gradient.
                if s.flow[k].abs() > 1e-6 {
                    assert!((s.headloss[k] - h).abs() < tol, "{name} pipe {}: {} vs {h}", p.name, s.headloss[k]);
                }
            }
        }
    }
}

#[test]
fn tank_volume_follows_net_inflow() {
    let model = load_si("pump_tank_small.inp");
    let result = simulate_scenario(&model, BTreeMap::new(), &RuleSet::empty());
    let tank = &model.tanks[0];
    let t_idx = model.junctions.len() + model.reservoirs.len();
    let mut level = tank.init_level;
    for s in &result.snapshots {
        let head = s.head[t_idx];
        assert!((head - (tank.elevation + level)).abs() < 1e-12);
        let inflow = s.demand[t_idx];
        let dv = inflow * 3600.0;
        let next = level + dv / tank.area();
        assert!(((next - level) * tank.area() - dv).abs() < 1e-9);
        level = next.clamp(tank.min_level, tank.max_level);
    }
}

#[test]
fn zero_demand_gives_still_water() {
    let text = "[JUNCTIONS]\n A 10 0\n B 12 0\n[RESERVOIRS]\n R 50\n[PIPES]\n P1 R A 100 200 100 0 Open\n P2 A B 100 200 100 0 Open\n[TIMES]\n Duration 24:00\n[OPTIONS]\n Units LPS\n[END]\n";
    let model = wdngen::convert_to_si(&parse_inp(text).unwrap());
    let result = simulate_scenario(&model, BTreeMap::new(), &RuleSet::empty());
    assert_eq!(result.snapshots.len(), 24);
    for s in &result.snapshots {
        assert!(s.flow.iter().all(|q| q.abs() < 1e-8), "{:?}", s.flow);
        assert!(s.head.iter().all(|h| (h - 50.0).abs() < 1e-6));
    }
}

#[test]
fn year_long_run_has_8760_snapshots() {
    let mut model = load_si("single_pipe.inp");
    model.times.duration = 8760.0;
    let result = simulate_scenario(&model, BTreeMap::new(), &RuleSet::empty());
    assert_eq!(result.snapshots.len(), 8760);
}

#[test]
fn prv_holds_downstream_pressure() {
    let text = "[JUNCTIONS]\n A 0 5\n B 0 5\n[RESERVOIRS]\n R 100\n[PIPES]\n P1 R A 500 200 120 0 Open\n P2 B C 300 150 120 0 Open\n[JUNCTIONS]\n C 0 3\n[VALVES]\n V A B 200 PRV 40 0\n[OPTIONS]\n Units LPS\n[END]\n";
    let model = wdngen::convert_to_si(&parse_inp(text).unwrap());
    let result = simulate_scenario(&model, BTreeMap::new(), &RuleSet::empty());
    let s = &result.snapshots[0];
    assert!(result.solver_error.is_none());
    assert_eq!(s.status[2], LinkState::Active);
    assert!((s.pressure[1] - 40.0).abs() < 1e-9);
    assert!((s.flow[2] - 0.008).abs() < 1e-9);
    assert!(mass_residual(&model, &s.flow, &s.demand) < 1e-9);
}

#[test]
fn rules_catch_bad_pressure() {
    let model = load_si("toy3.inp");
    let rules = RuleSet::standard(&model, (0.0, 151.0), &[]);
    let mut result = simulate_scenario(&model, BTreeMap::new(), &rules);
    assert!(result.valid);
    result.snapshots[3].pressure[1] = -2.0;
    assert!(!validate_scenario(&mut result, &rules));
    assert_eq!(result.failure_reason, Some(RuleId::PressureInRange));
    result.snapshots[3].pressure[1] = 151.5;
    assert!(!validate_scenario(&mut result, &rules));
    let skip = RuleSet::standard(&model, (0.0, 151.0), &["J2".to_string()]);
    assert!(validate_scenario(&mut result, &skip));
    assert!(validate_scenario(&mut result, &RuleSet::empty()));
}

#[test]
fn truncated_run_fails_time_consistency() {
    let model = load_si("toy3.inp");
    let rules = RuleSet::standard(&model, (0.0, 151.0), &[]);
    let mut result = simulate_scenario(&model, BTreeMap::new(), &rules);
    result.snapshots.pop();
    assert!(!validate_scenario(&mut result, &rules));
    assert_eq!(result.failure_reason, Some(RuleId::TimeConsistency));
}

#[test]
fn simulation_is_deterministic() {
    let model = load_si("pump_tank_gpm.inp");
    let a = simulate_scenario(&model, BTreeMap::new(), &RuleSet::empty());
    let b = simulate_scenario(&model, BTreeMap::new(), &RuleSet::empty());
    assert_eq!(a, b);
}
