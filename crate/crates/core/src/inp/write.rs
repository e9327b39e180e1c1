use std::fmt::Write;

use super::units::convert_from_si;
use super::{FlowUnit, HeadlossFormula, LinkStatus, NetworkModel, PumpKind, SimulationTimes};

fn status_token(status: LinkStatus) -> &'static str {
    match status {
        LinkStatus::Open => "Open",
        LinkStatus::Closed => "Closed",
        LinkStatus::Cv => "CV",
    }
}

/// Render a model as INP text. Sections come out in a fixed order and
/// numbers use the shortest representation that reparses to the same `f64`.
/// A model already converted to SI is written back in its original unit
/// system so the output stays a valid EPANET file.
pub fn serialize_inp(model: &NetworkModel) -> String {
    let model = convert_from_si(model);
    let mut out = String::new();
    // fmt::Write into a String cannot fail.
    let w = &mut out;

    let _ = writeln!(w, "[JUNCTIONS]");
    for j in &model.junctions {
        let _ = write!(w, " {}\t{}\t{}", j.name, j.elevation, j.base_demand);
        if let Some(p) = &j.demand_pattern {
            let _ = write!(w, "\t{p}");
        }
        let _ = writeln!(w);
    }

    let _ = writeln!(w, "\n[RESERVOIRS]");
    for r in &model.reservoirs {
        let _ = write!(w, " {}\t{}", r.name, r.base_head);
        if let Some(p) = &r.head_pattern {
            let _ = write!(w, "\t{p}");
        }
        let _ = writeln!(w);
    }

    let _ = writeln!(w, "\n[TANKS]");
    for t in &model.tanks {
        let _ = write!(
            w,
            " {}\t{}\t{}\t{}\t{}\t{}\t{}",
            t.name, t.elevation, t.init_level, t.min_level, t.max_level, t.diameter, t.min_volume
        );
        if let Some(c) = &t.volume_curve {
            let _ = write!(w, "\t{c}");
        }
        let _ = writeln!(w);
    }

    let _ = writeln!(w, "\n[PIPES]");
    for p in &model.pipes {
        let _ = writeln!(
            w,
            " {}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            p.name,
            p.start,
            p.end,
            p.length,
            p.diameter,
            p.roughness,
            p.minor_loss,
            status_token(p.status)
        );
    }

    let _ = writeln!(w, "\n[PUMPS]");
    for p in &model.pumps {
        let _ = write!(w, " {}\t{}\t{}", p.name, p.start, p.end);
        match &p.kind {
            PumpKind::Head { curve } => {
                let _ = write!(w, "\tHEAD {curve}");
            }
            PumpKind::Power { power } => {
                let _ = write!(w, "\tPOWER {power}");
            }
        }
        let _ = write!(w, "\tSPEED {}", p.base_speed);
        if let Some(pat) = &p.speed_pattern {
            let _ = write!(w, "\tPATTERN {pat}");
        }
        let _ = writeln!(w);
    }

    let _ = writeln!(w, "\n[VALVES]");
    for v in &model.valves {
        let setting = match &v.setting_curve {
            Some(curve) => curve.clone(),
            None => v.setting.to_string(),
        };
        let _ = writeln!(
            w,
            " {}\t{}\t{}\t{}\t{}\t{}\t{}",
            v.name,
            v.start,
            v.end,
            v.diameter,
            v.kind.token(),
            setting,
            v.minor_loss
        );
    }

    let _ = writeln!(w, "\n[ENERGY]");
    for p in &model.pumps {
        if let Some(pat) = &p.energy_pattern {
            let _ = writeln!(w, " Pump\t{}\tPattern\t{pat}", p.name);
        }
        if let Some(c) = &p.efficiency_curve {
            let _ = writeln!(w, " Pump\t{}\tEffic\t{c}", p.name);
        }
    }

    let _ = writeln!(w, "\n[PATTERNS]");
    for (name, values) in &model.patterns {
        if values.is_empty() {
            let _ = writeln!(w, " {name}");
        }
        for chunk in values.chunks(8) {
            let _ = write!(w, " {name}");
            for v in chunk {
                let _ = write!(w, "\t{v}");
            }
            let _ = writeln!(w);
        }
    }

    let _ = writeln!(w, "\n[CURVES]");
    for (name, points) in &model.curves {
        for (x, y) in points {
            let _ = writeln!(w, " {name}\t{x}\t{y}");
        }
    }

    let _ = writeln!(w, "\n[TIMES]");
    let defaults = SimulationTimes::default();
    if model.times.duration != defaults.duration {
        let _ = writeln!(w, " Duration\t{}", model.times.duration);
    }
    if model.times.time_step != defaults.time_step {
        let _ = writeln!(w, " Hydraulic Timestep\t{}", model.times.time_step);
    }
    if model.times.pattern_step != defaults.pattern_step {
        let _ = writeln!(w, " Pattern Timestep\t{}", model.times.pattern_step);
    }

    let _ = writeln!(w, "\n[OPTIONS]");
    if model.flow_unit != FlowUnit::Gpm {
        let _ = writeln!(w, " Units\t{}", model.flow_unit);
    }
    if model.headloss != HeadlossFormula::HazenWilliams {
        let _ = writeln!(w, " Headloss\t{}", model.headloss.token());
    }
    if let Some(p) = &model.default_pattern {
        let _ = writeln!(w, " Pattern\t{p}");
    }

    let _ = writeln!(w, "\n[COORDINATES]");
    for (node, (x, y)) in &model.coordinates {
        let _ = writeln!(w, " {node}\t{x}\t{y}");
    }

    let _ = writeln!(w, "\n[END]");
    out
}
