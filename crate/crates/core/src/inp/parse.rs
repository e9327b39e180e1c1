use std::path::Path;
use std::str::FromStr;

use super::{
    FlowUnit, HeadlossFormula, InpError, Junction, LinkStatus, NetworkModel, Pipe, Pump,
    PumpKind, Reservoir, Tank, Valve, ValveKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Junctions,
    Reservoirs,
    Tanks,
    Pipes,
    Pumps,
    Valves,
    Demands,
    Patterns,
    Curves,
    Coordinates,
    Times,
    Options,
    Energy,
    Skipped,
}

impl Section {
    fn from_header(name: &str) -> Section {
        match name {
            "JUNCTIONS" => Section::Junctions,
            "RESERVOIRS" => Section::Reservoirs,
            "TANKS" => Section::Tanks,
            "PIPES" => Section::Pipes,
            "PUMPS" => Section::Pumps,
            "VALVES" => Section::Valves,
            "DEMANDS" => Section::Demands,
            "PATTERNS" => Section::Patterns,
            "CURVES" => Section::Curves,
            "COORDINATES" => Section::Coordinates,
            "TIMES" => Section::Times,
            "OPTIONS" => Section::Options,
            "ENERGY" => Section::Energy,
            _ => Section::Skipped,
        }
    }
}

/// Sections whose content influences hydraulics but is not modelled.
const FLAGGED_SECTIONS: &[&str] = &["CONTROLS", "RULES", "EMITTERS", "STATUS"];

struct LineCtx<'a> {
    line: usize,
    section: &'a str,
}

impl LineCtx<'_> {
    fn err(&self, reason: impl Into<String>) -> InpError {
        InpError::MalformedSection {
            line: self.line,
            section: self.section.to_string(),
            reason: reason.into(),
        }
    }

    fn num(&self, tokens: &[&str], idx: usize, what: &str) -> Result<f64, InpError> {
        let tok = tokens
            .get(idx)
            .ok_or_else(|| self.err(format!("missing {what}")))?;
        parse_f64(tok).ok_or_else(|| self.err(format!("{what} '{tok}' is not a number")))
    }

    fn opt_num(&self, tokens: &[&str], idx: usize, what: &str) -> Result<Option<f64>, InpError> {
        if tokens.get(idx).is_none() {
            return Ok(None);
        }
        self.num(tokens, idx, what).map(Some)
    }

    fn need(&self, tokens: &[&str], n: usize) -> Result<(), InpError> {
        if tokens.len() < n {
            Err(self.err(format!("expected at least {n} fields, found {}", tokens.len())))
        } else {
            Ok(())
        }
    }
}

fn parse_f64(tok: &str) -> Option<f64> {
    let v = f64::from_str(tok).ok()?;
    v.is_finite().then_some(v)
}

/// Parse a duration field ("24:00", "1:30:00", "6", "30 MIN", "2 DAYS") to hours.
fn parse_hours(tokens: &[&str]) -> Option<f64> {
    let value = tokens.first()?;
    let hours = if value.contains(':') {
        let mut parts = value.split(':').map(|p| p.parse::<f64>());
        let h = parts.next()?.ok()?;
        let m = parts.next().transpose().ok()?.unwrap_or(0.0);
        let s = parts.next().transpose().ok()?.unwrap_or(0.0);
        h + m / 60.0 + s / 3600.0
    } else {
        let v = parse_f64(value)?;
        match tokens.get(1).map(|u| u.to_ascii_uppercase()) {
            None => v,
            Some(u) if u.starts_with("SEC") => v / 3600.0,
            Some(u) if u.starts_with("MIN") => v / 60.0,
            Some(u) if u.starts_with("HOUR") => v,
            Some(u) if u.starts_with("DAY") => v * 24.0,
            Some(_) => v,
        }
    };
    Some(hours)
}

fn parse_status(tok: &str) -> Option<LinkStatus> {
    match tok.to_ascii_uppercase().as_str() {
        "OPEN" => Some(LinkStatus::Open),
        "CLOSED" => Some(LinkStatus::Closed),
        "CV" => Some(LinkStatus::Cv),
        _ => None,
    }
}

fn optional_name(tok: Option<&&str>) -> Option<String> {
    tok.filter(|t| **t != "*").map(|t| t.to_string())
}

/// Read and parse an INP file; the model is named after the file stem.
/// Non-UTF-8 content is rejected.
pub fn read_inp_file(path: impl AsRef<Path>) -> Result<NetworkModel, InpError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| InpError::Encoding(e.valid_up_to()))?;
    let mut model = parse_inp(text)?;
    model.name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(model)
}

/// Parse EPANET INP text into a model in the file's own units.
pub fn parse_inp(text: &str) -> Result<NetworkModel, InpError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut model = NetworkModel::default();
    let mut section = Section::Skipped;
    let mut section_name = String::new();
    // [DEMANDS] entries seen so far, to flag multiple categories.
    let mut demand_overrides: Vec<String> = Vec::new();
    // Pending [PUMPS] energy assignments may precede the pump definition.
    let mut energy: Vec<(usize, String, String, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split(';').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if content.starts_with('[') {
            let name = content
                .trim_start_matches('[')
                .split(']')
                .next()
                .unwrap_or("")
                .trim()
                .to_ascii_uppercase();
            if name == "END" {
                break;
            }
            section = Section::from_header(&name);
            if section == Section::Skipped {
                if FLAGGED_SECTIONS.contains(&name.as_str()) {
                    model.flags.push(format!("section [{name}] ignored by the simulator"));
                }
                if !model.skipped_sections.contains(&name) {
                    model.skipped_sections.push(name.clone());
                }
            }
            section_name = name;
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let ctx = LineCtx {
            line: line_no,
            section: &section_name,
        };
        match section {
            Section::Skipped => {}
            Section::Junctions => {
                ctx.need(&tokens, 2)?;
                let base_demand = ctx.opt_num(&tokens, 2, "demand")?.unwrap_or(0.0);
                if base_demand < 0.0 {
                    model
                        .flags
                        .push(format!("junction {} has negative base demand", tokens[0]));
                }
                model.junctions.push(Junction {
                    name: tokens[0].to_string(),
                    elevation: ctx.num(&tokens, 1, "elevation")?,
                    base_demand,
                    demand_pattern: optional_name(tokens.get(3)),
                });
            }
            Section::Reservoirs => {
                ctx.need(&tokens, 2)?;
                model.reservoirs.push(Reservoir {
                    name: tokens[0].to_string(),
                    base_head: ctx.num(&tokens, 1, "head")?,
                    head_pattern: optional_name(tokens.get(2)),
                });
            }
            Section::Tanks => {
                ctx.need(&tokens, 6)?;
                let tank = Tank {
                    name: tokens[0].to_string(),
                    elevation: ctx.num(&tokens, 1, "elevation")?,
                    init_level: ctx.num(&tokens, 2, "initial level")?,
                    min_level: ctx.num(&tokens, 3, "minimum level")?,
                    max_level: ctx.num(&tokens, 4, "maximum level")?,
                    diameter: ctx.num(&tokens, 5, "diameter")?,
                    min_volume: ctx.opt_num(&tokens, 6, "minimum volume")?.unwrap_or(0.0),
                    volume_curve: optional_name(tokens.get(7)),
                };
                if !(tank.min_level <= tank.init_level && tank.init_level <= tank.max_level) {
                    return Err(ctx.err("tank levels must satisfy min <= initial <= max"));
                }
                model.tanks.push(tank);
            }
            Section::Pipes => {
                ctx.need(&tokens, 6)?;
                let mut minor_loss = 0.0;
                let mut status = LinkStatus::Open;
                if let Some(tok) = tokens.get(6) {
                    match parse_f64(tok) {
                        Some(v) => minor_loss = v,
                        None => {
                            status = parse_status(tok)
                                .ok_or_else(|| ctx.err(format!("bad minor loss '{tok}'")))?
                        }
                    }
                }
                if let Some(tok) = tokens.get(7) {
                    status =
                        parse_status(tok).ok_or_else(|| ctx.err(format!("bad status '{tok}'")))?;
                }
                let pipe = Pipe {
                    name: tokens[0].to_string(),
                    start: tokens[1].to_string(),
                    end: tokens[2].to_string(),
                    length: ctx.num(&tokens, 3, "length")?,
                    diameter: ctx.num(&tokens, 4, "diameter")?,
                    roughness: ctx.num(&tokens, 5, "roughness")?,
                    minor_loss,
                    status,
                };
                if pipe.length <= 0.0 || pipe.diameter <= 0.0 || pipe.roughness <= 0.0 {
                    return Err(ctx.err("length, diameter and roughness must be positive"));
                }
                model.pipes.push(pipe);
            }
            Section::Pumps => {
                ctx.need(&tokens, 5)?;
                let mut kind = None;
                let mut base_speed = 1.0;
                let mut speed_pattern = None;
                let mut i = 3;
                while i < tokens.len() {
                    let key = tokens[i].to_ascii_uppercase();
                    let value = tokens
                        .get(i + 1)
                        .ok_or_else(|| ctx.err(format!("keyword {key} without value")))?;
                    match key.as_str() {
                        "HEAD" => {
                            kind = Some(PumpKind::Head {
                                curve: value.to_string(),
                            })
                        }
                        "POWER" => {
                            kind = Some(PumpKind::Power {
                                power: ctx.num(&tokens, i + 1, "power")?,
                            })
                        }
                        "SPEED" => base_speed = ctx.num(&tokens, i + 1, "speed")?,
                        "PATTERN" => speed_pattern = Some(value.to_string()),
                        other => return Err(ctx.err(format!("unknown pump keyword {other}"))),
                    }
                    i += 2;
                }
                let kind = kind.ok_or_else(|| ctx.err("pump needs HEAD or POWER"))?;
                if base_speed <= 0.0 {
                    return Err(ctx.err("pump speed must be positive"));
                }
                model.pumps.push(Pump {
                    name: tokens[0].to_string(),
                    start: tokens[1].to_string(),
                    end: tokens[2].to_string(),
                    kind,
                    base_speed,
                    speed_pattern,
                    energy_pattern: None,
                    efficiency_curve: None,
                    status: LinkStatus::Open,
                });
            }
            Section::Valves => {
                ctx.need(&tokens, 6)?;
                let kind = ValveKind::from_token(tokens[4])
                    .ok_or_else(|| ctx.err(format!("unknown valve type '{}'", tokens[4])))?;
                let (setting, setting_curve) = if kind == ValveKind::Gpv {
                    (0.0, Some(tokens[5].to_string()))
                } else {
                    (ctx.num(&tokens, 5, "setting")?, None)
                };
                if !kind.is_simulated() {
                    model.flags.push(format!(
                        "valve {} ({}) unsupported-for-simulation",
                        tokens[0],
                        kind.token()
                    ));
                }
                model.valves.push(Valve {
                    name: tokens[0].to_string(),
                    start: tokens[1].to_string(),
                    end: tokens[2].to_string(),
                    diameter: ctx.num(&tokens, 3, "diameter")?,
                    kind,
                    setting,
                    setting_curve,
                    minor_loss: ctx.opt_num(&tokens, 6, "minor loss")?.unwrap_or(0.0),
                });
            }
            Section::Demands => {
                ctx.need(&tokens, 2)?;
                let demand = ctx.num(&tokens, 1, "demand")?;
                let name = tokens[0];
                let junction = model
                    .junctions
                    .iter_mut()
                    .find(|j| j.name == name)
                    .ok_or_else(|| InpError::DanglingReference {
                        owner: "[DEMANDS]".into(),
                        kind: "junction",
                        target: name.to_string(),
                    })?;
                if demand_overrides.iter().any(|n| n == name) {
                    model
                        .flags
                        .push(format!("junction {name}: extra demand category ignored"));
                } else {
                    junction.base_demand = demand;
                    junction.demand_pattern = optional_name(tokens.get(2));
                    demand_overrides.push(name.to_string());
                }
            }
            Section::Patterns => {
                ctx.need(&tokens, 1)?;
                let values = tokens[1..]
                    .iter()
                    .enumerate()
                    .map(|(k, _)| ctx.num(&tokens, k + 1, "multiplier"))
                    .collect::<Result<Vec<_>, _>>()?;
                model
                    .patterns
                    .entry(tokens[0].to_string())
                    .or_default()
                    .extend(values);
            }
            Section::Curves => {
                ctx.need(&tokens, 3)?;
                let point = (ctx.num(&tokens, 1, "x")?, ctx.num(&tokens, 2, "y")?);
                model
                    .curves
                    .entry(tokens[0].to_string())
                    .or_default()
                    .push(point);
            }
            Section::Coordinates => {
                ctx.need(&tokens, 3)?;
                let xy = (ctx.num(&tokens, 1, "x")?, ctx.num(&tokens, 2, "y")?);
                model.coordinates.insert(tokens[0].to_string(), xy);
            }
            Section::Times => {
                let upper: Vec<String> = tokens.iter().map(|t| t.to_ascii_uppercase()).collect();
                let key_len = match upper[0].as_str() {
                    "DURATION" => 1,
                    "HYDRAULIC" | "PATTERN" if upper.get(1).map(String::as_str) == Some("TIMESTEP") => 2,
                    _ => continue,
                };
                let hours = parse_hours(&tokens[key_len..])
                    .ok_or_else(|| ctx.err(format!("bad time value in '{content}'")))?;
                match (upper[0].as_str(), key_len) {
                    ("DURATION", _) => model.times.duration = hours,
                    ("HYDRAULIC", _) => model.times.time_step = hours,
                    _ => model.times.pattern_step = hours,
                }
            }
            Section::Options => {
                let key = tokens[0].to_ascii_uppercase();
                match key.as_str() {
                    "UNITS" => {
                        ctx.need(&tokens, 2)?;
                        model.flow_unit = FlowUnit::from_str(tokens[1])?;
                    }
                    "HEADLOSS" => {
                        ctx.need(&tokens, 2)?;
                        model.headloss = match tokens[1].to_ascii_uppercase().as_str() {
                            "H-W" => HeadlossFormula::HazenWilliams,
                            "D-W" => HeadlossFormula::DarcyWeisbach,
                            "C-M" => HeadlossFormula::ChezyManning,
                            other => return Err(ctx.err(format!("unknown headloss '{other}'"))),
                        };
                    }
                    "PATTERN" => {
                        ctx.need(&tokens, 2)?;
                        model.default_pattern = Some(tokens[1].to_string());
                    }
                    _ => {}
                }
            }
            Section::Energy => {
                if tokens[0].eq_ignore_ascii_case("PUMP") && tokens.len() >= 4 {
                    energy.push((
                        line_no,
                        tokens[1].to_string(),
                        tokens[2].to_ascii_uppercase(),
                        tokens[3].to_string(),
                    ));
                }
            }
        }
    }

    for (line, pump_name, key, value) in energy {
        let Some(pump) = model.pumps.iter_mut().find(|p| p.name == pump_name) else {
            return Err(InpError::DanglingReference {
                owner: format!("[ENERGY] line {line}"),
                kind: "pump",
                target: pump_name,
            });
        };
        match key.as_str() {
            "PATTERN" => pump.energy_pattern = Some(value),
            "EFFIC" | "EFFICIENCY" => pump.efficiency_curve = Some(value),
            _ => {}
        }
    }

    let times = model.times;
    if times.duration < 0.0 || times.time_step <= 0.0 || times.pattern_step <= 0.0 {
        return Err(InpError::MalformedSection {
            line: 0,
            section: "TIMES".into(),
            reason: "durations must be non-negative and steps positive".into(),
        });
    }
    model.validate()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clock_and_unit_durations() {
        assert_eq!(parse_hours(&["24:00"]), Some(24.0));
        assert_eq!(parse_hours(&["1:30"]), Some(1.5));
        assert_eq!(parse_hours(&["0:00:36"]), Some(0.01));
        assert_eq!(parse_hours(&["30", "MIN"]), Some(0.5));
        assert_eq!(parse_hours(&["2", "DAYS"]), Some(48.0));
        assert_eq!(parse_hours(&["6"]), Some(6.0));
    }

    #[test]
    fn headers_only_gives_empty_model() {
        let m = parse_inp("[JUNCTIONS]\n[END]\n").unwrap();
        assert_eq!(m.node_count(), 0);
        assert_eq!(m.link_count(), 0);
        assert!(m.patterns.is_empty());
    }

    #[test]
    fn comments_and_crlf_tolerated() {
        let text = "[JUNCTIONS]\r\n;ID Elev\r\n J1  10  5 ; trailing\r\n[RESERVOIRS]\r\n R 50\r\n\
                    [PIPES]\r\n P R J1 100 200 100\r\n[END]\r\n";
        let m = parse_inp(text).unwrap();
        assert_eq!(m.junctions[0].base_demand, 5.0);
        assert_eq!(m.pipes[0].status, LinkStatus::Open);
    }

    #[test]
    fn dangling_link_endpoint() {
        let text = "[JUNCTIONS]\n J1 0 0\n[PIPES]\n P1 J1 NOPE 100 100 100\n";
        match parse_inp(text) {
            Err(InpError::DanglingReference { target, .. }) => assert_eq!(target, "NOPE"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_node_name() {
        let text = "[JUNCTIONS]\n J1 0 0\n[RESERVOIRS]\n J1 10\n";
        assert!(matches!(
            parse_inp(text),
            Err(InpError::DuplicateName { kind: "node", .. })
        ));
    }

    #[test]
    fn malformed_number_reports_line() {
        let text = "[JUNCTIONS]\n J1 0 0\n J2 abc 0\n";
        match parse_inp(text) {
            Err(InpError::MalformedSection { line, section, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(section, "JUNCTIONS");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unsupported_sections_recorded() {
        let text = "[TITLE]\n demo\n[QUALITY]\n J1 1\n[CONTROLS]\n LINK P OPEN AT TIME 3\n[JUNCTIONS]\n J1 0 0\n";
        let m = parse_inp(text).unwrap();
        assert_eq!(m.skipped_sections, vec!["TITLE", "QUALITY", "CONTROLS"]);
        assert!(m.flags.iter().any(|f| f.contains("CONTROLS")));
    }

    #[test]
    fn missing_pattern_reference() {
        let text = "[JUNCTIONS]\n J1 0 1 DAILY\n";
        assert!(matches!(
            parse_inp(text),
            Err(InpError::DanglingReference { kind: "pattern", .. })
        ));
    }

    #[test]
    fn gpv_flagged_not_rejected() {
        let text = "[JUNCTIONS]\n A 0 0\n B 0 0\n[VALVES]\n V A B 100 GPV C1 0\n[CURVES]\n C1 0 0\n C1 10 2\n";
        let m = parse_inp(text).unwrap();
        assert_eq!(m.valves[0].setting_curve.as_deref(), Some("C1"));
        assert!(m.flags.iter().any(|f| f.contains("unsupported-for-simulation")));
    }
}
