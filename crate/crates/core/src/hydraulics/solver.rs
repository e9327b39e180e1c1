//! Demand-driven global gradient solver.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::headloss::{self, minor_factor, GRAVITY, MIN_GRADIENT};
use super::SolverError;
use crate::inp::{HeadlossFormula, LinkStatus, NetworkModel, Pipe, PumpKind, ValveKind};

const MAX_ITERATIONS: usize = 200;
const MAX_STATUS_ROUNDS: usize = 20;
const HEAD_TOL: f64 = 1e-8;
const ENERGY_TOL: f64 = 1e-10;
/// Iteration-to-iteration change allowed in pressure-valve flows, m³/s.
const VALVE_FLOW_TOL: f64 = 1e-8;
const STATUS_HTOL: f64 = 1e-6;
const STATUS_QTOL: f64 = 1e-6;
const DAMPING: f64 = 0.6;
/// Plain Newton steps before damping kicks in against oscillation.
const UNDAMPED_ITERATIONS: usize = 20;

/// Operating state of a link within one solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkState {
    Open,
    Closed,
    /// Control valve regulating pressure or flow.
    Active,
}

/// Pump curve `h = a − b·q^c` at nominal speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpCurve {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl PumpCurve {
    pub fn shutoff(&self, speed: f64) -> f64 {
        speed * speed * self.a
    }

    pub fn gain(&self, q: f64, speed: f64) -> f64 {
        speed * speed * self.a - self.b * speed.powf(2.0 - self.c) * q.max(0.0).powf(self.c)
    }
}

/// Fit `h = a − b·q^c` through the curve points: the synthetic three-point
/// rule for one point, the exact formula for three points starting at zero
/// flow, and least squares otherwise.
pub fn fit_pump_curve(points: &[(f64, f64)]) -> Option<PumpCurve> {
    let exact3 = |(q0, h0): (f64, f64), (q1, h1): (f64, f64), (q2, h2): (f64, f64)| {
        if q0 != 0.0 || !(h0 > h1 && h1 > h2 && q2 > q1 && q1 > 0.0) {
            return None;
        }
        let c = ((h0 - h2) / (h0 - h1)).ln() / (q2 / q1).ln();
        let b = (h0 - h1) / q1.powf(c);
        (c > 0.0 && b > 0.0 && c.is_finite()).then_some(PumpCurve { a: h0, b, c })
    };
    match points {
        [] => None,
        [(q, h)] => exact3((0.0, 1.33334 * h), (*q, *h), (2.0 * q, 0.0)),
        [p0, p1, p2] if p0.0 == 0.0 => exact3(*p0, *p1, *p2),
        _ => least_squares_curve(points),
    }
}

fn least_squares_curve(points: &[(f64, f64)]) -> Option<PumpCurve> {
    let positive: Vec<(f64, f64)> = points.iter().copied().filter(|(q, _)| *q > 0.0).collect();
    let hmax = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    if hmax.is_nan() || hmax <= 0.0 {
        return None;
    }
    if positive.len() < 2 {
        // A shutoff point and one operating point: quadratic through both.
        let (q1, h1) = *positive.first()?;
        let h0 = points.iter().find(|p| p.0 == 0.0)?.1;
        return (h0 > h1).then(|| PumpCurve {
            a: h0,
            b: (h0 - h1) / (q1 * q1),
            c: 2.0,
        });
    }
    let fit_for = |a: f64| -> Option<(PumpCurve, f64)> {
        let xs: Vec<f64> = positive.iter().map(|p| p.0.ln()).collect();
        let ys: Vec<f64> = positive.iter().map(|p| (a - p.1).ln()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        if sxx <= 0.0 {
            return None;
        }
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let c = sxy / sxx;
        let b = (my - c * mx).exp();
        let curve = PumpCurve { a, b, c };
        let sse = points
            .iter()
            .map(|(q, h)| (h - curve.gain(*q, 1.0)).powi(2))
            .sum();
        (c > 0.0 && b > 0.0).then_some((curve, sse))
    };
    // Golden-section search over the shutoff head.
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (hmax * (1.0 + 1e-9), hmax * 3.0);
    let cost = |a: f64| fit_for(a).map(|f| f.1).unwrap_or(f64::INFINITY);
    for _ in 0..100 {
        let x1 = hi - phi * (hi - lo);
        let x2 = lo + phi * (hi - lo);
        if cost(x1) <= cost(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    fit_for(0.5 * (lo + hi)).map(|f| f.0)
}

#[derive(Debug, Clone)]
enum LinkModel {
    Pipe { pipe: Pipe, check_valve: bool },
    HeadPump { curve: PumpCurve },
    PowerPump { power: f64 },
    Valve { kind: ValveKind, setting: f64, minor: f64 },
}

#[derive(Debug, Clone)]
struct Link {
    start: usize,
    end: usize,
    model: LinkModel,
    area: f64,
    /// Closed in the input file; never reopened.
    locked_closed: bool,
}

/// Node and link structure compiled once per model for repeated solves.
#[derive(Debug, Clone)]
pub struct HydraulicNetwork {
    n_junctions: usize,
    n_reservoirs: usize,
    elevation: Vec<f64>,
    links: Vec<Link>,
    /// Per node, the incident links.
    incidence: Vec<Vec<usize>>,
    formula: HeadlossFormula,
    /// Per pump, its index in `links`.
    pump_links: Vec<usize>,
}

/// Solved hydraulic state. Node vectors follow the model's node order
/// (junctions, reservoirs, tanks), link vectors its link order (pipes, pumps,
/// valves).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HydraulicState {
    pub head: Vec<f64>,
    pub pressure: Vec<f64>,
    pub demand: Vec<f64>,
    pub flow: Vec<f64>,
    pub velocity: Vec<f64>,
    pub headloss: Vec<f64>,
    pub friction: Vec<f64>,
    pub status: Vec<LinkState>,
    pub iterations: usize,
}

enum Role {
    Off,
    Conduct { p: f64, y: f64 },
    FixedFlow(f64),
}

impl HydraulicNetwork {
    /// Compile a model already converted to SI.
    pub fn new(model: &NetworkModel) -> Result<Self, SolverError> {
        let names = model.node_names();
        let lookup: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let index = |name: &str| {
            lookup
                .get(name)
                .copied()
                .ok_or_else(|| SolverError::UnknownNode(name.to_string()))
        };
        let mut elevation: Vec<f64> = model.junctions.iter().map(|j| j.elevation).collect();
        elevation.extend(model.reservoirs.iter().map(|r| r.base_head));
        elevation.extend(model.tanks.iter().map(|t| t.elevation));
        let mut links = Vec::with_capacity(model.link_count());
        for p in &model.pipes {
            links.push(Link {
                start: index(&p.start)?,
                end: index(&p.end)?,
                area: std::f64::consts::PI * p.diameter * p.diameter / 4.0,
                locked_closed: p.status == LinkStatus::Closed,
                model: LinkModel::Pipe {
                    pipe: p.clone(),
                    check_valve: p.status == LinkStatus::Cv,
                },
            });
        }
        let mut pump_links = Vec::new();
        for p in &model.pumps {
            let model_kind = match &p.kind {
                PumpKind::Head { curve } => {
                    let points = model.curves.get(curve).map(Vec::as_slice).unwrap_or(&[]);
                    LinkModel::HeadPump {
                        curve: fit_pump_curve(points)
                            .ok_or_else(|| SolverError::BadPumpCurve(p.name.clone()))?,
                    }
                }
                PumpKind::Power { power } => LinkModel::PowerPump { power: *power },
            };
            pump_links.push(links.len());
            links.push(Link {
                start: index(&p.start)?,
                end: index(&p.end)?,
                area: 0.0,
                locked_closed: p.status == LinkStatus::Closed,
                model: model_kind,
            });
        }
        for v in &model.valves {
            let minor = if v.kind == ValveKind::Tcv {
                minor_factor(v.setting, v.diameter)
            } else {
                minor_factor(v.minor_loss, v.diameter)
            };
            links.push(Link {
                start: index(&v.start)?,
                end: index(&v.end)?,
                area: std::f64::consts::PI * v.diameter * v.diameter / 4.0,
                locked_closed: false,
                model: LinkModel::Valve {
                    kind: v.kind,
                    setting: v.setting,
                    minor,
                },
            });
        }
        let mut incidence = vec![Vec::new(); names.len()];
        for (k, l) in links.iter().enumerate() {
            incidence[l.start].push(k);
            if l.end != l.start {
                incidence[l.end].push(k);
            }
        }
        Ok(HydraulicNetwork {
            n_junctions: model.junctions.len(),
            n_reservoirs: model.reservoirs.len(),
            elevation,
            links,
            incidence,
            formula: model.headloss,
            pump_links,
        })
    }

    pub fn node_count(&self) -> usize {
        self.elevation.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    /// Starting link states: closed where the file says so, control valves
    /// active, everything else open.
    pub fn initial_status(&self) -> Vec<LinkState> {
        self.links
            .iter()
            .map(|l| {
                if l.locked_closed {
                    LinkState::Closed
                } else {
                    match l.model {
                        LinkModel::Valve {
                            kind: ValveKind::Prv | ValveKind::Psv | ValveKind::Fcv,
                            ..
                        } => LinkState::Active,
                        _ => LinkState::Open,
                    }
                }
            })
            .collect()
    }

    fn initial_flow(&self, k: usize, speed: f64) -> f64 {
        let l = &self.links[k];
        match &l.model {
            LinkModel::HeadPump { curve } => {
                let qmax = (curve.a / curve.b).powf(1.0 / curve.c);
                0.5 * qmax * speed.max(1e-3)
            }
            LinkModel::PowerPump { .. } => 0.03,
            LinkModel::Valve {
                kind: ValveKind::Fcv,
                setting,
                ..
            } => *setting,
            _ => 0.3048 * l.area,
        }
    }

    /// Pressure or head set point of a PRV/PSV, and the node it controls.
    fn valve_target(&self, k: usize) -> Option<(usize, f64)> {
        let l = &self.links[k];
        match l.model {
            LinkModel::Valve {
                kind: ValveKind::Prv,
                setting,
                ..
            } => Some((l.end, self.elevation[l.end] + setting)),
            LinkModel::Valve {
                kind: ValveKind::Psv,
                setting,
                ..
            } => Some((l.start, self.elevation[l.start] + setting)),
            _ => None,
        }
    }

    /// Head loss (start minus end) and its derivative for an open link.
    fn loss_gradient(&self, k: usize, q: f64, speed: f64) -> (f64, f64) {
        match &self.links[k].model {
            LinkModel::Pipe { pipe, .. } => headloss::pipe_loss_gradient(q, pipe, self.formula),
            LinkModel::HeadPump { curve } => {
                let w = speed;
                if q <= 0.0 {
                    // Reverse flow through a pump: steep line below shutoff.
                    let g = 1e8;
                    return (-curve.shutoff(w) + g * q, g);
                }
                let g = curve.c * curve.b * w.powf(2.0 - curve.c) * q.powf(curve.c - 1.0);
                if g < MIN_GRADIENT {
                    (-curve.shutoff(w) + MIN_GRADIENT * q, MIN_GRADIENT)
                } else {
                    (-curve.gain(q, w), g)
                }
            }
            LinkModel::PowerPump { power } => {
                let qq = q.max(1e-6);
                let h = power / (GRAVITY * qq);
                (-h, h / qq)
            }
            LinkModel::Valve { minor, .. } => {
                let g = 2.0 * minor * q.abs();
                if g < MIN_GRADIENT {
                    (MIN_GRADIENT * q, MIN_GRADIENT)
                } else {
                    (minor * q * q.abs(), g)
                }
            }
        }
    }

    fn link_speed(&self, k: usize, speeds: &[f64]) -> f64 {
        self.pump_links
            .iter()
            .position(|&p| p == k)
            .map(|i| speeds.get(i).copied().unwrap_or(1.0))
            .unwrap_or(1.0)
    }

    /// Solve for one set of boundary conditions. `demands` are per junction
    /// (m³/s), `fixed_heads` per reservoir then tank (m), `speeds` per pump
    /// (relative). `state` carries link states and flows between calls; pass
    /// `None` for a cold start.
    pub fn solve(
        &self,
        demands: &[f64],
        fixed_heads: &[f64],
        speeds: &[f64],
        warm: Option<&HydraulicState>,
    ) -> Result<HydraulicState, SolverError> {
        let nj = self.n_junctions;
        if demands.len() != nj || fixed_heads.len() != self.node_count() - nj {
            return Err(SolverError::DimensionMismatch);
        }
        if nj > 0 && fixed_heads.is_empty() {
            return Err(SolverError::NoFixedHead);
        }
        let mut status = match warm {
            Some(w) if w.status.len() == self.links.len() => w.status.clone(),
            _ => self.initial_status(),
        };
        let mut flows: Vec<f64> = match warm {
            Some(w) if w.flow.len() == self.links.len() => w.flow.clone(),
            _ => (0..self.links.len())
                .map(|k| self.initial_flow(k, self.link_speed(k, speeds)))
                .collect(),
        };
        for (k, l) in self.links.iter().enumerate() {
            if l.locked_closed {
                status[k] = LinkState::Closed;
            }
            if self.pump_links.contains(&k) && self.link_speed(k, speeds) <= 0.0 {
                status[k] = LinkState::Closed;
            }
        }
        let mut heads: Vec<f64> = self.elevation.clone();
        heads[nj..].copy_from_slice(fixed_heads);
        if let Some(w) = warm.filter(|w| w.head.len() == heads.len()) {
            heads[..nj].copy_from_slice(&w.head[..nj]);
        } else {
            let start = fixed_heads.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            heads[..nj].iter_mut().for_each(|h| *h = start);
        }

        let mut total_iterations = 0;
        for _round in 0..MAX_STATUS_ROUNDS {
            total_iterations += self.gga(demands, speeds, &status, &mut flows, &mut heads)?;
            let changed = self.update_status(&mut status, &mut flows, &heads, speeds);
            if !changed {
                return Ok(self.report(demands, status, flows, heads, total_iterations));
            }
        }
        Err(SolverError::NonConvergence {
            iterations: total_iterations,
        })
    }

    fn gga(
        &self,
        demands: &[f64],
        speeds: &[f64],
        status: &[LinkState],
        flows: &mut [f64],
        heads: &mut [f64],
    ) -> Result<usize, SolverError> {
        let nj = self.n_junctions;
        // Junctions whose head is pinned by an active PRV/PSV.
        let mut pinned: Vec<Option<f64>> = vec![None; nj];
        for (k, s) in status.iter().enumerate() {
            if *s == LinkState::Active {
                if let Some((node, h)) = self.valve_target(k) {
                    if node < nj {
                        pinned[node] = Some(h);
                    }
                }
            }
        }
        let roles: Vec<Role> = (0..self.links.len())
            .map(|k| self.role(k, status[k], flows[k], speeds))
            .collect();
        let floating = self.floating_nodes(&roles, &pinned, demands)?;
        let mut unknown = vec![usize::MAX; nj];
        let mut n = 0;
        for j in 0..nj {
            match pinned[j] {
                Some(h) => heads[j] = h,
                None if floating[j] => {}
                None => {
                    unknown[j] = n;
                    n += 1;
                }
            }
        }
        let is_unknown = |node: usize| node < nj && unknown[node] != usize::MAX;

        for iter in 1..=MAX_ITERATIONS {
            let roles: Vec<Role> = (0..self.links.len())
                .map(|k| self.role(k, status[k], flows[k], speeds))
                .collect();
            let mut a = DMatrix::<f64>::zeros(n, n);
            let mut f = DVector::<f64>::zeros(n);
            for j in 0..nj {
                if is_unknown(j) {
                    f[unknown[j]] = -demands[j];
                }
            }
            for (k, role) in roles.iter().enumerate() {
                let (s, e) = (self.links[k].start, self.links[k].end);
                match *role {
                    Role::Off => {}
                    Role::FixedFlow(q) => {
                        if is_unknown(s) {
                            f[unknown[s]] -= q;
                        }
                        if is_unknown(e) {
                            f[unknown[e]] += q;
                        }
                    }
                    Role::Conduct { p, y } => {
                        let carry = flows[k] - y;
                        match (is_unknown(s), is_unknown(e)) {
                            (true, true) => {
                                let (i, j) = (unknown[s], unknown[e]);
                                a[(i, i)] += p;
                                a[(j, j)] += p;
                                a[(i, j)] -= p;
                                a[(j, i)] -= p;
                                f[i] -= carry;
                                f[j] += carry;
                            }
                            (true, false) => {
                                let i = unknown[s];
                                a[(i, i)] += p;
                                f[i] += p * heads[e] - carry;
                            }
                            (false, true) => {
                                let j = unknown[e];
                                a[(j, j)] += p;
                                f[j] += p * heads[s] + carry;
                            }
                            (false, false) => {}
                        }
                    }
                }
            }
            let solution = if n == 0 {
                DVector::zeros(0)
            } else {
                let chol = a
                    .cholesky()
                    .ok_or(SolverError::Singular)?;
                chol.solve(&f)
            };
            let mut max_dh: f64 = 0.0;
            for j in 0..nj {
                if is_unknown(j) {
                    let h = solution[unknown[j]];
                    if !h.is_finite() {
                        return Err(SolverError::Singular);
                    }
                    max_dh = max_dh.max((h - heads[j]).abs());
                    heads[j] = h;
                }
            }

            let mut new_flows = flows.to_vec();
            for (k, role) in roles.iter().enumerate() {
                let l = &self.links[k];
                new_flows[k] = match *role {
                    Role::Off => 0.0,
                    Role::FixedFlow(q) => q,
                    Role::Conduct { p, y } => flows[k] - y + p * (heads[l.start] - heads[l.end]),
                };
            }
            // Active pressure valves carry whatever balances their controlled node.
            let mut max_dq_valve: f64 = 0.0;
            for (k, s) in status.iter().enumerate() {
                if *s != LinkState::Active {
                    continue;
                }
                let Some((node, _)) = self.valve_target(k) else {
                    continue;
                };
                if node >= nj {
                    continue;
                }
                let mut net_in = 0.0;
                for &o in &self.incidence[node] {
                    if o == k {
                        continue;
                    }
                    if self.links[o].end == node {
                        net_in += new_flows[o];
                    }
                    if self.links[o].start == node {
                        net_in -= new_flows[o];
                    }
                }
                let q = if self.links[k].end == node {
                    demands[node] - net_in
                } else {
                    net_in - demands[node]
                };
                max_dq_valve = max_dq_valve.max((q - flows[k]).abs());
                new_flows[k] = q;
            }

            let damp = iter > UNDAMPED_ITERATIONS && max_dh > HEAD_TOL;
            for (q, qn) in flows.iter_mut().zip(&new_flows) {
                *q = if damp { *q + DAMPING * (qn - *q) } else { *qn };
            }
            if damp {
                continue;
            }

            let mut max_energy: f64 = 0.0;
            for (k, role) in roles.iter().enumerate() {
                if let Role::Conduct { .. } = role {
                    let l = &self.links[k];
                    let (h, _) = self.loss_gradient(k, flows[k], self.link_speed(k, speeds));
                    max_energy = max_energy.max((heads[l.start] - heads[l.end] - h).abs());
                }
            }
            if iter > 1 && max_dq_valve < VALVE_FLOW_TOL && (max_dh < HEAD_TOL || max_energy < ENERGY_TOL) {
                self.fill_floating(heads, &floating);
                return Ok(iter);
            }
        }
        Err(SolverError::NonConvergence {
            iterations: MAX_ITERATIONS,
        })
    }

    fn role(&self, k: usize, state: LinkState, q: f64, speeds: &[f64]) -> Role {
        match state {
            LinkState::Closed => Role::Off,
            LinkState::Active => match self.links[k].model {
                LinkModel::Valve {
                    kind: ValveKind::Fcv,
                    setting,
                    ..
                } => Role::FixedFlow(setting),
                LinkModel::Valve {
                    kind: ValveKind::Prv | ValveKind::Psv,
                    ..
                } => {
                    if self.valve_target(k).is_some_and(|(n, _)| n < self.n_junctions) {
                        Role::FixedFlow(q)
                    } else {
                        self.conduct(k, q, speeds)
                    }
                }
                _ => self.conduct(k, q, speeds),
            },
            LinkState::Open => self.conduct(k, q, speeds),
        }
    }

    fn conduct(&self, k: usize, q: f64, speeds: &[f64]) -> Role {
        let (h, g) = self.loss_gradient(k, q, self.link_speed(k, speeds));
        let p = 1.0 / g;
        Role::Conduct { p, y: p * h }
    }

    /// Junctions cut off from every known head by closed links. They are
    /// allowed only when nothing inside the cut-off part draws water.
    fn floating_nodes(
        &self,
        roles: &[Role],
        pinned: &[Option<f64>],
        demands: &[f64],
    ) -> Result<Vec<bool>, SolverError> {
        let nj = self.n_junctions;
        let mut reached = vec![false; self.node_count()];
        let mut stack: Vec<usize> = (0..self.node_count())
            .filter(|&v| v >= nj || pinned[v].is_some())
            .collect();
        for &v in &stack {
            reached[v] = true;
        }
        while let Some(v) = stack.pop() {
            for &k in &self.incidence[v] {
                if !matches!(roles[k], Role::Conduct { .. }) {
                    continue;
                }
                let l = &self.links[k];
                let other = if l.start == v { l.end } else { l.start };
                if !reached[other] {
                    reached[other] = true;
                    stack.push(other);
                }
            }
        }
        let floating: Vec<bool> = (0..nj).map(|j| !reached[j]).collect();
        for j in 0..nj {
            if floating[j] {
                let fed = self.incidence[j]
                    .iter()
                    .any(|&k| matches!(roles[k], Role::FixedFlow(q) if q != 0.0));
                if demands[j] != 0.0 || fed {
                    return Err(SolverError::Disconnected(j));
                }
            }
        }
        Ok(floating)
    }

    /// Give cut-off junctions the head of the solved node they hang from.
    fn fill_floating(&self, heads: &mut [f64], floating: &[bool]) {
        let mut known: Vec<bool> = (0..self.node_count())
            .map(|v| v >= self.n_junctions || !floating[v])
            .collect();
        let mut stack: Vec<usize> = (0..self.node_count()).filter(|&v| known[v]).collect();
        while let Some(v) = stack.pop() {
            for &k in &self.incidence[v] {
                let l = &self.links[k];
                let other = if l.start == v { l.end } else { l.start };
                if !known[other] {
                    known[other] = true;
                    heads[other] = heads[v];
                    stack.push(other);
                }
            }
        }
    }

    /// Re-evaluate check valves, pumps and control valves. Returns whether
    /// any state changed.
    fn update_status(
        &self,
        status: &mut [LinkState],
        flows: &mut [f64],
        heads: &[f64],
        speeds: &[f64],
    ) -> bool {
        let mut changed = false;
        for (k, l) in self.links.iter().enumerate() {
            if l.locked_closed {
                continue;
            }
            let (h1, h2, q) = (heads[l.start], heads[l.end], flows[k]);
            let old = status[k];
            let new = match &l.model {
                LinkModel::Pipe {
                    check_valve: true, ..
                } => match old {
                    LinkState::Closed if h1 - h2 > STATUS_HTOL => LinkState::Open,
                    LinkState::Open if q < -STATUS_QTOL => LinkState::Closed,
                    s => s,
                },
                LinkModel::Pipe { .. } => old,
                LinkModel::HeadPump { curve } => {
                    let w = self.link_speed(k, speeds);
                    if w <= 0.0 {
                        LinkState::Closed
                    } else {
                        match old {
                            LinkState::Open if q < -STATUS_QTOL => LinkState::Closed,
                            LinkState::Closed if h2 - h1 < curve.shutoff(w) - STATUS_HTOL => {
                                LinkState::Open
                            }
                            s => s,
                        }
                    }
                }
                LinkModel::PowerPump { .. } => old,
                LinkModel::Valve { kind, setting, .. } => match kind {
                    ValveKind::Prv => {
                        let hset = self.elevation[l.end] + setting;
                        match old {
                            LinkState::Active if q < -STATUS_QTOL => LinkState::Closed,
                            LinkState::Active if h1 < hset - STATUS_HTOL => LinkState::Open,
                            LinkState::Open if q < -STATUS_QTOL => LinkState::Closed,
                            LinkState::Open if h2 >= hset + STATUS_HTOL => LinkState::Active,
                            LinkState::Closed if h1 >= hset + STATUS_HTOL && h2 < hset - STATUS_HTOL => {
                                LinkState::Active
                            }
                            LinkState::Closed if h1 < hset - STATUS_HTOL && h1 > h2 + STATUS_HTOL => {
                                LinkState::Open
                            }
                            s => s,
                        }
                    }
                    ValveKind::Psv => {
                        let hset = self.elevation[l.start] + setting;
                        match old {
                            LinkState::Active if q < -STATUS_QTOL => LinkState::Closed,
                            LinkState::Active if h2 > hset + STATUS_HTOL => LinkState::Open,
                            LinkState::Open if q < -STATUS_QTOL => LinkState::Closed,
                            LinkState::Open if h1 < hset - STATUS_HTOL => LinkState::Active,
                            LinkState::Closed if h2 > hset + STATUS_HTOL && h1 > h2 + STATUS_HTOL => {
                                LinkState::Open
                            }
                            LinkState::Closed if h1 >= hset + STATUS_HTOL && h1 > h2 + STATUS_HTOL => {
                                LinkState::Active
                            }
                            s => s,
                        }
                    }
                    ValveKind::Fcv => match old {
                        LinkState::Active if h1 - h2 < -STATUS_HTOL => LinkState::Open,
                        LinkState::Open if q >= *setting => LinkState::Active,
                        s => s,
                    },
                    _ => old,
                },
            };
            if new != old {
                status[k] = new;
                changed = true;
                flows[k] = match new {
                    LinkState::Closed => 0.0,
                    _ => self.initial_flow(k, self.link_speed(k, speeds)).max(q.abs()),
                };
            }
        }
        changed
    }

    fn report(
        &self,
        demands: &[f64],
        status: Vec<LinkState>,
        flows: Vec<f64>,
        heads: Vec<f64>,
        iterations: usize,
    ) -> HydraulicState {
        let nj = self.n_junctions;
        let mut demand = vec![0.0; self.node_count()];
        demand[..nj].copy_from_slice(demands);
        for (k, l) in self.links.iter().enumerate() {
            if l.end >= nj {
                demand[l.end] += flows[k];
            }
            if l.start >= nj {
                demand[l.start] -= flows[k];
            }
        }
        let pressure = heads
            .iter()
            .zip(&self.elevation)
            .enumerate()
            .map(|(i, (h, z))| {
                if i >= nj && i < nj + self.n_reservoirs {
                    0.0
                } else {
                    h - z
                }
            })
            .collect();
        let mut velocity = vec![0.0; self.links.len()];
        let mut headloss = vec![0.0; self.links.len()];
        let mut friction = vec![0.0; self.links.len()];
        for (k, l) in self.links.iter().enumerate() {
            headloss[k] = heads[l.start] - heads[l.end];
            if l.area > 0.0 {
                velocity[k] = flows[k].abs() / l.area;
            }
            if let LinkModel::Pipe { pipe, .. } = &l.model {
                if status[k] != LinkState::Closed {
                    friction[k] = headloss::headloss(flows[k], pipe, self.formula).1;
                }
            }
        }
        HydraulicState {
            head: heads,
            pressure,
            demand,
            flow: flows,
            velocity,
            headloss,
            friction,
            status,
            iterations,
        }
    }
}

/// One steady-state solve of a model in SI units at nominal pump speeds.
/// `demands` are per junction (m³/s); `fixed_heads` per reservoir then tank.
pub fn solve_steady_state(
    model: &NetworkModel,
    demands: &[f64],
    fixed_heads: &[f64],
) -> Result<HydraulicState, SolverError> {
    let net = HydraulicNetwork::new(model)?;
    let speeds: Vec<f64> = model.pumps.iter().map(|p| p.base_speed).collect();
    net.solve(demands, fixed_heads, &speeds, None)
}
