//! Helpers shared by the integration tests: corpus loading and an
//! independent brute-force hydraulic root finder.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use wdngen::inp::{convert_to_si, read_inp_file, HeadlossFormula, LinkStatus, NetworkModel, PumpKind};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn load_si(name: &str) -> NetworkModel {
    convert_to_si(&read_inp_file(data_path(name)).unwrap())
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-9)
}

/// Boundary conditions at hour 0: junction demands and fixed heads
/// (reservoirs then tanks).
pub fn boundary_at_start(model: &NetworkModel) -> (Vec<f64>, Vec<f64>) {
    let demands = model
        .junctions
        .iter()
        .map(|j| j.base_demand * model.pattern_value(model.junction_pattern(j), 0.0))
        .collect();
    let mut fixed: Vec<f64> = model.reservoirs.iter().map(|r| r.base_head).collect();
    fixed.extend(model.tanks.iter().map(|t| t.elevation + t.init_level));
    (demands, fixed)
}

const G: f64 = 9.80665;
const NU: f64 = 1.022e-6;

fn hw_loss(q: f64, l: f64, d: f64, c: f64) -> f64 {
    10.667 * l / (c.powf(1.852) * d.powf(4.871)) * q.abs().powf(1.852) * q.signum()
}

fn dw_loss(q: f64, l: f64, d: f64, eps_mm: f64) -> f64 {
    let area = PI * d * d / 4.0;
    let v = q.abs() / area;
    let re = v * d / NU;
    if re == 0.0 {
        return 0.0;
    }
    let sj = |re: f64| {
        let x = eps_mm / 1000.0 / (3.7 * d) + 5.74 / re.powf(0.9);
        0.25 / x.log10().powi(2)
    };
    let f = if re < 2000.0 {
        64.0 / re
    } else if re < 4000.0 {
        0.032 + (sj(4000.0) - 0.032) * (re - 2000.0) / 2000.0
    } else {
        sj(re)
    };
    f * l / d * v * v / (2.0 * G) * q.signum()
}

fn minor(q: f64, k: f64, d: f64) -> f64 {
    let area = PI * d * d / 4.0;
    k * (q / area) * (q / area).abs() / (2.0 * G)
}

/// Three-point exponential pump curve through (0,h0),(q1,h1),(q2,h2).
fn pump_gain(points: &[(f64, f64)], q: f64) -> f64 {
    let (h0, (q1, h1), (q2, h2)) = (points[0].1, points[1], points[2]);
    let c = ((h0 - h2) / (h0 - h1)).ln() / (q2 / q1).ln();
    let b = (h0 - h1) / q1.powf(c);
    h0 - b * q.max(0.0).powf(c)
}

/// Newton's method on the full nodal-continuity plus link-energy system with
/// a finite-difference Jacobian and LU solves. Only open pipes and head
/// pumps with three-point curves are supported.
pub fn oracle_solve(model: &NetworkModel, demands: &[f64], fixed: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let names = model.node_names();
    let nj = model.junctions.len();
    let idx = |n: &str| names.iter().position(|x| *x == n).unwrap();
    struct L {
        s: usize,
        e: usize,
        loss: Box<dyn Fn(f64) -> f64>,
    }
    let mut links: Vec<L> = Vec::new();
    for p in &model.pipes {
        assert_eq!(p.status, LinkStatus::Open);
        let (l, d, r, k) = (p.length, p.diameter, p.roughness, p.minor_loss);
        let f = model.headloss;
        links.push(L {
            s: idx(&p.start),
            e: idx(&p.end),
            loss: Box::new(move |q| {
                let fr = match f {
                    HeadlossFormula::HazenWilliams => hw_loss(q, l, d, r),
                    HeadlossFormula::DarcyWeisbach => dw_loss(q, l, d, r),
                    HeadlossFormula::ChezyManning => unimplemented!(),
                };
                fr + minor(q, k, d)
            }),
        });
    }
    for p in &model.pumps {
        let PumpKind::Head { curve } = &p.kind else { panic!("head pumps only") };
        let pts = model.curves[curve].clone();
        assert_eq!(pts.len(), 3);
        links.push(L {
            s: idx(&p.start),
            e: idx(&p.end),
            loss: Box::new(move |q| -pump_gain(&pts, q)),
        });
    }
    let nl = links.len();
    let n = nj + nl;
    let head = |x: &DVector<f64>, node: usize| if node < nj { x[node] } else { fixed[node - nj] };
    let residual = |x: &DVector<f64>| {
        let mut r = DVector::zeros(n);
        for j in 0..nj {
            r[j] = -demands[j];
        }
        for (k, l) in links.iter().enumerate() {
            let q = x[nj + k];
            if l.s < nj {
                r[l.s] -= q;
            }
            if l.e < nj {
                r[l.e] += q;
            }
            r[nj + k] = head(x, l.s) - head(x, l.e) - (l.loss)(q);
        }
        r
    };
    let start = fixed.iter().copied().fold(f64::MIN, f64::max);
    let mut x = DVector::from_fn(n, |i, _| if i < nj { start } else { 0.01 });
    for _ in 0..500 {
        let r = residual(&x);
        if r.amax() < 1e-13 {
            break;
        }
        let mut jac = DMatrix::zeros(n, n);
        for c in 0..n {
            let h = 1e-7 * x[c].abs().max(1e-3);
            let mut xp = x.clone();
            xp[c] += h;
            let mut xm = x.clone();
            xm[c] -= h;
            let col = (residual(&xp) - residual(&xm)) / (2.0 * h);
            jac.set_column(c, &col);
        }
        let step = jac.lu().solve(&(-&r)).expect("oracle jacobian singular");
        let mut t = 1.0;
        let norm0 = r.norm();
        loop {
            let trial = &x + &step * t;
            if residual(&trial).norm() < norm0 || t < 1e-6 {
                x = trial;
                break;
            }
            t *= 0.5;
        }
    }
    let heads = (0..nj).map(|j| x[j]).collect();
    let flows = (0..nl).map(|k| x[nj + k]).collect();
    (heads, flows)
}

/// Largest junction continuity residual of a state, m³/s.
pub fn mass_residual(model: &NetworkModel, flow: &[f64], demand: &[f64]) -> f64 {
    let names = model.node_names();
    let nj = model.junctions.len();
    let mut r: Vec<f64> = demand[..nj].iter().map(|d| -d).collect();
    for (k, (s, _, e)) in model.adjacency().iter().enumerate() {
        let si = names.iter().position(|x| x == s).unwrap();
        let ei = names.iter().position(|x| x == e).unwrap();
        if si < nj {
            r[si] -= flow[k];
        }
        if ei < nj {
            r[ei] += flow[k];
        }
    }
    r.iter().fold(0.0, |m, v| m.max(v.abs()))
}
