//! Pipe friction and minor losses in SI units.

use std::f64::consts::PI;

use crate::inp::{HeadlossFormula, Pipe};

pub const GRAVITY: f64 = 9.80665;
/// Kinematic viscosity of water at 20 °C, m²/s.
pub const VISCOSITY: f64 = 1.022e-6;
/// Smallest head-loss gradient used when linearizing around zero flow.
pub const MIN_GRADIENT: f64 = 1e-5;

const HW_EXP: f64 = 1.852;

/// Darcy-Weisbach loss factor `8L/(g π² D⁵)`, so that `h = f·K·q²`.
pub fn darcy_factor(length: f64, diameter: f64) -> f64 {
    8.0 * length / (GRAVITY * PI * PI * diameter.powi(5))
}

/// Minor loss factor `8K/(g π² D⁴)`, so that `h = M·q|q|`.
pub fn minor_factor(k: f64, diameter: f64) -> f64 {
    8.0 * k / (GRAVITY * PI * PI * diameter.powi(4))
}

pub fn hazen_williams_resistance(length: f64, diameter: f64, c: f64) -> f64 {
    10.667 * c.powf(-HW_EXP) * diameter.powf(-4.871) * length
}

fn manning_resistance(length: f64, diameter: f64, n: f64) -> f64 {
    10.294 * n * n * length / diameter.powf(5.33)
}

/// Swamee-Jain in the turbulent range, 64/Re when laminar and a linear blend
/// between Re 2000 and 4000. Roughness in mm.
pub fn friction_factor_dw(flow: f64, diameter: f64, roughness_mm: f64) -> f64 {
    let re = 4.0 * flow.abs() / (PI * diameter * VISCOSITY);
    if re <= 0.0 {
        return 0.0;
    }
    let swamee = |re: f64| {
        let term = roughness_mm / 1000.0 / (3.7 * diameter) + 5.74 / re.powf(0.9);
        0.25 / term.log10().powi(2)
    };
    if re < 2000.0 {
        64.0 / re
    } else if re < 4000.0 {
        let f0 = 64.0 / 2000.0;
        let f1 = swamee(4000.0);
        f0 + (f1 - f0) * (re - 2000.0) / 2000.0
    } else {
        swamee(re)
    }
}

fn friction_loss(flow: f64, pipe: &Pipe, formula: HeadlossFormula) -> f64 {
    let q = flow.abs();
    let h = match formula {
        HeadlossFormula::HazenWilliams => {
            hazen_williams_resistance(pipe.length, pipe.diameter, pipe.roughness) * q.powf(HW_EXP)
        }
        HeadlossFormula::DarcyWeisbach => {
            friction_factor_dw(q, pipe.diameter, pipe.roughness)
                * darcy_factor(pipe.length, pipe.diameter)
                * q
                * q
        }
        HeadlossFormula::ChezyManning => {
            manning_resistance(pipe.length, pipe.diameter, pipe.roughness) * q * q
        }
    };
    h.copysign(flow)
}

/// Head loss along a pipe (friction plus minor loss, signed like the flow)
/// and the Darcy friction factor. Hazen-Williams and Chezy-Manning report
/// the Darcy factor that would give the same friction loss.
pub fn headloss(flow: f64, pipe: &Pipe, formula: HeadlossFormula) -> (f64, f64) {
    if flow == 0.0 {
        return (0.0, 0.0);
    }
    let hf = friction_loss(flow, pipe, formula);
    let hm = minor_factor(pipe.minor_loss, pipe.diameter) * flow * flow.abs();
    let f = hf.abs() / (darcy_factor(pipe.length, pipe.diameter) * flow * flow);
    (hf + hm, f)
}

/// Head loss and its derivative as used by the solver: below the minimum
/// gradient the curve is replaced by the line `g·q` through the origin.
pub(crate) fn pipe_loss_gradient(flow: f64, pipe: &Pipe, formula: HeadlossFormula) -> (f64, f64) {
    let q = flow.abs();
    let m = minor_factor(pipe.minor_loss, pipe.diameter);
    let g = match formula {
        HeadlossFormula::HazenWilliams => {
            let r = hazen_williams_resistance(pipe.length, pipe.diameter, pipe.roughness);
            HW_EXP * r * q.powf(HW_EXP - 1.0) + 2.0 * m * q
        }
        HeadlossFormula::ChezyManning => {
            let r = manning_resistance(pipe.length, pipe.diameter, pipe.roughness);
            2.0 * (r + m) * q
        }
        HeadlossFormula::DarcyWeisbach => {
            let step = 1e-9 + 1e-6 * q;
            let hi = friction_loss(q + step, pipe, formula);
            let lo = friction_loss((q - step).max(0.0), pipe, formula);
            (hi - lo) / (q + step - (q - step).max(0.0)) + 2.0 * m * q
        }
    };
    if g < MIN_GRADIENT {
        return (MIN_GRADIENT * flow, MIN_GRADIENT);
    }
    (headloss(flow, pipe, formula).0, g)
}
