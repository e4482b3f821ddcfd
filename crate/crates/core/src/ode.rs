//! Adaptive Dormand–Prince 5(4) integration of the Jost problem in
//! exponentially normalized variables Y = (y, y', y'')·e^{−κx}.

use crate::error::{Error, Result};
use crate::potential::Potential;
use num_complex::Complex64;
use ode_solvers::{Dopri5, OutputType, System, Vector6};

pub const RTOL: f64 = 1e-12;
pub const ATOL: f64 = 1e-14;
/// Step cap so that smooth perturbations are always resolved.
const H_MAX: f64 = 0.1;

struct Normalized<'a> {
    p: &'a Potential,
    lambda3: Complex64,
    kk: Complex64,
    /// +1 when integrating in x, −1 when integrating in s = −x.
    dir: f64,
    /// Local variable r = s − s0 keeps the solver on a nonnegative interval.
    s0: f64,
}

fn unpack(y: &Vector6<f64>) -> [Complex64; 3] {
    [Complex64::new(y[0], y[3]), Complex64::new(y[1], y[4]), Complex64::new(y[2], y[5])]
}

fn pack(v: [Complex64; 3]) -> Vector6<f64> {
    Vector6::new(v[0].re, v[1].re, v[2].re, v[0].im, v[1].im, v[2].im)
}

impl System<f64, Vector6<f64>> for Normalized<'_> {
    fn system(&self, r: f64, y: &Vector6<f64>, dy: &mut Vector6<f64>) {
        let x = self.dir * (self.s0 + r);
        let v = unpack(y);
        let m = self.p.m_at(x);
        // y''' = −i m λ³ y
        let d3 = -Complex64::i() * m * self.lambda3 * v[0];
        let d = [v[1] - self.kk * v[0], v[2] - self.kk * v[1], d3 - self.kk * v[2]];
        let out = pack([d[0] * self.dir, d[1] * self.dir, d[2] * self.dir]);
        dy.copy_from(&out);
    }
}

/// Integrate the normalized state from `x0` to `x1` (either direction),
/// splitting at the step discontinuity x = 0 and at panel breakpoints.
pub fn propagate(
    p: &Potential,
    lambda: Complex64,
    kk: Complex64,
    y0: [Complex64; 3],
    x0: f64,
    x1: f64,
) -> Result<[Complex64; 3]> {
    if x0 == x1 {
        return Ok(y0);
    }
    let dir = if x1 > x0 { 1.0 } else { -1.0 };
    let mut cuts: Vec<f64> = p
        .perturbation
        .breakpoints()
        .into_iter()
        .filter(|&b| (b - x0) * (b - x1) < 0.0)
        .collect();
    cuts.sort_by(|a, b| (dir * a).partial_cmp(&(dir * b)).unwrap());
    let mut pts = vec![x0];
    pts.extend(cuts);
    pts.push(x1);
    let mut y = y0;
    let lambda3 = lambda * lambda * lambda;
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == b {
            continue;
        }
        let (sa, sb) = (dir * a, dir * b);
        let sys = Normalized { p, lambda3, kk, dir, s0: sa };
        let len = sb - sa;
        let mut stepper = Dopri5::from_param(
            sys,
            0.0,
            len,
            len,
            pack(y),
            RTOL,
            ATOL,
            0.9,
            0.0,
            0.333,
            6.0,
            len.min(H_MAX),
            0.0,
            1_000_000,
            u32::MAX,
            OutputType::Sparse,
        );
        stepper.integrate().map_err(|e| Error::Ode(format!("{e:?}")))?;
        let last = stepper.y_out().last().ok_or_else(|| Error::Ode("no output".into()))?;
        y = unpack(last);
    }
    Ok(y)
}
