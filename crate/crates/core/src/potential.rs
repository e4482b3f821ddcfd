//! Step-like coefficient m(x) = m_±·(1 + p(x)) with m_+ on x ≥ 0 and m_− on
//! x < 0, its admissibility checks and derived integral profiles.

use crate::error::{Error, Result};
use crate::quad;
use serde::{Deserialize, Serialize};

/// Below this relative size the perturbation is treated as exactly zero.
pub const NEGLIGIBLE: f64 = 1e-17;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBump {
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    #[default]
    Linear,
    /// Monotone piecewise cubic (Fritsch–Carlson slopes).
    MonotoneCubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Extension {
    /// p = 0 outside the table.
    #[default]
    Zero,
    /// p keeps its end values outside the table.
    Hold,
}

/// Relative perturbation p(x) of the step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum Perturbation {
    #[default]
    None,
    GaussianBumps { bumps: Vec<GaussianBump> },
    /// p(x) = amplitude·e^{−rate·|x|}.
    ExponentialTail { amplitude: f64, rate: f64 },
    Table {
        x: Vec<f64>,
        values: Vec<f64>,
        #[serde(default)]
        rule: Interpolation,
        #[serde(default)]
        outside: Extension,
    },
}

impl Perturbation {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Perturbation::None => 0.0,
            Perturbation::GaussianBumps { bumps } => bumps
                .iter()
                .map(|b| b.amplitude * (-(x - b.center).powi(2) / (2.0 * b.width * b.width)).exp())
                .sum(),
            Perturbation::ExponentialTail { amplitude, rate } => amplitude * (-rate * x.abs()).exp(),
            Perturbation::Table { x: xs, values, rule, outside } => table_eval(xs, values, *rule, *outside, x),
        }
    }

    /// Interval outside which |p| < [`NEGLIGIBLE`] (may be unbounded).
    pub fn support(&self) -> (f64, f64) {
        match self {
            Perturbation::None => (0.0, 0.0),
            Perturbation::GaussianBumps { bumps } => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for b in bumps {
                    if b.amplitude == 0.0 {
                        continue;
                    }
                    let r = b.width * (2.0 * (b.amplitude.abs() / NEGLIGIBLE).ln().max(0.0)).sqrt();
                    lo = lo.min(b.center - r);
                    hi = hi.max(b.center + r);
                }
                if lo > hi {
                    (0.0, 0.0)
                } else {
                    (lo, hi)
                }
            }
            Perturbation::ExponentialTail { amplitude, rate } => {
                if *amplitude == 0.0 {
                    return (0.0, 0.0);
                }
                let r = (amplitude.abs() / NEGLIGIBLE).ln().max(0.0) / rate;
                (-r, r)
            }
            Perturbation::Table { x, outside, values, .. } => match outside {
                Extension::Zero => (x[0], *x.last().unwrap()),
                Extension::Hold => {
                    let lo = if values[0].abs() > 0.0 { f64::NEG_INFINITY } else { x[0] };
                    let hi = if values.last().unwrap().abs() > 0.0 { f64::INFINITY } else { *x.last().unwrap() };
                    (lo, hi)
                }
            },
        }
    }

    /// Points where the integrand has kinks or concentrated mass.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v = vec![0.0];
        match self {
            Perturbation::GaussianBumps { bumps } => {
                for b in bumps {
                    for k in -3..=3 {
                        v.push(b.center + k as f64 * b.width);
                    }
                }
            }
            Perturbation::Table { x, .. } => v.extend(x.iter().copied()),
            _ => {}
        }
        v
    }

    fn check(&self) -> Result<()> {
        match self {
            Perturbation::GaussianBumps { bumps } => {
                if bumps.iter().any(|b| !(b.width > 0.0) || !b.center.is_finite() || !b.amplitude.is_finite()) {
                    return Err(Error::Invalid("gaussian bumps need positive width and finite parameters".into()));
                }
            }
            Perturbation::ExponentialTail { rate, amplitude } => {
                if !(*rate > 0.0) || !amplitude.is_finite() {
                    return Err(Error::Invalid("exponential tail needs a positive rate".into()));
                }
            }
            Perturbation::Table { x, values, .. } => {
                if x.len() < 2 || x.len() != values.len() {
                    return Err(Error::Invalid("table needs at least two (x, value) pairs".into()));
                }
                if x.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::Invalid("table abscissae must increase".into()));
                }
            }
            Perturbation::None => {}
        }
        Ok(())
    }
}

fn table_eval(xs: &[f64], ys: &[f64], rule: Interpolation, outside: Extension, x: f64) -> f64 {
    let n = xs.len();
    if x < xs[0] || x > xs[n - 1] {
        return match outside {
            Extension::Zero => 0.0,
            Extension::Hold => {
                if x < xs[0] {
                    ys[0]
                } else {
                    ys[n - 1]
                }
            }
        };
    }
    let i = xs.partition_point(|&v| v <= x).clamp(1, n - 1) - 1;
    let h = xs[i + 1] - xs[i];
    let t = (x - xs[i]) / h;
    match rule {
        Interpolation::Linear => ys[i] * (1.0 - t) + ys[i + 1] * t,
        Interpolation::MonotoneCubic => {
            let d = |k: usize| -> f64 {
                let secant = |j: usize| (ys[j + 1] - ys[j]) / (xs[j + 1] - xs[j]);
                if k == 0 {
                    secant(0)
                } else if k == n - 1 {
                    secant(n - 2)
                } else {
                    let (a, b) = (secant(k - 1), secant(k));
                    if a * b <= 0.0 {
                        0.0
                    } else {
                        let (w1, w2) = (2.0 * (xs[k + 1] - xs[k]) + (xs[k] - xs[k - 1]), (xs[k + 1] - xs[k]) + 2.0 * (xs[k] - xs[k - 1]));
                        (w1 + w2) / (w1 / a + w2 / b)
                    }
                }
            };
            let (d0, d1) = (d(i), d(i + 1));
            let h00 = (1.0 + 2.0 * t) * (1.0 - t).powi(2);
            let h10 = t * (1.0 - t).powi(2);
            let h01 = t * t * (3.0 - 2.0 * t);
            let h11 = t * t * (t - 1.0);
            h00 * ys[i] + h10 * h * d0 + h01 * ys[i + 1] + h11 * h * d1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    pub m_plus: f64,
    pub m_minus: f64,
    /// Exponential decay rate of the perturbation.
    pub a: f64,
    #[serde(default)]
    pub perturbation: Perturbation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityDisk {
    pub radius_plus: f64,
    pub radius_minus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub positive: bool,
    pub m_min: f64,
    pub m_min_at: f64,
    /// ∫_{ℝ±} |m − m±|² e^{2a|x|} dx, `None` when the estimate diverges.
    pub weighted_norm_plus: Option<f64>,
    pub weighted_norm_minus: Option<f64>,
    /// Fitted exponential rate of |p| far out on each side (negative = decay).
    pub envelope_rate_plus: f64,
    pub envelope_rate_minus: f64,
    pub disk: ValidityDisk,
    /// Truncation points used for improper integrals.
    pub truncation: (f64, f64),
    pub issues: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.issues.is_empty()
    }
}

impl Potential {
    pub fn step(m_plus: f64, m_minus: f64) -> Self {
        Self { m_plus, m_minus, a: 1.0, perturbation: Perturbation::None }
    }

    pub fn with_bump(mut self, center: f64, width: f64, amplitude: f64) -> Self {
        self.perturbation = Perturbation::GaussianBumps { bumps: vec![GaussianBump { center, width, amplitude }] };
        self
    }

    /// Structural checks that make every other method well defined.
    pub fn check(&self) -> Result<()> {
        if !(self.m_plus > 0.0 && self.m_minus > 0.0) {
            return Err(Error::Invalid("m_plus and m_minus must be positive".into()));
        }
        if !(self.a > 0.0) {
            return Err(Error::Invalid("decay rate a must be positive".into()));
        }
        self.perturbation.check()
    }

    pub fn n_plus(&self) -> f64 {
        self.m_plus.cbrt()
    }

    pub fn n_minus(&self) -> f64 {
        self.m_minus.cbrt()
    }

    pub fn kappa(&self) -> f64 {
        self.n_minus() / self.n_plus()
    }

    /// The mirrored coefficient m̃(x) = m(−x), with the limits exchanged.
    pub fn reflected(&self) -> Self {
        let perturbation = match &self.perturbation {
            Perturbation::None => Perturbation::None,
            Perturbation::GaussianBumps { bumps } => Perturbation::GaussianBumps {
                bumps: bumps.iter().map(|b| GaussianBump { center: -b.center, ..*b }).collect(),
            },
            Perturbation::ExponentialTail { amplitude, rate } => {
                Perturbation::ExponentialTail { amplitude: *amplitude, rate: *rate }
            }
            Perturbation::Table { x, values, rule, outside } => Perturbation::Table {
                x: x.iter().rev().map(|v| -v).collect(),
                values: values.iter().rev().copied().collect(),
                rule: *rule,
                outside: *outside,
            },
        };
        Self { m_plus: self.m_minus, m_minus: self.m_plus, a: self.a, perturbation }
    }

    pub fn base(&self, x: f64) -> f64 {
        if x >= 0.0 {
            self.m_plus
        } else {
            self.m_minus
        }
    }

    pub fn m_at(&self, x: f64) -> f64 {
        self.base(x) * (1.0 + self.perturbation.eval(x))
    }

    /// n(x) = m(x)^{1/3}.
    pub fn n_at(&self, x: f64) -> f64 {
        self.m_at(x).cbrt()
    }

    /// m(x)/m_± − 1 for the given reference side.
    pub fn q(&self, x: f64, side: Side) -> f64 {
        let r = match side {
            Side::Plus => self.m_plus,
            Side::Minus => self.m_minus,
        };
        self.m_at(x) / r - 1.0
    }

    pub fn is_pure_step(&self) -> bool {
        let (lo, hi) = self.perturbation.support();
        lo >= hi
    }

    /// Finite truncation interval for improper integrals: the support of p,
    /// capped at 40/a past the table end for non-decaying tables.
    pub fn truncation(&self) -> (f64, f64) {
        let (lo, hi) = self.perturbation.support();
        if lo >= hi {
            return (0.0, 0.0);
        }
        let cap = 40.0 / self.a;
        let lo = if lo.is_finite() { lo } else { self.perturbation.breakpoints().iter().cloned().fold(0.0, f64::min) - cap };
        let hi = if hi.is_finite() { hi } else { self.perturbation.breakpoints().iter().cloned().fold(0.0, f64::max) + cap };
        (lo, hi)
    }

    pub fn validity_disk(&self) -> ValidityDisk {
        ValidityDisk { radius_plus: self.a / (2.0 * self.n_plus()), radius_minus: self.a / (2.0 * self.n_minus()) }
    }

    fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        let pts = self.perturbation.breakpoints();
        quad::adaptive_split(|t| f(t).into(), a, b, &pts, 1e-15, 1e-13).map(|v| v.re)
    }

    /// σ₊(x) = ∫_x^∞ |m/m₊ − 1| dt, or σ₋(x) = ∫_{−∞}^x |m/m₋ − 1| dt.
    pub fn sigma(&self, x: f64, side: Side) -> Result<f64> {
        let (lo, hi) = self.truncation();
        match side {
            Side::Plus => {
                let end = hi.max(0.0).max(x);
                self.integrate(|t| self.q(t, Side::Plus).abs(), x, end)
            }
            Side::Minus => {
                let start = lo.min(0.0).min(x);
                self.integrate(|t| self.q(t, Side::Minus).abs(), start, x)
            }
        }
    }

    /// M₊(x) = ∫_x^∞ (x−t)²/2 (m/m₊ − 1) dt, M₋(x) = ∫_{−∞}^x (x−t)²/2 (m/m₋ − 1) dt.
    pub fn m_profile(&self, x: f64, side: Side) -> Result<f64> {
        let (lo, hi) = self.truncation();
        match side {
            Side::Plus => {
                let end = hi.max(0.0).max(x);
                self.integrate(|t| 0.5 * (x - t).powi(2) * self.q(t, Side::Plus), x, end)
            }
            Side::Minus => {
                let start = lo.min(0.0).min(x);
                self.integrate(|t| 0.5 * (x - t).powi(2) * self.q(t, Side::Minus), start, x)
            }
        }
    }

    /// Travel-time offset Δ₊(x) = ∫_x^∞ (n − n₊) dt (side +) or
    /// Δ₋(x) = ∫_{−∞}^x (n − n₋) dt (side −).
    pub fn travel_offset(&self, x: f64, side: Side) -> Result<f64> {
        let (lo, hi) = self.truncation();
        match side {
            Side::Plus => {
                let np = self.n_plus();
                let end = hi.max(0.0).max(x);
                self.integrate(|t| self.n_at(t) - np, x, end)
            }
            Side::Minus => {
                let nm = self.n_minus();
                let start = lo.min(0.0).min(x);
                self.integrate(|t| self.n_at(t) - nm, start, x)
            }
        }
    }

    /// Admissibility report: positivity, weighted L² finiteness, disks.
    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        if let Err(e) = self.check() {
            issues.push(e.to_string());
        }
        let (lo, hi) = self.truncation();
        // positivity: dense sampling, then golden-section refinement
        let (s_lo, s_hi) = (lo.min(-1.0) - 1.0, hi.max(1.0) + 1.0);
        let samples = ((s_hi - s_lo) * 1000.0).ceil().min(2e6) as usize;
        let mut best = (f64::INFINITY, 0.0);
        for k in 0..=samples {
            let x = s_lo + (s_hi - s_lo) * k as f64 / samples as f64;
            let m = self.m_at(x);
            if m < best.0 {
                best = (m, x);
            }
        }
        let h = (s_hi - s_lo) / samples as f64;
        let refined = golden_min(|x| self.m_at(x), best.1 - h, best.1 + h);
        if refined.0 < best.0 {
            best = refined;
        }
        let positive = best.0 > 0.0 && self.m_plus > 0.0 && self.m_minus > 0.0;
        if !positive {
            issues.push(format!("m(x) is not positive: min {:.6e} at x = {:.6}", best.0, best.1));
        }
        let (rate_p, norm_p) = self.weighted_norm(Side::Plus);
        let (rate_m, norm_m) = self.weighted_norm(Side::Minus);
        if norm_p.is_none() {
            issues.push(format!("weighted norm on R+ diverges (envelope rate {rate_p:.3} vs a = {})", self.a));
        }
        if norm_m.is_none() {
            issues.push(format!("weighted norm on R- diverges (envelope rate {rate_m:.3} vs a = {})", self.a));
        }
        ValidationReport {
            positive,
            m_min: best.0,
            m_min_at: best.1,
            weighted_norm_plus: norm_p,
            weighted_norm_minus: norm_m,
            envelope_rate_plus: rate_p,
            envelope_rate_minus: rate_m,
            disk: self.validity_disk(),
            truncation: (lo, hi),
            issues,
        }
    }

    /// Fitted log-slope of |p| far out on one side and the weighted norm.
    fn weighted_norm(&self, side: Side) -> (f64, Option<f64>) {
        let sgn = match side {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        };
        let base = match side {
            Side::Plus => self.m_plus,
            Side::Minus => self.m_minus,
        };
        let bp = self.perturbation.breakpoints();
        let far = bp.iter().map(|b| sgn * b).fold(0.0, f64::max);
        // sample |p| on a window far beyond the listed features
        let x0 = far + 1.0;
        let x1 = far + 1.0 + 40.0 / self.a;
        let pts: Vec<(f64, f64)> = (0..=64)
            .map(|k| x0 + (x1 - x0) * k as f64 / 64.0)
            .filter_map(|u| {
                let p = self.perturbation.eval(sgn * u).abs();
                (p > 1e-300).then(|| (u, p.ln()))
            })
            .collect();
        let rate = if pts.len() < 8 {
            f64::NEG_INFINITY
        } else {
            let n = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
            sxy / sxx
        };
        // |p|² e^{2a u} decays iff rate < −a
        if rate >= -self.a {
            return (rate, None);
        }
        let (lo, hi) = self.truncation();
        let (a, b) = match side {
            Side::Plus => (0.0, hi.max(0.0)),
            Side::Minus => (lo.min(0.0), 0.0),
        };
        let v = self
            .integrate(|t| (base * self.perturbation.eval(t)).powi(2) * (2.0 * self.a * t.abs()).exp(), a, b)
            .ok();
        (rate, v)
    }
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..100 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    let x = 0.5 * (a + b);
    (f(x), x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_values() {
        let p = Potential::step(1.0, 8.0);
        assert_eq!(p.m_at(3.0), 1.0);
        assert_eq!(p.m_at(-3.0), 8.0);
        assert!((p.kappa().powi(3) - 8.0).abs() < 1e-12);
        assert_eq!(p.sigma(0.0, Side::Plus).unwrap(), 0.0);
        assert_eq!(p.m_profile(1.0, Side::Plus).unwrap(), 0.0);
        let r = p.validate();
        assert!(r.ok(), "{:?}", r.issues);
        assert!((r.disk.radius_plus - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bump_peak() {
        let p = Potential::step(2.0, 8.0).with_bump(1.0, 0.5, 0.1);
        assert!((p.m_at(1.0) - 2.2).abs() < 1e-14);
    }

    #[test]
    fn exponential_tail_sigma() {
        let p = Potential {
            m_plus: 1.0,
            m_minus: 1.0,
            a: 1.0,
            perturbation: Perturbation::ExponentialTail { amplitude: 0.2, rate: 3.0 },
        };
        for x in [0.0, 0.5, 2.0] {
            let s = p.sigma(x, Side::Plus).unwrap();
            assert!((s - 0.2 / 3.0 * (-3.0 * x).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_bump_flagged() {
        let p = Potential::step(1.0, 8.0).with_bump(1.0, 0.3, -1.5);
        let r = p.validate();
        assert!(!r.positive);
        assert!(!r.ok());
    }

    #[test]
    fn non_decaying_table_flagged() {
        let p = Potential {
            m_plus: 1.0,
            m_minus: 1.0,
            a: 1.0,
            perturbation: Perturbation::Table {
                x: vec![0.0, 1.0, 2.0],
                values: vec![0.0, 0.1, 0.05],
                rule: Interpolation::Linear,
                outside: Extension::Hold,
            },
        };
        let r = p.validate();
        assert!(r.weighted_norm_plus.is_none());
        assert!(r.weighted_norm_minus.is_some());
    }

    #[test]
    fn serde_round_trip() {
        let p = Potential::step(1.0, 8.0).with_bump(1.0, 0.5, 0.05);
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"kind\":\"gaussian_bumps\""));
        let q: Potential = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }
}
