//! Cauchy integrals over rays from the origin, Sokhotski boundary values,
//! the damping function Q and the jump functions p₁…p₄, p̃₁…p̃₄.

use crate::error::{Error, Result};
use crate::geometry::{SQRT3, ZETA};
use crate::potential::{Potential, Side};
use crate::quad::{self, PanelGrid};
use crate::scattering::{self, ScatteringData};
use crate::special::exp_e1;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Panel-local product weights: ∫_{−1}^{1} f(s)/(s − z) ds ≈ Σ_j w_j f(s_j),
/// exact for polynomials of degree < p. For real z in (−1, 1) the integral is
/// a principal value.
pub fn panel_cauchy_weights(p: usize, z: Complex64) -> Vec<Complex64> {
    let (s, w) = quad::gauss_legendre(p);
    let mut q = vec![Complex64::new(0.0, 0.0); p];
    q[0] = if z.im == 0.0 && z.re.abs() < 1.0 {
        Complex64::new(((1.0 - z.re) / (1.0 + z.re)).ln(), 0.0)
    } else {
        (1.0 - z).ln() - (-1.0 - z).ln()
    };
    if p > 1 {
        q[1] = 2.0 + z * q[0];
    }
    for k in 1..p.saturating_sub(1) {
        q[k + 1] = ((2 * k + 1) as f64 * z * q[k] - k as f64 * q[k - 1]) / (k + 1) as f64;
    }
    (0..p)
        .map(|j| {
            let pk = quad::legendre_all(p, s[j]);
            let sum: Complex64 = (0..p).map(|k| (k as f64 + 0.5) * q[k] * pk[k]).sum();
            w[j] * sum
        })
        .collect()
}

/// Weights with ∫₀^T f(τ)/(τ − w) dτ ≈ Σ_j ω_j f(τ_j) on a panel grid;
/// product integration on panels close to w, plain Gauss weights elsewhere.
pub fn cauchy_weights(grid: &PanelGrid, w: Complex64) -> Vec<Complex64> {
    let p = grid.order;
    let mut row = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (i, pan) in grid.breaks.windows(2).enumerate() {
        let (c, h) = (0.5 * (pan[0] + pan[1]), 0.5 * (pan[1] - pan[0]));
        let z = (w - c) / h;
        let sl = i * p..(i + 1) * p;
        if z.norm() < 1.3 {
            row[sl].copy_from_slice(&panel_cauchy_weights(p, z));
        } else {
            for j in sl {
                row[j] = grid.weights[j] / (grid.nodes[j] - w);
            }
        }
    }
    row
}

/// ∫_T^∞ e^{β(t−T)}/(t − w) dt for Re β ≤ 0, equal to e^{ζ}E₁(ζ) with ζ = −β(T − w).
pub fn exp_tail(beta: Complex64, t_max: f64, w: Complex64) -> Complex64 {
    exp_e1(-beta * (t_max - w))
}

/// Samples of a density on the ray λ = τe^{iθ}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayDensity {
    pub angle_deg: f64,
    pub grid: PanelGrid,
    pub values: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundarySide {
    /// Left of the outward-oriented ray (the + side in the Plemelj formula).
    Left,
    Right,
}

impl RayDensity {
    pub fn new(angle_deg: f64, grid: PanelGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Invalid(format!("{} values for {} nodes", values.len(), grid.len())));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Invalid("density values must be finite".into()));
        }
        Ok(Self { angle_deg, grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(angle_deg: f64, grid: PanelGrid, f: F) -> Self {
        let values = grid.nodes.iter().map(|&t| f(t)).collect();
        Self { angle_deg, grid, values }
    }

    pub fn eval(&self, t: f64) -> Result<Complex64> {
        self.grid.interpolate(&self.values, t)
    }

    fn eval_deriv(&self, t: f64) -> Result<Complex64> {
        let i = self.grid.panel_of(t).ok_or(Error::Extrapolation(t))?;
        let (a, b) = (self.grid.breaks[i], self.grid.breaks[i + 1]);
        let (s, _) = quad::gauss_legendre(self.grid.order);
        let d = quad::lagrange_deriv_row(&s, (2.0 * t - a - b) / (b - a));
        let p = self.grid.order;
        Ok((0..p).map(|j| self.values[i * p + j] * d[j]).sum::<Complex64>() * 2.0 / (b - a))
    }

    /// Bound on the neglected part beyond the last node, |d(T)|·(1 + |ln T|).
    pub fn tail_bound(&self) -> f64 {
        let t = self.grid.t_max();
        self.values.last().map_or(0.0, |v| v.norm()) * (1.0 + t.ln().abs())
    }

    fn local(&self, lambda: Complex64) -> Complex64 {
        lambda * Complex64::from_polar(1.0, -self.angle_deg.to_radians())
    }
}

/// (1/2πi)∫ d(τ) dζ/(ζ − λ) over ζ = τe^{iθ}, τ ∈ [0, T], for λ off the ray.
pub fn cauchy_integral(d: &RayDensity, lambda: Complex64) -> Result<Complex64> {
    let w = d.local(lambda);
    if w.im.abs() <= 1e-14 * w.norm().max(1.0) && w.re >= 0.0 && w.re <= d.grid.t_max() {
        return Err(Error::OnRay);
    }
    let wts = cauchy_weights(&d.grid, w);
    let s: Complex64 = wts.iter().zip(&d.values).map(|(a, b)| a * b).sum();
    Ok(s / (2.0 * PI * I))
}

/// Principal value (1/2πi) PV∫ d(τ)/(τ − t) dτ by singularity subtraction.
pub fn principal_value(d: &RayDensity, t: f64) -> Result<Complex64> {
    let tm = d.grid.t_max();
    if !(t > d.grid.breaks[0] && t < tm) {
        return Err(Error::Extrapolation(t));
    }
    let dt = d.eval(t)?;
    let mut s = Complex64::new(0.0, 0.0);
    for ((&tau, &w), &v) in d.grid.nodes.iter().zip(&d.grid.weights).zip(&d.values) {
        let u = tau - t;
        s += w * if u.abs() < 1e-14 * t.max(1.0) { d.eval_deriv(t)? } else { (v - dt) / u };
    }
    s += dt * ((tm - t) / (t - d.grid.breaks[0])).ln();
    Ok(s / (2.0 * PI * I))
}

/// Sokhotski boundary value at λ = te^{iθ}: PV ± ½ d(t), + on the left side.
pub fn boundary_value(d: &RayDensity, t: f64, side: BoundarySide) -> Result<Complex64> {
    let pv = principal_value(d, t)?;
    let half = 0.5 * d.eval(t)?;
    Ok(match side {
        BoundarySide::Left => pv + half,
        BoundarySide::Right => pv - half,
    })
}

/// Entire nonvanishing damping factor Q(λ) = exp(c·(e^{−iθ₀}λn₊)²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampingQ {
    pub c: f64,
    pub n_plus: f64,
    /// Fixed rotation θ₀ in degrees; `None` picks 0° or 90° per λ so that Q grows.
    pub theta0_deg: Option<f64>,
}

impl DampingQ {
    /// c = σ₊(0) + σ₋(0).
    pub fn for_potential(p: &Potential) -> Result<Self> {
        Ok(Self { c: p.sigma(0.0, Side::Plus)? + p.sigma(0.0, Side::Minus)?, n_plus: p.n_plus(), theta0_deg: None })
    }

    pub fn identity() -> Self {
        Self { c: 0.0, n_plus: 1.0, theta0_deg: Some(0.0) }
    }

    /// Rotation used at λ.
    pub fn theta_for(&self, lambda: Complex64) -> f64 {
        match self.theta0_deg {
            Some(t) => t,
            None => {
                let z = lambda * self.n_plus;
                if (z * z).re >= 0.0 {
                    0.0
                } else {
                    90.0
                }
            }
        }
    }
}

pub fn q_eval(q: &DampingQ, lambda: Complex64) -> Complex64 {
    let z = Complex64::from_polar(1.0, -q.theta_for(lambda).to_radians()) * lambda * q.n_plus;
    (q.c * z * z).exp()
}

/// Scattering coefficients at arbitrary λ, as needed by the jump functions.
pub trait CoefficientSource {
    fn n_plus(&self) -> f64;
    fn n_minus(&self) -> f64;
    fn s1(&self, lambda: Complex64) -> Result<Complex64>;
    fn s2(&self, lambda: Complex64) -> Result<Complex64>;
    fn dual_s1(&self, lambda: Complex64) -> Result<Complex64>;
    fn dual_s2(&self, lambda: Complex64) -> Result<Complex64>;
}

/// Exact coefficients from the forward solver.
impl CoefficientSource for Potential {
    fn n_plus(&self) -> f64 {
        Potential::n_plus(self)
    }

    fn n_minus(&self) -> f64 {
        Potential::n_minus(self)
    }

    fn s1(&self, lambda: Complex64) -> Result<Complex64> {
        let r = scattering::row0(self, lambda)?;
        Ok(r[1] / r[0])
    }

    fn s2(&self, lambda: Complex64) -> Result<Complex64> {
        let r = scattering::row0(self, lambda)?;
        Ok(r[2] / r[0])
    }

    /// s̃₁(λ) = ζ₁ conj t₀₁(λ̄ζ₂) / conj t₀₀(λ̄)
    fn dual_s1(&self, lambda: Complex64) -> Result<Complex64> {
        let lc = lambda.conj();
        let t00 = scattering::row0(self, lc)?[0];
        let t01 = scattering::row0(self, lc * ZETA[2])?[1];
        Ok(ZETA[1] * t01.conj() / t00.conj())
    }

    /// s̃₂(λ) = ζ₂ conj t₀₂(λ̄ζ₁) / conj t₀₀(λ̄)
    fn dual_s2(&self, lambda: Complex64) -> Result<Complex64> {
        let lc = lambda.conj();
        let t00 = scattering::row0(self, lc)?[0];
        let t02 = scattering::row0(self, lc * ZETA[1])?[2];
        Ok(ZETA[2] * t02.conj() / t00.conj())
    }
}

fn on_ray(lambda: Complex64, deg: f64) -> Option<f64> {
    let t = lambda.norm();
    if t == 0.0 {
        return None;
    }
    let d = (lambda / Complex64::from_polar(t, deg.to_radians())).arg().abs();
    (d < 1e-9).then_some(t)
}

fn sampled(data: &ScatteringData, values: &[Complex64], lambda: Complex64, deg: f64, name: &str) -> Result<Complex64> {
    let t = on_ray(lambda, deg).ok_or_else(|| Error::Invalid(format!("{name} is sampled only on the {deg}° ray, got λ = {lambda}")))?;
    if t > data.tau.t_max() {
        return Err(Error::Extrapolation(t));
    }
    data.tau.interpolate(values, t)
}

/// Coefficients interpolated from the sampled rays; other directions are errors.
impl CoefficientSource for ScatteringData {
    fn n_plus(&self) -> f64 {
        ScatteringData::n_plus(self)
    }

    fn n_minus(&self) -> f64 {
        ScatteringData::n_minus(self)
    }

    fn s1(&self, lambda: Complex64) -> Result<Complex64> {
        sampled(self, &self.direct.s1_210, lambda, 210.0, "s1")
    }

    fn s2(&self, lambda: Complex64) -> Result<Complex64> {
        sampled(self, &self.direct.s2_330, lambda, 330.0, "s2")
    }

    fn dual_s1(&self, lambda: Complex64) -> Result<Complex64> {
        sampled(self, &self.dual.s1_30, lambda, 30.0, "dual s1")
    }

    fn dual_s2(&self, lambda: Complex64) -> Result<Complex64> {
        sampled(self, &self.dual.s2_150, lambda, 150.0, "dual s2")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpKind {
    P1,
    P2,
    P3,
    P4,
    DualP1,
    DualP2,
    DualP3,
    DualP4,
}

/// The jump functions, with z₊ = λn₊ and z₋ = λn₋:
/// p₁ = s₂(λζ₂)√3ζ₂e^{iz₊x}, p₂ = s₁(λζ₁)√3ζ₁e^{iz₊x},
/// p₃ = √3z₊ζ₂[s₂(λζ₂)e^{iz₊ζ₁x} − e^{iz₊ζ₂x}], p₄ = √3z₊ζ₁[e^{iz₊ζ₁x} − s₁(λζ₁)e^{iz₊ζ₂x}],
/// and the dual kinds with z₋, s̃₁ ↔ p̃₁ and s̃₂ ↔ p̃₂ swapped.
pub fn jump_data(kind: JumpKind, lambda: Complex64, x: f64, src: &dyn CoefficientSource) -> Result<Complex64> {
    let (l1, l2) = (lambda * ZETA[1], lambda * ZETA[2]);
    let zp = lambda * src.n_plus();
    let zm = lambda * src.n_minus();
    let e = |z: Complex64, k: usize| (I * z * ZETA[k] * x).exp();
    Ok(match kind {
        JumpKind::P1 => src.s2(l2)? * SQRT3 * ZETA[2] * e(zp, 0),
        JumpKind::P2 => src.s1(l1)? * SQRT3 * ZETA[1] * e(zp, 0),
        JumpKind::P3 => SQRT3 * zp * ZETA[2] * (src.s2(l2)? * e(zp, 1) - e(zp, 2)),
        JumpKind::P4 => SQRT3 * zp * ZETA[1] * (e(zp, 1) - src.s1(l1)? * e(zp, 2)),
        JumpKind::DualP1 => src.dual_s1(l2)? * SQRT3 * zm * ZETA[2] * e(zm, 0),
        JumpKind::DualP2 => src.dual_s2(l1)? * SQRT3 * zm * ZETA[1] * e(zm, 0),
        JumpKind::DualP3 => SQRT3 * zm * ZETA[2] * (src.dual_s2(l2)? * e(zm, 1) - e(zm, 2)),
        JumpKind::DualP4 => SQRT3 * zm * ZETA[1] * (e(zm, 1) - src.dual_s1(l1)? * e(zm, 2)),
    })
}
