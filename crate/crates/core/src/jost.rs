//! Jost solutions v_k (normalized at +∞) and u_k (normalized at −∞) with
//! their first two derivatives.
//!
//! The v family solves the Volterra equation
//! ψ(x) = 1 − k₀ ∫_x^∞ s₂(k₀(x−t)) e^{κ(t−x)} q(t) ψ(t) dt,
//! with k₀ = iz₊, κ = iz₊ζ_k, q = m/m₊ − 1 and ψ = v·e^{−κx}. The u family is
//! obtained from the v family of the reflected coefficient m(−x) at −λ.

use crate::error::{Error, Result};
use crate::geometry::{in_omega, SQRT3, ZETA};
use crate::ode;
use crate::potential::{Potential, Side};
use crate::quad::{self, PanelGrid};
use crate::trig3::s_triple_fast;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    V,
    U,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Neumann series inside the validity disk, ODE outside it.
    #[default]
    Auto,
    Neumann,
    Ode,
}

/// Value and two x-derivatives of one Jost solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JostEval {
    pub family: Family,
    pub k: usize,
    pub lambda: Complex64,
    pub x: f64,
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
}

impl JostEval {
    pub fn triple(&self) -> [Complex64; 3] {
        [self.value, self.d1, self.d2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct NeumannDiagnostics {
    /// Number of series terms including the leading plane wave (0 for the ODE backend).
    pub terms_used: usize,
    pub last_term_norm: f64,
    /// Largest ratio of an observed series term to its analytic majorant.
    pub bound_margin: f64,
    /// Majorant of the integral neglected beyond the truncation point.
    pub tail_bound: f64,
}

/// Stopping threshold on the sup-norm of the next Neumann term.
pub const TERM_TOL: f64 = 1e-12;
pub const MAX_TERMS: usize = 60;
const ORDER: usize = 16;

/// Exponent κ = i λ n ζ_k of the family normalization.
pub fn exponent(p: &Potential, family: Family, lambda: Complex64, k: usize) -> Complex64 {
    let n = match family {
        Family::V => p.n_plus(),
        Family::U => p.n_minus(),
    };
    Complex64::i() * lambda * n * ZETA[k % 3]
}

/// d(z) = e^{|Im z|} cosh(√3 Re z / 2).
pub fn d_bound(z: Complex64) -> f64 {
    z.im.abs().exp() * (0.5 * SQRT3 * z.re).cosh()
}

fn upper_edge(p: &Potential) -> f64 {
    p.truncation().1.max(0.0)
}

fn volterra_grid(p: &Potential, x: f64, end: f64, k0: Complex64) -> Result<PanelGrid> {
    let hmax = 0.5f64.min(4.0 / k0.norm().max(1e-300));
    let mut feats: Vec<f64> = p.perturbation.breakpoints().into_iter().filter(|&b| b > x && b < end).collect();
    feats.push(end);
    feats.sort_by(|a, b| a.partial_cmp(b).unwrap());
    feats.dedup();
    let mut br = vec![x];
    for f in feats {
        let a = *br.last().unwrap();
        if f - a < 1e-12 {
            continue;
        }
        let n = ((f - a) / hmax).ceil().max(1.0) as usize;
        for j in 1..=n {
            br.push(a + (f - a) * j as f64 / n as f64);
        }
    }
    PanelGrid::from_breaks(br, ORDER)
}

/// Normalized v-family triple (ψ, v'e^{−κx}, v''e^{−κx}) by the Neumann series.
fn v_neumann(p: &Potential, lambda: Complex64, k: usize, x: f64) -> Result<([Complex64; 3], NeumannDiagnostics)> {
    let kk = exponent(p, Family::V, lambda, k);
    let k0 = Complex64::i() * lambda * p.n_plus();
    let end = upper_edge(p);
    let plane = [Complex64::new(1.0, 0.0), kk, kk * kk];
    if x >= end || p.is_pure_step() && x >= 0.0 {
        return Ok((plane, NeumannDiagnostics { terms_used: 1, ..Default::default() }));
    }
    let g = volterra_grid(p, x, end, k0)?;
    let n = g.len();
    let order = g.order;
    let s = quad::tail_integration_matrix(order);
    let q: Vec<f64> = g.nodes.iter().map(|&t| p.q(t, Side::Plus)).collect();
    // A[i][j] for node rows, ax* for the evaluation point x
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        let pi = i / order;
        let li = i % order;
        let h = 0.5 * (g.breaks[pi + 1] - g.breaks[pi]);
        for j in (pi * order)..n {
            let w = if j / order == pi { s[li][j % order] * h } else { g.weights[j] };
            if w == 0.0 {
                continue;
            }
            let u = g.nodes[i] - g.nodes[j];
            let ker = s_triple_fast(k0 * u).s2 * (-kk * u).exp();
            a[i * n + j] = -k0 * ker * q[j] * w;
        }
    }
    let mut ax = [vec![Complex64::new(0.0, 0.0); n], vec![Complex64::new(0.0, 0.0); n], vec![Complex64::new(0.0, 0.0); n]];
    let mut bound_int = 0.0;
    let z = lambda * p.n_plus();
    for j in 0..n {
        let u = x - g.nodes[j];
        let t = s_triple_fast(k0 * u);
        let e = (-kk * u).exp() * q[j] * g.weights[j];
        ax[0][j] = -k0 * t.s2 * e;
        ax[1][j] = -k0 * k0 * t.s1 * e;
        ax[2][j] = -k0 * k0 * k0 * t.s0 * e;
        bound_int += d_bound(z * (g.nodes[j] - x)) * q[j].abs() * (kk * (g.nodes[j] - x)).exp().norm() * g.weights[j];
    }
    let sigma = p.sigma(x, Side::Plus)?;
    let mut term = vec![Complex64::new(1.0, 0.0); n];
    let mut out = plane;
    let mut diag = NeumannDiagnostics { terms_used: 1, ..Default::default() };
    let mut fact = 1.0;
    for m in 1..=MAX_TERMS {
        // contribution of term m at x uses term m−1 on the nodes
        let mut vals = [Complex64::new(0.0, 0.0); 3];
        for j in 0..n {
            for r in 0..3 {
                vals[r] += ax[r][j] * term[j];
            }
        }
        for r in 0..3 {
            out[r] += vals[r];
        }
        if m > 1 {
            fact *= (m - 1) as f64;
        }
        let bound = z.norm().powi(m as i32) * sigma.powi(m as i32 - 1) / fact * bound_int;
        if bound > 0.0 {
            diag.bound_margin = diag.bound_margin.max(vals[0].norm() / bound);
        }
        let mut next = vec![Complex64::new(0.0, 0.0); n];
        let mut sup: f64 = 0.0;
        for i in 0..n {
            let row = &a[i * n..(i + 1) * n];
            let v: Complex64 = row.iter().zip(&term).map(|(aij, tj)| aij * tj).sum();
            sup = sup.max(v.norm());
            next[i] = v;
        }
        diag.terms_used = m + 1;
        diag.last_term_norm = sup.max(vals[0].norm());
        term = next;
        if diag.last_term_norm < TERM_TOL {
            break;
        }
        if m == MAX_TERMS {
            return Err(Error::Divergence { terms: m + 1, last: diag.last_term_norm });
        }
    }
    diag.tail_bound = z.norm() * d_bound(z * (end - x)) * p.sigma(end, Side::Plus)?;
    Ok((out, diag))
}

/// Normalized v-family triple by backward ODE integration from the support edge.
fn v_ode(p: &Potential, lambda: Complex64, k: usize, x: f64) -> Result<[Complex64; 3]> {
    let kk = exponent(p, Family::V, lambda, k);
    let end = upper_edge(p);
    let plane = [Complex64::new(1.0, 0.0), kk, kk * kk];
    if x >= end || p.is_pure_step() && x >= 0.0 {
        return Ok(plane);
    }
    ode::propagate(p, lambda, kk, plane, end, x)
}

/// Normalized triple (y, y', y'')·e^{−κx} for either family, plus diagnostics.
pub fn normalized(
    p: &Potential,
    family: Family,
    lambda: Complex64,
    k: usize,
    x: f64,
    backend: Backend,
) -> Result<([Complex64; 3], NeumannDiagnostics)> {
    if k > 2 {
        return Err(Error::IndexOutOfRange(k));
    }
    match family {
        Family::V => {
            let use_neumann = match backend {
                Backend::Neumann => true,
                Backend::Ode => false,
                Backend::Auto => lambda.norm() < p.validity_disk().radius_plus,
            };
            if use_neumann {
                v_neumann(p, lambda, k, x)
            } else {
                Ok((v_ode(p, lambda, k, x)?, NeumannDiagnostics::default()))
            }
        }
        Family::U => {
            // u_k(λ, x; m) = v_k(−λ, −x; m(−·)), derivatives pick up (−1)^j
            let r = p.reflected();
            let (t, d) = normalized(&r, Family::V, -lambda, k, -x, backend)?;
            Ok(([t[0], -t[1], t[2]], d))
        }
    }
}

/// Jost solution of either family with the requested backend.
pub fn solve(
    p: &Potential,
    family: Family,
    lambda: Complex64,
    k: usize,
    x: f64,
    backend: Backend,
) -> Result<(JostEval, NeumannDiagnostics)> {
    let (t, d) = normalized(p, family, lambda, k, x, backend)?;
    let e = (exponent(p, family, lambda, k) * x).exp();
    Ok((
        JostEval { family, k, lambda, x, value: t[0] * e, d1: t[1] * e, d2: t[2] * e },
        d,
    ))
}

/// v_k(λ, x) with the automatic backend.
pub fn solve_v(p: &Potential, lambda: Complex64, k: usize, x: f64) -> Result<(JostEval, NeumannDiagnostics)> {
    solve(p, Family::V, lambda, k, x, Backend::Auto)
}

/// u_k(λ, x) with the automatic backend.
pub fn solve_u(p: &Potential, lambda: Complex64, k: usize, x: f64) -> Result<(JostEval, NeumannDiagnostics)> {
    solve(p, Family::U, lambda, k, x, Backend::Auto)
}

/// ψ_k(λ, x) = v_k(λ, x) e^{−iz₊ζ_k x}.
///
/// For k = 0, λ in the closed sector Ω₀ and x ≥ 0 the majorant
/// |ψ₀| < 2e^{|z₊|σ₊(0)} is checked at runtime.
pub fn psi(p: &Potential, lambda: Complex64, k: usize, x: f64) -> Result<Complex64> {
    let (t, _) = normalized(p, Family::V, lambda, k, x, Backend::Auto)?;
    if k == 0 && x >= 0.0 && (in_omega(lambda, 0, false)? || lambda.norm() == 0.0) {
        let bound = 2.0 * (lambda.norm() * p.n_plus() * p.sigma(0.0, Side::Plus)?).exp();
        if t[0].norm() >= bound {
            return Err(Error::Invalid(format!("|psi_0| = {} exceeds its majorant {}", t[0].norm(), bound)));
        }
    }
    Ok(t[0])
}

/// φ_k(λ, x) = u_k(λ, x) e^{−iz₋ζ_k x}.
pub fn phi(p: &Potential, lambda: Complex64, k: usize, x: f64) -> Result<Complex64> {
    let (t, _) = normalized(p, Family::U, lambda, k, x, Backend::Auto)?;
    if k == 0 && x <= 0.0 && (in_omega(lambda, 0, true)? || lambda.norm() == 0.0) {
        let bound = 2.0 * (lambda.norm() * p.n_minus() * p.sigma(0.0, Side::Minus)?).exp();
        if t[0].norm() >= bound {
            return Err(Error::Invalid(format!("|phi_0| = {} exceeds its majorant {}", t[0].norm(), bound)));
        }
    }
    Ok(t[0])
}

/// Per-order comparison of an iterated kernel with its majorant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelTerm {
    pub n: usize,
    /// sup_t |K_n(z, x, t)|
    pub observed: f64,
    /// sup_t of the ratio |K_n| / (d(z(t−x)) σ^{n−1}(x)/(n−1)!)
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelBoundReport {
    pub family: Family,
    pub lambda: Complex64,
    pub x: f64,
    pub sigma: f64,
    pub terms: Vec<KernelTerm>,
}

impl KernelBoundReport {
    pub fn max_margin(&self) -> f64 {
        self.terms.iter().map(|t| t.margin).fold(0.0, f64::max)
    }
}

/// Iterated kernels K_{n+1}(x,t) = ∫_x^t K_n(x,s) q(s) K_1(s,t) ds with
/// K_1(s,t) = s₂(iz(s−t)), evaluated at x = 0 and compared with the bound
/// d(z(t−x)) σ^{n−1}(x)/(n−1)!.
pub fn kernel_bound_check(p: &Potential, family: Family, lambda: Complex64, k: usize, n_max: usize) -> Result<KernelBoundReport> {
    if k > 2 {
        return Err(Error::IndexOutOfRange(k));
    }
    if n_max > 20 {
        return Err(Error::Invalid("n_max must not exceed 20".into()));
    }
    let (pp, lam) = match family {
        Family::V => (p.clone(), lambda),
        Family::U => (p.reflected(), -lambda),
    };
    let x = 0.0;
    let z = lam * pp.n_plus();
    let iz = Complex64::i() * z;
    let end = upper_edge(&pp);
    let sigma = pp.sigma(x, Side::Plus)?;
    let mut report = KernelBoundReport { family, lambda, x, sigma, terms: Vec::new() };
    if end <= x || pp.is_pure_step() {
        report.terms.push(KernelTerm { n: 1, observed: 1.0, margin: 0.0 });
        for n in 2..=n_max {
            report.terms.push(KernelTerm { n, observed: 0.0, margin: 0.0 });
        }
        return Ok(report);
    }
    let g = volterra_grid(&pp, x, end, iz)?;
    let n = g.len();
    let order = g.order;
    let s = quad::tail_integration_matrix(order);
    let (_, w_ref) = quad::gauss_legendre(order);
    let q: Vec<f64> = g.nodes.iter().map(|&t| pp.q(t, Side::Plus)).collect();
    let k1 = |a: f64, b: f64| s_triple_fast(iz * (a - b)).s2;
    let mut kn: Vec<Complex64> = g.nodes.iter().map(|&t| k1(x, t)).collect();
    let mut fact = 1.0;
    for m in 1..=n_max {
        if m > 1 {
            fact *= (m - 1) as f64;
        }
        let mut obs: f64 = 0.0;
        let mut margin: f64 = 0.0;
        for i in 0..n {
            let b = d_bound(z * (g.nodes[i] - x)) * sigma.powi(m as i32 - 1) / fact;
            obs = obs.max(kn[i].norm());
            if b > 0.0 {
                margin = margin.max(kn[i].norm() / b);
            }
        }
        report.terms.push(KernelTerm { n: m, observed: obs, margin });
        if m == n_max {
            break;
        }
        let mut next = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let pi = i / order;
            let li = i % order;
            let h = 0.5 * (g.breaks[pi + 1] - g.breaks[pi]);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..((pi + 1) * order) {
                let w = if j / order == pi { (w_ref[j % order] - s[li][j % order]) * h } else { g.weights[j] };
                acc += kn[j] * q[j] * k1(g.nodes[j], g.nodes[i]) * w;
            }
            next[i] = acc;
        }
        kn = next;
    }
    Ok(report)
}
