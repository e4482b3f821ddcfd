//! Wronskians, the transition matrix T(λ) with u_k = Σ_j t_kj v_j, its dual,
//! scattering coefficients, conservation laws, bound states, and the sampled
//! scattering data consumed by the inverse solver.

use crate::error::{Error, Result};
use crate::geometry::{SQRT3, ZETA};
use crate::jost::{self, Backend, Family, JostEval};
use crate::potential::Potential;
use crate::quad::PanelGrid;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub type Mat3 = [[Complex64; 3]; 3];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// |t00| below this triggers bound-state reporting instead of division.
pub const T00_ZERO_TOL: f64 = 1e-9;

/// Third-order Wronskian det[[a, b, c], [a', b', c'], [a'', b'', c'']].
pub fn wronskian3(a: &JostEval, b: &JostEval, c: &JostEval) -> Result<Complex64> {
    for e in [b, c] {
        if e.lambda != a.lambda || e.x != a.x {
            return Err(Error::MismatchedPoints);
        }
    }
    Ok(det3(&[a.triple(), b.triple(), c.triple()]))
}

/// Determinant with the three columns given as triples.
pub fn det3(cols: &[[Complex64; 3]; 3]) -> Complex64 {
    let m = |r: usize, c: usize| cols[c][r];
    m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
}

/// Pair Wronskian f g' − f' g of two triples.
pub fn wronskian2(f: &[Complex64; 3], g: &[Complex64; 3]) -> Complex64 {
    f[0] * g[1] - f[1] * g[0]
}

/// Bilinear concomitant [f, g] = f g'' − f' g' + f'' g, constant in x when f
/// solves i y''' = mλ³y and g solves i y''' = −mλ³y.
pub fn concomitant(f: &[Complex64; 3], g: &[Complex64; 3]) -> Complex64 {
    f[0] * g[2] - f[1] * g[1] + f[2] * g[0]
}

/// The involution J.
pub fn involution_j() -> Mat3 {
    [[ONE, ZERO, ZERO], [ZERO, ZERO, ZETA[2]], [ZERO, ZETA[1], ZERO]]
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

/// Conjugate transpose.
pub fn adjoint(a: &Mat3) -> Mat3 {
    let mut c = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = a[j][i].conj();
        }
    }
    c
}

pub fn max_abs_diff(a: &Mat3, b: &Mat3) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

pub fn identity() -> Mat3 {
    [[ONE, ZERO, ZERO], [ZERO, ONE, ZERO], [ZERO, ZERO, ONE]]
}

fn det_mat(a: &Mat3) -> Complex64 {
    det3(&[[a[0][0], a[1][0], a[2][0]], [a[0][1], a[1][1], a[2][1]], [a[0][2], a[1][2], a[2][2]]])
}

/// Normalized triple of a Jost solution at x together with its exponent.
fn triple(p: &Potential, family: Family, lambda: Complex64, k: usize, x: f64, backend: Backend) -> Result<([Complex64; 3], Complex64)> {
    let (t, _) = jost::normalized(p, family, lambda, k, x, backend)?;
    Ok((t, jost::exponent(p, family, lambda, k) * x))
}

/// f⁺(λ) = conj f(conj λ) for the v family, as a normalized triple and exponent.
fn v_plus(p: &Potential, lambda: Complex64, k: usize, x: f64, backend: Backend) -> Result<([Complex64; 3], Complex64)> {
    let (t, e) = triple(p, Family::V, lambda.conj(), k, x, backend)?;
    Ok(([t[0].conj(), t[1].conj(), t[2].conj()], e.conj()))
}

/// Row 0 of T(λ) from the concomitant form evaluated at x:
/// t_{0,l} = −ζ_l/(3 n₊² λ²) [u₀, w_l] with w₀ = v₀⁺, w₁ = v₂⁺, w₂ = v₁⁺.
pub fn row0_at(p: &Potential, lambda: Complex64, x: f64, backend: Backend) -> Result<[Complex64; 3]> {
    if lambda.norm() == 0.0 {
        return Err(Error::ZeroLambda);
    }
    let (u, eu) = triple(p, Family::U, lambda, 0, x, backend)?;
    let pre = -1.0 / (3.0 * p.m_plus.powf(2.0 / 3.0) * lambda * lambda);
    let partner = [0usize, 2, 1];
    let mut row = [ZERO; 3];
    for l in 0..3 {
        let (w, ew) = v_plus(p, lambda, partner[l], x, backend)?;
        row[l] = pre * ZETA[l] * concomitant(&u, &w) * (eu + ew).exp();
    }
    Ok(row)
}

/// Row 0 of T(λ) at x = 0 with the automatic backend.
pub fn row0(p: &Potential, lambda: Complex64) -> Result<[Complex64; 3]> {
    row0_at(p, lambda, 0.0, Backend::Auto)
}

/// Row 0 by Cramer's rule on the 3×3 derivative-matching system at x.
pub fn row0_cramer(p: &Potential, lambda: Complex64, x: f64, backend: Backend) -> Result<[Complex64; 3]> {
    let (u, _) = jost::solve(p, Family::U, lambda, 0, x, backend)?;
    let v: Vec<JostEval> = (0..3).map(|k| jost::solve(p, Family::V, lambda, k, x, backend).map(|r| r.0)).collect::<Result<_>>()?;
    let w = wronskian3(&v[0], &v[1], &v[2])?;
    Ok([
        wronskian3(&u, &v[1], &v[2])? / w,
        wronskian3(&v[0], &u, &v[2])? / w,
        wronskian3(&v[0], &v[1], &u)? / w,
    ])
}

/// Residuals of the pair identities W₁₂(v) = √3z₊v₀⁺, W₀₁(v) = √3z₊ζ₂v₁⁺,
/// W₂₀(v) = √3z₊ζ₁v₂⁺ at (λ, x), relative to |√3 z₊ v⁺|.
pub fn pair_wronskian_identity_check(p: &Potential, lambda: Complex64, x: f64) -> Result<[f64; 3]> {
    let v: Vec<JostEval> = (0..3).map(|k| jost::solve_v(p, lambda, k, x).map(|r| r.0)).collect::<Result<_>>()?;
    let plus = |k: usize| -> Result<Complex64> { Ok(jost::solve_v(p, lambda.conj(), k, x)?.0.value.conj()) };
    let z = SQRT3 * lambda * p.n_plus();
    let pairs = [(1usize, 2usize, 0usize, ZETA[0]), (0, 1, 1, ZETA[2]), (2, 0, 2, ZETA[1])];
    let mut out = [0.0; 3];
    for (i, &(a, b, c, zc)) in pairs.iter().enumerate() {
        let lhs = wronskian2(&v[a].triple(), &v[b].triple());
        let rhs = z * zc * plus(c)?;
        out[i] = (lhs - rhs).norm() / rhs.norm().max(1e-300);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    pub lambda: Complex64,
    pub t: Mat3,
    pub kappa: f64,
}

impl TransitionMatrix {
    /// Assemble from row 0 at λ, λζ₁, λζ₂: t_{k,j}(λ) = t_{0,(j−k) mod 3}(λζ_k).
    pub fn from_rows(lambda: Complex64, rows: [[Complex64; 3]; 3], kappa: f64) -> Self {
        let mut t = [[ZERO; 3]; 3];
        for k in 0..3 {
            for j in 0..3 {
                t[k][j] = rows[k][(j + 3 - k) % 3];
            }
        }
        Self { lambda, t, kappa }
    }

    pub fn det(&self) -> Complex64 {
        det_mat(&self.t)
    }

    /// Transformation matrix R = diag(r_k) with r_k(λ) = r₀(λζ_k) = 1/t_kk.
    pub fn r_matrix(&self) -> Result<Mat3> {
        let mut r = [[ZERO; 3]; 3];
        for k in 0..3 {
            if self.t[k][k].norm() < T00_ZERO_TOL {
                return Err(Error::BoundStateCandidate(self.lambda * ZETA[k]));
            }
            r[k][k] = ONE / self.t[k][k];
        }
        Ok(r)
    }

    /// Scattering matrix S with S_kj = t_kj/t_kk off the diagonal.
    pub fn s_matrix(&self) -> Result<Mat3> {
        let mut s = [[ZERO; 3]; 3];
        for k in 0..3 {
            if self.t[k][k].norm() < T00_ZERO_TOL {
                return Err(Error::BoundStateCandidate(self.lambda * ZETA[k]));
            }
            for j in 0..3 {
                if j != k {
                    s[k][j] = self.t[k][j] / self.t[k][k];
                }
            }
        }
        Ok(s)
    }
}

/// T(λ) from row 0 at x = 0 and its rotations.
pub fn transition_matrix(p: &Potential, lambda: Complex64) -> Result<TransitionMatrix> {
    transition_matrix_with(p, lambda, Backend::Auto)
}

pub fn transition_matrix_with(p: &Potential, lambda: Complex64, backend: Backend) -> Result<TransitionMatrix> {
    let rows = [
        row0_at(p, lambda, 0.0, backend)?,
        row0_at(p, lambda * ZETA[1], 0.0, backend)?,
        row0_at(p, lambda * ZETA[2], 0.0, backend)?,
    ];
    Ok(TransitionMatrix::from_rows(lambda, rows, p.kappa()))
}

/// (r₀, s₁, s₂) = (1/t₀₀, t₀₁/t₀₀, t₀₂/t₀₀).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub r0: Complex64,
    pub s1: Complex64,
    pub s2: Complex64,
}

pub fn coefficients(t: &TransitionMatrix) -> Result<Coefficients> {
    let t00 = t.t[0][0];
    if t00.norm() < T00_ZERO_TOL {
        return Err(Error::BoundStateCandidate(t.lambda));
    }
    Ok(Coefficients { r0: ONE / t00, s1: t.t[0][1] / t00, s2: t.t[0][2] / t00 })
}

/// T̃(λ) = κ⁻² J T*(λ̄) J, given T at λ̄.
pub fn dual_matrix(t_conj: &TransitionMatrix) -> TransitionMatrix {
    let j = involution_j();
    let k2 = t_conj.kappa * t_conj.kappa;
    let m = mat_mul(&mat_mul(&j, &adjoint(&t_conj.t)), &j);
    let mut t = [[ZERO; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            t[a][b] = m[a][b] / k2;
        }
    }
    TransitionMatrix { lambda: t_conj.lambda.conj(), t, kappa: t_conj.kappa }
}

/// Dual coefficients r̃₀ = κ²/t₀₀⁺, s̃₁ = ζ₁t₂₀⁺/t₀₀⁺, s̃₂ = ζ₂t₁₀⁺/t₀₀⁺ from T(λ̄).
pub fn dual_coefficients(t_conj: &TransitionMatrix) -> Result<Coefficients> {
    let t00p = t_conj.t[0][0].conj();
    if t00p.norm() < T00_ZERO_TOL {
        return Err(Error::BoundStateCandidate(t_conj.lambda.conj()));
    }
    let k2 = t_conj.kappa * t_conj.kappa;
    Ok(Coefficients {
        r0: k2 / t00p,
        s1: ZETA[1] * t_conj.t[2][0].conj() / t00p,
        s2: ZETA[2] * t_conj.t[1][0].conj() / t00p,
    })
}

/// All conservation-law residuals at one λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub lambda: Complex64,
    /// |det T − m₋/m₊| / (m₋/m₊)
    pub det_rel: f64,
    /// max |T J T*(λ̄) − κ²J|
    pub j_unitarity: f64,
    /// κ² r₀r₀⁺ − 1 − ζ₁s₁s₂⁺ − ζ₂s₂s₁⁺, ζ₁ and ζ₂ swapped relative to the J-form
    pub unitarity_swapped: f64,
    /// κ² r₀r₀⁺ − 1 − ζ₂s₁s₂⁺ − ζ₁s₂s₁⁺, the (0,0) entry of the J-unitarity
    pub unitarity_j: f64,
    /// max |T̃T − I|
    pub dual_product: f64,
    /// max |(I+S)J(I+S)*(λ̄) − κ²RJR*(λ̄)|
    pub energetic_balance: f64,
    /// 1 + ζ₁s̃₁s̃₂⁺ + ζ₂s̃₂s₁⁺ − κ⁻²r̃₀r₀⁺, swapped-root variant
    pub dual_unitarity_swapped: f64,
    /// 1 + ζ₂s̃₁s̃₂⁺ + ζ₁s̃₂s̃₁⁺ − κ⁻²r̃₀r̃₀⁺, the (0,0) entry of T̃JT̃* = κ⁻²J
    pub dual_unitarity_j: f64,
    /// ζ₁s₁s₂⁺ + ζ₂s₂s₁⁺ − ζ₁s̃₁s₂⁺ − ζ₂s̃₂s₁⁺, swapped-root variant
    pub reciprocity_swapped: f64,
    /// ζ₁s₁s₂⁺ + ζ₂s₂s₁⁺ − ζ₁s̃₁s̃₂⁺ − ζ₂s̃₂s̃₁⁺
    pub reciprocity_symmetric: f64,
    /// ζ₂s₁s₂⁺ + ζ₁s₂s₁⁺ − ζ₂s̃₁s̃₂⁺ − ζ₁s̃₂s̃₁⁺
    pub reciprocity_j: f64,
}

/// Evaluate every conservation law from T at λ and at λ̄.
pub fn conservation_from(t: &TransitionMatrix, tc: &TransitionMatrix, m_ratio: f64) -> Result<ConservationReport> {
    let j = involution_j();
    let k2 = t.kappa * t.kappa;
    let det_rel = (t.det() - m_ratio).norm() / m_ratio;
    let lhs = mat_mul(&mat_mul(&t.t, &j), &adjoint(&tc.t));
    let mut k2j = j;
    for row in k2j.iter_mut() {
        for v in row.iter_mut() {
            *v *= k2;
        }
    }
    let j_unitarity = max_abs_diff(&lhs, &k2j);

    let c = coefficients(t)?;
    let cc = coefficients(tc)?;
    let (r0p, s1p, s2p) = (cc.r0.conj(), cc.s1.conj(), cc.s2.conj());
    let unitarity_swapped = (k2 * c.r0 * r0p - 1.0 - ZETA[1] * c.s1 * s2p - ZETA[2] * c.s2 * s1p).norm();
    let unitarity_j = (k2 * c.r0 * r0p - 1.0 - ZETA[2] * c.s1 * s2p - ZETA[1] * c.s2 * s1p).norm();

    let td = dual_matrix(tc);
    let dual_product = max_abs_diff(&mat_mul(&td.t, &t.t), &identity());

    let r = t.r_matrix()?;
    let s = t.s_matrix()?;
    let rc = tc.r_matrix()?;
    let sc = tc.s_matrix()?;
    let mut ips = identity();
    let mut ipsc = identity();
    for a in 0..3 {
        for b in 0..3 {
            ips[a][b] += s[a][b];
            ipsc[a][b] += sc[a][b];
        }
    }
    let left = mat_mul(&mat_mul(&ips, &j), &adjoint(&ipsc));
    let mut right = mat_mul(&mat_mul(&r, &j), &adjoint(&rc));
    for row in right.iter_mut() {
        for v in row.iter_mut() {
            *v *= k2;
        }
    }
    let energetic_balance = max_abs_diff(&left, &right);

    // dual coefficients at λ need T(λ̄); their ⁺ needs T(λ)
    let d = dual_coefficients(tc)?;
    let dp = dual_coefficients(t)?;
    let (st1p, st2p, rt0p) = (dp.s1.conj(), dp.s2.conj(), dp.r0.conj());
    let _ = rt0p;
    let dual_unitarity_swapped = (1.0 + ZETA[1] * d.s1 * st2p + ZETA[2] * d.s2 * s1p - d.r0 * r0p / k2).norm();
    let dual_unitarity_j = (1.0 + ZETA[2] * d.s1 * st2p + ZETA[1] * d.s2 * st1p - d.r0 * dp.r0.conj() / k2).norm();
    let base_swapped = ZETA[1] * c.s1 * s2p + ZETA[2] * c.s2 * s1p;
    let reciprocity_swapped = (base_swapped - ZETA[1] * d.s1 * s2p - ZETA[2] * d.s2 * s1p).norm();
    let reciprocity_symmetric = (base_swapped - ZETA[1] * d.s1 * st2p - ZETA[2] * d.s2 * st1p).norm();
    let base_j = ZETA[2] * c.s1 * s2p + ZETA[1] * c.s2 * s1p;
    let reciprocity_j = (base_j - ZETA[2] * d.s1 * st2p - ZETA[1] * d.s2 * st1p).norm();

    Ok(ConservationReport {
        lambda: t.lambda,
        det_rel,
        j_unitarity,
        unitarity_swapped,
        unitarity_j,
        dual_product,
        energetic_balance,
        dual_unitarity_swapped,
        dual_unitarity_j,
        reciprocity_swapped,
        reciprocity_symmetric,
        reciprocity_j,
    })
}

pub fn conservation_report(p: &Potential, lambda: Complex64) -> Result<ConservationReport> {
    let t = transition_matrix(p, lambda)?;
    let tc = transition_matrix(p, lambda.conj())?;
    conservation_from(&t, &tc, p.m_minus / p.m_plus)
}

/// Closed-form row 0 for the pure step: t_{0,l} = (1 + κζ_l⁻¹ + κ²ζ_l⁻²)/3.
pub fn step_row0(kappa: f64) -> [Complex64; 3] {
    let mut r = [ZERO; 3];
    for (l, v) in r.iter_mut().enumerate() {
        let zi = ZETA[l].conj();
        *v = (ONE + kappa * zi + kappa * kappa * zi * zi) / 3.0;
    }
    r
}

/// A located zero of t₀₀ on one of the bound-state rays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    /// Real parameter: μ > 0 for λ = μζ₂, ν < 0 for λ = νζ₁.
    pub parameter: f64,
    pub lambda: Complex64,
    pub residual: f64,
    pub multiplicity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct BoundStates {
    pub mu: Vec<BoundState>,
    pub nu: Vec<BoundState>,
    /// Winding number of t₀₀ around Ω₀⁻ ∩ {ε < |λ| < R} (zeros off the rays included).
    pub sector_zero_count: Option<i64>,
}

fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

/// Zeros of t₀₀ on λ = μζ₂ (μ > 0) and λ = νζ₁ (ν < 0) inside |λ| < radius.
///
/// |t₀₀| is sampled along each ray, local minima are bracketed and polished
/// by golden-section search, and the multiplicity is the log–log slope of
/// |t₀₀| near the zero.
pub fn find_bound_states(p: &Potential, radius: f64) -> Result<BoundStates> {
    let mut out = BoundStates::default();
    if p.is_pure_step() {
        out.sector_zero_count = Some(0);
        return Ok(out);
    }
    let samples = 200usize;
    for (dir, sign) in [(ZETA[2], 1.0), (ZETA[1], -1.0)] {
        let f = |s: f64| -> f64 { row0(p, s * sign * dir).map(|r| r[0].norm()).unwrap_or(f64::INFINITY) };
        let grid: Vec<f64> = (1..=samples).map(|i| radius * i as f64 / samples as f64).collect();
        let vals: Vec<f64> = grid.par_iter().map(|&s| f(s)).collect();
        let scale = vals.iter().cloned().fold(0.0, f64::max).max(1e-300);
        for i in 1..samples - 1 {
            if vals[i] <= vals[i - 1] && vals[i] <= vals[i + 1] && vals[i] < 1e-2 * scale {
                let s0 = golden_min(&f, grid[i - 1], grid[i + 1]);
                let res = f(s0);
                if res < 1e-6 * scale {
                    let h = 1e-3 * radius;
                    let (fa, fb) = (f(s0 + h), f(s0 + 2.0 * h));
                    let mult = (fb / fa).ln() / 2f64.ln();
                    let bs = BoundState { parameter: sign * s0, lambda: s0 * sign * dir, residual: res, multiplicity: mult };
                    if sign > 0.0 {
                        out.mu.push(bs);
                    } else {
                        out.nu.push(bs);
                    }
                }
            }
        }
    }
    out.sector_zero_count = sector_winding(p, radius).ok();
    Ok(out)
}

/// Argument-principle count of zeros of t₀₀ in the truncated sector Ω₀⁻.
fn sector_winding(p: &Potential, radius: f64) -> Result<i64> {
    let eps = 1e-3 * radius;
    let n = 120usize;
    let mut path = Vec::new();
    let a0 = 210f64.to_radians();
    let a1 = 330f64.to_radians();
    for i in 0..=n {
        path.push(Complex64::from_polar(eps + (radius - eps) * i as f64 / n as f64, a0));
    }
    for i in 1..=n {
        path.push(Complex64::from_polar(radius, a0 + (a1 - a0) * i as f64 / n as f64));
    }
    for i in 1..=n {
        path.push(Complex64::from_polar(radius - (radius - eps) * i as f64 / n as f64, a1));
    }
    for i in 1..=n {
        path.push(Complex64::from_polar(eps, a1 - (a1 - a0) * i as f64 / n as f64));
    }
    let vals: Vec<Complex64> = path.par_iter().map(|&l| row0(p, l).map(|r| r[0])).collect::<Result<_>>()?;
    let mut total = 0.0;
    for w in vals.windows(2) {
        total += (w[1] / w[0]).arg();
    }
    Ok((total / (2.0 * std::f64::consts::PI)).round() as i64)
}

/// Angles (degrees) of the sampled rays.
pub const DIRECT_RAYS: [f64; 3] = [210.0, 270.0, 330.0];
pub const DUAL_RAYS: [f64; 3] = [30.0, 90.0, 150.0];

/// Coefficient samples on λ = τ e^{iθ}.
///
/// Direct block: r₀ on 210°, 270°, 330°, s₁ on 210°, s₂ on 330°.
/// Dual block: r̃₀ on 30°, 90°, 150°, s̃₁ on 30°, s̃₂ on 150°.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectSamples {
    pub r0_210: Vec<Complex64>,
    pub r0_270: Vec<Complex64>,
    pub r0_330: Vec<Complex64>,
    pub s1_210: Vec<Complex64>,
    pub s2_330: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualSamples {
    pub r0_30: Vec<Complex64>,
    pub r0_90: Vec<Complex64>,
    pub r0_150: Vec<Complex64>,
    pub s1_30: Vec<Complex64>,
    pub s2_150: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringData {
    pub m_plus: f64,
    pub m_minus: f64,
    pub kappa: f64,
    /// τ quadrature grid (Gauss–Legendre panels) shared by all rays.
    pub tau: PanelGrid,
    pub direct: DirectSamples,
    pub dual: DualSamples,
    pub bound_states: BoundStates,
}

/// Transition-matrix entries needed by the inverse solver on the data rays.
#[derive(Debug, Clone, PartialEq)]
pub struct RayEntries {
    pub t00_210: Vec<Complex64>,
    pub t00_270: Vec<Complex64>,
    pub t00_330: Vec<Complex64>,
    pub t01_210: Vec<Complex64>,
    pub t02_330: Vec<Complex64>,
}

impl ScatteringData {
    pub fn n_plus(&self) -> f64 {
        self.m_plus.cbrt()
    }

    pub fn n_minus(&self) -> f64 {
        self.m_minus.cbrt()
    }

    /// Direct entries t₀₀ = 1/r₀, t₀₁ = s₁/r₀, t₀₂ = s₂/r₀.
    pub fn direct_entries(&self) -> RayEntries {
        let d = &self.direct;
        let inv = |v: &Vec<Complex64>| v.iter().map(|r| ONE / r).collect::<Vec<_>>();
        RayEntries {
            t00_210: inv(&d.r0_210),
            t00_270: inv(&d.r0_270),
            t00_330: inv(&d.r0_330),
            t01_210: d.s1_210.iter().zip(&d.r0_210).map(|(s, r)| s / r).collect(),
            t02_330: d.s2_330.iter().zip(&d.r0_330).map(|(s, r)| s / r).collect(),
        }
    }

    /// Direct entries of the mirrored coefficient m(−x), read off the dual block
    /// with the same formulas: t^R₀₀ = 1/r̃₀ on 30°, 90°, 150° maps to 210°, 270°,
    /// 330°, and t^R₀₁(210°) = s̃₁/r̃₀ (30°), t^R₀₂(330°) = s̃₂/r̃₀ (150°).
    pub fn mirrored_entries(&self) -> RayEntries {
        let d = &self.dual;
        let inv = |v: &Vec<Complex64>| v.iter().map(|r| ONE / r).collect::<Vec<_>>();
        RayEntries {
            t00_210: inv(&d.r0_30),
            t00_270: inv(&d.r0_90),
            t00_330: inv(&d.r0_150),
            t01_210: d.s1_30.iter().zip(&d.r0_30).map(|(s, r)| s / r).collect(),
            t02_330: d.s2_150.iter().zip(&d.r0_150).map(|(s, r)| s / r).collect(),
        }
    }
}

/// Forward map: sample the scattering data of `p` on the τ grid.
pub fn compute_scattering_data(p: &Potential, tau: &PanelGrid, bound_radius: Option<f64>) -> Result<ScatteringData> {
    p.check()?;
    let kappa = p.kappa();
    let k2 = kappa * kappa;
    let dir = |deg: f64| Complex64::from_polar(1.0, deg.to_radians());
    // per node: t00 on 210/270/330, t01 on 210, t02 on 330
    let rows: Vec<[Complex64; 5]> = tau
        .nodes
        .par_iter()
        .map(|&t| -> Result<[Complex64; 5]> {
            let a = row0(p, t * dir(210.0))?;
            let b = row0_entry(p, t * dir(270.0), 0)?;
            let c = row0(p, t * dir(330.0))?;
            Ok([a[0], b, c[0], a[1], c[2]])
        })
        .collect::<Result<_>>()?;
    for (i, r) in rows.iter().enumerate() {
        for v in &r[0..3] {
            if v.norm() < T00_ZERO_TOL {
                return Err(Error::BoundStateCandidate(Complex64::new(tau.nodes[i], 0.0)));
            }
        }
    }
    let col = |j: usize| rows.iter().map(|r| r[j]).collect::<Vec<_>>();
    let (t210, t270, t330, t01, t02) = (col(0), col(1), col(2), col(3), col(4));
    let direct = DirectSamples {
        r0_210: t210.iter().map(|t| ONE / t).collect(),
        r0_270: t270.iter().map(|t| ONE / t).collect(),
        r0_330: t330.iter().map(|t| ONE / t).collect(),
        s1_210: t01.iter().zip(&t210).map(|(a, b)| a / b).collect(),
        s2_330: t02.iter().zip(&t330).map(|(a, b)| a / b).collect(),
    };
    // r̃₀(λ) = κ²/conj t₀₀(λ̄); s̃₁(λ) = ζ₁ conj t₀₁(λ̄ζ₂)/conj t₀₀(λ̄); s̃₂(λ) = ζ₂ conj t₀₂(λ̄ζ₁)/conj t₀₀(λ̄)
    let dual = DualSamples {
        r0_30: t330.iter().map(|t| k2 / t.conj()).collect(),
        r0_90: t270.iter().map(|t| k2 / t.conj()).collect(),
        r0_150: t210.iter().map(|t| k2 / t.conj()).collect(),
        s1_30: t01.iter().zip(&t330).map(|(a, b)| ZETA[1] * a.conj() / b.conj()).collect(),
        s2_150: t02.iter().zip(&t210).map(|(a, b)| ZETA[2] * a.conj() / b.conj()).collect(),
    };
    let bound_states = match bound_radius {
        Some(r) => find_bound_states(p, r)?,
        None => BoundStates::default(),
    };
    Ok(ScatteringData { m_plus: p.m_plus, m_minus: p.m_minus, kappa, tau: tau.clone(), direct, dual, bound_states })
}

/// Single entry t_{0,l}(λ) at x = 0.
pub fn row0_entry(p: &Potential, lambda: Complex64, l: usize) -> Result<Complex64> {
    let (u, _) = triple(p, Family::U, lambda, 0, 0.0, Backend::Auto)?;
    let partner = [0usize, 2, 1];
    let (w, _) = v_plus(p, lambda, partner[l], 0.0, Backend::Auto)?;
    let pre = -1.0 / (3.0 * p.m_plus.powf(2.0 / 3.0) * lambda * lambda);
    Ok(pre * ZETA[l] * concomitant(&u, &w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_row_matches_closed_form() {
        let p = Potential::step(1.0, 8.0);
        let r = row0(&p, Complex64::new(0.3, -0.2)).unwrap();
        let e = step_row0(2.0);
        for l in 0..3 {
            assert!((r[l] - e[l]).norm() < 1e-12, "{l}: {} vs {}", r[l], e[l]);
        }
        assert!((e[0] - 7.0 / 3.0).norm() < 1e-15);
    }

    #[test]
    fn cramer_agrees_with_concomitant() {
        let p = Potential::step(1.0, 8.0).with_bump(1.0, 0.5, 0.05);
        let l = Complex64::new(0.2, -0.3);
        let a = row0_at(&p, l, 0.0, Backend::Ode).unwrap();
        let b = row0_cramer(&p, l, 0.0, Backend::Ode).unwrap();
        for k in 0..3 {
            assert!((a[k] - b[k]).norm() < 1e-8 * a[k].norm().max(1.0));
        }
    }
}
