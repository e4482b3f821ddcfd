//! Reconstruction of m(x) on each half-axis from sampled scattering data.
//!
//! Work in μ = λn₊ and the travel-time coordinate ξ = x − Δ(x), with
//! Δ(x) = ∫_x^∞ (n/n₊ − 1). The sectionally holomorphic function
//! F(μ) = e^{iμξ}v₀⁺(λ, x), continued across the sectors, jumps across the rays
//! at 330°, 210°, 30° and 150°. Its jumps are linear in its own boundary
//! values with coefficients built from t₀₀ on 210°/270°/330°, t₀₁ on 210° and
//! t₀₂ on 330°, so F = A + Σ Cauchy integrals + poles closes into a Nyström
//! system for the boundary values, the constant A and the residues.
//! F(∞) = A = n₊/n(x) and F'(0) = −iΔ then give m(x) and x(ξ).

use crate::cauchy::{cauchy_weights, exp_tail};
use crate::error::{Error, Result};
use crate::geometry::{SQRT3, ZETA};
use crate::linalg::solve_dense;
use crate::quad::{self, PanelGrid};
use crate::scattering::{RayEntries, ScatteringData};
use faer::{c64, Mat};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Ray angles (degrees) in unknown-block order.
pub const RAY_ANGLES_DEG: [f64; 4] = [330.0, 210.0, 30.0, 150.0];
/// Which side of each ray the unknown boundary value is taken from.
const SIDE: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);
/// Frequencies below this are treated as zero in the tail model.
const OMEGA_EPS: f64 = 1e-9;
/// Relative singular-value cutoff of the tail least-squares fit.
const TAIL_RCOND: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfAxis {
    /// x ≥ 0 from the direct data.
    Direct,
    /// x ≤ 0 from the dual data, solved as the direct problem of m(−x).
    Dual,
}

/// Simple pole p of F with the residue condition Res_p = c·e^{i(p−q)ξ}·F(q).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub p: Complex64,
    pub q: Complex64,
    pub c: Complex64,
}

fn angle(r: usize) -> f64 {
    RAY_ANGLES_DEG[r].to_radians()
}

/// Cauchy operators between the four rays on one τ grid, scaled by 1/2πi.
/// Block (r, s) row i integrates a density on ray s against 1/(ζ − λ) at
/// λ = t_i e^{iθ_r}; the diagonal blocks are principal values.
pub struct RayOperators {
    pub grid: PanelGrid,
    blocks: Vec<Vec<Complex64>>,
}

impl RayOperators {
    pub fn new(grid: PanelGrid) -> Self {
        let n = grid.len();
        let blocks = (0..16)
            .into_par_iter()
            .map(|rs| {
                let (r, s) = (rs / 4, rs % 4);
                let mut b = vec![ZERO; n * n];
                for i in 0..n {
                    let w = if r == s {
                        Complex64::new(grid.nodes[i], 0.0)
                    } else {
                        Complex64::from_polar(grid.nodes[i], angle(r) - angle(s))
                    };
                    let row = cauchy_weights(&grid, w);
                    for j in 0..n {
                        b[i * n + j] = row[j] / (2.0 * PI * I);
                    }
                }
                b
            })
            .collect();
        Self { grid, blocks }
    }

    fn block(&self, r: usize, s: usize) -> &[Complex64] {
        &self.blocks[r * 4 + s]
    }
}

/// Jump densities at one ξ: J_s = Σ_q d[s][q] ⊙ g_q, plus the per-ray tail model.
#[derive(Debug, Clone)]
struct Jumps {
    d: [[Option<Vec<Complex64>>; 4]; 4],
    omega: [f64; 4],
    beta: [Option<Complex64>; 4],
    /// K × NF least-squares maps from the last NF samples to tail coefficients.
    fits: [Vec<Vec<Complex64>>; 4],
    nf: usize,
    t_max: f64,
}

impl Jumps {
    fn new(e: &RayEntries, kappa: f64, grid: &PanelGrid, xi: f64) -> Result<Self> {
        let n = grid.len();
        let om = SQRT3 * xi;
        let t = &grid.nodes;
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        let (mut b1, mut b2, mut g1, mut g2) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for j in 0..n {
            let (t210, t270, t330) = (e.t00_210[j], e.t00_270[j], e.t00_330[j]);
            let ex = (I * om * t[j]).exp();
            let den = kappa * t270;
            a.push(-ZETA[2] * e.t01_210[j] / t210 * ex);
            b.push(ZETA[1] * e.t02_330[j] / t330 / ex);
            b1.push(1.0 - t210.conj() * t330.conj() / den);
            b2.push(e.t02_330[j].conj() * t210.conj() / den * ex);
            g1.push(t330.conj() * t210.conj() / den - 1.0);
            g2.push(-e.t01_210[j].conj() * t330.conj() / den / ex);
        }
        let mut d: [[Option<Vec<Complex64>>; 4]; 4] = Default::default();
        d[0][1] = Some(a);
        d[1][0] = Some(b);
        d[2][2] = Some(b1);
        d[2][3] = Some(b2);
        d[3][3] = Some(g1);
        d[3][2] = Some(g2);
        let nf = (2 * grid.order).min(n);
        let t_max = grid.t_max();
        let mut omega = [0.0; 4];
        let mut beta = [None; 4];
        let mut fits: [Vec<Vec<Complex64>>; 4] = Default::default();
        let osc = [(0, 1), (1, 0), (2, 3), (3, 2)];
        for r in 0..4 {
            let c = d[osc[r].0][osc[r].1].as_ref().unwrap();
            let (c1, c2) = (c[n - 1], c[n - 2]);
            omega[r] = if c1.norm() > 1e-300 && c2.norm() > 1e-300 { (c1 / c2).arg() / (t[n - 1] - t[n - 2]) } else { 0.0 };
            let osc_on = omega[r].abs() > OMEGA_EPS;
            if osc_on {
                let deg: f64 = if r % 2 == 0 { 150.0 } else { 210.0 };
                beta[r] = Some(Complex64::from_polar(omega[r].abs(), deg.to_radians()));
            }
            let tt = &t[n - nf..];
            let mut cols: Vec<Vec<Complex64>> = vec![vec![Complex64::new(1.0, 0.0); nf]];
            if osc_on {
                cols.push(tt.iter().map(|&x| (I * omega[r] * (x - t_max)).exp()).collect());
            }
            cols.push(tt.iter().map(|&x| Complex64::new(t_max / x, 0.0)).collect());
            if let Some(bt) = beta[r] {
                cols.push(tt.iter().map(|&x| (bt * (x - t_max)).exp()).collect());
            }
            fits[r] = pinv(&cols)?;
        }
        Ok(Self { d, omega, beta, fits, nf, t_max })
    }

    /// ∫_T^∞ basis_k(t)/(t − w) dt for the ray-r tail basis (log R dropped; it cancels over rays).
    fn tail_basis(&self, r: usize, w: Complex64) -> Vec<Complex64> {
        let t = self.t_max;
        let lg = -(t - w).ln();
        let mut e = vec![lg];
        if self.omega[r].abs() > OMEGA_EPS {
            e.push(exp_tail(I * self.omega[r], t, w));
        }
        e.push(if w.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { -(t / w) * (1.0 - w / t).ln() });
        if let Some(b) = self.beta[r] {
            e.push(exp_tail(b, t, w));
        }
        e
    }

    /// Tail weights on the last NF samples of J_r.
    fn tail_row(&self, r: usize, w: Complex64) -> Vec<Complex64> {
        let e = self.tail_basis(r, w);
        (0..self.nf).map(|j| e.iter().zip(&self.fits[r]).map(|(ek, fk)| ek * fk[j]).sum()).collect()
    }

    fn density(&self, s: usize, g: &[Vec<Complex64>]) -> Vec<Complex64> {
        let n = g[0].len();
        let mut j = vec![ZERO; n];
        for q in 0..4 {
            if let Some(c) = &self.d[s][q] {
                for k in 0..n {
                    j[k] += c[k] * g[q][k];
                }
            }
        }
        j
    }
}

/// Truncated pseudoinverse of the tall matrix with the given columns.
fn pinv(cols: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>> {
    let (m, k) = (cols[0].len(), cols.len());
    let b = Mat::<c64>::from_fn(m, k, |i, j| cols[j][i]);
    let svd = b.thin_svd().map_err(|e| Error::Invalid(format!("tail fit SVD: {e:?}")))?;
    let (u, v) = (svd.U(), svd.V());
    let s = svd.S().column_vector();
    let smax = (0..k).map(|i| s[i].re).fold(0.0, f64::max);
    let mut out = vec![vec![ZERO; m]; k];
    for (kk, row) in out.iter_mut().enumerate() {
        for (j, val) in row.iter_mut().enumerate() {
            let mut acc = ZERO;
            for l in 0..k {
                let sl = s[l].re;
                if sl > TAIL_RCOND * smax {
                    acc += v[(kk, l)] * u[(j, l)].conj() / sl;
                }
            }
            *val = acc;
        }
    }
    Ok(out)
}

/// Column layout: 4 blocks of N boundary values (rays in `RAY_ANGLES_DEG` order),
/// then the constant A, then one residue per pole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemLayout {
    pub nodes: usize,
    pub poles: usize,
}

impl SystemLayout {
    pub fn size(&self) -> usize {
        4 * self.nodes + 1 + self.poles
    }

    pub fn constant(&self) -> usize {
        4 * self.nodes
    }

    pub fn residue(&self, k: usize) -> usize {
        4 * self.nodes + 1 + k
    }
}

/// One collocated singular system at fixed ξ.
pub struct SingularSystem {
    pub side: HalfAxis,
    pub xi: f64,
    pub layout: SystemLayout,
    pub matrix: Mat<c64>,
    pub rhs: Vec<Complex64>,
    pub poles: Vec<Pole>,
    jumps: Jumps,
}

/// Solution of one system with the quantities extracted from it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldSolution {
    pub side: HalfAxis,
    pub xi: f64,
    /// Boundary values per ray at the τ nodes.
    pub boundary: Vec<Vec<Complex64>>,
    /// F(∞) = n₊/n(x).
    pub amplitude: Complex64,
    pub residues: Vec<Complex64>,
    /// Position x(ξ) = ξ + Re Δ in the scaled variable.
    pub x: f64,
    /// Δ = iF'(0); its imaginary part should vanish.
    pub delta: Complex64,
    pub residual: f64,
    pub condition: f64,
    /// |Σ_s J_s(0)| and |Σ_s e^{−iθ_s}J_s'(0)|, both zero for consistent data.
    pub jump_sums: (f64, f64),
}

/// Inverse solver for one half-axis.
pub struct HalfAxisSolver {
    pub side: HalfAxis,
    pub m_plus: f64,
    pub kappa: f64,
    entries: RayEntries,
    ops: RayOperators,
}

impl HalfAxisSolver {
    /// Work in μ = λn₊ so the scaled coefficient m/m₊ has unit limit at +∞.
    pub fn new(data: &ScatteringData, side: HalfAxis) -> Result<Self> {
        if data.tau.len() < 2 * data.tau.order.max(1) || data.tau.len() < 2 {
            return Err(Error::GridTooSmall(format!("{} tau nodes", data.tau.len())));
        }
        let (entries, m_plus, kappa) = match side {
            HalfAxis::Direct => (data.direct_entries(), data.m_plus, data.kappa),
            HalfAxis::Dual => (data.mirrored_entries(), data.m_minus, 1.0 / data.kappa),
        };
        let n = m_plus.cbrt();
        let g = &data.tau;
        let grid = PanelGrid {
            breaks: g.breaks.iter().map(|b| b * n).collect(),
            order: g.order,
            nodes: g.nodes.iter().map(|b| b * n).collect(),
            weights: g.weights.iter().map(|b| b * n).collect(),
        };
        Ok(Self { side, m_plus, kappa, entries, ops: RayOperators::new(grid) })
    }

    pub fn grid(&self) -> &PanelGrid {
        &self.ops.grid
    }

    /// ξ at which every jump frequency vanishes; it corresponds to x = 0.
    pub fn degenerate_xi(&self) -> f64 {
        let n = self.grid().len();
        let t = &self.grid().nodes;
        let a: Vec<Complex64> = (n - 2..n).map(|j| self.entries.t01_210[j] / self.entries.t00_210[j]).collect();
        if a[0].norm() < 1e-300 || a[1].norm() < 1e-300 {
            return 0.0;
        }
        let om = (a[1] / a[0]).arg() / (t[n - 1] - t[n - 2]);
        -om / SQRT3
    }

    fn interior_row(&self, jumps: &Jumps, lambda: Complex64, layout: &SystemLayout) -> Vec<Complex64> {
        let n = layout.nodes;
        let nf = jumps.nf;
        let mut row = vec![ZERO; layout.size()];
        for s in 0..4 {
            let w = lambda * Complex64::from_polar(1.0, -angle(s));
            let cr = cauchy_weights(self.grid(), w);
            let tr = jumps.tail_row(s, w);
            for q in 0..4 {
                if let Some(c) = &jumps.d[s][q] {
                    for j in 0..n {
                        row[q * n + j] += cr[j] * c[j] / (2.0 * PI * I);
                    }
                    for k in 0..nf {
                        row[q * n + n - nf + k] += tr[k] * c[n - nf + k] / (2.0 * PI * I);
                    }
                }
            }
        }
        row
    }

    /// Assemble the system at ξ with F(0) = `norm`.
    pub fn assemble(&self, xi: f64, poles: &[Pole], norm: Complex64) -> Result<SingularSystem> {
        let grid = self.grid();
        let n = grid.len();
        let layout = SystemLayout { nodes: n, poles: poles.len() };
        let size = layout.size();
        let jumps = Jumps::new(&self.entries, self.kappa, grid, xi)?;
        let nf = jumps.nf;
        let t = &grid.nodes;
        let mut m = Mat::<c64>::zeros(size, size);
        let mut rhs = vec![ZERO; size];
        for r in 0..4 {
            for i in 0..n {
                let row = r * n + i;
                m[(row, r * n + i)] += Complex64::new(1.0, 0.0);
                m[(row, layout.constant())] -= Complex64::new(1.0, 0.0);
                let lam = Complex64::from_polar(t[i], angle(r));
                for (k, pl) in poles.iter().enumerate() {
                    let d = lam - pl.p;
                    if d.norm() < 1e-12 {
                        return Err(Error::Invalid(format!("collocation point {lam} coincides with pole {}", pl.p)));
                    }
                    m[(row, layout.residue(k))] -= 1.0 / d;
                }
                for s in 0..4 {
                    let cr = &self.ops.block(r, s)[i * n..(i + 1) * n];
                    let w = if r == s { Complex64::new(t[i], 0.0) } else { Complex64::from_polar(t[i], angle(r) - angle(s)) };
                    let tr = jumps.tail_row(s, w);
                    for q in 0..4 {
                        if let Some(c) = &jumps.d[s][q] {
                            for j in 0..n {
                                m[(row, q * n + j)] -= cr[j] * c[j];
                            }
                            for k in 0..nf {
                                m[(row, q * n + n - nf + k)] -= tr[k] * c[n - nf + k] / (2.0 * PI * I);
                            }
                            if s == r {
                                m[(row, q * n + i)] -= SIDE[r] * 0.5 * c[i];
                            }
                        }
                    }
                }
            }
        }
        // normalization F(0) = norm, approached along 270°
        let nrow = layout.constant();
        m[(nrow, layout.constant())] = Complex64::new(1.0, 0.0);
        rhs[nrow] = norm;
        let p = grid.order;
        let (sn, _) = quad::gauss_legendre(p);
        let (a0, b0) = (grid.breaks[0], grid.breaks[1]);
        let l0 = quad::lagrange_row(&sn, (2.0 * 0.0 - a0 - b0) / (b0 - a0));
        let cut: f64 = (0..n).filter(|&j| t[j] < 1.0).map(|j| grid.weights[j] / t[j]).sum();
        for s in 0..4 {
            let phi = (Complex64::from_polar(1.0, PI / 2.0 - angle(s))).arg();
            let mut lin: Vec<Complex64> = (0..n).map(|j| Complex64::new(grid.weights[j] / t[j], 0.0)).collect();
            for j in 0..p {
                lin[j] -= l0[j] * cut + I * phi * l0[j];
            }
            let tr = jumps.tail_row(s, ZERO);
            for q in 0..4 {
                if let Some(c) = &jumps.d[s][q] {
                    for j in 0..n {
                        m[(nrow, q * n + j)] += lin[j] * c[j] / (2.0 * PI * I);
                    }
                    for k in 0..nf {
                        m[(nrow, q * n + n - nf + k)] += tr[k] * c[n - nf + k] / (2.0 * PI * I);
                    }
                }
            }
        }
        for (k, pl) in poles.iter().enumerate() {
            m[(nrow, layout.residue(k))] += 1.0 / (-pl.p);
        }
        // residue conditions Res_k = c_k e^{i(p−q)ξ} F(q_k)
        for (k, pl) in poles.iter().enumerate() {
            let row = layout.residue(k);
            let f = pl.c * (I * (pl.p - pl.q) * xi).exp();
            let inner = self.interior_row(&jumps, pl.q, &layout);
            for (j, v) in inner.iter().enumerate() {
                m[(row, j)] -= f * v;
            }
            m[(row, layout.residue(k))] += Complex64::new(1.0, 0.0);
            m[(row, layout.constant())] -= f;
            for (mm, pm) in poles.iter().enumerate() {
                m[(row, layout.residue(mm))] -= f / (pl.q - pm.p);
            }
        }
        Ok(SingularSystem { side: self.side, xi, layout, matrix: m, rhs, poles: poles.to_vec(), jumps })
    }

    /// Dense solve plus extraction of A, x(ξ) and the residues.
    pub fn solve_system(&self, sys: &SingularSystem) -> Result<FieldSolution> {
        let sol = solve_dense(&sys.matrix, &sys.rhs)?;
        let n = sys.layout.nodes;
        let boundary: Vec<Vec<Complex64>> = (0..4).map(|r| sol.x[r * n..(r + 1) * n].to_vec()).collect();
        let amplitude = sol.x[sys.layout.constant()];
        let residues: Vec<Complex64> = (0..sys.layout.poles).map(|k| sol.x[sys.layout.residue(k)]).collect();
        let (d0, s0, s1) = self.deriv0(&sys.jumps, &boundary, &sys.poles, &residues);
        let delta = I * d0;
        Ok(FieldSolution {
            side: sys.side,
            xi: sys.xi,
            boundary,
            amplitude,
            residues,
            x: sys.xi + delta.re,
            delta,
            residual: sol.residual,
            condition: sol.condition,
            jump_sums: (s0, s1),
        })
    }

    pub fn solve_at(&self, xi: f64, poles: &[Pole], norm: Complex64) -> Result<FieldSolution> {
        let sys = self.assemble(xi, poles, norm)?;
        self.solve_system(&sys)
    }

    /// F'(0) from the finite-part integrals of J_s/t² along 270°.
    fn deriv0(&self, jumps: &Jumps, g: &[Vec<Complex64>], poles: &[Pole], res: &[Complex64]) -> (Complex64, f64, f64) {
        let grid = self.grid();
        let t = &grid.nodes;
        let n = t.len();
        let p = grid.order;
        let (sn, wq) = quad::gauss_legendre(p);
        let h = grid.breaks[1] - grid.breaks[0];
        let l0 = quad::lagrange_row(&sn, -1.0);
        let dl: Vec<f64> = quad::lagrange_deriv_row(&sn, -1.0).iter().map(|v| v / (h / 2.0)).collect();
        let tm = jumps.t_max;
        let nf = jumps.nf;
        let mut tot = ZERO;
        let mut j0s = ZERO;
        let mut j1s = ZERO;
        for s in 0..4 {
            let js = jumps.density(s, g);
            let j0: Complex64 = (0..p).map(|j| l0[j] * js[j]).sum();
            let j1: Complex64 = (0..p).map(|j| dl[j] * js[j]).sum();
            let rot = Complex64::from_polar(1.0, -angle(s));
            j0s += j0;
            j1s += rot * j1;
            let phi = (Complex64::from_polar(1.0, PI / 2.0 - angle(s))).arg();
            let first: Complex64 = (0..p).map(|j| wq[j] * (h / 2.0) * (js[j] - j0 - j1 * t[j]) / (t[j] * t[j])).sum();
            let rest: Complex64 = (p..n).map(|j| grid.weights[j] * js[j] / (t[j] * t[j])).sum();
            // tail with the constant, oscillatory and T/t basis refitted on J_s
            let om = jumps.omega[s];
            let mut cols: Vec<Vec<Complex64>> = vec![vec![Complex64::new(1.0, 0.0); nf]];
            let osc_on = om.abs() > OMEGA_EPS;
            if osc_on {
                cols.push(t[n - nf..].iter().map(|&x| (I * om * (x - tm)).exp()).collect());
            }
            cols.push(t[n - nf..].iter().map(|&x| Complex64::new(tm / x, 0.0)).collect());
            let fit = pinv(&cols).unwrap_or_else(|_| vec![vec![ZERO; nf]; cols.len()]);
            let c: Vec<Complex64> = fit.iter().map(|row| row.iter().zip(&js[n - nf..]).map(|(a, b)| a * b).sum()).collect();
            let mut tail = c[0] / tm;
            let mut k = 1;
            if osc_on {
                tail += c[1] * (1.0 / tm + I * om * exp_tail(I * om, tm, ZERO));
                k = 2;
            }
            tail += c[k] / (2.0 * tm);
            tot += rot * (first + j1 * (Complex64::new(h.ln() - 1.0, 0.0) - I * phi) - j0 / h + rest + tail);
        }
        let mut d = tot / (2.0 * PI * I);
        for (pl, r) in poles.iter().zip(res) {
            d -= r / (pl.p * pl.p);
        }
        (d, j0s.norm(), j1s.norm())
    }

    /// F(λ) for λ off the rays: A + Σ_s C_s[J_s](λ) + Σ_k Res_k/(λ − p_k).
    pub fn reconstruct_f(&self, sol: &FieldSolution, poles: &[Pole], lambda: Complex64) -> Result<Complex64> {
        let arg = lambda.arg().to_degrees().rem_euclid(360.0);
        if RAY_ANGLES_DEG.iter().any(|a| (a - arg).abs() < 1e-9) {
            return Err(Error::OnRay);
        }
        let jumps = Jumps::new(&self.entries, self.kappa, self.grid(), sol.xi)?;
        let layout = SystemLayout { nodes: self.grid().len(), poles: poles.len() };
        let row = self.interior_row(&jumps, lambda, &layout);
        let n = layout.nodes;
        let mut f = sol.amplitude;
        for r in 0..4 {
            for j in 0..n {
                f += row[r * n + j] * sol.boundary[r][j];
            }
        }
        for (pl, rr) in poles.iter().zip(&sol.residues) {
            f += rr / (lambda - pl.p);
        }
        Ok(f)
    }
}

/// Recovered coefficient on one half-axis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructedField {
    pub side: HalfAxis,
    /// Solved parameter values and their positions/amplitudes.
    pub xi: Vec<f64>,
    pub x_of_xi: Vec<f64>,
    pub amplitude: Vec<Complex64>,
    pub condition: Vec<f64>,
    pub residual: Vec<f64>,
    /// Requested evaluation points (physical x) and estimates there.
    pub x: Vec<f64>,
    /// Route A: m = m₊(dξ/dx)³ from the travel-time map.
    pub m_route_a: Vec<f64>,
    /// Route B: m = m₊/A³ from the amplitude at infinity.
    pub m_route_b: Vec<f64>,
    /// Largest residual and condition of the solves bracketing each x.
    pub x_residual: Vec<f64>,
    pub x_condition: Vec<f64>,
    pub max_condition: f64,
    pub max_residual: f64,
}

/// Monotone piecewise-cubic (Fritsch–Carlson) interpolation with linear extrapolation.
pub fn pchip(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if n == 1 {
        return ys[0];
    }
    if x <= xs[0] || x >= xs[n - 1] {
        let (i, j) = if x <= xs[0] { (0, 1) } else { (n - 2, n - 1) };
        return ys[i] + (ys[j] - ys[i]) / (xs[j] - xs[i]) * (x - xs[i]);
    }
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let del: Vec<f64> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / h[k]).collect();
    let slope = |k: usize| -> f64 {
        if k == 0 {
            return del[0];
        }
        if k == n - 1 {
            return del[n - 2];
        }
        if del[k - 1] * del[k] <= 0.0 {
            return 0.0;
        }
        let (w1, w2) = (2.0 * h[k] + h[k - 1], h[k] + 2.0 * h[k - 1]);
        (w1 + w2) / (w1 / del[k - 1] + w2 / del[k])
    };
    let k = xs.partition_point(|&v| v <= x) - 1;
    let (d0, d1) = (slope(k), slope(k + 1));
    let s = (x - xs[k]) / h[k];
    let (h00, h10, h01, h11) = (
        (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s),
        s * (1.0 - s) * (1.0 - s),
        s * s * (3.0 - 2.0 * s),
        s * s * (s - 1.0),
    );
    h00 * ys[k] + h10 * h[k] * d0 + h01 * ys[k + 1] + h11 * h[k] * d1
}

/// dx/dξ on a uniform ξ grid by fourth-order differences.
fn uniform_derivative(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    (0..n)
        .map(|i| {
            if n < 5 {
                let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
                return (y[b] - y[a]) / ((b - a) as f64 * h);
            }
            if i >= 2 && i + 2 < n {
                (-y[i + 2] + 8.0 * y[i + 1] - 8.0 * y[i - 1] + y[i - 2]) / (12.0 * h)
            } else if i < 2 {
                (-25.0 * y[i] + 48.0 * y[i + 1] - 36.0 * y[i + 2] + 16.0 * y[i + 3] - 3.0 * y[i + 4]) / (12.0 * h)
            } else {
                (25.0 * y[i] - 48.0 * y[i - 1] + 36.0 * y[i - 2] - 16.0 * y[i - 3] + 3.0 * y[i - 4]) / (12.0 * h)
            }
        })
        .collect()
}

/// Recover m on `x_points` (all of one sign: ≥ 0 for Direct, ≤ 0 for Dual).
///
/// ξ is swept on a uniform grid starting half a step above the degenerate
/// value, extended until x(ξ) covers the requested range.
pub fn recover_m(solver: &HalfAxisSolver, x_points: &[f64], poles: &[Pole]) -> Result<ReconstructedField> {
    let sgn = match solver.side {
        HalfAxis::Direct => 1.0,
        HalfAxis::Dual => -1.0,
    };
    let local: Vec<f64> = x_points.iter().map(|x| sgn * x).collect();
    if local.iter().any(|&x| x < -1e-12) {
        return Err(Error::Invalid("x points on the wrong half-axis".into()));
    }
    let x_hi = local.iter().cloned().fold(0.0, f64::max);
    let count = x_points.len().max(8);
    let h = (x_hi.max(1e-3)) / (count - 1) as f64;
    let xs0 = solver.degenerate_xi();
    let mut xi: Vec<f64> = Vec::new();
    let mut sols: Vec<FieldSolution> = Vec::new();
    let mut k0 = 0usize;
    let mut k1 = ((x_hi + 2.0 * xs0.abs()) / h).ceil() as usize + 3;
    loop {
        let batch: Vec<f64> = (k0..k1).map(|k| xs0 + h * (k as f64 + 0.5)).collect();
        let solved: Vec<FieldSolution> =
            batch.par_iter().map(|&x| solver.solve_at(x, poles, Complex64::new(1.0, 0.0))).collect::<Result<_>>()?;
        xi.extend(batch);
        sols.extend(solved);
        if sols.last().is_none_or(|s| s.x >= x_hi + h) || k1 > 20 * count + 100 {
            break;
        }
        k0 = k1;
        k1 += 4;
    }
    let xo: Vec<f64> = sols.iter().map(|s| s.x).collect();
    if xo.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("recovered x(ξ) is not increasing".into()));
    }
    let mp = solver.m_plus;
    let mb: Vec<f64> = sols.iter().map(|s| mp / s.amplitude.re.powi(3)).collect();
    let dxdxi = uniform_derivative(&xo, h);
    let ma: Vec<f64> = dxdxi.iter().map(|d| mp / d.powi(3)).collect();
    let m_route_a: Vec<f64> = local.iter().map(|&x| pchip(&xo, &ma, x)).collect();
    let m_route_b: Vec<f64> = local.iter().map(|&x| pchip(&xo, &mb, x)).collect();
    let condition: Vec<f64> = sols.iter().map(|s| s.condition).collect();
    let residual: Vec<f64> = sols.iter().map(|s| s.residual).collect();
    let bracket = |v: &[f64], x: f64| {
        let k = xo.partition_point(|&p| p <= x).clamp(1, xo.len() - 1);
        v[k - 1].max(v[k])
    };
    let x_residual = local.iter().map(|&x| bracket(&residual, x)).collect();
    let x_condition = local.iter().map(|&x| bracket(&condition, x)).collect();
    Ok(ReconstructedField {
        side: solver.side,
        max_condition: condition.iter().cloned().fold(0.0, f64::max),
        max_residual: residual.iter().cloned().fold(0.0, f64::max),
        xi,
        x_of_xi: xo.iter().map(|x| sgn * x).collect(),
        amplitude: sols.iter().map(|s| s.amplitude).collect(),
        condition,
        residual,
        x: x_points.to_vec(),
        m_route_a,
        m_route_b,
        x_residual,
        x_condition,
    })
}
