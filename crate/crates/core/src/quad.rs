//! Quadrature building blocks: Gauss–Legendre rules, composite panel grids,
//! adaptive Gauss–Kronrod, and polynomial interpolation on panel nodes.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Legendre polynomial P_n and its derivative at x.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = if (x * x - 1.0).abs() < 1e-300 {
        0.5 * (n * (n + 1)) as f64 * x.powi(n as i32 + 1)
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

/// All Legendre values P_0..P_{n-1} at x.
pub fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n];
    if n > 0 {
        out[0] = 1.0;
    }
    if n > 1 {
        out[1] = x;
    }
    for k in 1..n.saturating_sub(1) {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + 1.0) * x * out[k] - kf * out[k - 1]) / (kf + 1.0);
    }
    out
}

/// Gauss–Legendre nodes and weights on [−1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&n) {
        return v.clone();
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    cache.lock().unwrap().insert(n, (x.clone(), w.clone()));
    (x, w)
}

/// Composite Gauss–Legendre grid on [breaks[0], breaks[last]].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelGrid {
    pub breaks: Vec<f64>,
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl PanelGrid {
    pub fn from_breaks(breaks: Vec<f64>, order: usize) -> Result<Self> {
        if breaks.len() < 2 || order == 0 {
            return Err(Error::GridTooSmall(format!(
                "{} breakpoints, order {}",
                breaks.len(),
                order
            )));
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid("panel breaks must increase".into()));
        }
        let (s, w) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity((breaks.len() - 1) * order);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for p in breaks.windows(2) {
            let (c, h) = (0.5 * (p[0] + p[1]), 0.5 * (p[1] - p[0]));
            for j in 0..order {
                nodes.push(c + h * s[j]);
                weights.push(h * w[j]);
            }
        }
        Ok(Self { breaks, order, nodes, weights })
    }

    /// Geometric panels `h0, h0·r, …` (`graded` of them) from 0, then uniform
    /// panels up to `t_max`, `panels` panels in total.
    pub fn graded(t_max: f64, panels: usize, order: usize, h0: f64, ratio: f64) -> Result<Self> {
        let graded = 3.min(panels / 4);
        let mut br = vec![0.0];
        let mut h = h0;
        for _ in 0..graded {
            let last = *br.last().unwrap();
            br.push(last + h);
            h *= ratio;
        }
        let start = *br.last().unwrap();
        let rest = panels - graded;
        if start >= t_max {
            return Err(Error::Invalid("graded panels exceed the grid end".into()));
        }
        for k in 1..=rest {
            br.push(start + (t_max - start) * k as f64 / rest as f64);
        }
        Self::from_breaks(br, order)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn panels(&self) -> usize {
        self.breaks.len() - 1
    }

    pub fn t_max(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    /// Panel index containing t (closed on the left).
    pub fn panel_of(&self, t: f64) -> Option<usize> {
        if t < self.breaks[0] || t > self.t_max() {
            return None;
        }
        let i = self.breaks.partition_point(|&b| b <= t);
        Some(i.saturating_sub(1).min(self.panels() - 1))
    }

    /// Interpolate node values at t with the panel polynomial.
    pub fn interpolate(&self, values: &[Complex64], t: f64) -> Result<Complex64> {
        let i = self.panel_of(t).ok_or(Error::Extrapolation(t))?;
        let (a, b) = (self.breaks[i], self.breaks[i + 1]);
        let z = (2.0 * t - a - b) / (b - a);
        let (s, _) = gauss_legendre(self.order);
        let l = lagrange_row(&s, z);
        Ok((0..self.order).map(|j| values[i * self.order + j] * l[j]).sum())
    }
}

/// Values of the Lagrange basis on `nodes` at z.
pub fn lagrange_row(nodes: &[f64], z: f64) -> Vec<f64> {
    let p = nodes.len();
    (0..p)
        .map(|j| {
            let mut v = 1.0;
            for m in 0..p {
                if m != j {
                    v *= (z - nodes[m]) / (nodes[j] - nodes[m]);
                }
            }
            v
        })
        .collect()
}

/// Derivatives of the Lagrange basis on `nodes` at z.
pub fn lagrange_deriv_row(nodes: &[f64], z: f64) -> Vec<f64> {
    let p = nodes.len();
    (0..p)
        .map(|j| {
            let mut tot = 0.0;
            for k in 0..p {
                if k == j {
                    continue;
                }
                let mut pr = 1.0 / (nodes[j] - nodes[k]);
                for m in 0..p {
                    if m != j && m != k {
                        pr *= (z - nodes[m]) / (nodes[j] - nodes[m]);
                    }
                }
                tot += pr;
            }
            tot
        })
        .collect()
}

/// Matrix S with S[i][j] = ∫_{s_i}^{1} ℓ_j(s) ds for the p-point Gauss rule,
/// so that ∫_{s_i}^{1} f ≈ Σ_j S[i][j] f(s_j).
pub fn tail_integration_matrix(p: usize) -> Vec<Vec<f64>> {
    let (s, w) = gauss_legendre(p);
    // ℓ_j = Σ_k c_kj P_k with c_kj = (2k+1)/2 w_j P_k(s_j)
    let pk: Vec<Vec<f64>> = s.iter().map(|&sj| legendre_all(p + 1, sj)).collect();
    (0..p)
        .map(|i| {
            let pi = &pk[i];
            // ∫_{s}^{1} P_0 = 1 − s, ∫_{s}^{1} P_k = (P_{k−1}(s) − P_{k+1}(s))/(2k+1)
            let ints: Vec<f64> = (0..p)
                .map(|k| {
                    if k == 0 {
                        1.0 - s[i]
                    } else {
                        (pi[k - 1] - pi[k + 1]) / (2 * k + 1) as f64
                    }
                })
                .collect();
            (0..p)
                .map(|j| {
                    (0..p)
                        .map(|k| (2 * k + 1) as f64 / 2.0 * w[j] * pk[j][k] * ints[k])
                        .sum()
                })
                .collect()
        })
        .collect()
}

const GK_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * GK_WK[7];
    let mut g = fc * GK_WG[3];
    for j in 0..7 {
        let x = h * GK_X[j];
        let s = f(c - x) + f(c + x);
        k += s * GK_WK[j];
        if j % 2 == 1 {
            g += s * GK_WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// Adaptive 7/15-point Gauss–Kronrod integration of a complex function.
pub fn adaptive<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Complex64> {
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut stack = vec![(a, b, gk15(&f, a, b))];
    let mut total = Complex64::new(0.0, 0.0);
    let mut done = Vec::new();
    let mut evals = 0usize;
    while let Some((lo, hi, (val, err))) = stack.pop() {
        let scale = (total.norm() + val.norm()).max(1e-300);
        let local_tol = (abs_tol.max(rel_tol * scale)) * (hi - lo) / (b - a).abs();
        if err <= local_tol || (hi - lo).abs() < 1e-14 * (b - a).abs() {
            total += val;
            done.push(err);
            continue;
        }
        evals += 1;
        if evals > 200_000 {
            return Err(Error::Quadrature(format!("no convergence on [{a}, {b}]")));
        }
        let mid = 0.5 * (lo + hi);
        stack.push((lo, mid, gk15(&f, lo, mid)));
        stack.push((mid, hi, gk15(&f, mid, hi)));
    }
    Ok(total)
}

/// Adaptive integration of a real function.
pub fn adaptive_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    adaptive(|x| Complex64::new(f(x), 0.0), a, b, abs_tol, rel_tol).map(|v| v.re)
}

/// Adaptive integration split at interior breakpoints (sorted internally).
pub fn adaptive_split<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    points: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Complex64> {
    let mut pts: Vec<f64> = points.iter().copied().filter(|&p| p > a && p < b).collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut edges = vec![a];
    edges.extend(pts);
    edges.push(b);
    let mut total = Complex64::new(0.0, 0.0);
    for e in edges.windows(2) {
        total += adaptive(&f, e[0], e[1], abs_tol, rel_tol)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_exactness() {
        for n in [1, 2, 5, 16, 32] {
            let (x, w) = gauss_legendre(n);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13);
            let deg = 2 * n - 1;
            let integral: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((integral - exact).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn tail_matrix_integrates_polynomials() {
        let p = 16;
        let (s, _) = gauss_legendre(p);
        let m = tail_integration_matrix(p);
        for i in 0..p {
            let approx: f64 = (0..p).map(|j| m[i][j] * s[j].powi(5)).sum();
            let exact = (1.0 - s[i].powi(6)) / 6.0;
            assert!((approx - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn adaptive_oscillatory() {
        let v = adaptive(|x| Complex64::new(0.0, 10.0 * x).exp(), 0.0, 3.0, 1e-14, 1e-14).unwrap();
        let exact = (Complex64::new(0.0, 30.0).exp() - 1.0) / Complex64::new(0.0, 10.0);
        assert!((v - exact).norm() < 1e-13);
    }

    #[test]
    fn grid_interpolation() {
        let g = PanelGrid::graded(6.0, 8, 16, 0.1, 2.0).unwrap();
        let vals: Vec<Complex64> = g.nodes.iter().map(|&t| Complex64::new(t.sin(), t.cos())).collect();
        let t = 2.345;
        assert!((g.interpolate(&vals, t).unwrap() - Complex64::new(t.sin(), t.cos())).norm() < 1e-12);
        assert!(g.interpolate(&vals, 7.0).is_err());
    }
}
