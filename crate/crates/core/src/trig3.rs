//! Generalized trigonometric functions s_k(z) = (1/3) Σ_j ζ_j^{−k} e^{ζ_j z},
//! the fundamental system of y''' = y with s_k^{(j)}(0) = δ_kj.

use crate::error::{Error, Result};
use crate::geometry::ZETA;
use crate::quad;
use num_complex::Complex64;

/// Largest admissible |Re(ζ_j z)| before the exponentials overflow.
pub const OVERFLOW_GUARD: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigTriple {
    pub s0: Complex64,
    pub s1: Complex64,
    pub s2: Complex64,
}

impl TrigTriple {
    /// Residual of s0³ + s1³ + s2³ − 3 s0 s1 s2 = 1.
    pub fn main_identity_residual(&self) -> f64 {
        let (a, b, c) = (self.s0, self.s1, self.s2);
        (a * a * a + b * b * b + c * c * c - 3.0 * a * b * c - 1.0).norm()
    }

    /// s0 + ζ_k s1 + ζ_k² s2, which equals e^{ζ_k z}.
    pub fn euler(&self, k: usize) -> Complex64 {
        let z = ZETA[k % 3];
        self.s0 + z * self.s1 + z * z * self.s2
    }

    pub fn get(&self, k: usize) -> Complex64 {
        match k % 3 {
            0 => self.s0,
            1 => self.s1,
            _ => self.s2,
        }
    }
}

fn guard(z: Complex64) -> Result<[Complex64; 3]> {
    let mut e = [Complex64::new(0.0, 0.0); 3];
    for (j, ej) in e.iter_mut().enumerate() {
        let w = ZETA[j] * z;
        if w.re.abs() > OVERFLOW_GUARD {
            return Err(Error::Overflow(z));
        }
        *ej = w.exp();
    }
    Ok(e)
}

/// s_k(z), k ∈ {0,1,2}.
pub fn s_eval(k: usize, z: Complex64) -> Result<Complex64> {
    if k > 2 {
        return Err(Error::IndexOutOfRange(k));
    }
    let e = guard(z)?;
    // ζ_j^{−k} = conj(ζ_j)^k = ζ_{(−jk) mod 3}
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, ej) in e.iter().enumerate() {
        acc += ZETA[(3 * 3 - j * k) % 3] * ej;
    }
    Ok(acc / 3.0)
}

/// All three functions at one argument.
pub fn s_triple(z: Complex64) -> Result<TrigTriple> {
    let e = guard(z)?;
    Ok(triple_from_exps(&e))
}

pub(crate) fn triple_from_exps(e: &[Complex64; 3]) -> TrigTriple {
    let s0 = (e[0] + e[1] + e[2]) / 3.0;
    let s1 = (e[0] + ZETA[2] * e[1] + ZETA[1] * e[2]) / 3.0;
    let s2 = (e[0] + ZETA[1] * e[1] + ZETA[2] * e[2]) / 3.0;
    TrigTriple { s0, s1, s2 }
}

/// Unchecked triple for internal kernels where the argument is known to be
/// moderate.
#[inline]
pub(crate) fn s_triple_fast(z: Complex64) -> TrigTriple {
    let e = [(ZETA[0] * z).exp(), (ZETA[1] * z).exp(), (ZETA[2] * z).exp()];
    triple_from_exps(&e)
}

/// Solution of the constant-coefficient Cauchy problem
///
/// y = y0 s0(iλx) + y1 s1(iλx)/(iλ) + y2 s2(iλx)/(iλ)² + i ∫₀ˣ s2(iλ(x−t))/(iλ)² f(t) dt.
///
/// The homogeneous part solves i y''' = λ³ y; with the `+i` sign of the
/// integral term the full expression solves i y''' − λ³ y = −f with
/// y(0) = y0, y'(0) = y1, y''(0) = y2.
pub fn cauchy_solution<F>(
    y0: Complex64,
    y1: Complex64,
    y2: Complex64,
    lambda: Complex64,
    x: f64,
    f: F,
) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if lambda.norm() == 0.0 {
        return Err(Error::ZeroLambda);
    }
    let il = Complex64::i() * lambda;
    let t = s_triple(il * x)?;
    let mut y = y0 * t.s0 + y1 * t.s1 / il + y2 * t.s2 / (il * il);
    if x != 0.0 {
        let integrand = |s: f64| -> Complex64 {
            let k = s_triple_fast(il * (x - s)).s2;
            k / (il * il) * f(s)
        };
        let (a, b, sign) = if x > 0.0 { (0.0, x, 1.0) } else { (x, 0.0, -1.0) };
        let val = quad::adaptive(integrand, a, b, 1e-13, 1e-15)?;
        y += Complex64::i() * sign * val;
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn values_at_zero() {
        let z = c(0.0, 0.0);
        assert!((s_eval(0, z).unwrap() - 1.0).norm() < 1e-15);
        assert!(s_eval(1, z).unwrap().norm() < 1e-15);
        assert!(s_eval(2, z).unwrap().norm() < 1e-15);
        assert!(s_eval(3, z).is_err());
    }

    #[test]
    fn k_evenness() {
        let z = c(0.7, 0.3);
        for k in 0..3 {
            let lhs = s_eval(k, ZETA[1] * z).unwrap();
            let rhs = ZETA[1].powu(k as u32) * s_eval(k, z).unwrap();
            assert!((lhs - rhs).norm() < 1e-14);
        }
    }

    #[test]
    fn triple_matches_eval() {
        let z = c(1.3, -2.1);
        let t = s_triple(z).unwrap();
        for k in 0..3 {
            assert!((t.get(k) - s_eval(k, z).unwrap()).norm() < 1e-14);
        }
    }

    #[test]
    fn guard_trips() {
        assert!(s_triple(c(800.0, 0.0)).is_err());
    }

    #[test]
    fn homogeneous_cauchy() {
        let l = c(0.8, 0.3);
        let x = 1.2;
        let il = Complex64::i() * l;
        let v = cauchy_solution(c(1.0, 0.0), il, il * il, l, x, |_| c(0.0, 0.0)).unwrap();
        assert!((v - (il * x).exp()).norm() < 1e-12);
        let w = cauchy_solution(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), l, x, |_| c(0.0, 0.0)).unwrap();
        assert!((w - s_eval(0, il * x).unwrap()).norm() < 1e-14);
    }
}
