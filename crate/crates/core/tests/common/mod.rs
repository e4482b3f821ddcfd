//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use cubic_string::Complex64;

/// Classical RK4 for y' = f(x, y) on a fixed step, complex state.
pub fn rk4<const N: usize, F>(f: F, mut y: [Complex64; N], x0: f64, x1: f64, steps: usize) -> [Complex64; N]
where
    F: Fn(f64, &[Complex64; N]) -> [Complex64; N],
{
    let h = (x1 - x0) / steps as f64;
    let add = |a: &[Complex64; N], b: &[Complex64; N], s: f64| {
        let mut o = *a;
        for i in 0..N {
            o[i] += b[i] * s;
        }
        o
    };
    for k in 0..steps {
        let x = x0 + h * k as f64;
        let k1 = f(x, &y);
        let k2 = f(x + h / 2.0, &add(&y, &k1, h / 2.0));
        let k3 = f(x + h / 2.0, &add(&y, &k2, h / 2.0));
        let k4 = f(x + h, &add(&y, &k3, h));
        for i in 0..N {
            y[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
        }
    }
    y
}

/// Composite Simpson rule on [a, b] with n (even) intervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + h * k as f64) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Complex Simpson rule.
pub fn simpson_c<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, n: usize) -> Complex64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + h * k as f64) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * (h / 3.0)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
