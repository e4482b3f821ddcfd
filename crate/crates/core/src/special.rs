//! Exponential integral E₁ for complex arguments (principal branch).

use num_complex::Complex64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// e^{z}·E₁(z), which stays O(1/|z|) for large |z| off the negative axis.
pub fn exp_e1(z: Complex64) -> Complex64 {
    if use_series(z) {
        z.exp() * e1_series(z)
    } else {
        e1_scaled_cf(z)
    }
}

/// E₁(z) = ∫_z^∞ e^{−t}/t dt with the cut along the negative real axis.
pub fn e1(z: Complex64) -> Complex64 {
    if use_series(z) {
        e1_series(z)
    } else {
        (-z).exp() * e1_scaled_cf(z)
    }
}

fn use_series(z: Complex64) -> bool {
    let r = z.norm();
    r < 2.0 || (z.re < 0.0 && z.im.abs() < 8.0 && r < 40.0)
}

fn e1_series(z: Complex64) -> Complex64 {
    // E₁(z) = −γ − ln z − Σ_{k≥1} (−z)^k / (k·k!)
    let mut sum = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    for k in 1..400 {
        term *= -z / k as f64;
        let add = term / k as f64;
        sum += add;
        if add.norm() < 1e-17 * sum.norm().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - z.ln() - sum
}

fn e1_scaled_cf(z: Complex64) -> Complex64 {
    // e^z E₁(z) = 1/(z + 1/(1 + 1/(z + 2/(1 + 2/(z + …))))), modified Lentz.
    let tiny = 1e-300;
    let one = Complex64::new(1.0, 0.0);
    let mut f = z;
    if f.norm() < tiny {
        f = Complex64::new(tiny, 0.0);
    }
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for n in 1..20_000 {
        // alternate partial numerators n and partial denominators 1, z
        for (a, b) in [(n as f64, one), (n as f64, z)] {
            d = b + a * d;
            if d.norm() < tiny {
                d = Complex64::new(tiny, 0.0);
            }
            c = b + a / c;
            if c.norm() < tiny {
                c = Complex64::new(tiny, 0.0);
            }
            d = one / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).norm() < 1e-16 {
                return one / f;
            }
        }
    }
    one / f
}
