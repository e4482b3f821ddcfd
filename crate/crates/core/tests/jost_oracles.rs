mod common;

use common::{c, rk4};
use cubic_string::geometry::{SQRT3, ZETA};
use cubic_string::jost::{self, kernel_bound_check, Backend, Family};
use cubic_string::potential::Side;
use cubic_string::scattering::wronskian3;
use cubic_string::{Complex64, Potential};
use proptest::prelude::*;

fn bump(amplitude: f64) -> Potential {
    Potential::step(1.0, 8.0).with_bump(1.0, 0.5, amplitude)
}

/// v_k by RK4 from x = 20, seeded with the plane wave e^{iλn₊ζ_k x}.
/// The step at 0 is a panel boundary, with m evaluated on the correct side.
fn v_by_rk4(p: &Potential, lam: Complex64, k: usize, x: f64) -> [Complex64; 3] {
    let kk = Complex64::i() * lam * p.m_plus.cbrt() * ZETA[k];
    let x0 = 20.0;
    let e = (kk * x0).exp();
    let l3 = lam * lam * lam;
    let rhs = |clamp: fn(f64) -> f64| {
        move |t: f64, y: &[Complex64; 3]| [y[1], y[2], -Complex64::i() * p.m_at(clamp(t)) * l3 * y[0]]
    };
    let mid = x.max(0.0);
    let y = rk4(rhs(|t| t.max(0.0)), [e, kk * e, kk * kk * e], x0, mid, 40_000);
    if x >= 0.0 {
        y
    } else {
        rk4(rhs(|t| t.min(-f64::MIN_POSITIVE)), y, 0.0, x, 4_000)
    }
}

#[test]
fn v0_matches_back_integration() {
    let p = bump(0.3);
    for (lam, k, x) in [(c(0.0, 0.1), 0, 0.0), (c(0.0, 0.1), 0, 0.8), (c(0.2, -0.15), 1, 0.3), (c(-0.1, 0.2), 2, -0.5)] {
        let (v, _) = jost::solve(&p, Family::V, lam, k, x, Backend::Auto).unwrap();
        let want = v_by_rk4(&p, lam, k, x);
        let got = v.triple();
        for i in 0..3 {
            let rel = (got[i] - want[i]).norm() / want[i].norm();
            assert!(rel < 1e-6, "λ={lam} k={k} x={x} component {i}: rel {rel:e}");
        }
    }
}

#[test]
fn constant_coefficient_wronskians() {
    let p = Potential::step(1.0, 8.0);
    let lam = c(0.7, 0.2);
    for (fam, m, x) in [(Family::V, p.m_plus, 0.4), (Family::U, p.m_minus, -0.4)] {
        let e: Vec<_> = (0..3).map(|k| jost::solve(&p, fam, lam, k, x, Backend::Auto).unwrap().0).collect();
        let w = wronskian3(&e[0], &e[1], &e[2]).unwrap();
        let want = -3.0 * SQRT3 * m * lam * lam * lam;
        assert!((w - want).norm() < 1e-12 * want.norm(), "{fam:?}: {w} vs {want}");
    }
}

#[test]
fn kernel_bounds_hold() {
    let p = bump(0.3);
    let r = p.validity_disk().radius_plus;
    for lam in [c(0.5 * r, 0.0), c(0.0, 0.5 * r), c(-0.3 * r, -0.4 * r)] {
        for fam in [Family::V, Family::U] {
            let rep = kernel_bound_check(&p, fam, lam, 0, 10).unwrap();
            assert!(rep.max_margin() <= 1.0, "{fam:?} at {lam}: margin {}", rep.max_margin());
        }
    }
}

#[test]
fn small_lambda_limit_is_minus_m_profile() {
    let p = bump(0.3);
    let x = 0.5;
    let want = -p.m_profile(x, Side::Plus).unwrap();
    let mut prev = f64::INFINITY;
    for r in [1e-2, 3e-3, 1e-3] {
        let lam = Complex64::from_polar(r, 1.2);
        let z = lam * p.m_plus.cbrt();
        let psi = jost::psi(&p, lam, 0, x).unwrap();
        let iz = Complex64::i() * z;
        let est = (psi - 1.0) / (iz * iz * iz);
        let err = (est - want).norm();
        assert!(err < prev, "no convergence at |λ| = {r}");
        prev = err;
    }
    assert!(prev < 5e-3 * want.abs(), "error {prev}");
}

#[test]
fn neumann_series_reports_diagnostics() {
    let p = bump(0.3);
    let (_, d) = jost::solve(&p, Family::V, c(0.1, 0.1), 0, 0.0, Backend::Neumann).unwrap();
    assert!(d.terms_used > 1 && d.last_term_norm < jost::TERM_TOL);
    assert!(d.bound_margin <= 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn backends_agree_inside_validity_disk(r in 0.05..0.9f64, a in 0.0..std::f64::consts::TAU, x in -1.0..2.0f64) {
        let p = bump(0.3);
        let rad = p.validity_disk().radius_plus.min(p.validity_disk().radius_minus);
        let lam = Complex64::from_polar(r * rad, a);
        for fam in [Family::V, Family::U] {
            let (n, _) = jost::normalized(&p, fam, lam, 0, x, Backend::Neumann).unwrap();
            let (o, _) = jost::normalized(&p, fam, lam, 0, x, Backend::Ode).unwrap();
            for i in 0..3 {
                prop_assert!((n[i] - o[i]).norm() <= 1e-8 * o[i].norm().max(1e-3));
            }
        }
    }
}
