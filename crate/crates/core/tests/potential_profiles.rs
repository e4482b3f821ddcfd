mod common;

use common::simpson;
use cubic_string::potential::{Extension, Interpolation, Perturbation, Side};
use cubic_string::Potential;
use proptest::prelude::*;

fn bump(amplitude: f64) -> Potential {
    Potential::step(1.0, 8.0).with_bump(1.0, 0.5, amplitude)
}

#[test]
fn sigma_plus_of_bump_matches_simpson() {
    let p = bump(0.1);
    let want = simpson(|t| 0.1 * (-(t - 1.0f64).powi(2) / 0.5).exp(), 0.0, 12.0, 200_000);
    let got = p.sigma(0.0, Side::Plus).unwrap();
    assert!((got - want).abs() < 1e-12, "{got} vs {want}");
}

#[test]
fn sigma_plus_of_exponential_tail_is_closed_form() {
    let (amp, rate) = (0.2, 1.5);
    let p = Potential { m_plus: 1.0, m_minus: 2.0, a: 0.5, perturbation: Perturbation::ExponentialTail { amplitude: amp, rate } };
    for x in [0.0, 0.7, 2.0] {
        let got = p.sigma(x, Side::Plus).unwrap();
        let want = amp / rate * (-rate * x).exp();
        assert!((got - want).abs() < 1e-12, "x = {x}: {got} vs {want}");
    }
}

#[test]
fn m_profile_at_zero_matches_midpoint_sum() {
    let p = bump(0.3);
    let n = 1_000_000;
    let (a, b) = (0.0, 12.0);
    let h = (b - a) / n as f64;
    let want: f64 = (0..n)
        .map(|k| {
            let t = a + h * (k as f64 + 0.5);
            0.5 * t * t * (p.m_at(t) / p.m_plus - 1.0)
        })
        .sum::<f64>()
        * h;
    let got = p.m_profile(0.0, Side::Plus).unwrap();
    assert!((got - want).abs() < 1e-8, "{got} vs {want}");
}

#[test]
fn third_derivative_of_profiles() {
    let p = bump(0.3);
    let h = 0.01;
    let d3 = |side: Side, x: f64| {
        let f = |k: f64| p.m_profile(x + k * h, side).unwrap();
        (f(2.0) - 2.0 * f(1.0) + 2.0 * f(-1.0) - f(-2.0)) / (2.0 * h * h * h)
    };
    // M₊''' = −(m/m₊ − 1)
    assert!((d3(Side::Plus, 1.0) + (p.m_at(1.0) / p.m_plus - 1.0)).abs() < 1e-4);
    // M₋''' = +(m/m₋ − 1), checked where the reflected bump lives
    let r = p.reflected();
    let d3m = {
        let f = |k: f64| r.m_profile(-1.0 + k * h, Side::Minus).unwrap();
        (f(2.0) - 2.0 * f(1.0) + 2.0 * f(-1.0) - f(-2.0)) / (2.0 * h * h * h)
    };
    assert!((d3m - (r.m_at(-1.0) / r.m_minus - 1.0)).abs() < 1e-4);
}

#[test]
fn table_without_decay_is_flagged() {
    let p = Potential {
        m_plus: 1.0,
        m_minus: 8.0,
        a: 1.0,
        perturbation: Perturbation::Table {
            x: vec![-1.0, 0.0, 1.0],
            values: vec![0.1, 0.2, 0.1],
            rule: Interpolation::Linear,
            outside: Extension::Hold,
        },
    };
    let r = p.validate();
    assert!(!r.ok());
    assert!(r.weighted_norm_plus.is_none() || r.weighted_norm_minus.is_none());
}

#[test]
fn admissible_bump_validates() {
    let r = bump(0.3).validate();
    assert!(r.ok(), "{:?}", r.issues);
    assert!(r.positive && r.m_min > 0.0);
}

#[test]
fn negative_limits_are_rejected() {
    assert!(Potential::step(-1.0, 8.0).check().is_err());
    assert!(Potential { a: 0.0, ..Potential::step(1.0, 8.0) }.check().is_err());
}

proptest! {
    #[test]
    fn reflection_mirrors_the_coefficient(center in -2.0..2.0f64, width in 0.2..1.0f64, amp in -0.5..0.5f64, x in -4.0..4.0f64) {
        prop_assume!(x != 0.0);
        let p = Potential::step(1.0, 8.0).with_bump(center, width, amp);
        let r = p.reflected();
        prop_assert!((r.m_at(-x) - p.m_at(x)).abs() < 1e-14 * p.m_at(x).abs().max(1.0));
        prop_assert_eq!(r.reflected(), p);
    }

    #[test]
    fn sigma_is_monotone(amp in 0.01..0.5f64, x in 0.0..3.0f64) {
        let p = bump(amp);
        let a = p.sigma(x, Side::Plus).unwrap();
        let b = p.sigma(x + 0.1, Side::Plus).unwrap();
        prop_assert!(b <= a + 1e-15);
    }
}
