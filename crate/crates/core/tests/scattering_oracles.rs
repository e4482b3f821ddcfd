mod common;

use common::c;
use cubic_string::geometry::{SQRT3, ZETA};
use cubic_string::jost::Backend;
use cubic_string::quad::PanelGrid;
use cubic_string::scattering::{
    compute_scattering_data, conservation_report, find_bound_states, row0, row0_at, step_row0, transition_matrix,
    coefficients,
};
use cubic_string::{Complex64, Potential};
use proptest::prelude::*;

fn bump(amp: f64) -> Potential {
    Potential::step(1.0, 8.0).with_bump(1.0, 0.5, amp)
}

/// Row 0 of the pure step by matching e^{iλn₋x} to Σ c_j e^{iλn₊ζ_j x} at x = 0:
/// continuity of y, y', y'' is a Vandermonde system, solved here by Cramer's rule.
fn step_row0_by_matching(kappa: f64) -> [Complex64; 3] {
    let a: [[Complex64; 3]; 3] = std::array::from_fn(|p| std::array::from_fn(|j| ZETA[j].powu(p as u32)));
    let b: [Complex64; 3] = std::array::from_fn(|p| Complex64::from(kappa.powi(p as i32)));
    let det = |m: &[[Complex64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&a);
    std::array::from_fn(|j| {
        let mut m = a;
        for p in 0..3 {
            m[p][j] = b[p];
        }
        det(&m) / d
    })
}

#[test]
fn step_coefficients_match_frozen_values() {
    // frozen from the matching oracle at κ = 2
    let r0 = c(3.0 / 7.0, 0.0);
    let s1 = c(-2.0, SQRT3) / 7.0;
    let s2 = c(-2.0, -SQRT3) / 7.0;
    let m = step_row0_by_matching(2.0);
    assert!((1.0 / m[0] - r0).norm() < 1e-14);
    assert!((m[1] / m[0] - s1).norm() < 1e-14);
    assert!((m[2] / m[0] - s2).norm() < 1e-14);

    let p = Potential::step(1.0, 8.0);
    for lam in [c(0.3, -0.2), c(-1.0, -0.5), c(2.0, 1.0), c(0.0, -3.0)] {
        let t = transition_matrix(&p, lam).unwrap();
        let k = coefficients(&t).unwrap();
        assert!((k.r0 - r0).norm() < 1e-12, "r0 at {lam}: {}", k.r0);
        assert!((k.s1 - s1).norm() < 1e-12, "s1 at {lam}: {}", k.s1);
        assert!((k.s2 - s2).norm() < 1e-12, "s2 at {lam}: {}", k.s2);
        assert!((t.det() - 8.0).norm() < 1e-11, "det at {lam}: {}", t.det());
    }
}

#[test]
fn closed_form_row_agrees_with_matching() {
    for kappa in [0.5, 1.0, 2.0, 3.7] {
        let a = step_row0(kappa);
        let b = step_row0_by_matching(kappa);
        for l in 0..3 {
            assert!((a[l] - b[l]).norm() < 1e-13 * (1.0 + kappa * kappa), "κ={kappa} l={l}");
        }
    }
}

#[test]
fn step_conservation_laws_are_exact() {
    let p = Potential::step(1.0, 8.0);
    for lam in [c(0.4, 0.3), c(-1.2, 0.7), c(0.05, -0.02)] {
        let r = conservation_report(&p, lam).unwrap();
        for (name, v) in [
            ("det", r.det_rel),
            ("j_unitarity", r.j_unitarity),
            ("dual_product", r.dual_product),
            ("energetic_balance", r.energetic_balance),
            ("unitarity_j", r.unitarity_j),
            ("dual_unitarity_j", r.dual_unitarity_j),
            ("reciprocity_j", r.reciprocity_j),
        ] {
            assert!(v <= 1e-10, "{name} at {lam}: {v:e}");
        }
    }
}

#[test]
fn bump_conservation_laws_hold_at_small_lambda() {
    let p = bump(0.3);
    let lam = c(0.05, 0.0);
    let r = conservation_report(&p, lam).unwrap();
    for (name, v) in [
        ("det", r.det_rel),
        ("j_unitarity", r.j_unitarity),
        ("dual_product", r.dual_product),
        ("energetic_balance", r.energetic_balance),
        ("unitarity_j", r.unitarity_j),
        ("dual_unitarity_j", r.dual_unitarity_j),
        ("reciprocity_j", r.reciprocity_j),
    ] {
        assert!(v <= 1e-6, "{name}: {v:e}");
    }
}

#[test]
fn pure_step_has_no_bound_states() {
    let b = find_bound_states(&Potential::step(1.0, 8.0), 5.0).unwrap();
    assert!(b.mu.is_empty() && b.nu.is_empty());
    assert_eq!(b.sector_zero_count, Some(0));
}

#[test]
fn row0_does_not_depend_on_x() {
    let p = bump(0.3);
    for lam in [c(0.5, -0.3), c(-0.8, 0.4)] {
        let base = row0_at(&p, lam, 0.0, Backend::Auto).unwrap();
        for x in [-2.0, -0.5, 0.7, 1.3, 3.0] {
            let r = row0_at(&p, lam, x, Backend::Auto).unwrap();
            let spread = (0..3).map(|l| (r[l] - base[l]).norm() / base[l].norm()).fold(0.0, f64::max);
            assert!(spread <= 1e-8, "λ={lam} x={x}: {spread:e}");
        }
    }
}

#[test]
fn sampled_data_of_step_is_constant() {
    let grid = PanelGrid::graded(4.0, 2, 8, 0.5, 2.0).unwrap();
    let d = compute_scattering_data(&Potential::step(1.0, 8.0), &grid, None).unwrap();
    let r0 = c(3.0 / 7.0, 0.0);
    for i in 0..grid.len() {
        for v in [d.direct.r0_210[i], d.direct.r0_270[i], d.direct.r0_330[i]] {
            assert!((v - r0).norm() < 1e-12);
        }
        // r̃₀ = κ²/conj t₀₀ = 4·3/7
        for v in [d.dual.r0_30[i], d.dual.r0_90[i], d.dual.r0_150[i]] {
            assert!((v - c(12.0 / 7.0, 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn unit_contrast_is_reflectionless() {
    let p = Potential::step(2.0, 2.0);
    let r = row0(&p, c(0.7, -0.4)).unwrap();
    assert!((r[0] - 1.0).norm() < 1e-13);
    assert!(r[1].norm() < 1e-13 && r[2].norm() < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn j_forms_hold_for_bump(r in 0.1..1.5f64, a in 0.0..std::f64::consts::TAU) {
        let lam = Complex64::from_polar(r, a);
        let rep = conservation_report(&bump(0.2), lam).unwrap();
        let scale = 1.0 + r.powi(3);
        prop_assert!(rep.j_unitarity <= 1e-6 * scale, "j_unitarity {:e}", rep.j_unitarity);
        prop_assert!(rep.dual_product <= 1e-6 * scale, "dual_product {:e}", rep.dual_product);
        prop_assert!(rep.unitarity_j <= 1e-6, "unitarity_j {:e}", rep.unitarity_j);
        prop_assert!(rep.det_rel <= 1e-8, "det {:e}", rep.det_rel);
    }
}
