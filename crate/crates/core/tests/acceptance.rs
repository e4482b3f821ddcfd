//! One pass/fail line per acceptance criterion.
//!
//! Criteria 1, 3 and 4 are stated with an absolute identity residual, a
//! +3√3 Wronskian constant and swapped-root scalar laws. Those literal forms
//! fail; each line also reports the corrected form (term-scaled residual,
//! −3√3, J-forms). The target exits non-zero if any other criterion fails or
//! if a corrected form fails.

use cubic_string::cauchy::{boundary_value, principal_value, BoundarySide, RayDensity};
use cubic_string::geometry::{SQRT3, ZETA};
use cubic_string::inverse::{recover_m, HalfAxis, HalfAxisSolver};
use cubic_string::jost::{self, kernel_bound_check, Backend, Family};
use cubic_string::quad::PanelGrid;
use cubic_string::scattering::{self, compute_scattering_data, conservation_report, wronskian3};
use cubic_string::trig3::{s_eval, s_triple};
use cubic_string::verify::{bump_potential, disk_points, excision_pv, manufactured_pole_error, scaled_identity_residual};
use cubic_string::{Complex64, Potential, Result};
use std::time::Instant;

const KNOWN_LITERAL_FAILURES: [usize; 3] = [1, 3, 4];

struct Outcome {
    criterion: usize,
    passed: bool,
    /// Verdict with the corrected forms, for criteria judged on a literal form.
    corrected: Option<bool>,
    detail: String,
}

fn max(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

fn criterion_1() -> Result<Outcome> {
    let start = Instant::now();
    let pts = disk_points(1000, 5.0);
    let mut abs_res: f64 = 0.0;
    let mut scaled: f64 = 0.0;
    let mut euler: f64 = 0.0;
    for &z in &pts {
        let t = s_triple(z)?;
        abs_res = abs_res.max(t.main_identity_residual());
        scaled = scaled.max(scaled_identity_residual(&t));
        for k in 0..3 {
            euler = euler.max((t.euler(k) - (ZETA[k] * z).exp()).norm());
        }
    }
    // five-point central differences, h = 1e-3
    let h = 1e-3;
    let mut cycle: f64 = 0.0;
    for &z in &pts {
        for k in 0..3 {
            let f = |d: f64| s_eval(k, z + d);
            let fd = (f(-2.0 * h)? - 8.0 * f(-h)? + 8.0 * f(h)? - f(2.0 * h)?) / (12.0 * h);
            let want = s_eval((k + 2) % 3, z)?;
            cycle = cycle.max((fd - want).norm() / want.norm().max(1.0));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let common = euler <= 1e-12 && cycle <= 1e-8 && secs < 1.0;
    Ok(Outcome {
        criterion: 1,
        passed: abs_res <= 1e-12 && common,
        corrected: Some(scaled <= 1e-14 && common),
        detail: format!(
            "main identity |residual| {abs_res:.2e} (tol 1e-12), term-scaled {scaled:.2e}; Euler {euler:.2e} (tol 1e-12); \
             derivative cycle {cycle:.2e} (tol 1e-8); {secs:.2} s"
        ),
    })
}

fn criterion_2() -> Result<Outcome> {
    let start = Instant::now();
    let p = bump_potential(0.3);
    let disk = p.validity_disk();
    let r = disk.radius_plus.min(disk.radius_minus);
    let lams = disk_points(20, 0.9 * r);
    let mut rel: f64 = 0.0;
    let mut margin: f64 = 0.0;
    for &lam in &lams {
        for fam in [Family::V, Family::U] {
            for k in 0..3 {
                let (a, _) = jost::normalized(&p, fam, lam, k, 0.3, Backend::Neumann)?;
                let (b, _) = jost::normalized(&p, fam, lam, k, 0.3, Backend::Ode)?;
                rel = rel.max(max((0..3).map(|i| (a[i] - b[i]).norm() / b[i].norm().max(1e-300))));
            }
            margin = margin.max(kernel_bound_check(&p, fam, lam, 0, 10)?.max_margin());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(Outcome {
        criterion: 2,
        passed: rel <= 1e-6 && margin <= 1.0 && secs < 30.0,
        corrected: None,
        detail: format!(
            "Neumann vs ODE at 20 λ in |λ| ≤ {:.3}: rel {rel:.2e} (tol 1e-6); kernel margin n ≤ 10: {margin:.3} (tol 1); {secs:.1} s",
            0.9 * r
        ),
    })
}

fn criterion_3() -> Result<Outcome> {
    let p = bump_potential(0.3);
    let mut literal: f64 = 0.0;
    let mut derived: f64 = 0.0;
    for lam in [Complex64::new(0.4, -0.3), Complex64::new(-0.7, 0.2), Complex64::new(0.1, 0.9)] {
        let v: Vec<_> = (0..3).map(|k| jost::solve_v(&p, lam, k, 0.5).map(|r| r.0)).collect::<Result<_>>()?;
        let ratio = wronskian3(&v[0], &v[1], &v[2])? / (3.0 * SQRT3 * p.m_plus * lam.powu(3));
        literal = literal.max((ratio - 1.0).norm());
        derived = derived.max((ratio + 1.0).norm());
    }
    let lam = Complex64::new(0.3, -0.2);
    let rows: Vec<_> =
        [-0.5, 0.7, 2.0].iter().map(|&x| scattering::row0_at(&p, lam, x, Backend::Auto)).collect::<Result<_>>()?;
    let base = rows[0];
    let spread = max(rows.iter().flat_map(|r| (0..3).map(move |l| (r[l] - base[l]).norm())));
    Ok(Outcome {
        criterion: 3,
        passed: literal <= 1e-6 && spread <= 1e-6,
        corrected: Some(derived <= 1e-6 && spread <= 1e-6),
        detail: format!(
            "W/(+3√3 m₊λ³) − 1: {literal:.2e} (tol 1e-6); against −3√3 m₊λ³: {derived:.2e}; row-0 x-spread {spread:.2e} (tol 1e-6)"
        ),
    })
}

fn criterion_4() -> Result<Outcome> {
    let lams: Vec<Complex64> = disk_points(20, 1.5);
    let mut lines = Vec::new();
    let mut literal = true;
    let mut corrected = true;
    for (name, p, product_tol) in
        [("step", Potential::step(1.0, 8.0), 1e-10), ("bump", bump_potential(0.3), 1e-6)]
    {
        let reps: Vec<_> = lams.iter().map(|&l| conservation_report(&p, l)).collect::<Result<_>>()?;
        let w = |f: fn(&scattering::ConservationReport) -> f64| max(reps.iter().map(f));
        let (det, ju, prod, bal) = (w(|r| r.det_rel), w(|r| r.j_unitarity), w(|r| r.dual_product), w(|r| r.energetic_balance));
        let (up, uj) = (w(|r| r.unitarity_swapped), w(|r| r.unitarity_j));
        let (dp, dj) = (w(|r| r.dual_unitarity_swapped), w(|r| r.dual_unitarity_j));
        let (rp, rs, rj) = (w(|r| r.reciprocity_swapped), w(|r| r.reciprocity_symmetric), w(|r| r.reciprocity_j));
        let shared = det <= 1e-6 && ju <= 1e-6 && prod <= product_tol && bal <= 1e-6;
        literal &= shared && up <= 1e-6 && dp <= 1e-6 && rp <= 1e-6;
        corrected &= shared && uj <= 1e-6 && dj <= 1e-6 && rj <= 1e-6;
        lines.push(format!(
            "{name}: det {det:.1e}, TJT* {ju:.1e}, T̃T {prod:.1e} (tol {product_tol:.0e}), balance {bal:.1e}, \
             unitarity swapped {up:.1e} / J-form {uj:.1e}, dual unitarity swapped {dp:.1e} / J-form {dj:.1e}, \
             reciprocity swapped {rp:.1e} / symmetric {rs:.1e} / J-form {rj:.1e}"
        ));
    }
    Ok(Outcome { criterion: 4, passed: literal, corrected: Some(corrected), detail: lines.join("; ") })
}

fn criterion_5() -> Result<Outcome> {
    let p = Potential::step(1.0, 8.0);
    let want = [
        Complex64::new(7.0 / 3.0, 0.0),
        Complex64::new(-2.0, SQRT3) / 3.0,
        Complex64::new(-2.0, -SQRT3) / 3.0,
    ];
    let mut err: f64 = 0.0;
    for lam in [Complex64::new(0.4, -0.3), Complex64::new(-1.1, 0.6), Complex64::new(0.0, 2.0)] {
        let t = scattering::transition_matrix(&p, lam)?;
        err = err.max(max((0..3).map(|l| (t.t[0][l] - want[l]).norm())));
        err = err.max((t.det() - 8.0).norm());
    }
    Ok(Outcome { criterion: 5, passed: err <= 1e-8, corrected: None, detail: format!("max entry/det error {err:.2e} (tol 1e-8)") })
}

fn criterion_6() -> Result<Outcome> {
    let t_max = 6.0;
    let grid = PanelGrid::graded(t_max, 10, 16, 0.1, 2.0)?;
    let f1 = |t: f64| Complex64::new((-t).exp(), 0.0) * Complex64::from_polar(1.0, 0.3 * t);
    let f2 = |t: f64| Complex64::new(1.0 / (1.0 + t * t), 0.0);
    let mut jump: f64 = 0.0;
    let mut pv: f64 = 0.0;
    for f in [&f1 as &dyn Fn(f64) -> Complex64, &f2] {
        let d = RayDensity::from_fn(0.0, grid.clone(), f);
        for t in [0.37, 1.0, 2.9] {
            let l = boundary_value(&d, t, BoundarySide::Left)?;
            let r = boundary_value(&d, t, BoundarySide::Right)?;
            jump = jump.max((l - r - f(t)).norm());
            pv = pv.max((principal_value(&d, t)? - excision_pv(&f, t, t_max)?).norm());
        }
    }
    Ok(Outcome {
        criterion: 6,
        passed: jump <= 1e-10 && pv <= 1e-8,
        corrected: None,
        detail: format!("Plemelj jump {jump:.2e} (tol 1e-10); PV vs excision {pv:.2e} (tol 1e-8)"),
    })
}

fn round_trip(p: &Potential, grid: &PanelGrid, x_direct: &[f64], x_dual: &[f64]) -> Result<(f64, f64, f64)> {
    let d = compute_scattering_data(p, grid, None)?;
    let mut err: f64 = 0.0;
    let mut err_a: f64 = 0.0;
    let mut cond: f64 = 0.0;
    for (side, xs) in [(HalfAxis::Direct, x_direct), (HalfAxis::Dual, x_dual)] {
        let s = HalfAxisSolver::new(&d, side)?;
        let f = recover_m(&s, xs, &[])?;
        cond = cond.max(f.max_condition);
        for (i, &x) in xs.iter().enumerate() {
            // x = 0 on the dual side is the left limit
            let truth = p.m_at(if side == HalfAxis::Dual { x.min(-1e-300) } else { x });
            err = err.max((f.m_route_b[i] - truth).abs() / truth);
            err_a = err_a.max((f.m_route_a[i] - truth).abs() / truth);
        }
    }
    Ok((err, err_a, cond))
}

fn criterion_7() -> Result<Outcome> {
    let start = Instant::now();
    let grid = PanelGrid::graded(6.0, 8, 16, 0.1, 2.0)?;
    let xd: Vec<f64> = (0..60).map(|k| 3.0 * k as f64 / 59.0).collect();
    let xm: Vec<f64> = xd.iter().map(|x| -x).collect();
    let (err, err_a, cond) = round_trip(&Potential::step(1.0, 8.0), &grid, &xd, &xm)?;
    let secs = start.elapsed().as_secs_f64();
    Ok(Outcome {
        criterion: 7,
        passed: err <= 1e-3 && secs < 300.0,
        corrected: None,
        detail: format!(
            "N_τ = {}, 60 x-nodes per side: amplitude route rel {err:.2e} (tol 1e-3), travel-time route {err_a:.2e}; \
             max condition {cond:.1e}; {secs:.1} s",
            grid.len()
        ),
    })
}

fn criterion_8() -> Result<Outcome> {
    let start = Instant::now();
    let p = bump_potential(0.05);
    let grid = PanelGrid::graded(15.0, 16, 16, 0.1, 2.0)?;
    // bump centre 1, width 0.5: |x − 1| ≤ 3·0.5, extended to [0, 3] on the right
    let xd: Vec<f64> = (0..31).map(|k| 0.1 * k as f64).collect();
    let xm: Vec<f64> = (0..11).map(|k| -0.05 * k as f64).collect();
    let (err, err_a, cond) = round_trip(&p, &grid, &xd, &xm)?;
    let secs = start.elapsed().as_secs_f64();
    Ok(Outcome {
        criterion: 8,
        passed: err <= 5e-2,
        corrected: None,
        detail: format!(
            "amplitude route sup rel {err:.2e} on [-0.5, 3] (tol 5e-2), travel-time route {err_a:.2e}; \
             measured max condition {cond:.1e}; {secs:.1} s"
        ),
    })
}

fn criterion_9() -> Result<Outcome> {
    let b = scattering::find_bound_states(&Potential::step(1.0, 8.0), 5.0)?;
    let empty = b.mu.is_empty() && b.nu.is_empty();
    let mut res: f64 = 0.0;
    for side in [HalfAxis::Direct, HalfAxis::Dual] {
        for xi in [0.5, 1.0, 2.0] {
            res = res.max(manufactured_pole_error(side, xi)?);
        }
    }
    Ok(Outcome {
        criterion: 9,
        passed: empty && res <= 1e-6,
        corrected: None,
        detail: format!(
            "pure-step search: {} zeros; manufactured residues, both half-axes: {res:.2e} (tol 1e-6)",
            b.mu.len() + b.nu.len()
        ),
    })
}

fn main() {
    let runs: [fn() -> Result<Outcome>; 9] =
        [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9];
    let mut unexpected = Vec::new();
    for (i, run) in runs.iter().enumerate() {
        let n = i + 1;
        match run() {
            Ok(o) => {
                let verdict = if o.passed { "PASS" } else { "FAIL" };
                let note = match o.corrected {
                    Some(true) if !o.passed => " [literal form; corrected form passes]",
                    Some(false) => " [corrected form also fails]",
                    _ => "",
                };
                println!("criterion {}: {verdict}{note}  {}", o.criterion, o.detail);
                let tolerated = KNOWN_LITERAL_FAILURES.contains(&n) && o.corrected == Some(true);
                if !o.passed && !tolerated {
                    unexpected.push(n);
                }
            }
            Err(e) => {
                println!("criterion {n}: FAIL  error: {e}");
                unexpected.push(n);
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
