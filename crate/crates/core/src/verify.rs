//! Invariant suite: one measured residual per check, grouped by module.

use crate::cauchy::{boundary_value, principal_value, BoundarySide, RayDensity};
use crate::error::{Error, Result};
use crate::geometry::{classify, ZETA};
use crate::inverse::{recover_m, HalfAxis, HalfAxisSolver, Pole};
use crate::io;
use crate::jost::{self, Backend, Family};
use crate::potential::{Potential, Side};
use crate::quad::{self, PanelGrid};
use crate::scattering::{self, adjoint, involution_j, mat_mul, max_abs_diff, Mat3, TransitionMatrix};
use crate::trig3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Module {
    Geometry,
    Trig3,
    Potential,
    Jost,
    Scattering,
    Cauchy,
    Inverse,
    Cli,
}

impl Module {
    pub const ALL: [Module; 8] = [
        Module::Geometry,
        Module::Trig3,
        Module::Potential,
        Module::Jost,
        Module::Scattering,
        Module::Cauchy,
        Module::Inverse,
        Module::Cli,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Module::Geometry => "geometry",
            Module::Trig3 => "trig3",
            Module::Potential => "potential",
            Module::Jost => "jost",
            Module::Scattering => "scattering",
            Module::Cauchy => "cauchy",
            Module::Inverse => "inverse",
            Module::Cli => "cli",
        }
    }
}

impl fmt::Display for Module {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Module {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Module::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown module {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SuiteOptions {
    pub only: Option<Module>,
    /// Flip the sign of one entry of J before checking J-unitarity.
    pub mutate_j: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub module: Module,
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

fn check(module: Module, name: &str, tolerance: f64, measured: Result<f64>) -> CheckResult {
    match measured {
        Ok(m) => CheckResult {
            module,
            name: name.into(),
            measured: m,
            tolerance,
            passed: m.is_finite() && m <= tolerance,
            error: None,
        },
        Err(e) => CheckResult {
            module,
            name: name.into(),
            measured: f64::NAN,
            tolerance,
            passed: false,
            error: Some(e.to_string()),
        },
    }
}

/// Deterministic points filling the disk |z| ≤ r (golden-angle spiral).
pub fn disk_points(n: usize, r: f64) -> Vec<Complex64> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| Complex64::from_polar(r * ((k as f64 + 0.5) / n as f64).sqrt(), golden * k as f64))
        .collect()
}

/// The built-in test coefficient: κ = 2 step with a Gaussian bump at x = 1.
pub fn bump_potential(amplitude: f64) -> Potential {
    Potential::step(1.0, 8.0).with_bump(1.0, 0.5, amplitude)
}

/// max |T J' T*(λ̄) − κ²J'| for an arbitrary J'.
pub fn j_unitarity_with(t: &TransitionMatrix, tc: &TransitionMatrix, j: &Mat3) -> f64 {
    let lhs = mat_mul(&mat_mul(&t.t, j), &adjoint(&tc.t));
    let mut rhs = *j;
    for row in rhs.iter_mut() {
        for v in row.iter_mut() {
            *v *= t.kappa * t.kappa;
        }
    }
    max_abs_diff(&lhs, &rhs)
}

/// Residual of the main identity scaled by the size of its terms.
pub fn scaled_identity_residual(t: &trig3::TrigTriple) -> f64 {
    let (a, b, c) = (t.s0.norm(), t.s1.norm(), t.s2.norm());
    t.main_identity_residual() / (1.0 + a * a * a + b * b * b + c * c * c + 3.0 * a * b * c)
}

fn worst<I: Iterator<Item = Result<f64>>>(mut it: I) -> Result<f64> {
    it.try_fold(0.0, |a, r| Ok(f64::max(a, r?)))
}

fn geometry_checks() -> Vec<CheckResult> {
    let m = Module::Geometry;
    let roots = (0..3).map(|k| (ZETA[k].powu(3) - 1.0).norm()).fold((1.0 + ZETA[1] + ZETA[2]).norm(), f64::max);
    let pts = disk_points(200, 3.0);
    let mismatches = pts.iter().filter(|&&z| classify(-z) != classify(z).reflect()).count();
    vec![
        check(m, "cube_roots", 1e-15, Ok(roots)),
        check(m, "central_reflection", 0.0, Ok(mismatches as f64)),
    ]
}

fn trig3_checks() -> Vec<CheckResult> {
    let m = Module::Trig3;
    let pts = disk_points(1000, 5.0);
    let scaled = worst(pts.iter().map(|&z| trig3::s_triple(z).map(|t| scaled_identity_residual(&t))));
    let euler = worst(pts
        .iter()
        .map(|&z| trig3::s_triple(z).map(|t| {
            let scale = 1.0 + t.s0.norm() + t.s1.norm() + t.s2.norm();
            (0..3).map(|k| (t.euler(k) - (ZETA[k] * z).exp()).norm() / scale).fold(0.0, f64::max)
        })));
    let h = 1e-4;
    let cycle = pts.iter().take(100).map(|&z| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for k in 0..3 {
            let d = (trig3::s_eval(k, z + h)? - trig3::s_eval(k, z - h)?) / (2.0 * h);
            let prev = trig3::s_eval((k + 2) % 3, z)?;
            worst = worst.max((d - prev).norm() / prev.norm().max(1.0));
        }
        Ok(worst)
    });
    let cycle = worst(cycle);
    vec![
        check(m, "main_identity_scaled", 1e-14, scaled),
        check(m, "euler_formula_scaled", 1e-14, euler),
        check(m, "derivative_cycle", 1e-7, cycle),
    ]
}

fn potential_checks() -> Vec<CheckResult> {
    let m = Module::Potential;
    let p = bump_potential(0.3);
    let validity = if p.validate().ok() { 0.0 } else { 1.0 };
    // M₊''' = −(m/m₊ − 1) by central differences
    let third = || -> Result<f64> {
        let h = 0.02;
        let mut worst: f64 = 0.0;
        for x in [0.3, 0.8, 1.4] {
            let f = |k: f64| p.m_profile(x + k * h, Side::Plus);
            let d3 = (f(2.0)? - 2.0 * f(1.0)? + 2.0 * f(-1.0)? - f(-2.0)?) / (2.0 * h * h * h);
            worst = worst.max((d3 + (p.m_at(x) / p.m_plus - 1.0)).abs());
        }
        Ok(worst)
    };
    vec![check(m, "admissible_bump", 0.0, Ok(validity)), check(m, "profile_third_derivative", 1e-3, third())]
}

fn jost_checks() -> Vec<CheckResult> {
    let m = Module::Jost;
    let p = bump_potential(0.3);
    let agree = || -> Result<f64> {
        let r = p.validity_disk().radius_plus.min(p.validity_disk().radius_minus);
        let mut worst: f64 = 0.0;
        for lam in disk_points(6, 0.8 * r) {
            for fam in [Family::V, Family::U] {
                let (a, _) = jost::normalized(&p, fam, lam, 0, 0.3, Backend::Neumann)?;
                let (b, _) = jost::normalized(&p, fam, lam, 0, 0.3, Backend::Ode)?;
                worst = worst.max((0..3).map(|i| (a[i] - b[i]).norm() / b[i].norm().max(1e-300)).fold(0.0, f64::max));
            }
        }
        Ok(worst)
    };
    vec![check(m, "neumann_vs_ode", 1e-6, agree())]
}

fn scattering_checks(mutate_j: bool) -> Vec<CheckResult> {
    let m = Module::Scattering;
    let step = Potential::step(1.0, 8.0);
    let oracle = || -> Result<f64> {
        let want = scattering::step_row0(2.0);
        let got = scattering::row0(&step, Complex64::new(0.4, -0.3))?;
        Ok((0..3).map(|l| (got[l] - want[l]).norm()).fold(0.0, f64::max))
    };
    let p = bump_potential(0.3);
    let lams = [Complex64::new(0.3, -0.2), Complex64::new(-0.5, 0.4), Complex64::new(0.8, 0.1)];
    let mut j = involution_j();
    if mutate_j {
        j[1][2] = -j[1][2];
    }
    let laws = |f: &dyn Fn(&scattering::ConservationReport, &TransitionMatrix, &TransitionMatrix) -> f64| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &l in &lams {
            let t = scattering::transition_matrix(&p, l)?;
            let tc = scattering::transition_matrix(&p, l.conj())?;
            let r = scattering::conservation_from(&t, &tc, p.m_minus / p.m_plus)?;
            worst = worst.max(f(&r, &t, &tc));
        }
        Ok(worst)
    };
    let spread = || -> Result<f64> {
        let l = Complex64::new(0.3, -0.2);
        let a = scattering::row0_at(&p, l, 0.0, Backend::Ode)?;
        let b = scattering::row0_at(&p, l, 0.7, Backend::Ode)?;
        Ok((0..3).map(|k| (a[k] - b[k]).norm()).fold(0.0, f64::max))
    };
    vec![
        check(m, "step_closed_form", 1e-8, oracle()),
        check(m, "determinant", 1e-6, laws(&|r, _, _| r.det_rel)),
        check(m, "j_unitarity", 1e-6, laws(&|_, t, tc| j_unitarity_with(t, tc, &j))),
        check(m, "dual_product", 1e-6, laws(&|r, _, _| r.dual_product)),
        check(m, "energetic_balance", 1e-6, laws(&|r, _, _| r.energetic_balance)),
        check(m, "scalar_unitarity_j_form", 1e-6, laws(&|r, _, _| r.unitarity_j)),
        check(m, "dual_unitarity_j_form", 1e-6, laws(&|r, _, _| r.dual_unitarity_j)),
        check(m, "reciprocity_j_form", 1e-6, laws(&|r, _, _| r.reciprocity_j)),
        check(m, "row0_x_independence", 1e-6, spread()),
    ]
}

fn cauchy_checks() -> Vec<CheckResult> {
    let m = Module::Cauchy;
    let run = || -> Result<(f64, f64)> {
        let grid = PanelGrid::graded(6.0, 10, 16, 0.1, 2.0)?;
        let d = RayDensity::from_fn(0.0, grid, |t| Complex64::new((-t).exp(), 0.0) * Complex64::from_polar(1.0, 0.3 * t));
        let f = |t: f64| Complex64::new((-t).exp(), 0.0) * Complex64::from_polar(1.0, 0.3 * t);
        let (mut jump, mut pv): (f64, f64) = (0.0, 0.0);
        for t in [0.37, 1.1, 2.9] {
            let l = boundary_value(&d, t, BoundarySide::Left)?;
            let r = boundary_value(&d, t, BoundarySide::Right)?;
            jump = jump.max((l - r - f(t)).norm());
            let want = excision_pv(&f, t, 6.0)?;
            pv = pv.max((principal_value(&d, t)? - want).norm());
        }
        Ok((jump, pv))
    };
    let r = run();
    vec![
        check(m, "plemelj_jump", 1e-10, r.as_ref().map(|v| v.0).map_err(|e| Error::Invalid(e.to_string()))),
        check(m, "pv_vs_excision", 1e-8, r.map(|v| v.1)),
    ]
}

/// (1/2πi) PV∫₀^T f(s)/(s − t) ds by symmetric excision: the pairs t ± u
/// combine into the smooth integrand (f(t+u) − f(t−u))/u, and the rest of
/// the interval is regular.
pub fn excision_pv<F: Fn(f64) -> Complex64>(f: &F, t: f64, t_max: f64) -> Result<Complex64> {
    let a = t.min(t_max - t);
    let pair = |u: f64| if u == 0.0 { Complex64::new(0.0, 0.0) } else { (f(t + u) - f(t - u)) / u };
    let mut v = quad::adaptive(pair, 0.0, a, 1e-14, 1e-13)?;
    let g = |s: f64| f(s) / (s - t);
    if t + a < t_max {
        v += quad::adaptive(g, t + a, t_max, 1e-14, 1e-13)?;
    }
    if t - a > 0.0 {
        v += quad::adaptive(g, 0.0, t - a, 1e-14, 1e-13)?;
    }
    Ok(v / (2.0 * std::f64::consts::PI * Complex64::i()))
}

fn inverse_checks() -> Vec<CheckResult> {
    let m = Module::Inverse;
    let step = Potential::step(1.0, 8.0);
    let round_trip = || -> Result<f64> {
        let g = PanelGrid::graded(6.0, 8, 16, 0.1, 2.0)?;
        let d = scattering::compute_scattering_data(&step, &g, None)?;
        let s = HalfAxisSolver::new(&d, HalfAxis::Direct)?;
        let xs: Vec<f64> = (0..13).map(|k| 0.25 * k as f64).collect();
        let f = recover_m(&s, &xs, &[])?;
        Ok(f.m_route_b.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max))
    };
    vec![
        check(m, "step_round_trip", 1e-3, round_trip()),
        check(m, "manufactured_poles", 1e-6, manufactured_pole_error(HalfAxis::Direct, 1.0)),
    ]
}

/// Pure-step solution G(λ) of the boundary value problem at ξ, per sector.
fn step_solution(kappa: f64, xi: f64, lam: Complex64) -> Complex64 {
    let t0 = scattering::step_row0(kappa);
    let i = Complex64::i();
    let ang = lam.arg().to_degrees().rem_euclid(360.0);
    let e2 = (i * lam * (1.0 - ZETA[2]) * xi).exp();
    let e1 = (i * lam * (1.0 - ZETA[1]) * xi).exp();
    let one = Complex64::new(1.0, 0.0);
    if (210.0..=330.0).contains(&ang) {
        one
    } else if !(30.0..=330.0).contains(&ang) {
        one - ZETA[2] * t0[1] / t0[0] * e2
    } else if ang <= 150.0 {
        one + t0[1].conj() / t0[0].conj() * e2 + t0[2].conj() / t0[0].conj() * e1
    } else {
        one - ZETA[1] * t0[2] / t0[0] * e1
    }
}

/// Inject three poles into the pure-step system with residues fixed by the
/// exact solution r(λ)G(λ), r = 1 + ρ/(λ³ − p₀³), and return the largest
/// residue error.
pub fn manufactured_pole_error(side: HalfAxis, xi: f64) -> Result<f64> {
    let step = Potential::step(1.0, 8.0);
    let g = PanelGrid::graded(16.0, 16, 16, 0.1, 2.0)?;
    let d = scattering::compute_scattering_data(&step, &g, None)?;
    let solver = HalfAxisSolver::new(&d, side)?;
    let kappa = solver.kappa;
    let i = Complex64::i();
    let p0 = Complex64::from_polar(1.5, 10f64.to_radians());
    let rho = Complex64::new(0.3, 0.2);
    let r = |l: Complex64| 1.0 + rho / (l.powi(3) - p0.powi(3));
    let mut poles = Vec::new();
    let mut expected = Vec::new();
    for (pj, qa) in [(p0, 240.0), (p0 * ZETA[1], 270.0), (p0 * ZETA[2], 300.0)] {
        let qj = Complex64::from_polar(1.0, f64::to_radians(qa));
        let res = rho * step_solution(kappa, xi, pj) / (3.0 * pj * pj);
        expected.push(res);
        let c = res * (-i * (pj - qj) * xi).exp() / (r(qj) * step_solution(kappa, xi, qj));
        poles.push(Pole { p: pj, q: qj, c });
    }
    let sol = solver.solve_at(xi, &poles, r(Complex64::new(0.0, 0.0)))?;
    Ok(sol.residues.iter().zip(&expected).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
}

fn cli_checks() -> Vec<CheckResult> {
    let m = Module::Cli;
    let doc_round_trip = || -> Result<f64> {
        let g = PanelGrid::graded(4.0, 4, 8, 0.1, 2.0)?;
        let d = scattering::compute_scattering_data(&bump_potential(0.05), &g, None)?;
        let doc = io::ScatteringDocument::new(d, Vec::new());
        let back = io::parse_scattering(&io::to_json(&doc)?)?;
        Ok(if back == doc { 0.0 } else { 1.0 })
    };
    let csv_round_trip = || -> Result<f64> {
        let rows: Vec<io::ReconstructionRow> = (0..5)
            .map(|k| io::ReconstructionRow {
                x: k as f64 / 7.0,
                m_route_a: (k as f64).sqrt(),
                m_route_b: 1.0 / (k as f64 + 3.0),
                discrepancy: 1e-9 * k as f64,
                residual: 1e-13,
                condition: 1e6,
                flag: io::RowFlag::Ok,
            })
            .collect();
        Ok(if io::read_csv(&io::write_csv(&rows))? == rows { 0.0 } else { 1.0 })
    };
    vec![check(m, "scattering_json_round_trip", 0.0, doc_round_trip()), check(m, "csv_round_trip", 0.0, csv_round_trip())]
}

pub fn run_suite(opts: &SuiteOptions) -> SuiteReport {
    let wanted = |m: Module| opts.only.is_none_or(|o| o == m);
    let mut checks = Vec::new();
    for m in Module::ALL {
        if !wanted(m) {
            continue;
        }
        checks.extend(match m {
            Module::Geometry => geometry_checks(),
            Module::Trig3 => trig3_checks(),
            Module::Potential => potential_checks(),
            Module::Jost => jost_checks(),
            Module::Scattering => scattering_checks(opts.mutate_j),
            Module::Cauchy => cauchy_checks(),
            Module::Inverse => inverse_checks(),
            Module::Cli => cli_checks(),
        });
    }
    let passed = checks.iter().all(|c| c.passed);
    SuiteReport { schema_version: io::SCHEMA_VERSION, checks, passed }
}
