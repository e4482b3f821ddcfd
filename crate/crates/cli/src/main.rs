//! Command-line front end: forward map, inversion, invariant suite and self test.
//!
//! Exit codes: 0 success, 1 usage or schema error, 2 forward failure,
//! 3 inverse failure.

use clap::{Parser, Subcommand};
use cubic_string::inverse::{recover_m, HalfAxis, HalfAxisSolver, ReconstructedField};
use cubic_string::io::{self, ReconstructionRow, ScatteringDocument};
use cubic_string::quad::PanelGrid;
use cubic_string::scattering::{compute_scattering_data, conservation_report, ConservationReport, ScatteringData};
use cubic_string::verify::{run_suite, Module, SuiteOptions};
use cubic_string::{Complex64, Error, Potential};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_USAGE: u8 = 1;
const EXIT_FORWARD: u8 = 2;
const EXIT_INVERSE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "cubic-string", version, about = "Forward and inverse scattering for i y''' = m(x) λ³ y")]
struct Cli {
    /// Worker threads for the numerical kernels (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample the scattering data of a coefficient on a τ grid.
    Forward {
        /// Coefficient description (JSON).
        #[arg(long)]
        potential: PathBuf,
        /// Largest |λ| sampled on each ray.
        #[arg(long)]
        tau_max: f64,
        /// Total number of τ nodes (a multiple of --tau-order).
        #[arg(long)]
        tau_nodes: usize,
        /// Gauss–Legendre nodes per panel.
        #[arg(long, default_value_t = 16)]
        tau_order: usize,
        /// Also search for bound states inside this radius.
        #[arg(long)]
        bound_radius: Option<f64>,
        /// Scattering data output (JSON).
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover m(x) on an x grid from scattering data.
    Invert {
        /// Scattering data written by `forward`.
        #[arg(long)]
        data: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        x_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        x_max: f64,
        /// Number of equispaced x nodes, endpoints included.
        #[arg(long)]
        x_nodes: usize,
        /// Reconstruction output (CSV).
        #[arg(long)]
        out: PathBuf,
        /// Per-side solver diagnostics as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the invariant suite.
    Verify {
        #[arg(long)]
        only: Option<Module>,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Corrupt J before the J-unitarity check (the suite must then fail).
        #[arg(long, hide = true)]
        mutate_j: bool,
    },
    /// Pure step κ = 2: forward, invert both half-axes, compare with m.
    Selftest,
}

struct Failure {
    code: u8,
    error: Error,
}

impl Failure {
    fn usage(error: Error) -> Self {
        Self { code: EXIT_USAGE, error }
    }
}

/// Input, schema and grid errors are usage errors; the rest keep `code`.
fn classify(code: u8) -> impl Fn(Error) -> Failure {
    move |error| match error {
        Error::Parse { .. } | Error::Schema(_) | Error::Io(_) | Error::GridTooSmall(_) => Failure::usage(error),
        other => Failure { code, error: other },
    }
}

fn tau_grid(tau_max: f64, nodes: usize, order: usize) -> Result<PanelGrid, Error> {
    if nodes < 2 {
        return Err(Error::GridTooSmall(format!("{nodes} tau node(s)")));
    }
    if order == 0 || nodes % order != 0 {
        return Err(Error::Schema(format!("--tau-nodes {nodes} is not a multiple of --tau-order {order}")));
    }
    PanelGrid::graded(tau_max, nodes / order, order, 0.1, 2.0).map_err(|e| Error::Schema(e.to_string()))
}

/// Conservation residuals at a few points on the data rays.
fn sample_conservation(p: &Potential, tau_max: f64) -> Vec<ConservationReport> {
    let mut out = Vec::new();
    for deg in [210.0_f64, 270.0, 330.0] {
        for frac in [0.1, 0.4] {
            if let Ok(r) = conservation_report(p, Complex64::from_polar(frac * tau_max, deg.to_radians())) {
                out.push(r);
            }
        }
    }
    out
}

fn forward(
    potential: &Path,
    tau_max: f64,
    tau_nodes: usize,
    tau_order: usize,
    bound_radius: Option<f64>,
    out: &Path,
) -> Result<(), Failure> {
    let p = io::parse_potential(&io::read_text(potential).map_err(Failure::usage)?).map_err(Failure::usage)?;
    let grid = tau_grid(tau_max, tau_nodes, tau_order).map_err(Failure::usage)?;
    let data = compute_scattering_data(&p, &grid, bound_radius).map_err(classify(EXIT_FORWARD))?;
    let laws = sample_conservation(&p, tau_max);
    println!("forward: {} tau nodes on [0, {tau_max}], kappa = {:.6}", grid.len(), data.kappa);
    println!("{:>28} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}", "lambda", "det", "J-unit", "TtT-I", "energy", "unit(J)", "recip(J)");
    for r in &laws {
        println!(
            "{:>28} {:>10.2e} {:>10.2e} {:>10.2e} {:>10.2e} {:>10.2e} {:>10.2e}",
            format!("{:.4}", r.lambda),
            r.det_rel,
            r.j_unitarity,
            r.dual_product,
            r.energetic_balance,
            r.unitarity_j,
            r.reciprocity_j
        );
    }
    println!(
        "swapped-root scalar forms (max): unitarity {:.2e}, dual unitarity {:.2e}, reciprocity {:.2e}",
        laws.iter().map(|r| r.unitarity_swapped).fold(0.0, f64::max),
        laws.iter().map(|r| r.dual_unitarity_swapped).fold(0.0, f64::max),
        laws.iter().map(|r| r.reciprocity_swapped).fold(0.0, f64::max)
    );
    let doc = ScatteringDocument::new(data, laws);
    io::write_text(out, &io::to_json(&doc).map_err(Failure::usage)?).map_err(Failure::usage)?;
    Ok(())
}

fn invert_side(data: &ScatteringData, side: HalfAxis, xs: &[f64]) -> Result<ReconstructedField, Error> {
    let solver = HalfAxisSolver::new(data, side)?;
    recover_m(&solver, xs, &[])
}

fn invert(
    data: &Path,
    x_min: f64,
    x_max: f64,
    x_nodes: usize,
    out: &Path,
    report: &Option<PathBuf>,
) -> Result<(), Failure> {
    let doc = io::parse_scattering(&io::read_text(data).map_err(Failure::usage)?).map_err(Failure::usage)?;
    if x_nodes == 0 || !(x_max >= x_min) {
        return Err(Failure::usage(Error::Schema("need x_min <= x_max and at least one x node".into())));
    }
    let d = &doc.data;
    if d.bound_states.mu.len() + d.bound_states.nu.len() > 0 {
        eprintln!("warning: bound states are listed but their norming constants are not part of the data; solving without poles");
    }
    let xs: Vec<f64> = (0..x_nodes)
        .map(|k| if x_nodes == 1 { x_min } else { x_min + (x_max - x_min) * k as f64 / (x_nodes - 1) as f64 })
        .collect();
    let dual_x: Vec<f64> = xs.iter().copied().filter(|&x| x < 0.0).collect();
    let direct_x: Vec<f64> = xs.iter().copied().filter(|&x| x >= 0.0).collect();
    let mut rows: Vec<ReconstructionRow> = Vec::with_capacity(xs.len());
    let mut fields = Vec::new();
    let mut failure = None;
    for (side, part) in [(HalfAxis::Dual, &dual_x), (HalfAxis::Direct, &direct_x)] {
        if part.is_empty() {
            continue;
        }
        match invert_side(d, side, part) {
            Ok(f) => {
                let mut r = io::rows_from_field(&f);
                if side == HalfAxis::Dual {
                    r.reverse();
                }
                rows.extend(r);
                fields.push(f);
            }
            Err(e) => {
                eprintln!("inverse failure on the {side:?} half-axis: {e}");
                rows.extend(part.iter().map(|&x| ReconstructionRow::failed(x)));
                failure.get_or_insert(e);
            }
        }
    }
    rows.sort_by(|a, b| a.x.total_cmp(&b.x));
    io::write_text(out, &io::write_csv(&rows)).map_err(Failure::usage)?;
    for f in &fields {
        println!(
            "{:?}: {} solves, max condition {:.2e}, max residual {:.2e}",
            f.side,
            f.xi.len(),
            f.max_condition,
            f.max_residual
        );
    }
    println!("{:>12} {:>14} {:>14} {:>10} {:>10} {:>10}", "x", "m (route A)", "m (route B)", "discrep", "residual", "cond");
    for r in &rows {
        println!(
            "{:>12.6} {:>14.8} {:>14.8} {:>10.2e} {:>10.2e} {:>10.2e} {}",
            r.x,
            r.m_route_a,
            r.m_route_b,
            r.discrepancy,
            r.residual,
            r.condition,
            r.flag.as_str()
        );
    }
    if let Some(path) = report {
        io::write_text(path, &io::to_json(&fields).map_err(Failure::usage)?).map_err(Failure::usage)?;
    }
    match failure {
        Some(e) => Err(Failure { code: EXIT_INVERSE, error: e }),
        None => Ok(()),
    }
}

fn verify(only: Option<Module>, report: &Option<PathBuf>, mutate_j: bool) -> Result<bool, Failure> {
    let r = run_suite(&SuiteOptions { only, mutate_j });
    for c in &r.checks {
        println!(
            "{} {:<11} {:<28} {:>10.2e} (tol {:.0e}){}",
            if c.passed { "PASS" } else { "FAIL" },
            c.module.name(),
            c.name,
            c.measured,
            c.tolerance,
            c.error.as_deref().map(|e| format!(" error: {e}")).unwrap_or_default()
        );
    }
    if let Some(path) = report {
        io::write_text(path, &io::to_json(&r).map_err(Failure::usage)?).map_err(Failure::usage)?;
    }
    Ok(r.passed)
}

fn selftest() -> Result<bool, Failure> {
    let p = Potential::step(1.0, 8.0);
    let grid = tau_grid(6.0, 128, 16).map_err(Failure::usage)?;
    let data = compute_scattering_data(&p, &grid, None).map_err(classify(EXIT_FORWARD))?;
    let mut ok = true;
    for (side, sign, m) in [(HalfAxis::Direct, 1.0, p.m_plus), (HalfAxis::Dual, -1.0, p.m_minus)] {
        let xs: Vec<f64> = (0..31).map(|k| sign * 0.1 * k as f64).collect();
        let f = invert_side(&data, side, &xs).map_err(classify(EXIT_INVERSE))?;
        let err = f.m_route_b.iter().map(|v| (v - m).abs() / m).fold(0.0, f64::max);
        let pass = err <= 1e-3;
        ok &= pass;
        println!("{} {side:?} half-axis: max relative error {err:.2e} (tol 1e-3), max condition {:.2e}", if pass { "PASS" } else { "FAIL" }, f.max_condition);
    }
    Ok(ok)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match &cli.command {
        Command::Forward { potential, tau_max, tau_nodes, tau_order, bound_radius, out } => {
            forward(potential, *tau_max, *tau_nodes, *tau_order, *bound_radius, out).map(|_| true)
        }
        Command::Invert { data, x_min, x_max, x_nodes, out, report } => {
            invert(data, *x_min, *x_max, *x_nodes, out, report).map(|_| true)
        }
        Command::Verify { only, report, mutate_j } => verify(*only, report, *mutate_j),
        Command::Selftest => selftest(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    cubic_string::linalg::use_sequential_kernels();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_USAGE),
        Err(f) => {
            eprintln!("error: {}", f.error);
            ExitCode::from(f.code)
        }
    }
}
