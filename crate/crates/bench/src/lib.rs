//! Shared fixtures for the kernel benchmarks.

use cubic_string::quad::PanelGrid;
use cubic_string::scattering::{compute_scattering_data, ScatteringData};
use cubic_string::verify::bump_potential;
use cubic_string::Potential;

/// κ = 2 step with a bump of amplitude 0.3 at x = 1.
pub fn bump() -> Potential {
    bump_potential(0.3)
}

/// Pure-step data on `panels` Gauss–Legendre panels of order 16 over [0, 6].
pub fn step_data(panels: usize) -> ScatteringData {
    let grid = PanelGrid::graded(6.0, panels, 16, 0.1, 2.0).expect("valid grid");
    compute_scattering_data(&Potential::step(1.0, 8.0), &grid, None).expect("step data")
}
