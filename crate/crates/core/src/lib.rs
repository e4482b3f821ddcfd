//! Forward and inverse scattering for the cubic string `i y''' = m(x) λ³ y`
//! with a step-like coefficient `m`.
//!
//! The crate is organised by stage:
//!
//! * [`geometry`] and [`trig3`]: cube roots of unity, sectors, and the
//!   generalized trigonometric functions of `y''' = y`.
//! * [`potential`]: the coefficient model and its integral profiles.
//! * [`jost`]: Jost solutions from both infinities (Neumann series and ODE).
//! * [`scattering`]: transition matrix, coefficients, conservation laws,
//!   bound states and the sampled scattering data.
//! * [`cauchy`]: Cauchy integrals on rays and principal-value quadrature.
//! * [`inverse`]: the four-ray boundary value problem and recovery of `m`.
//! * [`io`] and [`verify`]: file formats and the invariant suite.

pub mod cauchy;
pub mod error;
pub mod geometry;
pub mod inverse;
pub mod io;
pub mod jost;
pub mod linalg;
pub mod ode;
pub mod potential;
pub mod quad;
pub mod scattering;
pub mod special;
pub mod trig3;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{zeta, SectorId};
pub use jost::{Family, JostEval, NeumannDiagnostics};
pub use num_complex::Complex64;
pub use potential::{Perturbation, Potential};
pub use scattering::{ScatteringData, TransitionMatrix};
