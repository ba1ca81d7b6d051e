//! Heat equation with singular, spatially varying conductivity.
//!
//! Distributional conductivities `h` (Dirac masses, squared Dirac masses,
//! jumps over a smooth positive background) are regularized by a Friedrichs
//! mollifier into nets `h_eps`; the regularized divergence-form problems
//!
//! ```text
//! u_t - d/dx (h_eps(x) du/dx) = 0,   u(0) = u0 * psi_eps
//! ```
//!
//! are solved on a uniform grid with implicit time stepping, and the
//! resulting nets are checked for moderate growth in `1/eps`, energy
//! dissipation, stability under negligible perturbations and convergence to
//! the classical solution when `h` is regular.
//!
//! The grid, mollifier, coefficient, solver and energy code is generic over
//! [`Scalar`] (`f32` or `f64`). The experiment drivers and the CLI run in
//! `f64`; the aliases below name the `f64` instantiations.

// Validation is written as `!(x > 0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coefficients;
pub mod energy;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod grid;
pub mod mollifier;
pub mod scalar;
pub mod solver;
pub mod tridiag;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Grid = grid::Grid<f64>;
pub type GridField = grid::GridField<f64>;
pub type DiffusionOperator = grid::DiffusionOperator<f64>;
pub type MollifierKernel = mollifier::MollifierKernel<f64>;
pub type ScaledKernel = mollifier::ScaledKernel<f64>;
pub type SingularCoefficient = coefficients::SingularCoefficient<f64>;
pub type SingularAtom = coefficients::SingularAtom<f64>;
pub type Background = coefficients::Background<f64>;
pub type SolveConfig = solver::SolveConfig<f64>;
pub type Trajectory = solver::Trajectory<f64>;
pub type EnergyReport = energy::EnergyReport<f64>;

pub type Grid32 = grid::Grid<f32>;
pub type GridField32 = grid::GridField<f32>;
pub type DiffusionOperator32 = grid::DiffusionOperator<f32>;
pub type Trajectory32 = solver::Trajectory<f32>;

pub use grid::{Boundary, FaceAverage};
pub use solver::Scheme;
