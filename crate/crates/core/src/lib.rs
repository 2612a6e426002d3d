//! Galerkin finite elements of arbitrary order on Bakhvalov-type meshes for
//! singularly perturbed convection-diffusion problems
//!
//! ```text
//! -eps u'' - b(x) u' + c(x) u = f(x)  in (0, 1),   u(0) = u(1) = 0,
//! ```
//!
//! with `b >= beta > 1` and `c + b'/2 >= gamma > 0`. The solution has a
//! boundary layer of width `O(eps ln(1/eps))` at `x = 0`.
//!
//! * [`mesh`] generates the layer-adapted meshes and checks their step sizes.
//! * [`problem`] holds the problem data and the manufactured test problem.
//! * [`assembly`], [`banded`], [`basis`], [`quadrature`] and [`space`] form the
//!   finite element core.
//! * [`interpolants`] builds `u^I` and the layer-corrected interpolant.
//! * [`norms`] measures errors in the max, `L^2` and energy norms.
//! * [`study`] runs convergence sweeps and renders result tables.

pub mod assembly;
pub mod banded;
pub mod basis;
pub mod config;
pub mod error;
pub mod interpolants;
pub mod mesh;
pub mod norms;
pub mod problem;
pub mod quadrature;
pub mod space;
pub mod study;

pub use assembly::{assemble, galerkin_solve};
pub use error::{Error, Result};
pub use mesh::{check_lemma2, generate, Mesh1D, MeshFamily, MeshSpec};
pub use norms::{error_norms, ErrorTriple};
pub use problem::{paper_test_problem, ProblemKind, TwoPointBVP};
pub use space::PiecewisePolynomial;
pub use study::{run_study, StudyConfig, StudyResult};
