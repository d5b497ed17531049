//! Workbench for one-dimensional algebraic Hamiltonian pairs and the
//! two-dimensional superintegrable systems assembled from them.
//!
//! Layer map:
//! - [`symkernel`]: exact symbolic expressions, calculus, reduction mod ODEs.
//! - [`opalg`]: ordinary differential operators, phase-space polynomials,
//!   commutators, Poisson brackets, bracket-relation checks.
//! - [`detsys`]: determining equations for the four bracket types and their
//!   closed-form solution by descent and quadrature.
//! - [`painleve`]: singular-point analysis for the nonlinear potential ODEs.
//! - [`catalog`]: the classified pair inventory with verification.
//! - [`composer`]: two-dimensional composition and polynomial algebras.
//! - [`numeric`]: high-order ODE integration and residual checks.

pub mod catalog;
pub mod cli;
pub mod composer;
pub mod detsys;
pub mod numeric;
pub mod opalg;
pub mod painleve;
pub mod symkernel;

/// Command-line entry point.
pub fn cli_main() {
    std::process::exit(cli::run(std::env::args()));
}
