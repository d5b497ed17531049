//! Determining equations for algebraic Hamiltonian pairs: given the
//! mechanics, the order M of the companion operator K, and the bracket
//! relation its pair with H = p^2/2 + V should satisfy, produce the equations
//! for the coefficient functions f_0..f_M and the potential, then solve them
//! by descending recursion and quadrature.

mod generate;
mod ladder;
mod solve;

pub use generate::{generate, generic_bracket_coeffs, relation_rhs};
pub use ladder::{ladder_product, ladder_product_classical};
pub use solve::{solve, SolveOptions};

use crate::opalg::AlgebraRelation;
use crate::symkernel::Expr;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Mechanics {
    Quantum,
    Classical,
}

/// The bracket of H with a generic K of order `m`, equated to the right-hand
/// side demanded by `relation`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeterminingSystem {
    pub mechanics: Mechanics,
    pub m: usize,
    pub relation: AlgebraRelation,
    /// Bracket coefficients Z_0..Z_{M+1} in the unknowns f_0..f_M and V.
    /// Quantum: coefficients of D^l in [H,K]; classical: of p^l in {H,K}.
    pub z: Vec<Expr>,
    /// Demanded right-hand side per power, same indexing.
    pub rhs: Vec<Expr>,
    /// `z[l] - rhs[l]`, the equations to solve.
    pub constraints: Vec<Expr>,
}

/// What the surviving level-0 equation says about the potential.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub enum PotentialSpec {
    /// Equation vanished identically (or after a branch choice): no
    /// constraint on V beyond the solved coefficients.
    Unconstrained,
    /// Explicit potential.
    ClosedForm { v: Expr },
    /// Derivative-free polynomial relation between V and x.
    Algebraic { equation: Expr },
    /// Nonlinear ODE for the named unknown ("V", or its antiderivative "u").
    Ode {
        unknown: String,
        order: u32,
        equation: Expr,
    },
}

/// One solved branch: the coefficient functions and the potential condition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolvedPair {
    pub mechanics: Mechanics,
    pub m: usize,
    pub relation: AlgebraRelation,
    /// f_0..f_M with f_M = 1; momentum-form coefficients in both mechanics.
    pub f: Vec<Expr>,
    pub potential: PotentialSpec,
    /// Substitutions applied to reach this branch (e.g. "beta = 0").
    pub branch: Vec<String>,
}

#[derive(Debug, Error)]
pub enum DetSysError {
    #[error("conformal relation requires order M >= 2")]
    ConformalOrderTooLow,
    #[error("order must be between 1 and {max}, got {got}")]
    OrderOutOfRange { got: usize, max: usize },
    #[error("level-{level} equation is not linear in f_{unknown}': {equation}")]
    NotLinear {
        level: usize,
        unknown: usize,
        equation: String,
    },
    #[error("coefficient f_{unknown} is not closed under quadrature: {detail}")]
    NotClosedUnderQuadrature { unknown: usize, detail: String },
    #[error("product is not reducible to a polynomial in H: residual {0}")]
    NotReducible(String),
}
