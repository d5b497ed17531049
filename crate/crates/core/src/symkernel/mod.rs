//! Exact symbolic kernel: Gaussian-rational coefficients, canonical sums of
//! monomials with rational exponents, calculus (differentiation, substitution,
//! quadrature), and reduction modulo defining ODEs.

mod calculus;
mod coeff;
mod expr;
mod reduce;
mod serialize;

pub use calculus::{integrate, Bindings, QuadratureError};
pub use coeff::{Coeff, Rat};
pub use expr::{exp_int, normalize_term, Atom, Coord, Exp, Expr, Monomial};
pub use reduce::{
    reduce_mod, reduces_to_zero, Frac, ReduceEngine, ReduceError, RewriteRule,
};
