//! Differential operators and phase-space polynomials in one space variable,
//! with the brackets that define the four algebraic pair types.
//!
//! Quantum objects are [`DiffOp`]s stored in D-normal order (all derivatives
//! to the right); the momentum form `sum f_l p^l` with `p = -i hbar D` is a
//! constructor/view. Classical objects are [`PhasePoly`]s, polynomials in the
//! momentum with x-dependent coefficients, bracketed by the Poisson bracket.

mod diffop;
mod phasepoly;
mod relation;

pub use diffop::DiffOp;
pub use phasepoly::PhasePoly;
pub use relation::{
    check_relation_classical, check_relation_quantum, AlgebraRelation, RelationKind,
};
