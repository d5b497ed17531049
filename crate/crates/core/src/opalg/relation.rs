//! The four bracket relations an algebraic Hamiltonian pair can satisfy, and
//! residual checks for both mechanics.

use super::{DiffOp, PhasePoly};
use crate::symkernel::Expr;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum RelationKind {
    /// `[H, K] = 0`.
    Abelian,
    /// `[H, K] = alpha * 1`.
    Heisenberg,
    /// `[H, K] = alpha * H`.
    Conformal,
    /// `[H, K] = -alpha * K` (classically `{H, K} = -i alpha K`).
    LadderLower,
    /// `[H, K] = +alpha * K` (classically `{H, K} = +i alpha K`).
    LadderRaise,
}

/// A claimed bracket relation with its structure constant.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct AlgebraRelation {
    pub kind: RelationKind,
    pub alpha: Expr,
}

impl AlgebraRelation {
    pub fn new(kind: RelationKind, alpha: Expr) -> AlgebraRelation {
        assert!(
            kind == RelationKind::Abelian || !alpha.is_zero(),
            "non-Abelian relation needs a nonzero structure constant"
        );
        AlgebraRelation { kind, alpha }
    }

    pub fn abelian() -> AlgebraRelation {
        AlgebraRelation { kind: RelationKind::Abelian, alpha: Expr::zero() }
    }
}

/// `[H, K]` minus the claimed right-hand side; zero iff the relation holds.
pub fn check_relation_quantum(h: &DiffOp, k: &DiffOp, rel: &AlgebraRelation) -> DiffOp {
    let bracket = h.commutator(k);
    let rhs = match rel.kind {
        RelationKind::Abelian => DiffOp::zero(),
        RelationKind::Heisenberg => DiffOp::multiplication(rel.alpha.clone()),
        RelationKind::Conformal => h.scale(&rel.alpha),
        RelationKind::LadderLower => k.scale(&rel.alpha).neg(),
        RelationKind::LadderRaise => k.scale(&rel.alpha),
    };
    bracket.sub(&rhs)
}

/// `{H, K}` minus the claimed right-hand side. The ladder relations carry the
/// extra factor of `i` of the classical convention: `{H, K±} = ±i alpha K±`.
pub fn check_relation_classical(
    h: &PhasePoly,
    k: &PhasePoly,
    rel: &AlgebraRelation,
) -> PhasePoly {
    let bracket = h.poisson(k);
    let rhs = match rel.kind {
        RelationKind::Abelian => PhasePoly::zero(),
        RelationKind::Heisenberg => PhasePoly::constant(rel.alpha.clone()),
        RelationKind::Conformal => h.scale(&rel.alpha),
        RelationKind::LadderLower => k.scale(&Expr::imag().mul(&rel.alpha)).neg(),
        RelationKind::LadderRaise => k.scale(&Expr::imag().mul(&rel.alpha)),
    };
    bracket.sub(&rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::Coeff;

    #[test]
    fn free_momentum_is_abelian() {
        let h = DiffOp::hamiltonian(&Expr::zero());
        let r = check_relation_quantum(&h, &DiffOp::momentum(), &AlgebraRelation::abelian());
        assert!(r.is_zero());
    }

    #[test]
    fn harmonic_ladder_lowering() {
        // V = alpha1^2 x^2/(2 hbar^2), K = p - i alpha1 x/hbar: [H,K] = -alpha1 K.
        let a = Expr::param("alpha1");
        let hb = Expr::param("hbar");
        let v = a
            .pow_int(2)
            .mul(&Expr::x().pow_int(2))
            .div(&hb.pow_int(2).scale(&Coeff::from_int(2)));
        let h = DiffOp::hamiltonian(&v);
        let k = DiffOp::momentum().sub(&DiffOp::multiplication(
            Expr::imag().mul(&a).mul(&Expr::x()).div(&hb),
        ));
        let rel = AlgebraRelation::new(RelationKind::LadderLower, a.clone());
        assert!(check_relation_quantum(&h, &k, &rel).is_zero());
        // and the adjoint raises
        let rel_up = AlgebraRelation::new(RelationKind::LadderRaise, a);
        assert!(check_relation_quantum(&h, &k.adjoint(), &rel_up).is_zero());
    }

    #[test]
    fn inverse_square_is_conformal() {
        // V = beta/x^2, K = p^2 + (i alpha1/(2 hbar)) x p + 2 beta/x^2:
        // [H, K] = alpha1 H.
        let a = Expr::param("alpha1");
        let hb = Expr::param("hbar");
        let beta = Expr::param("beta");
        let v = beta.div(&Expr::x().pow_int(2));
        let h = DiffOp::hamiltonian(&v);
        let f1 = Expr::imag().mul(&a).mul(&Expr::x()).div(&hb.scale(&Coeff::from_int(2)));
        let k = DiffOp::from_momentum(&[
            v.scale(&Coeff::from_int(2)),
            f1,
            Expr::one(),
        ]);
        let rel = AlgebraRelation::new(RelationKind::Conformal, a);
        assert!(check_relation_quantum(&h, &k, &rel).is_zero());
    }

    #[test]
    fn classical_ladder_relation() {
        // K+ = p - i alpha1 x raises; its conjugate lowers.
        let a = Expr::param("alpha1");
        let v = a.pow_int(2).mul(&Expr::x().pow_int(2)).scale(&Coeff::from_ratio(1, 2));
        let h = PhasePoly::hamiltonian(&v);
        let k = PhasePoly::momentum()
            .sub(&PhasePoly::constant(Expr::imag().mul(&a).mul(&Expr::x())));
        let up = AlgebraRelation::new(RelationKind::LadderRaise, a.clone());
        assert!(check_relation_classical(&h, &k, &up).is_zero());
        let down = AlgebraRelation::new(RelationKind::LadderLower, a);
        assert!(check_relation_classical(&h, &k.conjugate(), &down).is_zero());
    }
}
